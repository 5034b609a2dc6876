// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ppmetrics/model.hpp"

// Shared fixtures: the worked CloverTree example (three portable
// implementations on three GPUs, later joined by SYCL and by CUDA/HIP
// references at 10 s).

namespace fixtures {

using namespace ppmetrics;

inline Measurement runtime(const std::string& impl, const std::string& platform, double seconds,
                           const std::string& app = "CloverTree",
                           const std::string& problem = "default") {
    Measurement m;
    m.app = app;
    m.problem = problem;
    m.implementation = impl;
    m.platform = platform;
    m.kind = MeasurementKind::runtime_seconds;
    m.value = seconds;
    m.meta = {{"compiler", "cc"}, {"compiler_flags", "-O3"}, {"input_size", "4096x4096"}};
    return m;
}

inline std::vector<std::string> gpu_set() { return {"A100", "P100", "MI250"}; }

inline std::vector<Platform> gpu_platforms() {
    return {
        {"A100", "NVIDIA", ArchClass::gpu, {}, {}, {}},
        {"P100", "NVIDIA", ArchClass::gpu, {}, {}, {}},
        {"MI250", "AMD", ArchClass::gpu, {}, {}, {}},
    };
}

inline std::vector<Measurement> table1() {
    return {
        runtime("OpenACC", "A100", 30), runtime("OpenACC", "P100", 50), runtime("OpenACC", "MI250", 60),
        runtime("OpenMP", "A100", 40),  runtime("OpenMP", "P100", 25),  runtime("OpenMP", "MI250", 50),
        runtime("Kokkos", "A100", 60),  runtime("Kokkos", "P100", 75),  runtime("Kokkos", "MI250", 40),
    };
}

inline std::vector<Measurement> sycl_rows() {
    return {runtime("SYCL", "A100", 50), runtime("SYCL", "P100", 40), runtime("SYCL", "MI250", 30)};
}

inline std::vector<Measurement> reference_rows() {
    return {runtime("CUDA", "A100", 10), runtime("CUDA", "P100", 10), runtime("HIP", "MI250", 10)};
}

inline std::vector<Measurement> table2() {
    auto rows = table1();
    for (const auto& m : sycl_rows()) rows.push_back(m);
    return rows;
}

inline std::vector<Measurement> table3() {
    auto rows = table2();
    for (const auto& m : reference_rows()) rows.push_back(m);
    return rows;
}

inline std::vector<Measurement> table3_before_sycl() {
    auto rows = table1();
    for (const auto& m : reference_rows()) rows.push_back(m);
    return rows;
}

inline BaselinePolicy fixed_reference_policy() {
    BaselinePolicy p;
    p.variant = PolicyVariant::fixed_reference;
    p.references = {{"A100", "CUDA"}, {"P100", "CUDA"}, {"MI250", "HIP"}};
    return p;
}

inline StudyDefinition clovertree_study(PolicyVariant variant,
                                        Metric metric = Metric::arithmetic_mean) {
    StudyDefinition study;
    study.app = "CloverTree";
    study.problem = "default";
    study.platforms = gpu_set();
    study.metric = metric;
    if (variant == PolicyVariant::fixed_reference) {
        study.policy = fixed_reference_policy();
    } else {
        study.policy.variant = variant;
    }
    return study;
}

inline const PortabilityScore* score_of(const std::vector<PortabilityScore>& scores,
                                        const std::string& impl) {
    for (const auto& s : scores)
        if (s.implementation == impl) return &s;
    return nullptr;
}

inline double efficiency_of(const std::vector<PortabilityScore>& scores, const std::string& impl,
                            const std::string& platform) {
    const PortabilityScore* s = score_of(scores, impl);
    if (!s) return 0.0;
    auto it = s->per_platform.find(platform);
    return it == s->per_platform.end() ? 0.0 : it->second.e;
}

} // namespace fixtures
