// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppmetrics/model.hpp"

namespace ppmetrics {

// ---------------------------------------------------------------------------
// Baseline resolution and efficiency computation. Everything here is a pure
// function of its arguments; safe to call concurrently.
// ---------------------------------------------------------------------------

enum class BaselineSourceKind {
    best_in_study,
    reference_implementation,
    repository_best,
    theoretical_peak,
    roofline_peak,
};

struct BaselineValue {
    double value = 0.0; // > 0, in study units
    BaselineSourceKind source = BaselineSourceKind::best_in_study;
    std::string source_id; // implementation id for measurement-backed baselines
    std::string platform;
};

inline std::string_view to_string(BaselineSourceKind v) {
    switch (v) {
        case BaselineSourceKind::best_in_study: return "best_in_study";
        case BaselineSourceKind::reference_implementation: return "reference_implementation";
        case BaselineSourceKind::repository_best: return "repository_best";
        case BaselineSourceKind::theoretical_peak: return "theoretical_peak";
        case BaselineSourceKind::roofline_peak: return "roofline_peak";
    }
    return "best_in_study";
}

inline BaselineDescriptor describe(const BaselineValue& b, PolicyVariant policy) {
    BaselineDescriptor d;
    d.policy = policy;
    d.value = b.value;
    switch (b.source) {
        case BaselineSourceKind::theoretical_peak:
        case BaselineSourceKind::roofline_peak:
            d.source = std::string(to_string(b.source));
            break;
        default:
            d.source = b.source_id;
            break;
    }
    return d;
}

// Better-than comparison in the direction implied by the measurement kind:
// lower runtime wins, higher throughput wins.
inline bool beats(const Measurement& a, const Measurement& b) {
    return is_runtime(a.kind) ? a.value < b.value : a.value > b.value;
}

// Deduplication rule: best value in the list, ties resolved to the
// earliest-ingested (list order is ingestion order).
inline const Measurement& best_measurement(std::span<const Measurement> candidates) {
    if (candidates.empty())
        throw Error(Error::Code::no_measurements, "no measurements to select a best value from");
    const Measurement* best = &candidates.front();
    for (const auto& m : candidates.subspan(1)) {
        if (m.kind != best->kind)
            throw Error(Error::Code::mixed_kinds,
                        "cannot compare measurements of different kinds");
        if (beats(m, *best)) best = &m;
    }
    return *best;
}

namespace detail {

inline std::optional<BaselineValue> best_on_platform(std::span<const Measurement> measurements,
                                                     const std::string& platform,
                                                     BaselineSourceKind source) {
    std::vector<Measurement> on_platform;
    for (const auto& m : measurements)
        if (m.platform == platform) on_platform.push_back(m);
    if (on_platform.empty()) return std::nullopt;
    const Measurement& best = best_measurement(on_platform);
    return BaselineValue{best.value, source, best.implementation, platform};
}

} // namespace detail

// Resolves the reference performance on one platform under a ratio policy.
// Both measurement lists must already be scoped to the study's (app, problem);
// `repository_measurements` is the wider corpus consulted by repository_best.
// Architectural variants are not served here: their baseline is a platform
// peak, see platform_peak() below.
inline BaselineValue resolve_baseline(const BaselinePolicy& policy, const std::string& platform,
                                      std::span<const Measurement> study_measurements,
                                      std::span<const Measurement> repository_measurements) {
    switch (policy.variant) {
        case PolicyVariant::study_local_best: {
            auto b = detail::best_on_platform(study_measurements, platform,
                                              BaselineSourceKind::best_in_study);
            if (!b)
                throw Error(Error::Code::no_baseline,
                            "no baseline available: no study measurements on platform " + platform);
            return *b;
        }
        case PolicyVariant::repository_best: {
            auto b = detail::best_on_platform(repository_measurements, platform,
                                              BaselineSourceKind::repository_best);
            if (!b)
                throw Error(Error::Code::no_baseline,
                            "no baseline available: repository holds no measurement on platform " +
                                platform);
            return *b;
        }
        case PolicyVariant::fixed_reference: {
            auto ref = policy.references.find(platform);
            if (ref == policy.references.end())
                throw Error(Error::Code::missing_reference,
                            "fixed_reference policy names no reference for platform " + platform);
            std::vector<Measurement> of_ref;
            for (const auto& m : study_measurements)
                if (m.platform == platform && m.implementation == ref->second)
                    of_ref.push_back(m);
            if (of_ref.empty())
                throw Error(Error::Code::missing_reference,
                            "missing reference measurement: " + ref->second + " on " + platform);
            const Measurement& best = best_measurement(of_ref);
            return {best.value, BaselineSourceKind::reference_implementation, best.implementation,
                    platform};
        }
        case PolicyVariant::architectural_theoretical:
        case PolicyVariant::architectural_roofline:
            throw Error(Error::Code::invalid_argument,
                        "architectural baselines come from platform peaks, not measurements");
    }
    throw Error(Error::Code::invalid_argument, "unhandled policy variant");
}

// e = achieved performance as a fraction of the baseline. Runtime kind
// divides baseline by achieved (lower is better); throughput kinds divide
// achieved by baseline. May exceed 1 only under fixed_reference; the audit
// module flags that, the engine does not clamp.
inline double application_efficiency(const Measurement& achieved, const BaselineValue& baseline) {
    if (achieved.platform != baseline.platform)
        throw Error(Error::Code::platform_mismatch,
                    "efficiency of " + achieved.implementation + " on " + achieved.platform +
                        " computed against a baseline on " + baseline.platform);
    if (achieved.value <= 0.0 || baseline.value <= 0.0)
        throw Error(Error::Code::invalid_argument, "nonpositive performance value");
    return is_runtime(achieved.kind) ? baseline.value / achieved.value
                                     : achieved.value / baseline.value;
}

// Achieved throughput as a fraction of a platform peak.
inline double architectural_efficiency(double achieved_gflops, double peak_gflops) {
    if (achieved_gflops <= 0.0)
        throw Error(Error::Code::invalid_argument, "achieved throughput must be positive");
    if (peak_gflops <= 0.0)
        throw Error(Error::Code::invalid_argument, "peak throughput must be positive");
    return achieved_gflops / peak_gflops;
}

// Attainable throughput bound: min(peak compute, AI x memory bandwidth).
inline double roofline_peak(double peak_compute_gflops, double peak_mem_bw_gbs,
                            double arithmetic_intensity) {
    if (peak_compute_gflops <= 0.0 || peak_mem_bw_gbs <= 0.0 || arithmetic_intensity <= 0.0)
        throw Error(Error::Code::invalid_argument, "roofline inputs must be positive");
    return std::min(peak_compute_gflops, arithmetic_intensity * peak_mem_bw_gbs);
}

// The peak an architectural policy measures against on a given platform.
// Theoretical uses peak_compute; roofline prefers the user-supplied
// attainable_peak and otherwise derives one from peak_compute / peak_mem_bw
// and the policy's arithmetic intensity.
inline BaselineValue platform_peak(const Platform& platform, const BaselinePolicy& policy) {
    if (policy.variant == PolicyVariant::architectural_theoretical) {
        if (!platform.peak_compute)
            throw Error(Error::Code::missing_peak,
                        "platform " + platform.id + " lacks peak_compute");
        return {*platform.peak_compute, BaselineSourceKind::theoretical_peak, "", platform.id};
    }
    if (policy.variant == PolicyVariant::architectural_roofline) {
        if (platform.attainable_peak)
            return {*platform.attainable_peak, BaselineSourceKind::roofline_peak, "", platform.id};
        if (platform.peak_compute && platform.peak_mem_bw && policy.arithmetic_intensity)
            return {roofline_peak(*platform.peak_compute, *platform.peak_mem_bw,
                                  *policy.arithmetic_intensity),
                    BaselineSourceKind::roofline_peak, "", platform.id};
        throw Error(Error::Code::missing_peak,
                    "platform " + platform.id +
                        " lacks attainable_peak (or peak_compute + peak_mem_bw with an arithmetic "
                        "intensity)");
    }
    throw Error(Error::Code::invalid_argument, "platform_peak called for a ratio policy");
}

} // namespace ppmetrics
