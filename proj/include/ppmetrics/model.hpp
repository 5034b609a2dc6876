// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ppmetrics {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    enum class Code {
        invalid_argument,    // bad value handed to an operation
        no_measurements,     // empty measurement scope
        missing_reference,   // fixed reference has no measurement on a platform
        no_baseline,         // no candidate baseline in the requested scope
        missing_peak,        // platform lacks the peak field an architectural policy needs
        mixed_kinds,         // runtime and throughput rows mixed in one study
        platform_mismatch,   // efficiency computed across different platforms
        validation_failed,   // study/measurement validation produced violations
        duplicate,           // duplicate record rejected by the store
        study_mismatch,      // snapshots scored under different study definitions
        out_of_range,        // sequence number outside the event log
        parse_error,         // malformed input (CSV, JSON, event log)
        io_error,            // filesystem failure
        state_error,         // operation not valid for the current store state
    };

    Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Code code() const noexcept { return code_; }

private:
    Code code_;
};

// ---------------------------------------------------------------------------
// Enums
// ---------------------------------------------------------------------------

enum class ArchClass { cpu, gpu, other };

enum class MeasurementKind {
    runtime_seconds,    // lower is better
    throughput_gflops,  // higher is better
    throughput_custom,  // higher is better, units opaque to the engine
};

enum class PolicyVariant {
    study_local_best,          // best implementation within the current study
    fixed_reference,           // designated low-level implementation per platform
    repository_best,           // best implementation known to the repository
    architectural_theoretical, // platform theoretical peak throughput
    architectural_roofline,    // platform roofline (attainable) peak throughput
};

enum class Metric { arithmetic_mean, harmonic_mean };

enum class PortabilityClass { portable_framework, low_level_nonportable };

// Enum <-> string. Parsing throws Error::Code::invalid_argument on unknown
// names so API/CLI inputs fail loudly (e.g. policy=bogus -> 400).
std::string_view to_string(ArchClass v);
std::string_view to_string(MeasurementKind v);
std::string_view to_string(PolicyVariant v);
std::string_view to_string(Metric v);
std::string_view to_string(PortabilityClass v);

ArchClass arch_class_from_string(std::string_view s);
MeasurementKind measurement_kind_from_string(std::string_view s);
PolicyVariant policy_variant_from_string(std::string_view s);
Metric metric_from_string(std::string_view s);
PortabilityClass portability_class_from_string(std::string_view s);

inline bool is_runtime(MeasurementKind k) { return k == MeasurementKind::runtime_seconds; }
inline bool is_architectural(PolicyVariant v) {
    return v == PolicyVariant::architectural_theoretical ||
           v == PolicyVariant::architectural_roofline;
}

// Unit label for values measured under a kind.
inline std::string_view unit_of(MeasurementKind k) {
    switch (k) {
        case MeasurementKind::runtime_seconds: return "s";
        case MeasurementKind::throughput_gflops: return "GFLOP/s";
        case MeasurementKind::throughput_custom: return "unit/s";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// A hardware target. Identity is the user-chosen id string; peaks are
// optional and only consulted by architectural baseline policies.
struct Platform {
    std::string id;
    std::string vendor;
    ArchClass arch_class = ArchClass::other;
    std::optional<double> peak_compute;    // GFLOP/s
    std::optional<double> peak_mem_bw;     // GB/s
    std::optional<double> attainable_peak; // GFLOP/s, user-supplied roofline ceiling

    friend bool operator==(const Platform&, const Platform&) = default;
};

// One implementation of an application in some programming model.
struct Implementation {
    std::string id;
    std::string app;
    std::string model; // programming model, e.g. "OpenACC"
    PortabilityClass portability_class = PortabilityClass::portable_framework;

    friend bool operator==(const Implementation&, const Implementation&) = default;
};

struct ProblemSpec {
    std::string app;
    std::string problem;
    std::optional<std::string> input_size;

    friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

// One timed/throughput observation of (implementation, platform, problem).
struct Measurement {
    std::string app;
    std::string problem;
    std::string implementation;
    std::string platform;
    MeasurementKind kind = MeasurementKind::runtime_seconds;
    double value = 0.0; // > 0, in kind units
    std::map<std::string, std::string> meta; // compiler, compiler_flags, input_size, ...

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

// Provenance meta keys a repository-grade measurement must carry. Rows
// missing any of them still score but are flagged as unverified.
inline constexpr const char* kRequiredMetaKeys[] = {"compiler", "compiler_flags", "input_size"};

inline bool is_verified(const Measurement& m) {
    for (const char* key : kRequiredMetaKeys) {
        auto it = m.meta.find(key);
        if (it == m.meta.end() || it->second.empty()) return false;
    }
    return true;
}

// The rule that selects the reference performance per platform.
struct BaselinePolicy {
    PolicyVariant variant = PolicyVariant::study_local_best;
    // fixed_reference only: platform id -> reference implementation id.
    std::map<std::string, std::string> references;
    // architectural_roofline only: FLOP/byte, used when a platform carries
    // no attainable_peak of its own.
    std::optional<double> arithmetic_intensity;

    friend bool operator==(const BaselinePolicy&, const BaselinePolicy&) = default;
};

// Exactly which baseline produced an efficiency value.
struct BaselineDescriptor {
    PolicyVariant policy = PolicyVariant::study_local_best;
    std::string source; // implementation id, or "theoretical_peak" / "roofline_peak"
    double value = 0.0; // baseline performance in study units

    friend bool operator==(const BaselineDescriptor&, const BaselineDescriptor&) = default;
};

struct EfficiencyRecord {
    std::string implementation;
    std::string platform;
    double e = 0.0; // dimensionless fraction; 0 exactly when the pair is unsupported
    std::optional<BaselineDescriptor> baseline; // populated whenever e > 0

    friend bool operator==(const EfficiencyRecord&, const EfficiencyRecord&) = default;
};

// A metric value over a declared platform set with its supported subset.
struct PortabilityScore {
    std::string app;
    std::string problem;
    std::string implementation;
    std::vector<std::string> platform_set; // declared platforms, ordered
    std::vector<std::string> supported;    // subset with e > 0, in platform_set order
    Metric metric = Metric::arithmetic_mean;
    BaselinePolicy policy;
    double value = 0.0;
    // Supported pairs only; keys are a subset of platform_set.
    std::map<std::string, EfficiencyRecord> per_platform;

    friend bool operator==(const PortabilityScore&, const PortabilityScore&) = default;
};

struct StudyDefinition {
    std::string app;
    std::string problem;
    std::vector<std::string> platforms; // non-empty, no duplicates, ordered
    BaselinePolicy policy;
    Metric metric = Metric::arithmetic_mean;

    friend bool operator==(const StudyDefinition&, const StudyDefinition&) = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationIssue {
    std::string code;    // short machine-checkable tag
    std::string message; // human-readable detail

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

using ValidationReport = std::vector<ValidationIssue>;

// Report-style study validation: empty report means valid. Platform records
// are optional for ratio policies; architectural policies and unknown-id
// checks need them.
ValidationReport validate_study(const StudyDefinition& study,
                                const std::vector<Measurement>& measurements,
                                const std::vector<Platform>& platforms = {});

// Scan that every measurement references existing platform/implementation/
// problem rows. Used by the store before accepting events.
ValidationReport check_referential_integrity(const std::vector<Measurement>& measurements,
                                             const std::vector<Platform>& platforms,
                                             const std::vector<Implementation>& implementations,
                                             const std::vector<ProblemSpec>& problems);

// ---------------------------------------------------------------------------
// Implementation
// ---------------------------------------------------------------------------

inline std::string_view to_string(ArchClass v) {
    switch (v) {
        case ArchClass::cpu: return "cpu";
        case ArchClass::gpu: return "gpu";
        case ArchClass::other: return "other";
    }
    return "other";
}

inline std::string_view to_string(MeasurementKind v) {
    switch (v) {
        case MeasurementKind::runtime_seconds: return "runtime_seconds";
        case MeasurementKind::throughput_gflops: return "throughput_gflops";
        case MeasurementKind::throughput_custom: return "throughput_custom";
    }
    return "runtime_seconds";
}

inline std::string_view to_string(PolicyVariant v) {
    switch (v) {
        case PolicyVariant::study_local_best: return "study_local_best";
        case PolicyVariant::fixed_reference: return "fixed_reference";
        case PolicyVariant::repository_best: return "repository_best";
        case PolicyVariant::architectural_theoretical: return "architectural_theoretical";
        case PolicyVariant::architectural_roofline: return "architectural_roofline";
    }
    return "study_local_best";
}

inline std::string_view to_string(Metric v) {
    return v == Metric::arithmetic_mean ? "arithmetic_mean" : "harmonic_mean";
}

inline std::string_view to_string(PortabilityClass v) {
    return v == PortabilityClass::portable_framework ? "portable_framework"
                                                     : "low_level_nonportable";
}

namespace detail {

[[noreturn]] inline void throw_unknown_enum(std::string_view what, std::string_view s) {
    throw Error(Error::Code::invalid_argument,
                "unknown " + std::string(what) + ": '" + std::string(s) + "'");
}

} // namespace detail

inline ArchClass arch_class_from_string(std::string_view s) {
    if (s == "cpu") return ArchClass::cpu;
    if (s == "gpu") return ArchClass::gpu;
    if (s == "other") return ArchClass::other;
    detail::throw_unknown_enum("arch_class", s);
}

inline MeasurementKind measurement_kind_from_string(std::string_view s) {
    if (s == "runtime_seconds") return MeasurementKind::runtime_seconds;
    if (s == "throughput_gflops") return MeasurementKind::throughput_gflops;
    if (s == "throughput_custom") return MeasurementKind::throughput_custom;
    detail::throw_unknown_enum("measurement kind", s);
}

inline PolicyVariant policy_variant_from_string(std::string_view s) {
    if (s == "study_local_best") return PolicyVariant::study_local_best;
    if (s == "fixed_reference") return PolicyVariant::fixed_reference;
    if (s == "repository_best") return PolicyVariant::repository_best;
    if (s == "architectural_theoretical") return PolicyVariant::architectural_theoretical;
    if (s == "architectural_roofline") return PolicyVariant::architectural_roofline;
    detail::throw_unknown_enum("policy variant", s);
}

inline Metric metric_from_string(std::string_view s) {
    if (s == "arithmetic_mean") return Metric::arithmetic_mean;
    if (s == "harmonic_mean") return Metric::harmonic_mean;
    detail::throw_unknown_enum("metric", s);
}

inline PortabilityClass portability_class_from_string(std::string_view s) {
    if (s == "portable_framework") return PortabilityClass::portable_framework;
    if (s == "low_level_nonportable") return PortabilityClass::low_level_nonportable;
    detail::throw_unknown_enum("portability class", s);
}

inline ValidationReport validate_study(const StudyDefinition& study,
                                       const std::vector<Measurement>& measurements,
                                       const std::vector<Platform>& platforms) {
    ValidationReport report;
    auto violate = [&report](std::string code, std::string message) {
        report.push_back({std::move(code), std::move(message)});
    };

    if (study.platforms.empty()) violate("empty_platform_set", "empty platform set");

    for (std::size_t i = 0; i < study.platforms.size(); ++i) {
        for (std::size_t j = i + 1; j < study.platforms.size(); ++j) {
            if (study.platforms[i] == study.platforms[j]) {
                violate("duplicate_platform",
                        "platform '" + study.platforms[i] + "' listed twice in the platform set");
            }
        }
    }

    auto find_platform = [&platforms](const std::string& id) -> const Platform* {
        for (const auto& p : platforms)
            if (p.id == id) return &p;
        return nullptr;
    };

    if (!platforms.empty()) {
        for (const auto& id : study.platforms) {
            if (!find_platform(id)) violate("unknown_platform", "unknown platform id: " + id);
        }
    }

    // Kind must be homogeneous within the study's (app, problem) scope.
    std::optional<MeasurementKind> kind;
    for (const auto& m : measurements) {
        if (m.app != study.app || m.problem != study.problem) continue;
        if (m.value <= 0.0) {
            violate("nonpositive_value",
                    "measurement of " + m.implementation + " on " + m.platform +
                        " has nonpositive value");
        }
        if (!kind) {
            kind = m.kind;
        } else if (*kind != m.kind) {
            violate("mixed_kinds", "study mixes runtime and throughput measurement kinds");
            break;
        }
    }

    if (study.policy.variant == PolicyVariant::fixed_reference) {
        for (const auto& id : study.platforms) {
            if (!study.policy.references.count(id)) {
                violate("missing_reference_entry",
                        "fixed_reference policy has no reference implementation for platform " + id);
            }
        }
    }

    if (is_architectural(study.policy.variant)) {
        if (kind && *kind != MeasurementKind::throughput_gflops) {
            violate("kind_not_throughput",
                    "architectural policies require throughput_gflops measurements");
        }
        for (const auto& id : study.platforms) {
            const Platform* p = find_platform(id);
            if (!p) {
                if (platforms.empty())
                    violate("unknown_platform",
                            "architectural policy needs a platform record for " + id);
                continue;
            }
            if (study.policy.variant == PolicyVariant::architectural_theoretical) {
                if (!p->peak_compute)
                    violate("missing_peak", "platform " + id + " lacks peak_compute");
            } else {
                bool derivable = p->peak_compute && p->peak_mem_bw &&
                                 study.policy.arithmetic_intensity.has_value();
                if (!p->attainable_peak && !derivable)
                    violate("missing_peak",
                            "platform " + id +
                                " lacks attainable_peak (or peak_compute + peak_mem_bw with an "
                                "arithmetic intensity)");
            }
        }
    }

    return report;
}

inline ValidationReport check_referential_integrity(
    const std::vector<Measurement>& measurements, const std::vector<Platform>& platforms,
    const std::vector<Implementation>& implementations, const std::vector<ProblemSpec>& problems) {
    ValidationReport report;
    auto has_platform = [&](const std::string& id) {
        for (const auto& p : platforms)
            if (p.id == id) return true;
        return false;
    };
    auto has_impl = [&](const std::string& app, const std::string& id) {
        for (const auto& i : implementations)
            if (i.app == app && i.id == id) return true;
        return false;
    };
    auto has_problem = [&](const std::string& app, const std::string& problem) {
        for (const auto& p : problems)
            if (p.app == app && p.problem == problem) return true;
        return false;
    };

    for (const auto& m : measurements) {
        if (!has_platform(m.platform))
            report.push_back({"unknown_platform", "unknown platform id: " + m.platform});
        if (!has_impl(m.app, m.implementation))
            report.push_back(
                {"unknown_implementation",
                 "unknown implementation '" + m.implementation + "' for app " + m.app});
        if (!has_problem(m.app, m.problem))
            report.push_back({"unknown_problem",
                              "unknown problem '" + m.problem + "' for app " + m.app});
    }
    return report;
}

} // namespace ppmetrics
