// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ppmetrics/efficiency.hpp"
#include "ppmetrics/model.hpp"

namespace ppmetrics {

// ---------------------------------------------------------------------------
// Portability metrics over per-platform efficiencies, and the study pipeline
// that produces them from raw measurements.
// ---------------------------------------------------------------------------

struct MetricResult {
    double value = 0.0;
    std::vector<std::string> supported; // platforms with e > 0, in declared order
};

namespace detail {

inline void check_efficiency_keys(const std::map<std::string, double>& efficiencies,
                                  std::span<const std::string> platform_set) {
    for (const auto& [platform, e] : efficiencies) {
        if (std::find(platform_set.begin(), platform_set.end(), platform) == platform_set.end())
            throw Error(Error::Code::invalid_argument,
                        "efficiency given for platform '" + platform +
                            "' which is not in the declared platform set");
        if (e < 0.0)
            throw Error(Error::Code::invalid_argument,
                        "negative efficiency for platform " + platform);
    }
}

} // namespace detail

// Arithmetic mean over the supported subset; 0 when nothing is supported.
// Platforms missing from the map count as unsupported. Summation follows the
// declared platform order so repeated runs are bit-identical.
inline MetricResult arithmetic_mean_score(const std::map<std::string, double>& efficiencies,
                                          std::span<const std::string> platform_set) {
    detail::check_efficiency_keys(efficiencies, platform_set);
    MetricResult r;
    double sum = 0.0;
    for (const auto& platform : platform_set) {
        auto it = efficiencies.find(platform);
        if (it == efficiencies.end() || it->second <= 0.0) continue;
        sum += it->second;
        r.supported.push_back(platform);
    }
    r.value = r.supported.empty() ? 0.0 : sum / static_cast<double>(r.supported.size());
    return r;
}

// Harmonic mean over the whole declared set; collapses to 0 as soon as any
// declared platform is unsupported.
inline MetricResult harmonic_mean_score(const std::map<std::string, double>& efficiencies,
                                        std::span<const std::string> platform_set) {
    detail::check_efficiency_keys(efficiencies, platform_set);
    MetricResult r;
    double reciprocal_sum = 0.0;
    for (const auto& platform : platform_set) {
        auto it = efficiencies.find(platform);
        if (it == efficiencies.end() || it->second <= 0.0) continue;
        reciprocal_sum += 1.0 / it->second;
        r.supported.push_back(platform);
    }
    if (!platform_set.empty() && r.supported.size() == platform_set.size())
        r.value = static_cast<double>(platform_set.size()) / reciprocal_sum;
    else
        r.value = 0.0;
    return r;
}

inline MetricResult metric_score(Metric metric, const std::map<std::string, double>& efficiencies,
                                 std::span<const std::string> platform_set) {
    return metric == Metric::arithmetic_mean ? arithmetic_mean_score(efficiencies, platform_set)
                                             : harmonic_mean_score(efficiencies, platform_set);
}

struct ScoreOptions {
    // When set, a platform whose baseline cannot be resolved (e.g. the fixed
    // reference is not measured there yet) is treated as unsupported for
    // every implementation instead of failing the whole computation. The
    // repository store scores this way; direct/CLI scoring stays strict.
    bool lenient_baselines = false;
};

// Scores every implementation present in the study: dedup per pair, resolve
// the baseline per platform under the policy, compute efficiencies, then
// apply the study's metric over the declared platform set.
//
// `repository_measurements` is the wider corpus consulted by repository_best;
// pass the study list again for self-contained studies. Both lists may be
// unscoped; filtering to the study's (app, problem) happens here.
inline std::vector<PortabilityScore> score_study(const StudyDefinition& study,
                                                 const std::vector<Measurement>& study_measurements,
                                                 const std::vector<Measurement>& repository_measurements,
                                                 const std::vector<Platform>& platforms = {},
                                                 const ScoreOptions& options = {}) {
    ValidationReport issues = validate_study(study, study_measurements, platforms);
    if (!issues.empty()) {
        std::string what = "study validation failed:";
        for (const auto& issue : issues) what += " [" + issue.code + "] " + issue.message + ";";
        throw Error(Error::Code::validation_failed, what);
    }

    std::vector<Measurement> in_study;
    for (const auto& m : study_measurements)
        if (m.app == study.app && m.problem == study.problem) in_study.push_back(m);

    std::vector<Measurement> in_repository;
    for (const auto& m : repository_measurements)
        if (m.app == study.app && m.problem == study.problem) in_repository.push_back(m);

    // Implementations in first-appearance order, for deterministic output.
    // Under fixed_reference the designated references are baseline material,
    // not scored subjects.
    auto is_reference = [&study](const std::string& impl) {
        if (study.policy.variant != PolicyVariant::fixed_reference) return false;
        for (const auto& [platform, reference] : study.policy.references)
            if (reference == impl) return true;
        return false;
    };
    std::vector<std::string> implementations;
    for (const auto& m : in_study)
        if (!is_reference(m.implementation) &&
            std::find(implementations.begin(), implementations.end(), m.implementation) ==
                implementations.end())
            implementations.push_back(m.implementation);

    auto find_platform = [&platforms](const std::string& id) -> const Platform* {
        for (const auto& p : platforms)
            if (p.id == id) return &p;
        return nullptr;
    };

    const bool architectural = is_architectural(study.policy.variant);

    // One baseline per platform, shared by every implementation. Platforms
    // with no measurements at all are skipped outright; nothing can be
    // supported there.
    std::map<std::string, BaselineValue> baselines;
    for (const auto& platform : study.platforms) {
        bool measured = false;
        for (const auto& m : in_study)
            if (m.platform == platform) { measured = true; break; }
        if (!measured && !architectural) continue;
        try {
            if (architectural) {
                const Platform* record = find_platform(platform);
                if (!record)
                    throw Error(Error::Code::missing_peak,
                                "no platform record for " + platform);
                baselines.emplace(platform, platform_peak(*record, study.policy));
            } else {
                baselines.emplace(platform, resolve_baseline(study.policy, platform, in_study,
                                                             in_repository));
            }
        } catch (const Error&) {
            if (!options.lenient_baselines) throw;
        }
    }

    std::vector<PortabilityScore> scores;
    scores.reserve(implementations.size());
    for (const auto& impl : implementations) {
        PortabilityScore score;
        score.app = study.app;
        score.problem = study.problem;
        score.implementation = impl;
        score.platform_set = study.platforms;
        score.metric = study.metric;
        score.policy = study.policy;

        std::map<std::string, double> efficiencies;
        for (const auto& platform : study.platforms) {
            auto baseline = baselines.find(platform);
            if (baseline == baselines.end()) continue;

            std::vector<Measurement> pair;
            for (const auto& m : in_study)
                if (m.implementation == impl && m.platform == platform) pair.push_back(m);
            if (pair.empty()) continue;

            const Measurement& achieved = best_measurement(pair);
            double e = architectural
                           ? architectural_efficiency(achieved.value, baseline->second.value)
                           : application_efficiency(achieved, baseline->second);

            efficiencies[platform] = e;
            EfficiencyRecord record;
            record.implementation = impl;
            record.platform = platform;
            record.e = e;
            record.baseline = describe(baseline->second, study.policy.variant);
            score.per_platform.emplace(platform, std::move(record));
        }

        MetricResult result = metric_score(study.metric, efficiencies, study.platforms);
        score.value = result.value;
        score.supported = std::move(result.supported);
        scores.push_back(std::move(score));
    }
    return scores;
}

} // namespace ppmetrics
