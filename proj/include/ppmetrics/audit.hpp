// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppmetrics/metrics.hpp"
#include "ppmetrics/model.hpp"

namespace ppmetrics {

// ---------------------------------------------------------------------------
// Mechanical checks of the metric criteria over score snapshots. All
// operations are pure: inputs are never mutated.
// ---------------------------------------------------------------------------

enum class Severity { violation, warning, info };

inline std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::violation: return "violation";
        case Severity::warning: return "warning";
        case Severity::info: return "info";
    }
    return "info";
}

struct Finding {
    Severity severity = Severity::info;
    std::optional<int> criterion; // 1..5 when the finding maps to a metric criterion
    std::string implementation;
    std::string platform;
    std::string description;
    std::optional<double> before_value;
    std::optional<double> after_value;

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct AuditReport {
    std::vector<Finding> findings;

    std::size_t count(Severity s) const {
        std::size_t n = 0;
        for (const auto& f : findings)
            if (f.severity == s) ++n;
        return n;
    }
    bool has_violations() const { return count(Severity::violation) > 0; }

    void merge(const AuditReport& other) {
        findings.insert(findings.end(), other.findings.begin(), other.findings.end());
    }
};

// A study's measurements together with the scores computed from them.
struct ScoredSnapshot {
    StudyDefinition study;
    std::vector<Measurement> measurements;
    std::vector<PortabilityScore> scores;
};

inline ScoredSnapshot make_snapshot(const StudyDefinition& study,
                                    const std::vector<Measurement>& measurements,
                                    const std::vector<Platform>& platforms = {},
                                    const ScoreOptions& options = {}) {
    return {study, measurements, score_study(study, measurements, measurements, platforms, options)};
}

// Numeric change threshold: 1e-9 relative, so floating noise is ignored but
// real baseline churn is not.
inline bool value_changed(double before, double after) {
    double scale = std::max({1.0, std::fabs(before), std::fabs(after)});
    return std::fabs(after - before) > 1e-9 * scale;
}

struct EfficiencyDelta {
    std::string implementation;
    std::string platform;
    double before_e = 0.0; // 0 when unsupported before
    double after_e = 0.0;  // 0 when unsupported after

    friend bool operator==(const EfficiencyDelta&, const EfficiencyDelta&) = default;
};

struct ScoreDelta {
    std::string implementation;
    std::optional<double> before; // absent when the implementation is new
    std::optional<double> after;  // absent when the implementation disappeared
    std::size_t supported_before = 0;
    std::size_t supported_after = 0;

    friend bool operator==(const ScoreDelta&, const ScoreDelta&) = default;
};

struct ChangeSet {
    StudyDefinition study;
    std::vector<Measurement> added;
    std::vector<Measurement> removed;
    // Same (implementation, platform) pair present on both sides with a
    // different value multiset.
    std::vector<std::pair<Measurement, Measurement>> modified;
    std::vector<EfficiencyDelta> efficiency_deltas;
    std::vector<ScoreDelta> score_deltas;

    bool empty() const {
        return added.empty() && removed.empty() && modified.empty() &&
               efficiency_deltas.empty() && score_deltas.empty();
    }

    // True when none of the implementation's own measurements were touched.
    bool measurements_unchanged(const std::string& implementation) const {
        for (const auto& m : added)
            if (m.implementation == implementation) return false;
        for (const auto& m : removed)
            if (m.implementation == implementation) return false;
        for (const auto& [before, after] : modified)
            if (before.implementation == implementation) return false;
        return true;
    }
};

// Lists every measurement change and every efficiency / score delta between
// two snapshots of the same study.
inline ChangeSet diff_snapshots(const ScoredSnapshot& before, const ScoredSnapshot& after) {
    if (!(before.study == after.study))
        throw Error(Error::Code::study_mismatch,
                    "snapshots were scored under different study definitions");

    ChangeSet changes;
    changes.study = before.study;

    // Measurement diff with multiset semantics: rows identical in every field
    // pair off; leftovers on the same (implementation, platform) pair are
    // modifications, the rest are pure additions/removals.
    std::vector<const Measurement*> left, right;
    for (const auto& m : before.measurements)
        if (m.app == before.study.app && m.problem == before.study.problem) left.push_back(&m);
    std::vector<bool> right_matched;
    for (const auto& m : after.measurements)
        if (m.app == after.study.app && m.problem == after.study.problem) right.push_back(&m);
    right_matched.assign(right.size(), false);

    std::vector<const Measurement*> unmatched_left;
    for (const Measurement* lm : left) {
        bool matched = false;
        for (std::size_t j = 0; j < right.size(); ++j) {
            if (!right_matched[j] && *right[j] == *lm) {
                right_matched[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched) unmatched_left.push_back(lm);
    }
    std::vector<const Measurement*> unmatched_right;
    for (std::size_t j = 0; j < right.size(); ++j)
        if (!right_matched[j]) unmatched_right.push_back(right[j]);

    std::vector<bool> paired_right(unmatched_right.size(), false);
    for (const Measurement* lm : unmatched_left) {
        bool paired = false;
        for (std::size_t j = 0; j < unmatched_right.size(); ++j) {
            const Measurement* rm = unmatched_right[j];
            if (!paired_right[j] && rm->implementation == lm->implementation &&
                rm->platform == lm->platform) {
                changes.modified.emplace_back(*lm, *rm);
                paired_right[j] = true;
                paired = true;
                break;
            }
        }
        if (!paired) changes.removed.push_back(*lm);
    }
    for (std::size_t j = 0; j < unmatched_right.size(); ++j)
        if (!paired_right[j]) changes.added.push_back(*unmatched_right[j]);

    // Efficiency deltas over every (implementation, platform in H) pair.
    auto efficiency_of = [](const std::vector<PortabilityScore>& scores, const std::string& impl,
                            const std::string& platform) {
        for (const auto& s : scores) {
            if (s.implementation != impl) continue;
            auto it = s.per_platform.find(platform);
            return it == s.per_platform.end() ? 0.0 : it->second.e;
        }
        return 0.0;
    };

    std::vector<std::string> implementations;
    auto note_impl = [&implementations](const std::string& id) {
        if (std::find(implementations.begin(), implementations.end(), id) == implementations.end())
            implementations.push_back(id);
    };
    for (const auto& s : before.scores) note_impl(s.implementation);
    for (const auto& s : after.scores) note_impl(s.implementation);

    for (const auto& impl : implementations) {
        for (const auto& platform : before.study.platforms) {
            double e_before = efficiency_of(before.scores, impl, platform);
            double e_after = efficiency_of(after.scores, impl, platform);
            if (value_changed(e_before, e_after))
                changes.efficiency_deltas.push_back({impl, platform, e_before, e_after});
        }

        const PortabilityScore* score_before = nullptr;
        const PortabilityScore* score_after = nullptr;
        for (const auto& s : before.scores)
            if (s.implementation == impl) score_before = &s;
        for (const auto& s : after.scores)
            if (s.implementation == impl) score_after = &s;

        ScoreDelta delta;
        delta.implementation = impl;
        if (score_before) {
            delta.before = score_before->value;
            delta.supported_before = score_before->supported.size();
        }
        if (score_after) {
            delta.after = score_after->value;
            delta.supported_after = score_after->supported.size();
        }
        bool presence_changed = (score_before == nullptr) != (score_after == nullptr);
        bool changed = presence_changed ||
                       (score_before && score_after &&
                        value_changed(score_before->value, score_after->value));
        if (changed) changes.score_deltas.push_back(std::move(delta));
    }

    return changes;
}

// Criterion 4: a score may move only when the implementation's own
// performance moved on some supported platform. Every implementation whose
// efficiency or score changed while its own measurements are untouched is a
// violation, one finding per changed pair.
inline AuditReport check_criterion4(const ChangeSet& changes) {
    AuditReport report;
    std::set<std::string> flagged;

    for (const auto& delta : changes.efficiency_deltas) {
        if (!changes.measurements_unchanged(delta.implementation)) continue;
        Finding f;
        f.severity = Severity::violation;
        f.criterion = 4;
        f.implementation = delta.implementation;
        f.platform = delta.platform;
        f.description = "efficiency of " + delta.implementation + " on " + delta.platform +
                        " changed with no change to its own measurements (baseline churn)";
        f.before_value = delta.before_e;
        f.after_value = delta.after_e;
        report.findings.push_back(std::move(f));
        flagged.insert(delta.implementation);
    }

    for (const auto& delta : changes.score_deltas) {
        if (!delta.before || !delta.after) continue; // new/retired implementation
        if (flagged.count(delta.implementation)) continue;
        if (!changes.measurements_unchanged(delta.implementation)) continue;
        Finding f;
        f.severity = Severity::violation;
        f.criterion = 4;
        f.implementation = delta.implementation;
        f.description = "portability score of " + delta.implementation +
                        " changed with no change to its own measurements";
        f.before_value = delta.before;
        f.after_value = delta.after;
        report.findings.push_back(std::move(f));
    }

    // Support-set changes are worth surfacing but are not violations.
    for (const auto& delta : changes.score_deltas) {
        if (delta.before && delta.after && delta.supported_before != delta.supported_after) {
            Finding f;
            f.severity = Severity::info;
            f.implementation = delta.implementation;
            f.description = "supported platform count of " + delta.implementation + " changed from " +
                            std::to_string(delta.supported_before) + " to " +
                            std::to_string(delta.supported_after);
            report.findings.push_back(std::move(f));
        }
    }

    return report;
}

// Criterion 2: the score must be independent of absolute performance.
// Rescales every measurement on one platform by `factor`, rescores, and
// reports any application-efficiency movement beyond 1e-9 as a criterion-2
// violation. Under fixed_reference the designated reference implementation is
// left unscaled (its baseline is pinned by construction) and the resulting
// shift is reported as info; architectural policies are exempt and reported
// as info.
inline AuditReport check_scaling_invariance(const StudyDefinition& study,
                                            const std::vector<Measurement>& measurements,
                                            const std::string& platform, double factor,
                                            const std::vector<Platform>& platforms = {}) {
    if (factor <= 0.0)
        throw Error(Error::Code::invalid_argument, "scaling factor must be positive");

    AuditReport report;

    if (is_architectural(study.policy.variant)) {
        Finding f;
        f.severity = Severity::info;
        f.platform = platform;
        f.description =
            "architectural efficiencies scale with absolute performance by definition; "
            "criterion-2 scaling check does not apply";
        report.findings.push_back(std::move(f));
        return report;
    }

    const bool fixed_ref = study.policy.variant == PolicyVariant::fixed_reference;
    std::string reference_impl;
    if (fixed_ref) {
        auto it = study.policy.references.find(platform);
        if (it != study.policy.references.end()) reference_impl = it->second;
    }

    std::vector<Measurement> scaled = measurements;
    for (auto& m : scaled) {
        if (m.platform != platform) continue;
        if (fixed_ref && m.implementation == reference_impl) continue;
        m.value *= factor;
    }

    auto original_scores = score_study(study, measurements, measurements, platforms);
    auto scaled_scores = score_study(study, scaled, scaled, platforms);

    auto efficiency_of = [](const std::vector<PortabilityScore>& scores, const std::string& impl,
                            const std::string& platform_id) {
        for (const auto& s : scores) {
            if (s.implementation != impl) continue;
            auto it = s.per_platform.find(platform_id);
            return it == s.per_platform.end() ? 0.0 : it->second.e;
        }
        return 0.0;
    };

    for (const auto& score : original_scores) {
        for (const auto& platform_id : study.platforms) {
            double before = efficiency_of(original_scores, score.implementation, platform_id);
            double after = efficiency_of(scaled_scores, score.implementation, platform_id);
            if (std::fabs(after - before) <= 1e-9) continue;
            Finding f;
            f.implementation = score.implementation;
            f.platform = platform_id;
            f.before_value = before;
            f.after_value = after;
            if (fixed_ref) {
                f.severity = Severity::info;
                f.description = "efficiency of " + score.implementation + " on " + platform_id +
                                " scales with absolute performance because the fixed reference "
                                "baseline was not scaled";
            } else {
                f.severity = Severity::violation;
                f.criterion = 2;
                f.description = "efficiency of " + score.implementation + " on " + platform_id +
                                " is not invariant under uniform rescaling of the platform";
            }
            report.findings.push_back(std::move(f));
        }
    }

    return report;
}

// Checks the fixed-reference dominance assumption: the designated low-level
// reference should be unbeaten, i.e. no application efficiency above 1.0.
// Pairs that beat the reference get a warning; an unresolvable reference is a
// violation-severity finding.
inline AuditReport check_reference_dominance(const StudyDefinition& study,
                                             const std::vector<Measurement>& measurements) {
    if (study.policy.variant != PolicyVariant::fixed_reference)
        throw Error(Error::Code::invalid_argument,
                    "reference dominance check requires a fixed_reference policy");

    AuditReport report;
    std::vector<Measurement> in_study;
    for (const auto& m : measurements)
        if (m.app == study.app && m.problem == study.problem) in_study.push_back(m);

    for (const auto& platform : study.platforms) {
        bool measured = false;
        for (const auto& m : in_study)
            if (m.platform == platform) { measured = true; break; }
        if (!measured) continue;

        BaselineValue baseline;
        try {
            baseline = resolve_baseline(study.policy, platform, in_study, in_study);
        } catch (const Error& err) {
            Finding f;
            f.severity = Severity::violation;
            f.platform = platform;
            f.description = err.what();
            report.findings.push_back(std::move(f));
            continue;
        }

        std::map<std::string, std::vector<Measurement>> by_impl;
        for (const auto& m : in_study)
            if (m.platform == platform) by_impl[m.implementation].push_back(m);

        for (const auto& [impl, rows] : by_impl) {
            if (impl == baseline.source_id) continue;
            double e = application_efficiency(best_measurement(rows), baseline);
            if (e <= 1.0) continue;
            Finding f;
            f.severity = Severity::warning;
            f.implementation = impl;
            f.platform = platform;
            f.description = impl + " beats the fixed reference " + baseline.source_id + " on " +
                            platform + " (efficiency above 1.0 contradicts the dominance "
                            "assumption)";
            f.after_value = e;
            report.findings.push_back(std::move(f));
        }
    }

    return report;
}

// Warns when the declared platform set mixes architecture classes.
inline AuditReport check_mixed_arch(const StudyDefinition& study,
                                    const std::vector<Platform>& platforms) {
    AuditReport report;
    std::set<ArchClass> classes;
    for (const auto& id : study.platforms)
        for (const auto& p : platforms)
            if (p.id == id) classes.insert(p.arch_class);

    if (classes.size() > 1) {
        std::string detail;
        for (ArchClass c : classes) {
            if (!detail.empty()) detail += ", ";
            detail += std::string(to_string(c));
        }
        Finding f;
        f.severity = Severity::warning;
        f.description = "platform set mixes architecture classes (" + detail +
                        "); scores compare across classes";
        report.findings.push_back(std::move(f));
    }
    return report;
}

} // namespace ppmetrics
