// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "ppmetrics/audit.hpp"
#include "ppmetrics/model.hpp"

// JSON codecs for every domain type. Serialization is lossless and
// deterministic (sorted object keys, fixed array orders), so serialize ->
// deserialize round-trips to an equal value and repeated dumps are
// byte-identical.

namespace ppmetrics {

using nlohmann::json;

namespace detail {

inline std::string require_string(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string())
        throw Error(Error::Code::parse_error, std::string("missing or non-string field '") + field + "'");
    return it->get<std::string>();
}

inline double require_number(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_number())
        throw Error(Error::Code::parse_error, std::string("missing or non-numeric field '") + field + "'");
    return it->get<double>();
}

} // namespace detail

// --- Platform ---------------------------------------------------------------

inline void to_json(json& j, const Platform& p) {
    j = json{{"id", p.id}, {"vendor", p.vendor}, {"arch_class", to_string(p.arch_class)}};
    if (p.peak_compute) j["peak_compute"] = *p.peak_compute;
    if (p.peak_mem_bw) j["peak_mem_bw"] = *p.peak_mem_bw;
    if (p.attainable_peak) j["attainable_peak"] = *p.attainable_peak;
}

inline void from_json(const json& j, Platform& p) {
    p.id = detail::require_string(j, "id");
    p.vendor = j.value("vendor", "");
    p.arch_class = arch_class_from_string(j.value("arch_class", "other"));
    p.peak_compute.reset();
    p.peak_mem_bw.reset();
    p.attainable_peak.reset();
    if (j.contains("peak_compute")) p.peak_compute = detail::require_number(j, "peak_compute");
    if (j.contains("peak_mem_bw")) p.peak_mem_bw = detail::require_number(j, "peak_mem_bw");
    if (j.contains("attainable_peak"))
        p.attainable_peak = detail::require_number(j, "attainable_peak");
}

// --- Implementation ----------------------------------------------------------

inline void to_json(json& j, const Implementation& i) {
    j = json{{"id", i.id},
             {"app", i.app},
             {"model", i.model},
             {"portability_class", to_string(i.portability_class)}};
}

inline void from_json(const json& j, Implementation& i) {
    i.id = detail::require_string(j, "id");
    i.app = detail::require_string(j, "app");
    i.model = j.value("model", "");
    i.portability_class =
        portability_class_from_string(j.value("portability_class", "portable_framework"));
}

// --- ProblemSpec --------------------------------------------------------------

inline void to_json(json& j, const ProblemSpec& p) {
    j = json{{"app", p.app}, {"problem", p.problem}};
    if (p.input_size) j["input_size"] = *p.input_size;
}

inline void from_json(const json& j, ProblemSpec& p) {
    p.app = detail::require_string(j, "app");
    p.problem = detail::require_string(j, "problem");
    p.input_size.reset();
    if (j.contains("input_size")) p.input_size = detail::require_string(j, "input_size");
}

// --- Measurement --------------------------------------------------------------

inline void to_json(json& j, const Measurement& m) {
    j = json{{"app", m.app},
             {"problem", m.problem},
             {"implementation", m.implementation},
             {"platform", m.platform},
             {"kind", to_string(m.kind)},
             {"value", m.value},
             {"meta", m.meta}};
}

inline void from_json(const json& j, Measurement& m) {
    m.app = detail::require_string(j, "app");
    m.problem = detail::require_string(j, "problem");
    m.implementation = detail::require_string(j, "implementation");
    m.platform = detail::require_string(j, "platform");
    m.kind = measurement_kind_from_string(detail::require_string(j, "kind"));
    m.value = detail::require_number(j, "value");
    m.meta.clear();
    if (j.contains("meta")) {
        if (!j["meta"].is_object())
            throw Error(Error::Code::parse_error, "field 'meta' must be an object");
        for (const auto& [key, value] : j["meta"].items()) {
            if (!value.is_string())
                throw Error(Error::Code::parse_error, "meta values must be strings");
            m.meta[key] = value.get<std::string>();
        }
    }
}

// --- BaselinePolicy -----------------------------------------------------------

inline void to_json(json& j, const BaselinePolicy& p) {
    j = json{{"variant", to_string(p.variant)}};
    if (!p.references.empty()) j["references"] = p.references;
    if (p.arithmetic_intensity) j["arithmetic_intensity"] = *p.arithmetic_intensity;
}

inline void from_json(const json& j, BaselinePolicy& p) {
    p.variant = policy_variant_from_string(detail::require_string(j, "variant"));
    p.references.clear();
    if (j.contains("references")) {
        for (const auto& [platform, impl] : j["references"].items())
            p.references[platform] = impl.get<std::string>();
    }
    p.arithmetic_intensity.reset();
    if (j.contains("arithmetic_intensity"))
        p.arithmetic_intensity = detail::require_number(j, "arithmetic_intensity");
}

// --- StudyDefinition ----------------------------------------------------------

inline void to_json(json& j, const StudyDefinition& s) {
    j = json{{"app", s.app},
             {"problem", s.problem},
             {"platforms", s.platforms},
             {"policy", s.policy},
             {"metric", to_string(s.metric)}};
}

inline void from_json(const json& j, StudyDefinition& s) {
    s.app = detail::require_string(j, "app");
    s.problem = detail::require_string(j, "problem");
    s.platforms.clear();
    if (!j.contains("platforms") || !j["platforms"].is_array())
        throw Error(Error::Code::parse_error, "missing or non-array field 'platforms'");
    for (const auto& p : j["platforms"]) s.platforms.push_back(p.get<std::string>());
    if (!j.contains("policy"))
        throw Error(Error::Code::parse_error, "missing field 'policy'");
    s.policy = j["policy"].get<BaselinePolicy>();
    s.metric = metric_from_string(detail::require_string(j, "metric"));
}

// --- BaselineDescriptor / EfficiencyRecord ------------------------------------

inline void to_json(json& j, const BaselineDescriptor& b) {
    j = json{{"policy", to_string(b.policy)}, {"source", b.source}, {"value", b.value}};
}

inline void from_json(const json& j, BaselineDescriptor& b) {
    b.policy = policy_variant_from_string(detail::require_string(j, "policy"));
    b.source = detail::require_string(j, "source");
    b.value = detail::require_number(j, "value");
}

inline void to_json(json& j, const EfficiencyRecord& r) {
    j = json{{"implementation", r.implementation}, {"platform", r.platform}, {"e", r.e}};
    if (r.baseline) j["baseline"] = *r.baseline;
}

inline void from_json(const json& j, EfficiencyRecord& r) {
    r.implementation = detail::require_string(j, "implementation");
    r.platform = detail::require_string(j, "platform");
    r.e = detail::require_number(j, "e");
    r.baseline.reset();
    if (j.contains("baseline") && !j["baseline"].is_null())
        r.baseline = j["baseline"].get<BaselineDescriptor>();
}

// --- PortabilityScore ---------------------------------------------------------
//
// Wire shape: {app, problem, implementation, metric, policy, h, s, value,
// per_platform: [{platform, e, baseline: {source, value}}]}. per_platform is
// ordered by h and holds supported pairs only; each record's descriptor
// policy is implied by the score's policy.

inline void to_json(json& j, const PortabilityScore& score) {
    json per_platform = json::array();
    for (const auto& platform : score.platform_set) {
        auto it = score.per_platform.find(platform);
        if (it == score.per_platform.end()) continue;
        const EfficiencyRecord& r = it->second;
        json baseline = nullptr;
        if (r.baseline) baseline = json{{"source", r.baseline->source}, {"value", r.baseline->value}};
        per_platform.push_back(json{{"platform", platform}, {"e", r.e}, {"baseline", baseline}});
    }
    j = json{{"app", score.app},
             {"problem", score.problem},
             {"implementation", score.implementation},
             {"metric", to_string(score.metric)},
             {"policy", score.policy},
             {"h", score.platform_set},
             {"s", score.supported},
             {"value", score.value},
             {"per_platform", std::move(per_platform)}};
}

inline void from_json(const json& j, PortabilityScore& score) {
    score.app = detail::require_string(j, "app");
    score.problem = detail::require_string(j, "problem");
    score.implementation = detail::require_string(j, "implementation");
    score.metric = metric_from_string(detail::require_string(j, "metric"));
    score.policy = j.at("policy").get<BaselinePolicy>();
    score.platform_set = j.at("h").get<std::vector<std::string>>();
    score.supported = j.at("s").get<std::vector<std::string>>();
    score.value = detail::require_number(j, "value");
    score.per_platform.clear();
    for (const auto& entry : j.at("per_platform")) {
        EfficiencyRecord r;
        r.implementation = score.implementation;
        r.platform = detail::require_string(entry, "platform");
        r.e = detail::require_number(entry, "e");
        if (entry.contains("baseline") && !entry["baseline"].is_null()) {
            BaselineDescriptor b;
            b.policy = score.policy.variant;
            b.source = detail::require_string(entry["baseline"], "source");
            b.value = detail::require_number(entry["baseline"], "value");
            r.baseline = b;
        }
        score.per_platform.emplace(r.platform, std::move(r));
    }
}

// --- Validation / audit reports -----------------------------------------------

inline void to_json(json& j, const ValidationIssue& v) {
    j = json{{"code", v.code}, {"message", v.message}};
}

inline void from_json(const json& j, ValidationIssue& v) {
    v.code = detail::require_string(j, "code");
    v.message = detail::require_string(j, "message");
}

// Finding wire shape: {severity, criterion, implementation, platform,
// description, before, after}; absent optionals serialize as null.
inline void to_json(json& j, const Finding& f) {
    j = json{{"severity", to_string(f.severity)},
             {"criterion", f.criterion ? json(*f.criterion) : json(nullptr)},
             {"implementation", f.implementation},
             {"platform", f.platform},
             {"description", f.description},
             {"before", f.before_value ? json(*f.before_value) : json(nullptr)},
             {"after", f.after_value ? json(*f.after_value) : json(nullptr)}};
}

inline void from_json(const json& j, Finding& f) {
    std::string severity = detail::require_string(j, "severity");
    if (severity == "violation") f.severity = Severity::violation;
    else if (severity == "warning") f.severity = Severity::warning;
    else if (severity == "info") f.severity = Severity::info;
    else throw Error(Error::Code::parse_error, "unknown severity: " + severity);
    f.criterion.reset();
    if (j.contains("criterion") && !j["criterion"].is_null())
        f.criterion = j["criterion"].get<int>();
    f.implementation = j.value("implementation", "");
    f.platform = j.value("platform", "");
    f.description = detail::require_string(j, "description");
    f.before_value.reset();
    if (j.contains("before") && !j["before"].is_null()) f.before_value = j["before"].get<double>();
    f.after_value.reset();
    if (j.contains("after") && !j["after"].is_null()) f.after_value = j["after"].get<double>();
}

inline void to_json(json& j, const AuditReport& r) { j = json{{"findings", r.findings}}; }

inline void from_json(const json& j, AuditReport& r) {
    r.findings = j.at("findings").get<std::vector<Finding>>();
}

// --- Numeric rendering --------------------------------------------------------

// Rounds to `digits` significant decimal digits. Wire responses use 12 so
// table-level rounding differences never leak into stored precision.
inline double round_significant(double x, int digits) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    double magnitude = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::fabs(x)))));
    return std::round(x * magnitude) / magnitude;
}

inline json round_numbers(const json& j, int digits = 12) {
    if (j.is_number_float()) return round_significant(j.get<double>(), digits);
    if (j.is_object()) {
        json out = json::object();
        for (const auto& [key, value] : j.items()) out[key] = round_numbers(value, digits);
        return out;
    }
    if (j.is_array()) {
        json out = json::array();
        for (const auto& value : j) out.push_back(round_numbers(value, digits));
        return out;
    }
    return j;
}

} // namespace ppmetrics
