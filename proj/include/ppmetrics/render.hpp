// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ppmetrics/audit.hpp"
#include "ppmetrics/model.hpp"
#include "ppmetrics/serde.hpp"

namespace ppmetrics {

// ---------------------------------------------------------------------------
// Report rendering. Efficiencies are stored at full precision; integer
// percents (half-up) appear only here, in the human-readable table format.
// ---------------------------------------------------------------------------

inline long long percent_half_up(double fraction) {
    return static_cast<long long>(std::floor(fraction * 100.0 + 0.5));
}

inline std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

inline std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline const EfficiencyRecord* record_of(const PortabilityScore& score,
                                         const std::string& platform) {
    auto it = score.per_platform.find(platform);
    return it == score.per_platform.end() ? nullptr : &it->second;
}

} // namespace detail

// Efficiency matrix plus the score column, integer percents. Unsupported
// cells render as "-".
inline std::string render_table(const std::vector<PortabilityScore>& scores,
                                const std::vector<std::string>& platforms) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"implementation"};
    for (const auto& p : platforms) header.push_back(p);
    header.push_back("score");
    cells.push_back(header);

    for (const auto& score : scores) {
        std::vector<std::string> row{score.implementation};
        for (const auto& platform : platforms) {
            const EfficiencyRecord* r = detail::record_of(score, platform);
            row.push_back(r ? std::to_string(percent_half_up(r->e)) + "%" : "-");
        }
        row.push_back(std::to_string(percent_half_up(score.value)) + "%");
        cells.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(cells.front().size(), 0);
    for (const auto& row : cells)
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());

    std::string out;
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += "  ";
            out += detail::pad(row[i], widths[i]);
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    }
    return out;
}

// Same matrix at full precision: implementation,<platforms...>,score.
inline std::string render_csv(const std::vector<PortabilityScore>& scores,
                              const std::vector<std::string>& platforms) {
    std::string out = "implementation";
    for (const auto& p : platforms) out += "," + p;
    out += ",score\n";
    for (const auto& score : scores) {
        out += score.implementation;
        for (const auto& platform : platforms) {
            const EfficiencyRecord* r = detail::record_of(score, platform);
            out += ",";
            if (r) out += format_full(r->e);
        }
        out += "," + format_full(score.value) + "\n";
    }
    return out;
}

inline std::string render_json(const std::vector<PortabilityScore>& scores) {
    return round_numbers(json(scores)).dump(2) + "\n";
}

inline std::string render_findings(const AuditReport& report) {
    if (report.findings.empty()) return "no findings\n";
    std::string out;
    for (const auto& f : report.findings) {
        out += "[" + std::string(to_string(f.severity)) + "]";
        if (f.criterion) out += " criterion " + std::to_string(*f.criterion) + ":";
        out += " " + f.description;
        if (f.before_value && f.after_value)
            out += " (" + format_full(*f.before_value) + " -> " + format_full(*f.after_value) + ")";
        else if (f.after_value)
            out += " (" + format_full(*f.after_value) + ")";
        out += '\n';
    }
    return out;
}

// Before/after matrix in the struck-through style of published corrections:
// changed cells show "old% -> new%".
inline std::string render_diff_table(const std::vector<PortabilityScore>& before,
                                     const std::vector<PortabilityScore>& after,
                                     const std::vector<std::string>& platforms) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"implementation"};
    for (const auto& p : platforms) header.push_back(p);
    header.push_back("score");
    cells.push_back(header);

    auto score_of = [](const std::vector<PortabilityScore>& scores, const std::string& impl)
        -> const PortabilityScore* {
        for (const auto& s : scores)
            if (s.implementation == impl) return &s;
        return nullptr;
    };

    std::vector<std::string> implementations;
    for (const auto& s : before) implementations.push_back(s.implementation);
    for (const auto& s : after)
        if (!score_of(before, s.implementation)) implementations.push_back(s.implementation);

    auto cell = [](const PortabilityScore* b, const PortabilityScore* a,
                   const std::string& platform) {
        auto text = [&platform](const PortabilityScore* s) -> std::string {
            if (!s) return "-";
            const EfficiencyRecord* r = detail::record_of(*s, platform);
            return r ? std::to_string(percent_half_up(r->e)) + "%" : "-";
        };
        std::string old_text = text(b), new_text = text(a);
        return old_text == new_text ? new_text : old_text + " -> " + new_text;
    };

    for (const auto& impl : implementations) {
        const PortabilityScore* b = score_of(before, impl);
        const PortabilityScore* a = score_of(after, impl);
        std::vector<std::string> row{impl};
        for (const auto& platform : platforms) row.push_back(cell(b, a, platform));
        std::string old_score = b ? std::to_string(percent_half_up(b->value)) + "%" : "-";
        std::string new_score = a ? std::to_string(percent_half_up(a->value)) + "%" : "-";
        row.push_back(old_score == new_score ? new_score : old_score + " -> " + new_score);
        cells.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(cells.front().size(), 0);
    for (const auto& row : cells)
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());

    std::string out;
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += "  ";
            out += detail::pad(row[i], widths[i]);
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    }
    return out;
}

} // namespace ppmetrics
