// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "ppmetrics/model.hpp"

namespace ppmetrics {

// ---------------------------------------------------------------------------
// Measurement CSV ingestion. Fixed header:
//   app,problem,implementation,model,platform,kind,value,compiler,compiler_flags,input_size
// Extra columns are preserved into the measurement meta map.
// ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "app,problem,implementation,model,platform,kind,value,compiler,compiler_flags,input_size";

// Everything a measurement file defines: the rows themselves plus the
// platform/implementation/problem records they imply.
struct MeasurementFile {
    std::vector<Measurement> measurements;
    std::vector<std::size_t> line_numbers;       // source line of each measurement
    std::vector<Platform> platforms;             // synthesized, no peak data
    std::vector<Implementation> implementations; // synthesized as portable_framework
    std::vector<ProblemSpec> problems;
    std::vector<std::string> platform_order;     // first-appearance order, per file
};

namespace detail {

// One CSV record; quoted fields may contain commas and doubled quotes.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted)
        throw Error(Error::Code::parse_error,
                    "line " + std::to_string(line_no) + ": unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

} // namespace detail

inline MeasurementFile parse_measurement_csv(std::istream& in) {
    MeasurementFile file;

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw Error(Error::Code::parse_error, "empty input");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> expected = {"app",      "problem",  "implementation",
                                               "model",    "platform", "kind",
                                               "value",    "compiler", "compiler_flags",
                                               "input_size"};
    std::vector<std::string> header = detail::split_csv_line(line, line_no);
    if (header.size() < expected.size())
        throw Error(Error::Code::parse_error, "line 1: header has too few columns");
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (header[i] != expected[i])
            throw Error(Error::Code::parse_error, "line 1: header column " + std::to_string(i + 1) +
                                                      " is '" + header[i] + "', expected '" +
                                                      expected[i] + "'");
    }
    std::vector<std::string> extra_columns(header.begin() + expected.size(), header.end());

    auto note_platform = [&file](const std::string& id) {
        if (std::find(file.platform_order.begin(), file.platform_order.end(), id) !=
            file.platform_order.end())
            return;
        file.platform_order.push_back(id);
        file.platforms.push_back(Platform{id, "", ArchClass::other, {}, {}, {}});
    };
    auto note_implementation = [&file](const std::string& id, const std::string& app,
                                       const std::string& model) {
        for (const auto& impl : file.implementations)
            if (impl.id == id && impl.app == app) return;
        file.implementations.push_back(
            Implementation{id, app, model, PortabilityClass::portable_framework});
    };
    auto note_problem = [&file](const std::string& app, const std::string& problem) {
        for (const auto& p : file.problems)
            if (p.app == app && p.problem == problem) return;
        file.problems.push_back(ProblemSpec{app, problem, {}});
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = detail::split_csv_line(line, line_no);
        if (fields.size() < expected.size())
            throw Error(Error::Code::parse_error,
                        "line " + std::to_string(line_no) + ": expected at least " +
                            std::to_string(expected.size()) + " fields, got " +
                            std::to_string(fields.size()));

        Measurement m;
        m.app = fields[0];
        m.problem = fields[1];
        m.implementation = fields[2];
        m.platform = fields[4];
        for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
            if (fields[i].empty())
                throw Error(Error::Code::parse_error, "line " + std::to_string(line_no) +
                                                          ": empty '" + expected[i] + "' field");
        }
        try {
            m.kind = measurement_kind_from_string(fields[5]);
        } catch (const Error&) {
            throw Error(Error::Code::parse_error, "line " + std::to_string(line_no) +
                                                      ": unknown measurement kind '" + fields[5] +
                                                      "'");
        }
        try {
            std::size_t consumed = 0;
            m.value = std::stod(fields[6], &consumed);
            if (consumed != fields[6].size()) throw std::invalid_argument(fields[6]);
        } catch (const std::exception&) {
            throw Error(Error::Code::parse_error,
                        "line " + std::to_string(line_no) + ": bad value '" + fields[6] + "'");
        }
        if (m.value <= 0.0)
            throw Error(Error::Code::parse_error, "line " + std::to_string(line_no) +
                                                      ": value must be strictly positive");

        if (!fields[7].empty()) m.meta["compiler"] = fields[7];
        if (!fields[8].empty()) m.meta["compiler_flags"] = fields[8];
        if (!fields[9].empty()) m.meta["input_size"] = fields[9];
        for (std::size_t i = 0; i < extra_columns.size(); ++i) {
            std::size_t column = expected.size() + i;
            if (column < fields.size() && !fields[column].empty())
                m.meta[extra_columns[i]] = fields[column];
        }

        note_platform(m.platform);
        note_implementation(m.implementation, m.app, fields[3]);
        note_problem(m.app, m.problem);
        file.measurements.push_back(std::move(m));
        file.line_numbers.push_back(line_no);
    }

    return file;
}

inline MeasurementFile parse_measurement_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Error::Code::io_error, "cannot open " + path);
    try {
        return parse_measurement_csv(in);
    } catch (const Error& e) {
        if (e.code() == Error::Code::parse_error)
            throw Error(Error::Code::parse_error, path + ": " + e.what());
        throw;
    }
}

} // namespace ppmetrics
