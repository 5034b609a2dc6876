// SPDX-License-Identifier: Apache-2.0
//
// ppmetrics — batch scoring of measurement files, criteria audits, bulk
// ingestion into a repository store, and the HTTP service.
//
// Exit codes: 0 success, 1 parse error, 2 validation error, 3 audit
// violations found.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppmetrics/audit.hpp"
#include "ppmetrics/csv.hpp"
#include "ppmetrics/metrics.hpp"
#include "ppmetrics/render.hpp"
#include "ppmetrics/serde.hpp"
#include "ppmetrics/service.hpp"
#include "ppmetrics/store.hpp"

namespace {

using namespace ppmetrics;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitValidation = 2;
constexpr int kExitViolations = 3;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Error::Code::parse_error:
        case Error::Code::io_error: return kExitParse;
        default: return kExitValidation;
    }
}

PolicyVariant parse_policy_flag(const std::string& s) {
    if (s == "study-best") return PolicyVariant::study_local_best;
    if (s == "fixed-ref") return PolicyVariant::fixed_reference;
    if (s == "repo-best") return PolicyVariant::repository_best;
    if (s == "arch-theoretical") return PolicyVariant::architectural_theoretical;
    if (s == "arch-roofline") return PolicyVariant::architectural_roofline;
    return policy_variant_from_string(s); // canonical names also accepted
}

Metric parse_metric_flag(const std::string& s) {
    if (s == "arithmetic") return Metric::arithmetic_mean;
    if (s == "harmonic") return Metric::harmonic_mean;
    return metric_from_string(s);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    for (char c : s) {
        if (c == ',') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

std::map<std::string, std::string> parse_reference_flag(const std::string& s) {
    std::map<std::string, std::string> refs;
    for (const auto& pair : split_list(s)) {
        auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size())
            throw Error(Error::Code::invalid_argument,
                        "--reference entries must look like PLATFORM=IMPLEMENTATION, got '" +
                            pair + "'");
        refs[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return refs;
}

// Platform records for a computation: synthesized from the data file, merged
// with any records (peaks, arch classes) from --platform-file, and padded so
// every declared platform has a record.
std::vector<Platform> assemble_platforms(const MeasurementFile& file,
                                         const std::string& platform_file,
                                         const std::vector<std::string>& declared) {
    std::vector<Platform> platforms = file.platforms;
    auto upsert = [&platforms](const Platform& p) {
        for (auto& existing : platforms) {
            if (existing.id == p.id) {
                existing = p;
                return;
            }
        }
        platforms.push_back(p);
    };
    if (!platform_file.empty()) {
        std::ifstream in(platform_file);
        if (!in) throw Error(Error::Code::io_error, "cannot open " + platform_file);
        json parsed = json::parse(in, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_array())
            throw Error(Error::Code::parse_error,
                        platform_file + ": expected a JSON array of platform records");
        for (const auto& entry : parsed) upsert(entry.get<Platform>());
    }
    for (const auto& id : declared) {
        bool known = false;
        for (const auto& p : platforms) known = known || p.id == id;
        if (!known) platforms.push_back(Platform{id, "", ArchClass::other, {}, {}, {}});
    }
    return platforms;
}

std::vector<std::string> declared_platforms(const std::string& platforms_flag,
                                            const MeasurementFile& file) {
    if (!platforms_flag.empty()) {
        auto declared = split_list(platforms_flag);
        std::set<std::string> declared_set(declared.begin(), declared.end());
        for (const auto& id : file.platform_order) {
            if (!declared_set.count(id))
                std::cerr << "warning: platform '" << id
                          << "' present in data but not in the declared platform set; ignored\n";
        }
        return declared;
    }
    return file.platform_order;
}

struct StudyFlags {
    std::string policy = "study-best";
    std::string metric = "arithmetic";
    std::string platforms;
    std::string reference;
    std::string platform_file;
    double arithmetic_intensity = 0.0;

    BaselinePolicy make_policy() const {
        BaselinePolicy p;
        p.variant = parse_policy_flag(policy);
        if (!reference.empty()) p.references = parse_reference_flag(reference);
        if (arithmetic_intensity > 0.0) p.arithmetic_intensity = arithmetic_intensity;
        return p;
    }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--policy", policy,
                        "baseline policy: study-best, fixed-ref, repo-best, arch-theoretical, "
                        "arch-roofline")
            ->capture_default_str();
        cmd->add_option("--metric", metric, "portability metric: arithmetic, harmonic")
            ->capture_default_str();
        cmd->add_option("--platforms", platforms,
                        "declared platform set, comma-separated and ordered (default: platforms "
                        "in data order)");
        cmd->add_option("--reference", reference,
                        "fixed-ref baselines, e.g. A100=CUDA,P100=CUDA,MI250=HIP");
        cmd->add_option("--platform-file", platform_file,
                        "JSON array of platform records (peaks, arch classes)");
        cmd->add_option("--ai", arithmetic_intensity,
                        "arithmetic intensity (FLOP/byte) for arch-roofline");
    }
};

// Distinct (app, problem) pairs in file order.
std::vector<std::pair<std::string, std::string>> study_pairs(const MeasurementFile& file) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& m : file.measurements) {
        std::pair<std::string, std::string> key{m.app, m.problem};
        if (std::find(pairs.begin(), pairs.end(), key) == pairs.end()) pairs.push_back(key);
    }
    return pairs;
}

int cmd_compute(const std::string& input, const StudyFlags& flags, const std::string& format) {
    MeasurementFile file = parse_measurement_csv_file(input);
    if (file.measurements.empty()) throw Error(Error::Code::parse_error, input + ": no data rows");

    std::vector<std::string> declared = declared_platforms(flags.platforms, file);
    std::vector<Platform> platforms = assemble_platforms(file, flags.platform_file, declared);

    auto pairs = study_pairs(file);
    bool first = true;
    for (const auto& [app, problem] : pairs) {
        StudyDefinition study{app, problem, declared, flags.make_policy(),
                              parse_metric_flag(flags.metric)};

        for (const auto& finding : check_mixed_arch(study, platforms).findings)
            std::cerr << "warning: " << finding.description << "\n";

        ValidationReport issues = validate_study(study, file.measurements, platforms);
        if (!issues.empty()) {
            for (const auto& issue : issues)
                std::cerr << "validation: [" << issue.code << "] " << issue.message << "\n";
            return kExitValidation;
        }

        auto scores = score_study(study, file.measurements, file.measurements, platforms);
        if (pairs.size() > 1) {
            if (!first) std::cout << "\n";
            std::cout << app << " / " << problem << "\n";
        }
        if (format == "csv") std::cout << render_csv(scores, declared);
        else if (format == "json") std::cout << render_json(scores);
        else std::cout << render_table(scores, declared);
        first = false;
    }
    return kExitOk;
}

int cmd_audit(const std::string& before_path, const std::string& after_path,
              const StudyFlags& flags, bool diff, const std::string& format) {
    MeasurementFile before_file = parse_measurement_csv_file(before_path);
    MeasurementFile after_file = parse_measurement_csv_file(after_path);

    std::vector<std::string> declared = declared_platforms(flags.platforms, before_file);
    std::vector<Platform> platforms = assemble_platforms(after_file, flags.platform_file, declared);

    auto before_pairs = study_pairs(before_file);
    AuditReport report;
    for (const auto& [app, problem] : before_pairs) {
        bool in_after = false;
        for (const auto& pair : study_pairs(after_file))
            in_after = in_after || (pair.first == app && pair.second == problem);
        if (!in_after)
            throw Error(Error::Code::study_mismatch,
                        "(" + app + ", " + problem + ") present in --before but not in --after");

        StudyDefinition study{app, problem, declared, flags.make_policy(),
                              parse_metric_flag(flags.metric)};
        auto before = make_snapshot(study, before_file.measurements, platforms);
        auto after = make_snapshot(study, after_file.measurements, platforms);
        report.merge(check_criterion4(diff_snapshots(before, after)));

        if (diff) std::cout << render_diff_table(before.scores, after.scores, declared) << "\n";
    }

    if (format == "json") std::cout << round_numbers(json(report)).dump(2) << "\n";
    else std::cout << render_findings(report);

    return report.has_violations() ? kExitViolations : kExitOk;
}

int cmd_import(const std::string& input, const std::string& store_dir) {
    if (store_dir.empty())
        throw Error(Error::Code::invalid_argument,
                    "--store is required (or set PPMETRICS_STORE)");
    MeasurementFile file = parse_measurement_csv_file(input);

    Store store(store_dir);

    // Replays the rows against each store; `commit` controls whether this is
    // the in-memory dry run or the real thing. Aborts on the first invalid
    // row so a failed import writes nothing.
    auto run = [&file, &input](Store& target) {
        std::size_t ingested = 0, duplicates = 0;
        std::set<std::string> recalculated;
        for (std::size_t i = 0; i < file.measurements.size(); ++i) {
            const Measurement& m = file.measurements[i];
            try {
                bool platform_known = false;
                for (const auto& p : target.platforms()) platform_known |= p.id == m.platform;
                if (!platform_known)
                    target.add_platform(Platform{m.platform, "", ArchClass::other, {}, {}, {}});

                bool impl_known = false;
                for (const auto& impl : target.implementations())
                    impl_known |= impl.app == m.app && impl.id == m.implementation;
                if (!impl_known) {
                    std::string model;
                    for (const auto& impl : file.implementations)
                        if (impl.app == m.app && impl.id == m.implementation) model = impl.model;
                    target.add_implementation(Implementation{
                        m.implementation, m.app, model, PortabilityClass::portable_framework});
                }

                bool problem_known = false;
                for (const auto& p : target.problems())
                    problem_known |= p.app == m.app && p.problem == m.problem;
                if (!problem_known) target.add_problem(ProblemSpec{m.app, m.problem, {}});

                IngestResult r = target.add_measurement(m);
                for (const auto& key : r.recalculated) recalculated.insert(key);
                ++ingested;
            } catch (const Error& e) {
                if (e.code() == Error::Code::duplicate) {
                    ++duplicates;
                    continue;
                }
                throw Error(e.code(), input + " row at line " +
                                          std::to_string(file.line_numbers[i]) + ": " + e.what());
            }
        }
        return std::tuple{ingested, duplicates, recalculated};
    };

    // Dry run against a copy; any validation failure aborts before the real
    // store sees a single event.
    run(*store.clone_in_memory());
    auto [ingested, duplicates, recalculated] = run(store);

    std::size_t unverified = 0;
    for (const auto& m : file.measurements)
        if (!is_verified(m)) ++unverified;

    std::cout << "ingested " << ingested << " measurements";
    if (duplicates) std::cout << " (" << duplicates << " duplicates skipped)";
    std::cout << "\n";
    if (unverified)
        std::cout << unverified
                  << " measurements lack full provenance (compiler/compiler_flags/input_size) "
                     "and are flagged unverified\n";
    if (!recalculated.empty()) {
        std::cout << "recalculated studies:\n";
        for (const auto& key : recalculated) std::cout << "  " << key << "\n";
    }
    return kExitOk;
}

int cmd_serve(const std::string& store_dir, const std::string& listen) {
    if (store_dir.empty())
        throw Error(Error::Code::invalid_argument,
                    "--store is required (or set PPMETRICS_STORE)");
    auto colon = listen.rfind(':');
    if (colon == std::string::npos)
        throw Error(Error::Code::invalid_argument, "--listen must look like HOST:PORT");
    std::string host = listen.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception&) {
        throw Error(Error::Code::invalid_argument, "bad port in --listen");
    }

    Store store(store_dir); // replays the event log; corrupt logs fail here
    std::cout << "store " << store_dir << " at seq " << store.current_seq() << ", serving on "
              << host << ":" << port << "\n";
    Service service(store);
    if (!service.run(host, port))
        throw Error(Error::Code::io_error, "cannot listen on " + listen + " (address in use?)");
    return kExitOk;
}

int cmd_report(const std::string& store_dir, const std::string& app, const std::string& problem,
               const std::string& policy, const std::string& metric, const std::string& format) {
    if (store_dir.empty())
        throw Error(Error::Code::invalid_argument,
                    "--store is required (or set PPMETRICS_STORE)");
    Store store(store_dir);

    std::optional<std::string> app_filter, problem_filter;
    std::optional<PolicyVariant> policy_filter;
    std::optional<Metric> metric_filter;
    if (!app.empty()) app_filter = app;
    if (!problem.empty()) problem_filter = problem;
    if (!policy.empty()) policy_filter = parse_policy_flag(policy);
    if (!metric.empty()) metric_filter = parse_metric_flag(metric);

    bool first = true;
    for (const auto& def : store.studies()) {
        if (app_filter && def.app != *app_filter) continue;
        if (problem_filter && def.problem != *problem_filter) continue;
        if (policy_filter && def.policy.variant != *policy_filter) continue;
        if (metric_filter && def.metric != *metric_filter) continue;

        auto scores = store.query_scores(def.app, def.problem, def.policy.variant, def.metric);
        std::vector<PortabilityScore> of_study;
        for (auto& s : scores)
            if (s.platform_set == def.platforms && s.policy == def.policy) of_study.push_back(s);

        if (!first) std::cout << "\n";
        std::cout << study_key(def) << "\n";
        if (format == "csv") std::cout << render_csv(of_study, def.platforms);
        else if (format == "json") std::cout << render_json(of_study);
        else std::cout << render_table(of_study, def.platforms);
        first = false;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"performance portability metrics engine and measurement repository"};
    app.require_subcommand(1);

    // compute
    std::string compute_input, compute_format = "table";
    StudyFlags compute_flags;
    CLI::App* compute = app.add_subcommand(
        "compute", "score a measurement file: efficiency matrix plus portability scores");
    compute->add_option("input", compute_input, "measurement CSV file")->required();
    compute_flags.add_to(compute);
    compute->add_option("--format", compute_format, "output format: table, csv, json")
        ->capture_default_str();

    // audit
    std::string audit_before, audit_after, audit_format = "text";
    bool audit_diff = false;
    StudyFlags audit_flags;
    CLI::App* audit = app.add_subcommand(
        "audit", "diff two measurement files and report metric-criteria violations");
    audit->add_option("--before", audit_before, "measurement CSV before the change")->required();
    audit->add_option("--after", audit_after, "measurement CSV after the change")->required();
    audit_flags.add_to(audit);
    audit->add_flag("--diff", audit_diff, "print a before/after score table");
    audit->add_option("--format", audit_format, "output format: text, json")
        ->capture_default_str();

    // import
    std::string import_input, import_store;
    CLI::App* import_cmd =
        app.add_subcommand("import", "bulk-ingest a measurement file into a store");
    import_cmd->add_option("input", import_input, "measurement CSV file")->required();
    import_cmd->add_option("--store", import_store, "store directory")
        ->envname("PPMETRICS_STORE");

    // serve
    std::string serve_store, serve_listen = "127.0.0.1:8080";
    CLI::App* serve = app.add_subcommand("serve", "serve the repository HTTP API");
    serve->add_option("--store", serve_store, "store directory")->envname("PPMETRICS_STORE");
    serve->add_option("--listen", serve_listen, "listen address HOST:PORT")
        ->capture_default_str();

    // report
    std::string report_store, report_app, report_problem, report_policy, report_metric;
    std::string report_format = "table";
    CLI::App* report = app.add_subcommand("report", "render current scores from a store");
    report->add_option("--store", report_store, "store directory")->envname("PPMETRICS_STORE");
    report->add_option("--app", report_app, "filter by application");
    report->add_option("--problem", report_problem, "filter by problem");
    report->add_option("--policy", report_policy, "filter by baseline policy");
    report->add_option("--metric", report_metric, "filter by metric");
    report->add_option("--format", report_format, "output format: table, csv, json")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (compute->parsed()) return cmd_compute(compute_input, compute_flags, compute_format);
        if (audit->parsed())
            return cmd_audit(audit_before, audit_after, audit_flags, audit_diff, audit_format);
        if (import_cmd->parsed()) return cmd_import(import_input, import_store);
        if (serve->parsed()) return cmd_serve(serve_store, serve_listen);
        if (report->parsed())
            return cmd_report(report_store, report_app, report_problem, report_policy,
                              report_metric, report_format);
    } catch (const ppmetrics::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
