// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#ifndef _WIN32
#include <unistd.h>
#endif

#include "ppmetrics/audit.hpp"
#include "ppmetrics/metrics.hpp"
#include "ppmetrics/serde.hpp"

namespace ppmetrics {

// ---------------------------------------------------------------------------
// Persistent, append-only measurement repository. Every mutation is an event;
// the log is the source of truth and replaying it reproduces bit-identical
// scores and histories. Studies referencing an ingested (app, problem) are
// recalculated synchronously before the ingest returns.
//
// Concurrency: single writer, multiple readers. Writers take the exclusive
// lock for one event application; reads see a consistent snapshot.
// ---------------------------------------------------------------------------

enum class EventKind { add_platform, add_implementation, add_problem, add_measurement, define_study };

inline std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::add_platform: return "add_platform";
        case EventKind::add_implementation: return "add_implementation";
        case EventKind::add_problem: return "add_problem";
        case EventKind::add_measurement: return "add_measurement";
        case EventKind::define_study: return "define_study";
    }
    return "add_measurement";
}

inline EventKind event_kind_from_string(std::string_view s) {
    if (s == "add_platform") return EventKind::add_platform;
    if (s == "add_implementation") return EventKind::add_implementation;
    if (s == "add_problem") return EventKind::add_problem;
    if (s == "add_measurement") return EventKind::add_measurement;
    if (s == "define_study") return EventKind::define_study;
    detail::throw_unknown_enum("event kind", s);
}

struct Event {
    std::uint64_t seq = 0;
    std::string ts; // ISO-8601 UTC, assigned at ingest and preserved by replay
    EventKind kind = EventKind::add_measurement;
    json payload;

    friend bool operator==(const Event&, const Event&) = default;
};

// Log line shape (field names are part of the store's on-disk contract).
inline void to_json(json& j, const Event& e) {
    j = json{{"seq", e.seq}, {"ts", e.ts}, {"kind", to_string(e.kind)}, {"payload", e.payload}};
}

inline void from_json(const json& j, Event& e) {
    if (!j.contains("seq") || !j["seq"].is_number_unsigned())
        throw Error(Error::Code::parse_error, "missing or non-integer field 'seq'");
    e.seq = j["seq"].get<std::uint64_t>();
    e.ts = detail::require_string(j, "ts");
    e.kind = event_kind_from_string(detail::require_string(j, "kind"));
    if (!j.contains("payload"))
        throw Error(Error::Code::parse_error, "missing field 'payload'");
    e.payload = j["payload"];
}

struct ScoreHistoryEntry {
    std::uint64_t seq = 0; // seq of the recalculation that produced this value
    PortabilityScore score;

    friend bool operator==(const ScoreHistoryEntry&, const ScoreHistoryEntry&) = default;
};

struct ScoreHistory {
    std::string study_key;
    std::string app;
    std::string problem;
    std::string implementation;
    std::vector<ScoreHistoryEntry> entries; // ordered by seq, one per value change

    friend bool operator==(const ScoreHistory&, const ScoreHistory&) = default;
};

struct IngestResult {
    std::uint64_t seq = 0;
    std::vector<std::string> recalculated; // study keys whose scores changed
};

inline std::string study_key(const StudyDefinition& def) {
    std::string key = def.app + "/" + def.problem + "/" + std::string(to_string(def.metric)) + "/" +
                      std::string(to_string(def.policy.variant)) + "/";
    for (std::size_t i = 0; i < def.platforms.size(); ++i) {
        if (i) key += "+";
        key += def.platforms[i];
    }
    return key;
}

class Store {
public:
    // In-memory store: nothing is persisted.
    Store() = default;

    // Persistent store rooted at `dir`; replays dir/events.log when present.
    explicit Store(const std::filesystem::path& dir) : dir_(dir) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw Error(Error::Code::io_error, "cannot create store directory " + dir_.string());
        auto log_path = dir_ / "events.log";
        if (std::filesystem::exists(log_path)) {
            std::FILE* f = std::fopen(log_path.c_str(), "rb");
            if (!f) throw Error(Error::Code::io_error, "cannot open " + log_path.string());
            std::string data;
            char buf[1 << 16];
            std::size_t n;
            while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) data.append(buf, n);
            std::fclose(f);
            replay(data);
        }
        open_log_for_append();
    }

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    ~Store() {
        if (log_file_) std::fclose(log_file_);
    }

    // Deep copy of the current state with no file backing. Used for
    // all-or-nothing dry runs (bulk import).
    std::unique_ptr<Store> clone_in_memory() const {
        std::shared_lock lock(mutex_);
        auto clone = std::make_unique<Store>();
        clone->replay(export_snapshot_locked());
        return clone;
    }

    // --- ingestion ----------------------------------------------------------

    std::uint64_t add_platform(const Platform& p) {
        std::unique_lock lock(mutex_);
        validate_platform(p);
        return append(EventKind::add_platform, json(p)).seq;
    }

    std::uint64_t add_implementation(const Implementation& i) {
        std::unique_lock lock(mutex_);
        validate_implementation(i);
        return append(EventKind::add_implementation, json(i)).seq;
    }

    std::uint64_t add_problem(const ProblemSpec& p) {
        std::unique_lock lock(mutex_);
        validate_problem(p);
        return append(EventKind::add_problem, json(p)).seq;
    }

    IngestResult add_measurement(const Measurement& m) {
        std::unique_lock lock(mutex_);
        validate_measurement(m);
        return append(EventKind::add_measurement, json(m));
    }

    IngestResult define_study(const StudyDefinition& def) {
        std::unique_lock lock(mutex_);
        validate_study_definition(def);
        return append(EventKind::define_study, json(def));
    }

    // Recomputes every study for (app, problem) and returns the scores whose
    // values changed beyond 1e-12. A no-op (and returns empty) right after an
    // ingest, since ingestion recalculates synchronously.
    std::vector<PortabilityScore> recalculate(const std::string& app, const std::string& problem) {
        std::unique_lock lock(mutex_);
        std::vector<PortabilityScore> updated;
        recalculate_locked(app, problem, seq_, &updated);
        return updated;
    }

    // --- queries -------------------------------------------------------------

    std::vector<PortabilityScore> query_scores(const std::optional<std::string>& app = {},
                                               const std::optional<std::string>& problem = {},
                                               std::optional<PolicyVariant> policy = {},
                                               std::optional<Metric> metric = {}) const {
        std::shared_lock lock(mutex_);
        std::vector<PortabilityScore> out;
        for (const auto& study : studies_) {
            if (app && study.def.app != *app) continue;
            if (problem && study.def.problem != *problem) continue;
            if (policy && study.def.policy.variant != *policy) continue;
            if (metric && study.def.metric != *metric) continue;
            out.insert(out.end(), study.scores.begin(), study.scores.end());
        }
        return out;
    }

    std::vector<ScoreHistory> history(const std::string& app, const std::string& problem,
                                      const std::string& implementation) const {
        std::shared_lock lock(mutex_);
        std::vector<ScoreHistory> out;
        for (const auto& study : studies_) {
            if (study.def.app != app || study.def.problem != problem) continue;
            ScoreHistory h;
            h.study_key = study.key;
            h.app = app;
            h.problem = problem;
            h.implementation = implementation;
            auto it = study.history.find(implementation);
            if (it != study.history.end()) h.entries = it->second;
            if (!h.entries.empty()) out.push_back(std::move(h));
        }
        return out;
    }

    std::uint64_t current_seq() const {
        std::shared_lock lock(mutex_);
        return seq_;
    }

    std::vector<Platform> platforms() const {
        std::shared_lock lock(mutex_);
        return platforms_;
    }
    std::vector<Implementation> implementations() const {
        std::shared_lock lock(mutex_);
        return implementations_;
    }
    std::vector<ProblemSpec> problems() const {
        std::shared_lock lock(mutex_);
        return problems_;
    }
    std::vector<Measurement> measurements() const {
        std::shared_lock lock(mutex_);
        std::vector<Measurement> out;
        out.reserve(measurements_.size());
        for (const auto& m : measurements_) out.push_back(m.row);
        return out;
    }
    std::vector<StudyDefinition> studies() const {
        std::shared_lock lock(mutex_);
        std::vector<StudyDefinition> out;
        out.reserve(studies_.size());
        for (const auto& s : studies_) out.push_back(s.def);
        return out;
    }
    std::vector<Event> events() const {
        std::shared_lock lock(mutex_);
        return log_;
    }
    std::vector<Measurement> unverified_measurements() const {
        std::shared_lock lock(mutex_);
        std::vector<Measurement> out;
        for (const auto& m : measurements_)
            if (!is_verified(m.row)) out.push_back(m.row);
        return out;
    }

    // --- snapshots -------------------------------------------------------------

    // Complete, deterministic serialization of the event log (the events.log
    // byte content).
    std::string export_snapshot() const {
        std::shared_lock lock(mutex_);
        return export_snapshot_locked();
    }

    // Replays an exported log into this store. Requires an empty store.
    void import_snapshot(const std::string& data) {
        std::unique_lock lock(mutex_);
        if (seq_ != 0)
            throw Error(Error::Code::state_error, "import requires an empty store");
        replay(data);
        if (log_file_) {
            for (const auto& event : log_) write_event_line(event);
        }
    }

    // --- audit -------------------------------------------------------------------

    // Diffs each matching study between the repository states as of from_seq
    // and to_seq and reports criterion-4 violations.
    AuditReport audit_between(const std::optional<std::string>& app,
                              const std::optional<std::string>& problem, std::uint64_t from_seq,
                              std::uint64_t to_seq, std::optional<PolicyVariant> policy = {},
                              std::optional<Metric> metric = {}) const {
        std::shared_lock lock(mutex_);
        if (from_seq > to_seq || to_seq > seq_)
            throw Error(Error::Code::out_of_range,
                        "sequence range [" + std::to_string(from_seq) + ", " +
                            std::to_string(to_seq) + "] outside the event log (current seq " +
                            std::to_string(seq_) + ")");
        AuditReport report;
        if (from_seq == to_seq) return report;

        ScoreOptions lenient{.lenient_baselines = true};
        for (const auto& study : studies_) {
            if (study.defined_seq > to_seq) continue;
            if (app && study.def.app != *app) continue;
            if (problem && study.def.problem != *problem) continue;
            if (policy && study.def.policy.variant != *policy) continue;
            if (metric && study.def.metric != *metric) continue;

            auto before = make_snapshot(study.def,
                                        measurements_at(from_seq, study.def.app, study.def.problem),
                                        platforms_, lenient);
            auto after = make_snapshot(study.def,
                                       measurements_at(to_seq, study.def.app, study.def.problem),
                                       platforms_, lenient);
            report.merge(check_criterion4(diff_snapshots(before, after)));
        }
        return report;
    }

    std::vector<Measurement> measurements_at(std::uint64_t seq, const std::string& app,
                                             const std::string& problem) const {
        std::vector<Measurement> out;
        for (const auto& m : measurements_)
            if (m.seq <= seq && m.row.app == app && m.row.problem == problem) out.push_back(m.row);
        return out;
    }

private:
    struct StoredMeasurement {
        Measurement row;
        std::uint64_t seq = 0;
    };

    struct StudyState {
        StudyDefinition def;
        std::string key;
        std::uint64_t defined_seq = 0;
        std::vector<PortabilityScore> scores;
        std::map<std::string, std::vector<ScoreHistoryEntry>> history; // per implementation
    };

    // --- validation (all called under the exclusive lock) -----------------------

    void validate_platform(const Platform& p) const {
        if (p.id.empty())
            throw Error(Error::Code::validation_failed, "platform id must be non-empty");
        for (auto peak : {p.peak_compute, p.peak_mem_bw, p.attainable_peak})
            if (peak && *peak <= 0.0)
                throw Error(Error::Code::validation_failed,
                            "platform peak figures must be strictly positive");
        for (const auto& existing : platforms_) {
            if (existing.id != p.id) continue;
            if (existing == p)
                throw Error(Error::Code::duplicate, "platform " + p.id + " already registered");
            throw Error(Error::Code::validation_failed,
                        "platform id " + p.id + " already registered with different fields");
        }
    }

    void validate_implementation(const Implementation& i) const {
        if (i.id.empty() || i.app.empty())
            throw Error(Error::Code::validation_failed,
                        "implementation id and app must be non-empty");
        for (const auto& existing : implementations_) {
            if (existing.id != i.id || existing.app != i.app) continue;
            if (existing == i)
                throw Error(Error::Code::duplicate,
                            "implementation " + i.id + " already registered for " + i.app);
            throw Error(Error::Code::validation_failed,
                        "implementation " + i.id + " already registered for " + i.app +
                            " with different fields");
        }
    }

    void validate_problem(const ProblemSpec& p) const {
        if (p.app.empty() || p.problem.empty())
            throw Error(Error::Code::validation_failed, "app and problem must be non-empty");
        for (const auto& existing : problems_) {
            if (existing.app != p.app || existing.problem != p.problem) continue;
            if (existing == p)
                throw Error(Error::Code::duplicate,
                            "problem (" + p.app + ", " + p.problem + ") already registered");
            throw Error(Error::Code::validation_failed,
                        "problem (" + p.app + ", " + p.problem +
                            ") already registered with different fields");
        }
    }

    void validate_measurement(const Measurement& m) const {
        if (m.value <= 0.0)
            throw Error(Error::Code::validation_failed,
                        "measurement value must be strictly positive");
        ValidationReport integrity = check_referential_integrity({m}, platforms_, implementations_, problems_);
        if (!integrity.empty())
            throw Error(Error::Code::validation_failed, integrity.front().message);
        for (const auto& existing : measurements_) {
            if (existing.row == m)
                throw Error(Error::Code::duplicate, "duplicate measurement rejected");
            if (existing.row.app == m.app && existing.row.problem == m.problem &&
                existing.row.kind != m.kind)
                throw Error(Error::Code::validation_failed,
                            "measurement kind conflicts with existing rows for (" + m.app + ", " +
                                m.problem + "); mixing runtime and throughput is rejected");
        }
        for (const auto& study : studies_) {
            if (study.def.app != m.app || study.def.problem != m.problem) continue;
            if (is_architectural(study.def.policy.variant) &&
                m.kind != MeasurementKind::throughput_gflops)
                throw Error(Error::Code::validation_failed,
                            "study " + study.key +
                                " uses an architectural policy; measurements must be "
                                "throughput_gflops");
        }
    }

    void validate_study_definition(const StudyDefinition& def) const {
        bool problem_known = false;
        for (const auto& p : problems_)
            if (p.app == def.app && p.problem == def.problem) problem_known = true;
        if (!problem_known)
            throw Error(Error::Code::validation_failed,
                        "unknown problem (" + def.app + ", " + def.problem + ")");
        for (const auto& id : def.platforms) {
            bool known = false;
            for (const auto& p : platforms_) known = known || p.id == id;
            if (!known)
                throw Error(Error::Code::validation_failed, "unknown platform id: " + id);
        }
        std::vector<Measurement> rows;
        for (const auto& m : measurements_) rows.push_back(m.row);
        ValidationReport report = validate_study(def, rows, platforms_);
        if (!report.empty())
            throw Error(Error::Code::validation_failed, report.front().message);
        std::string key = study_key(def);
        for (const auto& existing : studies_)
            if (existing.key == key)
                throw Error(Error::Code::duplicate, "study " + key + " already defined");
    }

    // --- event machinery ---------------------------------------------------------

    static std::string now_utc() {
        std::time_t t = std::time(nullptr);
        std::tm tm{};
#ifdef _WIN32
        gmtime_s(&tm, &t);
#else
        gmtime_r(&t, &tm);
#endif
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    IngestResult append(EventKind kind, json payload) {
        Event event{seq_ + 1, now_utc(), kind, std::move(payload)};
        IngestResult result = apply(event);
        if (log_file_) write_event_line(event);
        return result;
    }

    // Mutates state from a validated event. Shared by live ingestion and
    // replay so both produce identical scores and histories.
    IngestResult apply(const Event& event) {
        IngestResult result;
        result.seq = event.seq;
        seq_ = event.seq;
        log_.push_back(event);

        switch (event.kind) {
            case EventKind::add_platform:
                platforms_.push_back(event.payload.get<Platform>());
                break;
            case EventKind::add_implementation:
                implementations_.push_back(event.payload.get<Implementation>());
                break;
            case EventKind::add_problem:
                problems_.push_back(event.payload.get<ProblemSpec>());
                break;
            case EventKind::add_measurement: {
                Measurement m = event.payload.get<Measurement>();
                measurements_.push_back({m, event.seq});
                result.recalculated = recalculate_locked(m.app, m.problem, event.seq, nullptr);
                break;
            }
            case EventKind::define_study: {
                StudyState state;
                state.def = event.payload.get<StudyDefinition>();
                state.key = study_key(state.def);
                state.defined_seq = event.seq;
                studies_.push_back(std::move(state));
                StudyState& added = studies_.back();
                result.recalculated =
                    recalculate_locked(added.def.app, added.def.problem, event.seq, nullptr);
                break;
            }
        }
        return result;
    }

    // Rescores every study for (app, problem). Stored scores become the fresh
    // computation; history gains an entry only where the value moved beyond
    // 1e-12. Returns the keys of studies that changed.
    std::vector<std::string> recalculate_locked(const std::string& app, const std::string& problem,
                                                std::uint64_t at_seq,
                                                std::vector<PortabilityScore>* updated_out) {
        std::vector<std::string> changed_keys;
        std::vector<Measurement> rows;
        rows.reserve(measurements_.size());
        for (const auto& m : measurements_) rows.push_back(m.row);

        for (auto& study : studies_) {
            if (study.def.app != app || study.def.problem != problem) continue;
            std::vector<PortabilityScore> fresh = score_study(
                study.def, rows, rows, platforms_, ScoreOptions{.lenient_baselines = true});

            bool changed = false;
            for (const auto& score : fresh) {
                const PortabilityScore* previous = nullptr;
                for (const auto& old : study.scores)
                    if (old.implementation == score.implementation) previous = &old;
                if (previous && std::fabs(previous->value - score.value) <= 1e-12) continue;
                study.history[score.implementation].push_back({at_seq, score});
                if (updated_out) updated_out->push_back(score);
                changed = true;
            }
            study.scores = std::move(fresh);
            if (changed) changed_keys.push_back(study.key);
        }
        return changed_keys;
    }

    // --- persistence ---------------------------------------------------------------

    void open_log_for_append() {
        auto path = dir_ / "events.log";
        log_file_ = std::fopen(path.c_str(), "ab");
        if (!log_file_) throw Error(Error::Code::io_error, "cannot open " + path.string());
    }

    void write_event_line(const Event& event) {
        std::string line = json(event).dump();
        line += '\n';
        if (std::fwrite(line.data(), 1, line.size(), log_file_) != line.size())
            throw Error(Error::Code::io_error, "short write to events.log");
        std::fflush(log_file_);
#ifndef _WIN32
        ::fsync(fileno(log_file_));
#endif
    }

    std::string export_snapshot_locked() const {
        std::string out;
        for (const auto& event : log_) {
            out += json(event).dump();
            out += '\n';
        }
        return out;
    }

    // Applies a serialized log to this (empty) store. Errors name the seq of
    // the first bad record and its byte offset.
    void replay(const std::string& data) {
        std::size_t offset = 0;
        std::uint64_t expected_seq = 1;
        while (offset < data.size()) {
            std::size_t end = data.find('\n', offset);
            bool truncated = end == std::string::npos;
            std::string line = data.substr(offset, truncated ? std::string::npos : end - offset);
            if (line.empty() && !truncated) {
                offset = end + 1;
                continue;
            }
            Event event;
            try {
                event = json::parse(line).get<Event>();
            } catch (const std::exception& e) {
                throw Error(Error::Code::parse_error,
                            "event log corrupt at seq " + std::to_string(expected_seq) +
                                " (byte offset " + std::to_string(offset) + "): " + e.what());
            }
            if (truncated)
                throw Error(Error::Code::parse_error,
                            "event log truncated at seq " + std::to_string(expected_seq) +
                                " (byte offset " + std::to_string(offset) +
                                "): record has no trailing newline");
            if (event.seq != expected_seq)
                throw Error(Error::Code::parse_error,
                            "event log corrupt at seq " + std::to_string(expected_seq) +
                                " (byte offset " + std::to_string(offset) + "): found seq " +
                                std::to_string(event.seq));
            apply(event);
            ++expected_seq;
            offset = end + 1;
        }
    }

    std::filesystem::path dir_;
    std::FILE* log_file_ = nullptr;

    std::vector<Platform> platforms_;
    std::vector<Implementation> implementations_;
    std::vector<ProblemSpec> problems_;
    std::vector<StoredMeasurement> measurements_;
    std::vector<StudyState> studies_;
    std::vector<Event> log_;
    std::uint64_t seq_ = 0;

    mutable std::shared_mutex mutex_;
};

} // namespace ppmetrics
