// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include <httplib.h>

#include "ppmetrics/serde.hpp"
#include "ppmetrics/store.hpp"

namespace ppmetrics {

// ---------------------------------------------------------------------------
// HTTP/JSON API over a repository store, under /api/v1. Mutations funnel into
// the store's single-writer path; GETs are pure snapshot reads and repeating
// one between writes returns a byte-identical body.
// ---------------------------------------------------------------------------

namespace detail {

inline void reply_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(round_numbers(body).dump(), "application/json");
}

inline void reply_error(httplib::Response& res, int status, const std::string& message,
                        json fields = json::array()) {
    reply_json(res, status, json{{"error", message}, {"fields", std::move(fields)}});
}

// Maps a store/model error to an HTTP status.
inline void reply_store_error(httplib::Response& res, const Error& e) {
    switch (e.code()) {
        case Error::Code::duplicate: reply_error(res, 409, e.what()); break;
        case Error::Code::io_error: reply_error(res, 500, e.what()); break;
        default: reply_error(res, 400, e.what()); break;
    }
}

// Field-level validation of a measurement POST body. Returns issues in the
// response shape [{field, message}].
inline json measurement_field_issues(const json& body) {
    json issues = json::array();
    auto need_string = [&body, &issues](const char* field) {
        if (!body.contains(field) || !body[field].is_string() ||
            body[field].get<std::string>().empty())
            issues.push_back(json{{"field", field}, {"message", "required non-empty string"}});
    };
    need_string("app");
    need_string("problem");
    need_string("implementation");
    need_string("platform");
    need_string("kind");
    if (body.contains("kind") && body["kind"].is_string()) {
        try {
            measurement_kind_from_string(body["kind"].get<std::string>());
        } catch (const Error&) {
            issues.push_back(json{{"field", "kind"}, {"message", "unknown measurement kind"}});
        }
    }
    if (!body.contains("value") || !body["value"].is_number())
        issues.push_back(json{{"field", "value"}, {"message", "required number"}});
    else if (body["value"].get<double>() <= 0.0)
        issues.push_back(json{{"field", "value"}, {"message", "must be strictly positive"}});
    if (body.contains("meta") && !body["meta"].is_object())
        issues.push_back(json{{"field", "meta"}, {"message", "must be an object of strings"}});
    return issues;
}

inline std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        reply_error(res, 400, "request body must be a JSON object");
        return std::nullopt;
    }
    return body;
}

} // namespace detail

class Service {
public:
    explicit Service(Store& store) : store_(store) {}

    void attach(httplib::Server& server) {
        server.Post("/api/v1/platforms", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = detail::parse_body(req, res);
            if (!body) return;
            try {
                Platform p = body->get<Platform>();
                std::uint64_t seq = store_.add_platform(p);
                detail::reply_json(res, 200, json{{"seq", seq}});
            } catch (const Error& e) {
                detail::reply_store_error(res, e);
            }
        });

        server.Post("/api/v1/implementations",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        auto body = detail::parse_body(req, res);
                        if (!body) return;
                        try {
                            Implementation i = body->get<Implementation>();
                            std::uint64_t seq = store_.add_implementation(i);
                            detail::reply_json(res, 200, json{{"seq", seq}});
                        } catch (const Error& e) {
                            detail::reply_store_error(res, e);
                        }
                    });

        server.Post("/api/v1/problems", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = detail::parse_body(req, res);
            if (!body) return;
            try {
                ProblemSpec p = body->get<ProblemSpec>();
                std::uint64_t seq = store_.add_problem(p);
                detail::reply_json(res, 200, json{{"seq", seq}});
            } catch (const Error& e) {
                detail::reply_store_error(res, e);
            }
        });

        server.Post("/api/v1/studies", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = detail::parse_body(req, res);
            if (!body) return;
            try {
                StudyDefinition def = body->get<StudyDefinition>();
                IngestResult r = store_.define_study(def);
                detail::reply_json(res, 200,
                                   json{{"seq", r.seq},
                                        {"study", study_key(def)},
                                        {"recalculated", r.recalculated}});
            } catch (const Error& e) {
                detail::reply_store_error(res, e);
            }
        });

        server.Post("/api/v1/measurements",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        auto body = detail::parse_body(req, res);
                        if (!body) return;
                        json issues = detail::measurement_field_issues(*body);
                        if (!issues.empty()) {
                            detail::reply_error(res, 400, "measurement validation failed", issues);
                            return;
                        }
                        try {
                            Measurement m = body->get<Measurement>();
                            check_model_consistency(*body, m);
                            IngestResult r = store_.add_measurement(m);
                            detail::reply_json(res, 200,
                                               json{{"seq", r.seq},
                                                    {"recalculated", r.recalculated},
                                                    {"verified", is_verified(m)}});
                        } catch (const Error& e) {
                            detail::reply_store_error(res, e);
                        }
                    });

        server.Get("/api/v1/scores", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                auto scores = store_.query_scores(optional_param(req, "app"),
                                                  optional_param(req, "problem"),
                                                  optional_policy(req), optional_metric(req));
                detail::reply_json(res, 200, json(scores));
            } catch (const Error& e) {
                detail::reply_store_error(res, e);
            }
        });

        server.Get("/api/v1/audit", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                std::uint64_t from_seq = integer_param(req, "from_seq", 0);
                std::uint64_t to_seq = integer_param(req, "to_seq", store_.current_seq());
                AuditReport report =
                    store_.audit_between(optional_param(req, "app"), optional_param(req, "problem"),
                                         from_seq, to_seq, optional_policy(req),
                                         optional_metric(req));
                detail::reply_json(res, 200, json(report));
            } catch (const Error& e) {
                detail::reply_store_error(res, e);
            }
        });

        server.Get("/api/v1/history", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                auto app = optional_param(req, "app");
                auto problem = optional_param(req, "problem");
                auto implementation = optional_param(req, "implementation");
                if (!app || !problem || !implementation) {
                    detail::reply_error(res, 400,
                                        "app, problem and implementation are required");
                    return;
                }
                json out = json::array();
                for (const auto& h : store_.history(*app, *problem, *implementation)) {
                    json entries = json::array();
                    for (const auto& entry : h.entries)
                        entries.push_back(json{{"seq", entry.seq}, {"score", entry.score}});
                    out.push_back(json{{"study", h.study_key},
                                       {"app", h.app},
                                       {"problem", h.problem},
                                       {"implementation", h.implementation},
                                       {"entries", std::move(entries)}});
                }
                detail::reply_json(res, 200, out);
            } catch (const Error& e) {
                detail::reply_store_error(res, e);
            }
        });
    }

    // Blocks serving until the process is interrupted. Returns false when the
    // address cannot be bound.
    bool run(const std::string& host, int port) {
        httplib::Server server;
        attach(server);
        return server.listen(host, port);
    }

private:
    static std::optional<std::string> optional_param(const httplib::Request& req,
                                                     const std::string& name) {
        if (!req.has_param(name)) return std::nullopt;
        return req.get_param_value(name);
    }

    static std::optional<PolicyVariant> optional_policy(const httplib::Request& req) {
        auto p = optional_param(req, "policy");
        if (!p) return std::nullopt;
        return policy_variant_from_string(*p); // throws -> 400
    }

    static std::optional<Metric> optional_metric(const httplib::Request& req) {
        auto m = optional_param(req, "metric");
        if (!m) return std::nullopt;
        return metric_from_string(*m); // throws -> 400
    }

    static std::uint64_t integer_param(const httplib::Request& req, const std::string& name,
                                       std::uint64_t fallback) {
        auto p = optional_param(req, name);
        if (!p) return fallback;
        try {
            std::size_t consumed = 0;
            unsigned long long v = std::stoull(*p, &consumed);
            if (consumed != p->size()) throw std::invalid_argument(*p);
            return v;
        } catch (const std::exception&) {
            throw Error(Error::Code::invalid_argument, "parameter " + name + " must be an integer");
        }
    }

    // The wire measurement carries the programming model for convenience; it
    // must agree with the registered implementation.
    void check_model_consistency(const json& body, const Measurement& m) const {
        if (!body.contains("model") || !body["model"].is_string()) return;
        std::string model = body["model"].get<std::string>();
        if (model.empty()) return;
        for (const auto& impl : store_.implementations()) {
            if (impl.app == m.app && impl.id == m.implementation && impl.model != model)
                throw Error(Error::Code::validation_failed,
                            "model '" + model + "' does not match registered implementation " +
                                m.implementation + " (model '" + impl.model + "')");
        }
    }

    Store& store_;
};

} // namespace ppmetrics
