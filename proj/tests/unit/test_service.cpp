// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <thread>

#include "ppmetrics/service.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ppmetrics;
using oracles::Fraction;

namespace {

// In-process service on an ephemeral port.
struct TestServer {
    Store& store;
    Service service;
    httplib::Server server;
    int port = 0;
    std::thread thread;

    explicit TestServer(Store& s) : store(s), service(s) {
        service.attach(server);
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~TestServer() {
        server.stop();
        thread.join();
    }

    httplib::Client client() { return httplib::Client("127.0.0.1", port); }
};

json post(httplib::Client& client, const std::string& path, const json& body, int expect_status) {
    auto res = client.Post(path, body.dump(), "application/json");
    REQUIRE(res);
    INFO(path << " -> " << res->body);
    REQUIRE(res->status == expect_status);
    return json::parse(res->body);
}

json get(httplib::Client& client, const std::string& path, int expect_status = 200) {
    auto res = client.Get(path);
    REQUIRE(res);
    INFO(path << " -> " << res->body);
    REQUIRE(res->status == expect_status);
    return json::parse(res->body);
}

void seed_clovertree(httplib::Client& client, const std::vector<Measurement>& rows,
                     bool with_references) {
    for (const auto& p : fixtures::gpu_platforms()) post(client, "/api/v1/platforms", p, 200);
    for (const char* id : {"OpenACC", "OpenMP", "Kokkos", "SYCL"})
        post(client, "/api/v1/implementations",
             Implementation{id, "CloverTree", id, PortabilityClass::portable_framework}, 200);
    if (with_references)
        for (const char* id : {"CUDA", "HIP"})
            post(client, "/api/v1/implementations",
                 Implementation{id, "CloverTree", id, PortabilityClass::low_level_nonportable},
                 200);
    post(client, "/api/v1/problems", ProblemSpec{"CloverTree", "default", {}}, 200);
    for (const auto& m : rows) post(client, "/api/v1/measurements", m, 200);
}

} // namespace

TEST_CASE("scores endpoint serves the fixed-reference table with provenance") {
    Store store;
    TestServer server(store);
    auto client = server.client();

    seed_clovertree(client, fixtures::table3(), true);
    post(client, "/api/v1/studies",
         json(fixtures::clovertree_study(PolicyVariant::fixed_reference)), 200);

    json scores = get(client, "/api/v1/scores?app=CloverTree&problem=default&policy=fixed_reference&metric=arithmetic_mean");
    REQUIRE(scores.is_array());
    REQUIRE(scores.size() == 4);

    std::map<std::string, double> expected = {
        {"OpenACC", oracles::arithmetic_mean({Fraction::of(1, 3), Fraction::of(1, 5), Fraction::of(1, 6)})},
        {"OpenMP", oracles::arithmetic_mean({Fraction::of(1, 4), Fraction::of(2, 5), Fraction::of(1, 5)})},
        {"Kokkos", oracles::arithmetic_mean({Fraction::of(1, 6), Fraction::of(2, 15), Fraction::of(1, 4)})},
        {"SYCL", oracles::arithmetic_mean({Fraction::of(1, 5), Fraction::of(1, 4), Fraction::of(1, 3)})},
    };
    for (const auto& score : scores) {
        for (const char* key : {"app", "problem", "implementation", "metric", "policy", "h", "s",
                                "value", "per_platform"})
            REQUIRE(score.contains(key));
        std::string impl = score["implementation"];
        CHECK_THAT(score["value"].get<double>(),
                   Catch::Matchers::WithinAbs(expected.at(impl), 1e-9));
        REQUIRE(score["per_platform"].is_array());
        REQUIRE(score["per_platform"].size() == 3);
        for (const auto& entry : score["per_platform"]) {
            REQUIRE(entry.contains("baseline"));
            CHECK(entry["baseline"]["value"].get<double>() == 10.0);
            std::string source = entry["baseline"]["source"];
            CHECK((source == "CUDA" || source == "HIP"));
        }
    }
}

TEST_CASE("measurement validation failures return field-level messages") {
    Store store;
    TestServer server(store);
    auto client = server.client();
    seed_clovertree(client, {}, false);

    json bad = fixtures::runtime("OpenACC", "A100", 30);
    bad["value"] = -3;
    json body = post(client, "/api/v1/measurements", bad, 400);
    REQUIRE(body.contains("fields"));
    bool names_value = false;
    for (const auto& f : body["fields"]) names_value |= f["field"] == "value";
    CHECK(names_value);

    json missing = json{{"app", "CloverTree"}};
    post(client, "/api/v1/measurements", missing, 400);
}

TEST_CASE("duplicate measurements get 409") {
    Store store;
    TestServer server(store);
    auto client = server.client();
    seed_clovertree(client, {}, false);

    json m = fixtures::runtime("OpenACC", "A100", 30);
    json first = post(client, "/api/v1/measurements", m, 200);
    CHECK(first.contains("seq"));
    post(client, "/api/v1/measurements", m, 409);
}

TEST_CASE("unknown references and model mismatches are 400") {
    Store store;
    TestServer server(store);
    auto client = server.client();
    seed_clovertree(client, {}, false);

    json unknown_platform = fixtures::runtime("OpenACC", "H100", 30);
    post(client, "/api/v1/measurements", unknown_platform, 400);

    json mismatched = fixtures::runtime("OpenACC", "A100", 30);
    mismatched["model"] = "Kokkos";
    post(client, "/api/v1/measurements", mismatched, 400);

    json matching = fixtures::runtime("OpenACC", "A100", 30);
    matching["model"] = "OpenACC";
    post(client, "/api/v1/measurements", matching, 200);
}

TEST_CASE("score queries validate enums and tolerate unknown apps") {
    Store store;
    TestServer server(store);
    auto client = server.client();

    json empty = get(client, "/api/v1/scores?app=nope");
    CHECK(empty.is_array());
    CHECK(empty.empty());

    get(client, "/api/v1/scores?policy=bogus", 400);
    get(client, "/api/v1/scores?metric=bogus", 400);
}

TEST_CASE("the audit endpoint reports churn between repository states") {
    Store store;
    TestServer server(store);
    auto client = server.client();

    seed_clovertree(client, fixtures::table1(), false);
    post(client, "/api/v1/studies",
         json(fixtures::clovertree_study(PolicyVariant::study_local_best)), 200);
    std::uint64_t before_seq = store.current_seq();

    for (const auto& m : fixtures::sycl_rows()) post(client, "/api/v1/measurements", m, 200);
    std::uint64_t after_seq = store.current_seq();

    json report = get(client, "/api/v1/audit?app=CloverTree&problem=default&from_seq=" +
                                  std::to_string(before_seq) +
                                  "&to_seq=" + std::to_string(after_seq));
    REQUIRE(report.contains("findings"));
    int violations = 0;
    for (const auto& f : report["findings"]) {
        for (const char* key : {"severity", "criterion", "implementation", "platform",
                                "description", "before", "after"})
            REQUIRE(f.contains(key));
        if (f["severity"] == "violation") {
            ++violations;
            CHECK(f["criterion"] == 4);
            CHECK(f["platform"] == "MI250");
        }
    }
    CHECK(violations == 3);

    json self = get(client, "/api/v1/audit?from_seq=" + std::to_string(after_seq) +
                                "&to_seq=" + std::to_string(after_seq));
    CHECK(self["findings"].empty());

    get(client, "/api/v1/audit?from_seq=5&to_seq=99999", 400);
    get(client, "/api/v1/audit?from_seq=xyz", 400);
}

TEST_CASE("a pinned-reference study audits clean over the same ingest") {
    Store store;
    TestServer server(store);
    auto client = server.client();

    seed_clovertree(client, fixtures::table3_before_sycl(), true);
    post(client, "/api/v1/studies",
         json(fixtures::clovertree_study(PolicyVariant::fixed_reference)), 200);
    std::uint64_t before_seq = store.current_seq();
    for (const auto& m : fixtures::sycl_rows()) post(client, "/api/v1/measurements", m, 200);

    json report = get(client, "/api/v1/audit?app=CloverTree&problem=default&from_seq=" +
                                  std::to_string(before_seq) +
                                  "&to_seq=" + std::to_string(store.current_seq()) +
                                  "&policy=fixed_reference");
    int violations = 0;
    for (const auto& f : report["findings"])
        if (f["severity"] == "violation") ++violations;
    CHECK(violations == 0);
}

TEST_CASE("GETs are pure and repeatable byte-for-byte") {
    Store store;
    TestServer server(store);
    auto client = server.client();
    seed_clovertree(client, fixtures::table2(), false);
    post(client, "/api/v1/studies",
         json(fixtures::clovertree_study(PolicyVariant::repository_best)), 200);
    std::uint64_t seeded_seq = store.current_seq();

    auto first = client.Get("/api/v1/scores?app=CloverTree&problem=default");
    auto second = client.Get("/api/v1/scores?app=CloverTree&problem=default");
    REQUIRE(first);
    REQUIRE(second);
    CHECK(first->body == second->body);
    CHECK(store.current_seq() == seeded_seq); // GETs wrote nothing
}

TEST_CASE("history endpoint returns the score trajectory") {
    Store store;
    TestServer server(store);
    auto client = server.client();
    seed_clovertree(client, fixtures::table1(), false);
    post(client, "/api/v1/studies",
         json(fixtures::clovertree_study(PolicyVariant::repository_best)), 200);
    for (const auto& m : fixtures::sycl_rows()) post(client, "/api/v1/measurements", m, 200);

    json histories = get(
        client, "/api/v1/history?app=CloverTree&problem=default&implementation=Kokkos");
    REQUIRE(histories.is_array());
    REQUIRE(histories.size() == 1);
    REQUIRE(histories[0]["entries"].size() == 2);
    CHECK_THAT(histories[0]["entries"][1]["score"]["value"].get<double>(),
               Catch::Matchers::WithinAbs(19.0 / 36.0, 1e-9));

    get(client, "/api/v1/history?app=CloverTree", 400); // missing params
}

TEST_CASE("wire numbers are rounded to twelve significant digits") {
    Store store;
    TestServer server(store);
    auto client = server.client();
    seed_clovertree(client, fixtures::table1(), false);
    post(client, "/api/v1/studies",
         json(fixtures::clovertree_study(PolicyVariant::study_local_best)), 200);

    auto res = client.Get("/api/v1/scores?app=CloverTree&problem=default");
    REQUIRE(res);
    // 13/18 = 0.7222... rendered at 12 significant digits, not full precision.
    CHECK(res->body.find("0.722222222222") != std::string::npos);
    CHECK(res->body.find("0.7222222222222") == std::string::npos);
    json scores = json::parse(res->body);
    CHECK_THAT(scores[0]["value"].get<double>(),
               Catch::Matchers::WithinAbs(13.0 / 18.0, 1e-11));
}
