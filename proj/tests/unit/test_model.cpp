// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ppmetrics/model.hpp"
#include "ppmetrics/serde.hpp"
#include "support/fixtures.hpp"

using namespace ppmetrics;

TEST_CASE("enum names round-trip and unknown names are rejected") {
    for (auto v : {ArchClass::cpu, ArchClass::gpu, ArchClass::other})
        CHECK(arch_class_from_string(to_string(v)) == v);
    for (auto v : {MeasurementKind::runtime_seconds, MeasurementKind::throughput_gflops,
                   MeasurementKind::throughput_custom})
        CHECK(measurement_kind_from_string(to_string(v)) == v);
    for (auto v : {PolicyVariant::study_local_best, PolicyVariant::fixed_reference,
                   PolicyVariant::repository_best, PolicyVariant::architectural_theoretical,
                   PolicyVariant::architectural_roofline})
        CHECK(policy_variant_from_string(to_string(v)) == v);
    for (auto v : {Metric::arithmetic_mean, Metric::harmonic_mean})
        CHECK(metric_from_string(to_string(v)) == v);

    CHECK_THROWS_AS(policy_variant_from_string("bogus"), Error);
    CHECK_THROWS_AS(metric_from_string(""), Error);
    CHECK_THROWS_AS(arch_class_from_string("fpga"), Error);
}

TEST_CASE("validate_study accepts the worked example") {
    auto study = fixtures::clovertree_study(PolicyVariant::study_local_best);
    CHECK(validate_study(study, fixtures::table1(), fixtures::gpu_platforms()).empty());
    CHECK(validate_study(study, fixtures::table1()).empty()); // platform records optional
}

TEST_CASE("validate_study flags an empty platform set") {
    auto study = fixtures::clovertree_study(PolicyVariant::study_local_best);
    study.platforms.clear();
    auto report = validate_study(study, fixtures::table1());
    REQUIRE_FALSE(report.empty());
    CHECK(report.front().code == "empty_platform_set");
}

TEST_CASE("validate_study flags duplicate platforms") {
    auto study = fixtures::clovertree_study(PolicyVariant::study_local_best);
    study.platforms.push_back("A100");
    auto report = validate_study(study, fixtures::table1());
    REQUIRE(report.size() == 1);
    CHECK(report.front().code == "duplicate_platform");
}

TEST_CASE("architectural policy without peak data names the platform") {
    auto study = fixtures::clovertree_study(PolicyVariant::architectural_theoretical);
    auto platforms = fixtures::gpu_platforms();
    platforms[0].peak_compute = 9700.0;
    platforms[1].peak_compute = 4700.0; // MI250 left without a peak

    std::vector<Measurement> throughput;
    for (auto m : fixtures::table1()) {
        m.kind = MeasurementKind::throughput_gflops;
        throughput.push_back(m);
    }
    auto report = validate_study(study, throughput, platforms);
    REQUIRE(report.size() == 1);
    CHECK(report.front().code == "missing_peak");
    CHECK(report.front().message.find("MI250") != std::string::npos);
}

TEST_CASE("architectural policies reject runtime studies") {
    auto study = fixtures::clovertree_study(PolicyVariant::architectural_theoretical);
    auto platforms = fixtures::gpu_platforms();
    for (auto& p : platforms) p.peak_compute = 1000.0;
    auto report = validate_study(study, fixtures::table1(), platforms);
    REQUIRE(report.size() == 1);
    CHECK(report.front().code == "kind_not_throughput");
}

TEST_CASE("fixed_reference must name a reference for every platform") {
    auto study = fixtures::clovertree_study(PolicyVariant::fixed_reference);
    study.policy.references.erase("MI250");
    auto report = validate_study(study, fixtures::table3());
    REQUIRE(report.size() == 1);
    CHECK(report.front().code == "missing_reference_entry");
    CHECK(report.front().message.find("MI250") != std::string::npos);
}

TEST_CASE("mixed measurement kinds are a violation") {
    auto rows = fixtures::table1();
    rows.push_back(fixtures::runtime("OpenACC", "A100", 100));
    rows.back().kind = MeasurementKind::throughput_gflops;
    auto study = fixtures::clovertree_study(PolicyVariant::study_local_best);
    auto report = validate_study(study, rows);
    REQUIRE_FALSE(report.empty());
    CHECK(report.front().code == "mixed_kinds");
}

TEST_CASE("referential integrity scan reports dangling references") {
    auto platforms = fixtures::gpu_platforms();
    std::vector<Implementation> impls = {
        {"OpenACC", "CloverTree", "OpenACC", PortabilityClass::portable_framework}};
    std::vector<ProblemSpec> problems = {{"CloverTree", "default", {}}};

    std::vector<Measurement> rows = {fixtures::runtime("OpenACC", "A100", 30)};
    CHECK(check_referential_integrity(rows, platforms, impls, problems).empty());

    rows.push_back(fixtures::runtime("OpenACC", "H100", 20));
    rows.push_back(fixtures::runtime("RAJA", "A100", 20));
    auto report = check_referential_integrity(rows, platforms, impls, problems);
    REQUIRE(report.size() == 2);
    CHECK(report[0].code == "unknown_platform");
    CHECK(report[1].code == "unknown_implementation");
}

TEST_CASE("provenance meta keys decide verified status") {
    Measurement m = fixtures::runtime("OpenACC", "A100", 30);
    CHECK(is_verified(m));
    m.meta.erase("compiler_flags");
    CHECK_FALSE(is_verified(m));
    m.meta["compiler_flags"] = "";
    CHECK_FALSE(is_verified(m));
}

namespace {

// Random instances for the round-trip property. Values stay within the
// types' invariants (positive peaks, consistent supported sets).
struct Generator {
    std::mt19937 rng{20240811};

    std::string word() {
        static const char* words[] = {"A100", "P100", "MI250", "Xeon", "OpenACC", "OpenMP",
                                      "Kokkos", "SYCL", "CUDA", "HIP", "clover", "triad"};
        return words[rng() % std::size(words)] + std::to_string(rng() % 100);
    }
    double positive() { return std::uniform_real_distribution<>(1e-3, 1e4)(rng); }
    bool flip() { return rng() % 2 == 0; }

    Platform platform() {
        Platform p{word(), word(), ArchClass(rng() % 3), {}, {}, {}};
        if (flip()) p.peak_compute = positive();
        if (flip()) p.peak_mem_bw = positive();
        if (flip()) p.attainable_peak = positive();
        return p;
    }

    Measurement measurement() {
        Measurement m;
        m.app = word();
        m.problem = word();
        m.implementation = word();
        m.platform = word();
        m.kind = MeasurementKind(rng() % 3);
        m.value = positive();
        if (flip()) m.meta["compiler"] = word();
        if (flip()) m.meta["compiler_flags"] = "-O" + std::to_string(rng() % 4);
        return m;
    }

    BaselinePolicy policy() {
        BaselinePolicy p;
        p.variant = PolicyVariant(rng() % 5);
        if (p.variant == PolicyVariant::fixed_reference)
            for (int i = 0; i < 3; ++i) p.references[word()] = word();
        if (p.variant == PolicyVariant::architectural_roofline) p.arithmetic_intensity = positive();
        return p;
    }

    StudyDefinition study() {
        StudyDefinition s;
        s.app = word();
        s.problem = word();
        for (int i = 0; i < 1 + int(rng() % 4); ++i) s.platforms.push_back(word() + std::to_string(i));
        s.policy = policy();
        s.metric = Metric(rng() % 2);
        return s;
    }

    PortabilityScore score() {
        PortabilityScore s;
        s.app = word();
        s.problem = word();
        s.implementation = word();
        s.metric = Metric(rng() % 2);
        s.policy = policy();
        for (int i = 0; i < 1 + int(rng() % 4); ++i) s.platform_set.push_back("plat" + std::to_string(i));
        for (const auto& platform : s.platform_set) {
            if (flip()) continue;
            EfficiencyRecord r;
            r.implementation = s.implementation;
            r.platform = platform;
            r.e = std::uniform_real_distribution<>(0.01, 1.5)(rng);
            r.baseline = BaselineDescriptor{s.policy.variant, word(), positive()};
            s.per_platform.emplace(platform, r);
            s.supported.push_back(platform);
        }
        double sum = 0;
        for (const auto& [id, r] : s.per_platform) sum += r.e;
        s.value = s.supported.empty() ? 0.0 : sum / double(s.supported.size());
        return s;
    }
};

template <typename T>
void check_round_trip(const T& value) {
    json serialized = value;
    T parsed = serialized.get<T>();
    CHECK(parsed == value);
    // Deterministic serialization: dumping again gives the same bytes.
    CHECK(json(parsed).dump() == serialized.dump());
}

} // namespace

TEST_CASE("serialize/deserialize round-trips every domain type") {
    Generator gen;
    for (int i = 0; i < 200; ++i) {
        check_round_trip(gen.platform());
        check_round_trip(gen.measurement());
        check_round_trip(gen.policy());
        check_round_trip(gen.study());
        check_round_trip(gen.score());
        check_round_trip(Implementation{gen.word(), gen.word(), gen.word(),
                                        PortabilityClass(gen.rng() % 2)});
        check_round_trip(ProblemSpec{gen.word(), gen.word(),
                                     gen.flip() ? std::optional<std::string>(gen.word())
                                                : std::nullopt});
    }
}

TEST_CASE("score wire format uses the pinned field names") {
    Generator gen;
    PortabilityScore score = gen.score();
    while (score.supported.empty()) score = gen.score();
    json j = score;
    for (const char* key : {"app", "problem", "implementation", "metric", "policy", "h", "s",
                            "value", "per_platform"})
        CHECK(j.contains(key));
    REQUIRE(j["per_platform"].is_array());
    REQUIRE_FALSE(j["per_platform"].empty());
    const json& entry = j["per_platform"].front();
    for (const char* key : {"platform", "e", "baseline"}) CHECK(entry.contains(key));
    REQUIRE(entry["baseline"].is_object());
    CHECK(entry["baseline"].contains("source"));
    CHECK(entry["baseline"].contains("value"));
    CHECK(entry["baseline"].size() == 2);
}
