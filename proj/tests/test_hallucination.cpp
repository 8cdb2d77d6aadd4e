#include <doctest.h>

#include <cmath>
#include <set>

#include "hallufault/hallucination.hpp"
#include "hallufault/rng.hpp"

using namespace hallufault;

namespace {

VehicleState make_av(Vec2 pos = {0, -100}) {
    return VehicleState{"AV", pos, 10.0, Axis::PlusZ, 4.5, 1.8};
}

PerceptionFrame make_frame(int n, SplitMix64* rng = nullptr) {
    PerceptionFrame f;
    f.cycle = 3;
    f.time = 0.3;
    for (int k = 0; k < n; ++k) {
        double x = rng ? rng->next_uniform(-400, 50) : -50.0 * (k + 1);
        double v = rng ? rng->next_uniform(0, 15) : 10.0;
        f.objects.push_back(
            PerceivedObject{"Car" + std::to_string(k + 1), {x, 0}, v, Axis::PlusX});
    }
    return f;
}

HIConfig on_config(HallucinationType type, HallucinationConfiguration cfg, double p,
                   Persistence pers = Persistence::Intermittent) {
    HIConfig c;
    c.module_activation = true;
    c.type = type;
    c.configuration = std::move(cfg);
    c.probability = p;
    c.persistence = pers;
    return c;
}

}  // namespace

TEST_CASE("affected domain derives from type") {
    CHECK(domain_of(HallucinationType::LinDrift) == AffectedDomain::Pos);
    CHECK(domain_of(HallucinationType::AngDrift) == AffectedDomain::Pos);
    CHECK(domain_of(HallucinationType::Phant) == AffectedDomain::Rec);
    CHECK(domain_of(HallucinationType::Missed) == AffectedDomain::Rec);
    CHECK(domain_of(HallucinationType::Blind) == AffectedDomain::Rec);
    CHECK(domain_of(HallucinationType::Latency) == AffectedDomain::Time);
}

TEST_CASE("activation sampling") {
    SUBCASE("probability 1 intermittent fires every cycle") {
        HIState s(on_config(HallucinationType::Missed, TargetCarCfg{1}, 1.0), 1);
        for (int i = 0; i < 100; ++i) CHECK(s.sample_activation());
    }
    SUBCASE("probability 0 never fires") {
        HIState s(on_config(HallucinationType::Missed, TargetCarCfg{1}, 0.0,
                            Persistence::Permanent),
                  1);
        for (int i = 0; i < 100; ++i) CHECK_FALSE(s.sample_activation());
    }
    SUBCASE("permanent latches after the first success of the reference stream") {
        std::uint64_t seed = 77;
        HIState s(on_config(HallucinationType::Missed, TargetCarCfg{1}, 0.5,
                            Persistence::Permanent),
                  seed);
        SplitMix64 reference(seed);
        bool latched = false;
        for (int i = 0; i < 200; ++i) {
            bool active = s.sample_activation();
            if (!latched) {
                bool expected = reference.next_bernoulli(0.5);
                CHECK(active == expected);
                latched = expected;
            } else {
                CHECK(active);  // monotone after first success
            }
        }
        CHECK(s.triggered());
    }
    SUBCASE("intermittent frequency concentrates around p") {
        const int n = 100000;
        const double p = 0.25;
        HIState s(on_config(HallucinationType::Missed, TargetCarCfg{1}, p), 5);
        int hits = 0;
        for (int i = 0; i < n; ++i) hits += s.sample_activation() ? 1 : 0;
        double sigma = std::sqrt(n * p * (1 - p));
        CHECK(std::abs(hits - n * p) < 3.0 * sigma);
    }
    SUBCASE("sampling with module OFF is a contract violation") {
        HIState s(HIConfig{}, 1);
        CHECK_THROWS_AS(s.sample_activation(), std::logic_error);
    }
}

TEST_CASE("linear drift shifts every position, nothing else") {
    PerceptionFrame f = make_frame(5);
    PerceptionFrame same = inject_linear_drift(f, {0, 0});
    for (size_t i = 0; i < 5; ++i) CHECK(same.objects[i].position.x == f.objects[i].position.x);

    PerceptionFrame shifted = inject_linear_drift(f, {-2, 0});
    REQUIRE(shifted.objects.size() == 5);
    for (size_t i = 0; i < 5; ++i) {
        CHECK(shifted.objects[i].position.x == doctest::Approx(f.objects[i].position.x - 2));
        CHECK(shifted.objects[i].speed == f.objects[i].speed);
    }
}

TEST_CASE("phantom clones the target shifted along its travel axis") {
    PerceptionFrame f;
    f.objects.push_back(PerceivedObject{"Car1", {-100, 0}, 12.0, Axis::PlusX});
    PerceptionFrame out = inject_phantom(f, 1, -30.0);
    REQUIRE(out.objects.size() == 2);
    CHECK(out.objects[1].source_id == "phantom:Car1");
    CHECK(out.objects[1].position.x == doctest::Approx(-130.0));
    CHECK(out.objects[1].speed == doctest::Approx(12.0));
    CHECK(out.objects[1].is_phantom());

    PerceptionFrame missing = inject_phantom(f, 2, -30.0);
    CHECK(missing.objects.size() == 1);  // target absent, unchanged
}

TEST_CASE("missed detection removes exactly the target and is idempotent") {
    PerceptionFrame f = make_frame(5);
    PerceptionFrame out = inject_missed(f, 2);
    REQUIRE(out.objects.size() == 4);
    for (const auto& o : out.objects) CHECK(o.source_id != "Car2");
    PerceptionFrame again = inject_missed(out, 2);
    CHECK(again.objects.size() == 4);

    SplitMix64 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        PerceptionFrame g = make_frame(1 + static_cast<int>(rng.next_u64() % 5), &rng);
        int target = 1 + static_cast<int>(rng.next_u64() % 3);
        PerceptionFrame once = inject_missed(g, target);
        PerceptionFrame twice = inject_missed(once, target);
        REQUIRE(once.objects.size() == twice.objects.size());
        for (size_t i = 0; i < once.objects.size(); ++i)
            CHECK(once.objects[i].source_id == twice.objects[i].source_id);
    }
}

TEST_CASE("angular drift rotates about the AV") {
    VehicleState av = make_av({0, 0});
    PerceptionFrame f;
    f.objects.push_back(PerceivedObject{"Car1", {-100, 0}, 10.0, Axis::PlusX});

    PerceptionFrame id = inject_angular_drift(f, av, 0.0);
    CHECK(id.objects[0].position.x == doctest::Approx(-100.0));

    PerceptionFrame r = inject_angular_drift(f, av, -90.0);
    CHECK(r.objects[0].position.x == doctest::Approx(0.0));
    CHECK(r.objects[0].position.z == doctest::Approx(100.0));

    SplitMix64 rng(12);
    for (int trial = 0; trial < 1000; ++trial) {
        VehicleState av2 = make_av({0, rng.next_uniform(-300, 0)});
        PerceptionFrame g = make_frame(1 + static_cast<int>(rng.next_u64() % 5), &rng);
        double angle = rng.next_uniform(-25, 25);
        PerceptionFrame there = inject_angular_drift(g, av2, angle);
        PerceptionFrame back = inject_angular_drift(there, av2, -angle);
        REQUIRE(back.objects.size() == g.objects.size());
        for (size_t i = 0; i < g.objects.size(); ++i) {
            CHECK(std::abs(back.objects[i].position.x - g.objects[i].position.x) < 1e-9);
            CHECK(std::abs(back.objects[i].position.z - g.objects[i].position.z) < 1e-9);
        }
    }
}

TEST_CASE("blind region removes the bearing stripe") {
    VehicleState av = make_av({0, 0});
    PerceptionFrame f;
    // bearing of (-sin b, cos b)*r is b
    auto place = [&](double b, double r) {
        return PerceivedObject{"Car1", {-r * std::sin(deg2rad(b)), r * std::cos(deg2rad(b))},
                               10.0, Axis::PlusX};
    };
    f.objects = {place(50, 100)};
    CHECK(inject_blind_region(f, av, 50, 20).objects.empty());
    f.objects = {place(-50, 100)};
    CHECK(inject_blind_region(f, av, 50, 20).objects.size() == 1);

    SplitMix64 rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        VehicleState av2 = make_av({rng.next_uniform(-5, 5), rng.next_uniform(-200, -1)});
        PerceptionFrame g = make_frame(1 + static_cast<int>(rng.next_u64() % 5), &rng);
        double center = rng.next_uniform(0, 90);
        double width = rng.next_uniform(1, 40);
        PerceptionFrame out = inject_blind_region(g, av2, center, width);
        // brute-force scan oracle
        std::set<std::string> expected;
        for (const auto& o : g.objects) {
            double b = bearing(av2, o.position);
            if (!(b >= center - width / 2 && b <= center + width / 2))
                expected.insert(o.source_id);
        }
        std::set<std::string> got;
        for (const auto& o : out.objects) got.insert(o.source_id);
        CHECK(got == expected);
    }
}

TEST_CASE("latency is a delay line") {
    auto frame_at = [](long cycle) {
        PerceptionFrame f;
        f.cycle = cycle;
        f.time = cycle * 0.1;
        f.objects.push_back(
            PerceivedObject{"Car1", {-300.0 + cycle, 0}, 10.0, Axis::PlusX});
        return f;
    };
    VehicleState av = make_av();

    SUBCASE("N = 0 is passthrough") {
        HIState s(on_config(HallucinationType::Latency, LatencyCfg{0}, 1.0,
                            Persistence::Permanent),
                  3);
        for (long t = 0; t < 10; ++t) CHECK(s.apply(frame_at(t), av).cycle == t);
    }
    SUBCASE("after fill the output lags by exactly N") {
        const int n = 20;
        HIState s(on_config(HallucinationType::Latency, LatencyCfg{n}, 1.0,
                            Persistence::Permanent),
                  3);
        for (long t = 0; t < 100; ++t) {
            PerceptionFrame out = s.apply(frame_at(t), av);
            long expected = t < n ? 0 : t - n;  // frozen oldest frame while filling
            CHECK(out.cycle == expected);
            CHECK(out.objects[0].position.x == doctest::Approx(-300.0 + expected));
        }
    }
    SUBCASE("delay-line identity over random cases") {
        SplitMix64 rng(21);
        for (int trial = 0; trial < 1000; ++trial) {
            int n = static_cast<int>(rng.next_u64() % 40);
            HIState s(on_config(HallucinationType::Latency, LatencyCfg{n}, 1.0,
                                Persistence::Permanent),
                      trial);
            long steps = n + 1 + static_cast<long>(rng.next_u64() % 50);
            PerceptionFrame last;
            for (long t = 0; t < steps; ++t) last = s.apply(frame_at(t), av);
            CHECK(last.cycle == steps - 1 - n);
        }
    }
    SUBCASE("buffer advances during inactive cycles") {
        const int n = 5;
        HIConfig c = on_config(HallucinationType::Latency, LatencyCfg{n}, 0.0);
        // probability 0: never active, but history must still accumulate, so a
        // later activation (fresh state with p=1 over the same history) lags.
        HIState inactive(c, 3);
        for (long t = 0; t < 30; ++t) CHECK(inactive.apply(frame_at(t), av).cycle == t);
    }
}

TEST_CASE("apply dispatch and OFF identity") {
    VehicleState av = make_av();
    PerceptionFrame f = make_frame(5);

    SUBCASE("OFF is identity") {
        HIState s(HIConfig{}, 9);
        PerceptionFrame out = s.apply(f, av);
        REQUIRE(out.objects.size() == f.objects.size());
        for (size_t i = 0; i < f.objects.size(); ++i) {
            CHECK(out.objects[i].source_id == f.objects[i].source_id);
            CHECK(out.objects[i].position.x == f.objects[i].position.x);
        }
    }
    SUBCASE("missed Car1 permanent p=1 removes Car1 always") {
        HIState s(on_config(HallucinationType::Missed, TargetCarCfg{1}, 1.0,
                            Persistence::Permanent),
                  9);
        for (int t = 0; t < 20; ++t) {
            PerceptionFrame out = s.apply(f, av);
            for (const auto& o : out.objects) CHECK(o.source_id != "Car1");
        }
    }
    SUBCASE("Ang25R matches the rotation oracle") {
        HIState s(on_config(HallucinationType::AngDrift, AngleCfg{25.0, Side::R}, 1.0,
                            Persistence::Permanent),
                  9);
        PerceptionFrame out = s.apply(f, av);
        PerceptionFrame expected = inject_angular_drift(f, av, -25.0);
        REQUIRE(out.objects.size() == expected.objects.size());
        for (size_t i = 0; i < out.objects.size(); ++i) {
            CHECK(out.objects[i].position.x ==
                  doctest::Approx(expected.objects[i].position.x));
            CHECK(out.objects[i].position.z ==
                  doctest::Approx(expected.objects[i].position.z));
        }
    }
}

TEST_CASE("Rec transforms preserve surviving values; Pos transforms preserve membership") {
    VehicleState av = make_av();
    SplitMix64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        PerceptionFrame f = make_frame(5, &rng);
        for (auto* out : {new PerceptionFrame(inject_missed(f, 2)),
                          new PerceptionFrame(inject_blind_region(f, av, 50, 20)),
                          new PerceptionFrame(inject_phantom(f, 1, -30))}) {
            for (const auto& o : out->objects) {
                if (o.is_phantom()) continue;
                bool matched = false;
                for (const auto& orig : f.objects)
                    if (orig.source_id == o.source_id) {
                        matched = true;
                        CHECK(o.position.x == orig.position.x);
                        CHECK(o.speed == orig.speed);
                    }
                CHECK(matched);
            }
            delete out;
        }
        for (auto* out :
             {new PerceptionFrame(inject_linear_drift(f, {-2, 1})),
              new PerceptionFrame(inject_angular_drift(f, av, 10))}) {
            REQUIRE(out->objects.size() == f.objects.size());
            for (size_t i = 0; i < f.objects.size(); ++i) {
                CHECK(out->objects[i].source_id == f.objects[i].source_id);
                CHECK(out->objects[i].speed == f.objects[i].speed);
            }
            delete out;
        }
    }
}

TEST_CASE("HI JSON uses the category labels verbatim") {
    auto matrix_labels = {"Location", "Car1",   "Car2",   "Car3",    "Ang05L",  "Ang10L",
                          "Ang20L",   "Ang25L", "Ang05R", "Ang10R",  "Ang20R",  "Ang25R",
                          "Blind40L", "Blind50L", "Blind60L", "Lat20", "Lat40"};
    auto type_for = [](const std::string& label) {
        if (label == "Location") return HallucinationType::LinDrift;
        if (label.rfind("Car", 0) == 0) return HallucinationType::Missed;
        if (label.rfind("Ang", 0) == 0) return HallucinationType::AngDrift;
        if (label.rfind("Blind", 0) == 0) return HallucinationType::Blind;
        return HallucinationType::Latency;
    };
    for (const std::string label : matrix_labels) {
        HIConfig c;
        c.module_activation = true;
        c.type = type_for(label);
        std::string json = "{\"module_activation\":\"ON\",\"type\":\"" + to_label(c.type) +
                           "\",\"configuration\":\"" + label +
                           "\",\"probability\":0.25,\"persistence\":\"Intermittent\"}";
        HIConfig parsed = hi_from_json(json);
        CHECK(configuration_label(parsed.type, parsed.configuration) == label);
        HIConfig round = hi_from_json(hi_to_json(parsed));
        CHECK(configuration_label(round.type, round.configuration) == label);
        CHECK(round.probability == doctest::Approx(0.25));
    }
}

TEST_CASE("HI JSON rejects inconsistent configs") {
    CHECK_THROWS_AS(hi_from_json("{oops"), ConfigError);
    CHECK_THROWS_AS(hi_from_json("{\"module_activation\":\"maybe\"}"), ConfigError);
    // OFF with non-baseline persistence
    CHECK_THROWS_AS(
        hi_from_json("{\"module_activation\":\"OFF\",\"persistence\":\"Permanent\"}"),
        ConfigError);
    // configuration incompatible with type
    CHECK_THROWS_AS(hi_from_json("{\"module_activation\":\"ON\",\"type\":\"Missed\","
                                 "\"configuration\":\"Location\",\"probability\":0.1,"
                                 "\"persistence\":\"Intermittent\"}"),
                    ConfigError);
    // domain inconsistent with type
    CHECK_THROWS_AS(hi_from_json("{\"module_activation\":\"ON\",\"type\":\"Missed\","
                                 "\"domain\":\"Pos\",\"configuration\":\"Car1\","
                                 "\"probability\":0.1,\"persistence\":\"Intermittent\"}"),
                    ConfigError);
    // probability out of range
    CHECK_THROWS_AS(hi_from_json("{\"module_activation\":\"ON\",\"type\":\"Missed\","
                                 "\"configuration\":\"Car1\",\"probability\":1.5,"
                                 "\"persistence\":\"Intermittent\"}"),
                    ConfigError);
}
