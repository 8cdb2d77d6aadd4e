#include <doctest.h>

#include "hallufault/rng.hpp"
#include "hallufault/world.hpp"

using namespace hallufault;

TEST_CASE("make_scenario places vehicles on the scenario axes") {
    ScenarioConfig config;
    WorldState w = make_scenario(config);
    CHECK(w.time == 0.0);
    CHECK(w.av.position.x == 0.0);
    CHECK(w.av.position.z == doctest::Approx(-250.0));
    CHECK(w.av.speed == 0.0);
    CHECK(w.av.heading == Axis::PlusZ);
    REQUIRE(w.traffic.size() == 5);
    CHECK(w.traffic[0].id == "Car1");
    CHECK(w.traffic[0].position.x == doctest::Approx(-270.0));
    CHECK(w.traffic[0].position.z == 0.0);
    CHECK(w.traffic[0].heading == Axis::PlusX);
}

TEST_CASE("make_scenario single-vehicle case") {
    ScenarioConfig config;
    config.n_traffic = 1;
    WorldState w = make_scenario(config);
    REQUIRE(w.traffic.size() == 1);
    CHECK(w.traffic[0].position.x == doctest::Approx(-270.0));
}

TEST_CASE("make_scenario platoon spacing") {
    ScenarioConfig config;
    config.traffic_headway = 25.0;
    WorldState w = make_scenario(config);
    CHECK(w.traffic[4].position.x == doctest::Approx(-370.0));  // -(270 + 4*25)
}

TEST_CASE("make_scenario rejects invalid configs") {
    ScenarioConfig config;
    config.dt = 0.0;
    CHECK_THROWS_AS(make_scenario(config), ConfigError);
    config = ScenarioConfig{};
    config.av_vmax = -1.0;
    CHECK_THROWS_AS(make_scenario(config), ConfigError);
}

TEST_CASE("step_vehicle trapezoidal update") {
    VehicleState v{"Car1", {0, 0}, 0.0, Axis::PlusX, 4.5, 1.8};
    VehicleState next = step_vehicle(v, 2.0, 0.1, 15.0);
    CHECK(next.speed == doctest::Approx(0.2));
    CHECK(next.position.x == doctest::Approx(0.01));  // (0 + 0.2)/2 * 0.1

    v.speed = 15.0;
    next = step_vehicle(v, 2.0, 0.1, 15.0);
    CHECK(next.speed == doctest::Approx(15.0));

    v.speed = 1.0;
    next = step_vehicle(v, -20.0, 0.1, 15.0);
    CHECK(next.speed == 0.0);
    CHECK(next.position.x == doctest::Approx(0.05));  // decelerating, never reverses
}

TEST_CASE("traffic_accel_policy never brakes") {
    ScenarioConfig config;
    VehicleState car{"Car1", {-270, 0}, 0.0, Axis::PlusX, 4.5, 1.8};
    CHECK(traffic_accel_policy(car, config) == doctest::Approx(config.traffic_accel));
    car.speed = config.traffic_vmax;
    CHECK(traffic_accel_policy(car, config) == 0.0);
    car.speed = config.traffic_vmax - 0.01;
    CHECK(traffic_accel_policy(car, config) > 0.0);
    VehicleState stepped = step_vehicle(car, traffic_accel_policy(car, config), config.dt,
                                        config.traffic_vmax);
    CHECK(stepped.speed == doctest::Approx(config.traffic_vmax));
}

TEST_CASE("crossing-car speed monotone, displacement bounded") {
    ScenarioConfig config;
    SplitMix64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        VehicleState car{"Car1", {rng.next_uniform(-400, -100), 0},
                         rng.next_uniform(0, config.traffic_vmax), Axis::PlusX, 4.5, 1.8};
        double prev_speed = car.speed;
        for (int step = 0; step < 50; ++step) {
            double a = traffic_accel_policy(car, config);
            VehicleState next = step_vehicle(car, a, config.dt, config.traffic_vmax);
            CHECK(next.speed >= prev_speed);
            CHECK(next.speed <= config.traffic_vmax);
            CHECK(next.position.z == 0.0);  // axis-locked
            CHECK(next.position.x - car.position.x <= config.traffic_vmax * config.dt + 1e-12);
            prev_speed = next.speed;
            car = next;
        }
    }
}

TEST_CASE("scenario JSON round trip") {
    ScenarioConfig config;
    config.traffic_headway = 27.5;
    config.n_traffic = 3;
    ScenarioConfig parsed = scenario_from_json(scenario_to_json(config));
    CHECK(parsed.traffic_headway == doctest::Approx(27.5));
    CHECK(parsed.n_traffic == 3);
    CHECK(parsed.dt == doctest::Approx(config.dt));

    CHECK_THROWS_AS(scenario_from_json("{not json"), ConfigError);
    CHECK_THROWS_AS(scenario_from_json("{\"dt\": -1}"), ConfigError);
}
