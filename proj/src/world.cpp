#include "hallufault/world.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace hallufault {

void ScenarioConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string("scenario: ") + name + " must be > 0");
    };
    positive(av_start_distance, "av_start_distance");
    positive(traffic_start_distance, "traffic_start_distance");
    positive(traffic_vmax, "traffic_vmax");
    positive(av_vmax, "av_vmax");
    positive(traffic_headway, "traffic_headway");
    positive(traffic_accel, "traffic_accel");
    positive(av_accel_max, "av_accel_max");
    positive(av_brake_max, "av_brake_max");
    positive(lane_width, "lane_width");
    positive(vehicle_length, "vehicle_length");
    positive(vehicle_width, "vehicle_width");
    positive(dt, "dt");
    positive(t_max, "t_max");
    if (n_traffic < 0) throw ConfigError("scenario: n_traffic must be >= 0");
    if (start_jitter < 0 || headway_jitter < 0 || vmax_jitter < 0)
        throw ConfigError("scenario: jitter values must be >= 0");
}

WorldState make_scenario(const ScenarioConfig& config) {
    config.validate();
    WorldState w;
    w.time = 0.0;
    w.av = VehicleState{"AV", Vec2{0.0, -config.av_start_distance}, 0.0, Axis::PlusZ,
                        config.vehicle_length, config.vehicle_width};
    w.traffic.reserve(static_cast<size_t>(config.n_traffic));
    for (int k = 0; k < config.n_traffic; ++k) {
        double x = -(config.traffic_start_distance + k * config.traffic_headway);
        w.traffic.push_back(VehicleState{"Car" + std::to_string(k + 1), Vec2{x, 0.0}, 0.0,
                                         Axis::PlusX, config.vehicle_length,
                                         config.vehicle_width});
    }
    return w;
}

VehicleState step_vehicle(const VehicleState& state, double accel, double dt, double vmax) {
    VehicleState next = state;
    double v1 = std::clamp(state.speed + accel * dt, 0.0, vmax);
    double displacement = 0.5 * (state.speed + v1) * dt;
    next.speed = v1;
    if (state.heading == Axis::PlusZ)
        next.position.z += displacement;
    else
        next.position.x += displacement;
    return next;
}

double traffic_accel_policy(const VehicleState& state, const ScenarioConfig& config) {
    return state.speed < config.traffic_vmax ? config.traffic_accel : 0.0;
}

std::string scenario_to_json(const ScenarioConfig& c) {
    nlohmann::json j{{"av_start_distance", c.av_start_distance},
                     {"traffic_start_distance", c.traffic_start_distance},
                     {"traffic_vmax", c.traffic_vmax},
                     {"av_vmax", c.av_vmax},
                     {"n_traffic", c.n_traffic},
                     {"traffic_headway", c.traffic_headway},
                     {"traffic_accel", c.traffic_accel},
                     {"av_accel_max", c.av_accel_max},
                     {"av_brake_max", c.av_brake_max},
                     {"lane_width", c.lane_width},
                     {"vehicle_length", c.vehicle_length},
                     {"vehicle_width", c.vehicle_width},
                     {"dt", c.dt},
                     {"t_max", c.t_max},
                     {"start_jitter", c.start_jitter},
                     {"headway_jitter", c.headway_jitter},
                     {"vmax_jitter", c.vmax_jitter}};
    return j.dump(2);
}

ScenarioConfig scenario_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
    }
    ScenarioConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) {
            try {
                field = j.at(key).get<std::decay_t<decltype(field)>>();
            } catch (const nlohmann::json::exception&) {
                throw ConfigError(std::string("scenario: bad value for key '") + key + "'");
            }
        }
    };
    get("av_start_distance", c.av_start_distance);
    get("traffic_start_distance", c.traffic_start_distance);
    get("traffic_vmax", c.traffic_vmax);
    get("av_vmax", c.av_vmax);
    get("n_traffic", c.n_traffic);
    get("traffic_headway", c.traffic_headway);
    get("traffic_accel", c.traffic_accel);
    get("av_accel_max", c.av_accel_max);
    get("av_brake_max", c.av_brake_max);
    get("lane_width", c.lane_width);
    get("vehicle_length", c.vehicle_length);
    get("vehicle_width", c.vehicle_width);
    get("dt", c.dt);
    get("t_max", c.t_max);
    get("start_jitter", c.start_jitter);
    get("headway_jitter", c.headway_jitter);
    get("vmax_jitter", c.vmax_jitter);
    c.validate();
    return c;
}

}  // namespace hallufault
