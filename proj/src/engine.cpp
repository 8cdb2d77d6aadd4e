#include "hallufault/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "hallufault/perception.hpp"
#include "hallufault/rng.hpp"

namespace hallufault {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void append_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    out += buf;
}

double pairwise_min_distance(const LogRow& row) {
    double best = kInf;
    for (size_t k = 0; k < row.car_x.size(); ++k) {
        double dx = row.car_x[k] - row.x_av;
        double dz = row.car_z[k] - row.z_av;
        best = std::min(best, std::hypot(dx, dz));
    }
    return best;
}
}  // namespace

std::string to_label(Outcome o) {
    switch (o) {
        case Outcome::Crossed: return "Crossed";
        case Outcome::Collision: return "Collision";
        case Outcome::Halted: return "Halted";
    }
    return "?";
}

std::string RunLog::to_csv() const {
    std::string out = "time_ms,x_av,z_av,v_av,steering,throttle,brake";
    for (int k = 1; k <= n_traffic; ++k) {
        std::string i = std::to_string(k);
        out += ",x_" + i + ",z_" + i + ",v_" + i;
    }
    out += "\n";
    for (const auto& row : rows) {
        out += std::to_string(row.time_ms);
        for (double v : {row.x_av, row.z_av, row.v_av, row.steering, row.throttle, row.brake}) {
            out += ',';
            append_double(out, v);
        }
        for (size_t k = 0; k < row.car_x.size(); ++k) {
            out += ',';
            append_double(out, row.car_x[k]);
            out += ',';
            append_double(out, row.car_z[k]);
            out += ',';
            append_double(out, row.car_v[k]);
        }
        out += "\n";
    }
    return out;
}

bool detect_collision(const WorldState& world) {
    auto half_extents = [](const VehicleState& v) {
        return v.heading == Axis::PlusZ ? Vec2{v.width / 2, v.length / 2}
                                        : Vec2{v.length / 2, v.width / 2};
    };
    Vec2 av_half = half_extents(world.av);
    for (const auto& car : world.traffic) {
        Vec2 car_half = half_extents(car);
        if (std::abs(car.position.x - world.av.position.x) <= av_half.x + car_half.x &&
            std::abs(car.position.z - world.av.position.z) <= av_half.z + car_half.z)
            return true;
    }
    return false;
}

double min_distance(const RunLog& log) {
    if (log.rows.empty()) throw std::runtime_error("min_distance: empty log");
    double best = kInf;
    for (const auto& row : log.rows) best = std::min(best, pairwise_min_distance(row));
    return best;
}

std::string scenario_hash(const ScenarioConfig& config) {
    std::string text = scenario_to_json(config);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunResult run(const ScenarioConfig& scenario, const HIConfig& hi, std::uint64_t seed,
              const ControllerParams& params) {
    scenario.validate();
    hi.validate();

    WorldState world = make_scenario(scenario);

    // Per-run perturbation of the nominal scenario. The controller keeps
    // planning against the nominal config; only the world differs.
    SplitMix64 jitter_rng(derive_seed(seed, 1, 0));
    double lead_offset = jitter_rng.next_uniform(-scenario.start_jitter, scenario.start_jitter);
    std::vector<double> car_vmax(world.traffic.size(), scenario.traffic_vmax);
    double x = -(scenario.traffic_start_distance + lead_offset);
    for (size_t k = 0; k < world.traffic.size(); ++k) {
        if (k > 0)
            x -= scenario.traffic_headway +
                 jitter_rng.next_uniform(-scenario.headway_jitter, scenario.headway_jitter);
        world.traffic[k].position.x = std::min(x, -scenario.zone_half());
        car_vmax[k] = scenario.traffic_vmax *
                      (1.0 + jitter_rng.next_uniform(-scenario.vmax_jitter, scenario.vmax_jitter));
    }

    HIState hi_state(hi, derive_seed(seed, 2, 0));
    FovConfig fov;  // 180-degree forward coverage, unlimited range

    RunResult result;
    result.log.seed = seed;
    result.log.hi_json = hi_to_json(hi);
    result.log.scenario_hash = scenario_hash(scenario);
    result.log.n_traffic = scenario.n_traffic;
    result.min_distance = kInf;

    double zone_half = scenario.zone_half();
    bool committed = false;
    long cycle = 0;

    while (true) {
        PerceptionFrame frame = sense(world, fov, cycle);
        PerceptionFrame believed = hi_state.apply(frame, world.av);

        ControlCommand cmd;
        if (committed) {
            cmd.throttle = 1.0;
        } else {
            auto occupancy = predict_occupancy(believed, scenario, params.margin);
            auto windows = candidate_windows(occupancy, world.time, params.horizon);
            auto target =
                select_window(windows, world.av, scenario, params.min_width, world.time);
            cmd = longitudinal_control(world.av, target, scenario, params, world.time);
        }

        LogRow row;
        row.time_ms = std::lround(world.time * 1000.0);
        row.x_av = world.av.position.x;
        row.z_av = world.av.position.z;
        row.v_av = world.av.speed;
        row.steering = cmd.steering;
        row.throttle = cmd.throttle;
        row.brake = cmd.brake;
        row.car_x.reserve(world.traffic.size());
        for (const auto& car : world.traffic) {
            row.car_x.push_back(car.position.x);
            row.car_z.push_back(car.position.z);
            row.car_v.push_back(car.speed);
        }
        result.min_distance = std::min(result.min_distance, pairwise_min_distance(row));
        result.log.rows.push_back(std::move(row));

        bool finite = world.av.position.finite() && std::isfinite(world.av.speed);
        for (const auto& car : world.traffic)
            finite = finite && car.position.finite() && std::isfinite(car.speed);
        if (!finite) {
            result.valid = false;
            result.outcome = Outcome::Halted;
            return result;
        }

        if (detect_collision(world)) {
            result.outcome = Outcome::Collision;
            return result;
        }
        if (world.av.position.z - world.av.length / 2.0 > zone_half) {
            result.outcome = Outcome::Crossed;
            return result;
        }
        if (world.time >= scenario.t_max) {
            result.outcome = Outcome::Halted;
            return result;
        }

        double av_accel =
            cmd.throttle * scenario.av_accel_max - cmd.brake * scenario.av_brake_max;
        world.av = step_vehicle(world.av, av_accel, scenario.dt, scenario.av_vmax);
        for (size_t k = 0; k < world.traffic.size(); ++k) {
            double accel = world.traffic[k].speed < car_vmax[k] ? scenario.traffic_accel : 0.0;
            world.traffic[k] = step_vehicle(world.traffic[k], accel, scenario.dt, car_vmax[k]);
        }
        world.time += scenario.dt;
        ++cycle;

        if (!committed && world.av.position.z + world.av.length / 2.0 >= -zone_half)
            committed = true;
    }
}

std::string sidecar_json(const RunResult& result, const ScenarioConfig& scenario,
                         const HIConfig& hi) {
    nlohmann::json j;
    j["seed"] = result.log.seed;
    j["hi"] = nlohmann::json::parse(hi_to_json(hi));
    j["scenario_hash"] = scenario_hash(scenario);
    j["outcome"] = to_label(result.outcome);
    if (std::isfinite(result.min_distance))
        j["min_distance"] = result.min_distance;
    else
        j["min_distance"] = nullptr;
    j["valid"] = result.valid;
    return j.dump(2);
}

}  // namespace hallufault
