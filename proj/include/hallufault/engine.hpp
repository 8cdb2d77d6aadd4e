#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hallufault/controller.hpp"
#include "hallufault/hallucination.hpp"
#include "hallufault/world.hpp"

namespace hallufault {

enum class Outcome { Crossed, Collision, Halted };

std::string to_label(Outcome o);

struct LogRow {
    long time_ms = 0;
    double x_av = 0, z_av = 0, v_av = 0;
    double steering = 0, throttle = 0, brake = 0;
    std::vector<double> car_x, car_z, car_v;  // one entry per crossing car
};

struct RunLog {
    std::uint64_t seed = 0;
    std::string hi_json;
    std::string scenario_hash;
    int n_traffic = 0;
    std::vector<LogRow> rows;

    std::string to_csv() const;
};

struct RunResult {
    RunLog log;
    Outcome outcome = Outcome::Halted;
    double min_distance = 0.0;  // +inf when no traffic
    bool valid = true;
};

// Axis-aligned footprint overlap between the AV and any crossing car.
// Touching edges count as overlap.
bool detect_collision(const WorldState& world);

// Brute-force rescan of a finished log; the engine tracks the same quantity
// incrementally.
double min_distance(const RunLog& log);

std::string scenario_hash(const ScenarioConfig& config);

RunResult run(const ScenarioConfig& scenario, const HIConfig& hi, std::uint64_t seed,
              const ControllerParams& params = {});

// Metadata sidecar written next to each log CSV.
std::string sidecar_json(const RunResult& result, const ScenarioConfig& scenario,
                         const HIConfig& hi);

}  // namespace hallufault
