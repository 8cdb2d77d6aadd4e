#pragma once

#include <optional>
#include <vector>

#include "hallufault/perception.hpp"
#include "hallufault/world.hpp"

namespace hallufault {

struct OccupancyInterval {
    double t_enter = 0.0;
    double t_exit = 0.0;
    std::string source_id;
};

struct CandidateWindow {
    double t_open = 0.0;
    double t_close = 0.0;
    double t_center() const { return 0.5 * (t_open + t_close); }
};

struct ControlCommand {
    double throttle = 0.0;  // [0, 1]
    double brake = 0.0;     // [0, 1]
    double steering = 0.0;  // [-1, 1], constant 0 in this scenario
};

struct ControllerParams {
    double margin = 0.5;      // seconds padded on each side of an occupancy
    double min_width = 2.0;   // seconds, narrowest acceptable window
    double gain = 1.0;        // 1/s, proportional gain on speed error
    double horizon = 60.0;    // seconds of look-ahead
};

// Reads the optional "controller" key of a scenario JSON document.
ControllerParams controller_params_from_scenario_json(const std::string& text);

// Time for a vehicle at speed v0 to cover distance d under constant
// acceleration a capped at vmax. Returns +inf when unreachable.
double time_to_travel(double d, double v0, double a, double vmax);

// Predicted conflict-zone occupancy per perceived object, assuming each keeps
// accelerating at the nominal traffic rate up to the nominal vmax. Intervals
// are absolute times, padded by the margin.
std::vector<OccupancyInterval> predict_occupancy(const PerceptionFrame& frame,
                                                 const ScenarioConfig& geometry,
                                                 double margin);

// Complement of the merged occupancy within [now, now + horizon].
std::vector<CandidateWindow> candidate_windows(const std::vector<OccupancyInterval>& occupancy,
                                               double now, double horizon);

// Earliest window the AV can reach: wide enough, center reachable under the
// speed limits, and not already unreachable by waiting.
std::optional<CandidateWindow> select_window(const std::vector<CandidateWindow>& windows,
                                             const VehicleState& av,
                                             const ScenarioConfig& limits, double min_width,
                                             double now);

// Proportional longitudinal control toward the target arrival time. With no
// target the AV brakes to a halt short of the zone.
ControlCommand longitudinal_control(const VehicleState& av,
                                    const std::optional<CandidateWindow>& target,
                                    const ScenarioConfig& geometry,
                                    const ControllerParams& params, double now);

}  // namespace hallufault
