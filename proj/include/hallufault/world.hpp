#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hallufault/geometry.hpp"

namespace hallufault {

// Travel axis of a vehicle. The AV drives along +z, crossing traffic along +x.
enum class Axis { PlusZ, PlusX };

struct VehicleState {
    std::string id;      // "AV" or "Car1".."CarN"
    Vec2 position;
    double speed = 0.0;  // scalar along the travel axis, never negative
    Axis heading = Axis::PlusZ;
    double length = 4.5;
    double width = 1.8;
};

struct ScenarioConfig {
    double av_start_distance = 250.0;
    double traffic_start_distance = 270.0;
    double traffic_vmax = 15.0;   // 54 km/h
    double av_vmax = 16.7;        // 60 km/h
    int n_traffic = 5;
    double traffic_headway = 30.0;
    double traffic_accel = 2.0;
    double av_accel_max = 2.5;
    double av_brake_max = 6.0;
    double lane_width = 3.5;
    double vehicle_length = 4.5;
    double vehicle_width = 1.8;
    double dt = 0.1;
    double t_max = 120.0;

    // Seeded per-run perturbations of the nominal scenario. The controller
    // plans against the nominal values; the world uses the perturbed ones.
    double start_jitter = 10.0;    // meters, uniform +- on platoon lead position
    double headway_jitter = 6.0;   // meters, uniform +- per inter-car gap
    double vmax_jitter = 0.06;     // fraction, uniform +- per crossing car

    void validate() const;

    // Half extent of the square conflict zone centered at the origin.
    double zone_half() const { return (lane_width + vehicle_length) / 2.0; }
};

struct WorldState {
    double time = 0.0;
    VehicleState av;
    std::vector<VehicleState> traffic;
};

WorldState make_scenario(const ScenarioConfig& config);

// Advance one vehicle by dt under constant acceleration. Speed is clamped to
// [0, vmax] before the midpoint displacement is applied.
VehicleState step_vehicle(const VehicleState& state, double accel, double dt, double vmax);

// Crossing cars accelerate from rest to vmax and never yield.
double traffic_accel_policy(const VehicleState& state, const ScenarioConfig& config);

std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& text);

}  // namespace hallufault
