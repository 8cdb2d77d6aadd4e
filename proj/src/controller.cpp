#include "hallufault/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace hallufault {

ControllerParams controller_params_from_scenario_json(const std::string& text) {
    ControllerParams p;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("controller: invalid JSON: ") + e.what());
    }
    if (!j.contains("controller")) return p;
    const auto& c = j.at("controller");
    if (c.contains("margin")) p.margin = c.at("margin").get<double>();
    if (c.contains("min_width")) p.min_width = c.at("min_width").get<double>();
    if (c.contains("gain")) p.gain = c.at("gain").get<double>();
    if (c.contains("horizon")) p.horizon = c.at("horizon").get<double>();
    if (!(p.margin >= 0) || !(p.min_width > 0) || !(p.gain > 0) || !(p.horizon > 0))
        throw ConfigError("controller: margin >= 0 and min_width, gain, horizon > 0 required");
    return p;
}

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double time_to_travel(double d, double v0, double a, double vmax) {
    if (d <= 0.0) return 0.0;
    if (vmax <= 0.0) return kInf;
    double v = std::min(v0, vmax);
    if (a <= 0.0) return v > 0.0 ? d / v : kInf;
    double t_ramp = (vmax - v) / a;
    double d_ramp = v * t_ramp + 0.5 * a * t_ramp * t_ramp;
    if (d <= d_ramp) return (-v + std::sqrt(v * v + 2.0 * a * d)) / a;
    return t_ramp + (d - d_ramp) / vmax;
}

std::vector<OccupancyInterval> predict_occupancy(const PerceptionFrame& frame,
                                                 const ScenarioConfig& geometry,
                                                 double margin) {
    std::vector<OccupancyInterval> out;
    double half = geometry.zone_half();
    for (const auto& obj : frame.objects) {
        // Crossing traffic only; coordinate along its travel axis.
        double pos = obj.heading == Axis::PlusX ? obj.position.x : obj.position.z;
        if (pos > half) continue;  // already past the zone
        double t_enter = time_to_travel(-half - pos, obj.speed, geometry.traffic_accel,
                                        geometry.traffic_vmax);
        double t_exit = time_to_travel(half - pos, obj.speed, geometry.traffic_accel,
                                       geometry.traffic_vmax);
        if (!std::isfinite(t_enter) || !std::isfinite(t_exit)) continue;  // never arrives
        out.push_back(OccupancyInterval{frame.time + t_enter - margin,
                                        frame.time + t_exit + margin, obj.source_id});
    }
    return out;
}

std::vector<CandidateWindow> candidate_windows(const std::vector<OccupancyInterval>& occupancy,
                                               double now, double horizon) {
    double end = now + horizon;
    std::vector<std::pair<double, double>> busy;
    busy.reserve(occupancy.size());
    for (const auto& iv : occupancy) {
        double lo = std::max(iv.t_enter, now);
        double hi = std::min(iv.t_exit, end);
        if (lo < hi) busy.emplace_back(lo, hi);
    }
    std::sort(busy.begin(), busy.end());
    std::vector<CandidateWindow> windows;
    double cursor = now;
    for (const auto& [lo, hi] : busy) {
        if (lo > cursor) windows.push_back(CandidateWindow{cursor, lo});
        cursor = std::max(cursor, hi);
    }
    if (cursor < end) windows.push_back(CandidateWindow{cursor, end});
    return windows;
}

std::optional<CandidateWindow> select_window(const std::vector<CandidateWindow>& windows,
                                             const VehicleState& av,
                                             const ScenarioConfig& limits, double min_width,
                                             double now) {
    double dist_center = -av.position.z;
    double dist_entry = dist_center - limits.zone_half();
    double earliest =
        now + time_to_travel(dist_center, av.speed, limits.av_accel_max, limits.av_vmax);
    // The AV can postpone arrival indefinitely iff it can still stop short of
    // the zone entry.
    double stop_dist = av.speed * av.speed / (2.0 * limits.av_brake_max);
    double latest = stop_dist <= dist_entry ? kInf : earliest;
    for (const auto& w : windows) {
        if (w.t_close - w.t_open < min_width) continue;
        double tc = w.t_center();
        if (earliest <= tc && tc <= latest) return w;
    }
    return std::nullopt;
}

ControlCommand longitudinal_control(const VehicleState& av,
                                    const std::optional<CandidateWindow>& target,
                                    const ScenarioConfig& geometry,
                                    const ControllerParams& params, double now) {
    ControlCommand cmd;
    double dist_center = -av.position.z;

    bool have_target = target.has_value();
    double t_star = 0.0;
    if (have_target) {
        // Aim for the earliest achievable arrival inside the window; waiting
        // until the center is only needed when the window has not opened yet.
        double earliest = now + time_to_travel(dist_center, av.speed, geometry.av_accel_max,
                                               geometry.av_vmax);
        t_star = std::clamp(earliest, target->t_open, target->t_center());
        if (t_star <= now && dist_center > geometry.zone_half())
            have_target = false;  // window already behind us, re-plan next cycle
    }

    if (!have_target) {
        if (av.speed > 0.0) cmd.brake = 1.0;
        return cmd;
    }

    double v_req = t_star > now ? dist_center / (t_star - now) : geometry.av_vmax;
    double dv = v_req - av.speed;
    if (dv >= 0.0)
        cmd.throttle = std::clamp(params.gain * dv / geometry.av_accel_max, 0.0, 1.0);
    else
        cmd.brake = std::clamp(-params.gain * dv / geometry.av_brake_max, 0.0, 1.0);
    return cmd;
}

}  // namespace hallufault
