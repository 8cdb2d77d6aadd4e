#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <variant>

#include "hallufault/perception.hpp"
#include "hallufault/rng.hpp"

namespace hallufault {

enum class HallucinationType { LinDrift, Phant, Missed, AngDrift, Blind, Latency };
enum class AffectedDomain { Pos, Rec, Time };
enum class Persistence { Baseline, Intermittent, Permanent };
enum class Side { L, R };

AffectedDomain domain_of(HallucinationType type);

std::string to_label(HallucinationType t);
std::string to_label(AffectedDomain d);
std::string to_label(Persistence p);

// Per-type configuration payloads. The string labels ("Location", "Car2",
// "Ang25R", "Blind50L", "Lat40") identify an instance; numeric parameters the
// labels leave open carry documented defaults.
struct LocationCfg {
    Vec2 offset{-2.0, 0.0};
};
struct TargetCarCfg {
    int car = 1;  // 1..3
    double phantom_offset = -30.0;  // meters along the target's travel axis
};
struct AngleCfg {
    double magnitude = 5.0;  // degrees, one of {5, 10, 20, 25}
    Side side = Side::L;
};
struct BlindCfg {
    double center = 40.0;  // degrees left of the AV heading, one of {40, 50, 60}
    Side side = Side::L;
    double width = 20.0;
};
struct LatencyCfg {
    int cycles = 20;  // 20 or 40
};

using HallucinationConfiguration =
    std::variant<LocationCfg, TargetCarCfg, AngleCfg, BlindCfg, LatencyCfg>;

std::string configuration_label(HallucinationType type, const HallucinationConfiguration& cfg);

struct HIConfig {
    bool module_activation = false;
    HallucinationType type = HallucinationType::LinDrift;
    HallucinationConfiguration configuration = LocationCfg{};
    double probability = 0.0;  // per-cycle activation probability, in [0, 1]
    Persistence persistence = Persistence::Baseline;

    AffectedDomain domain() const { return domain_of(type); }
    void validate() const;
};

std::string hi_to_json(const HIConfig& config);
HIConfig hi_from_json(const std::string& text);

// Per-run injection state: activation latch, latency delay line, PRNG stream.
class HIState {
public:
    explicit HIState(HIConfig config, std::uint64_t seed);

    const HIConfig& config() const { return config_; }
    bool triggered() const { return triggered_; }

    // One Bernoulli draw per cycle; Permanent latches after the first success
    // and stops consuming the stream.
    bool sample_activation();

    // Full per-cycle pipeline: activation decision plus the configured
    // transform. The latency delay line advances every cycle while the module
    // is ON, active or not.
    PerceptionFrame apply(const PerceptionFrame& frame, const VehicleState& av);

private:
    HIConfig config_;
    SplitMix64 rng_;
    bool triggered_ = false;
    std::deque<PerceptionFrame> delay_line_;
};

// Type-specific transforms. Pure functions, exposed for direct testing.
PerceptionFrame inject_linear_drift(const PerceptionFrame& frame, const Vec2& offset);
PerceptionFrame inject_phantom(const PerceptionFrame& frame, int target_car,
                               double phantom_offset);
PerceptionFrame inject_missed(const PerceptionFrame& frame, int target_car);
PerceptionFrame inject_angular_drift(const PerceptionFrame& frame, const VehicleState& av,
                                     double signed_angle_deg);
PerceptionFrame inject_blind_region(const PerceptionFrame& frame, const VehicleState& av,
                                    double center_deg, double width_deg);

}  // namespace hallufault
