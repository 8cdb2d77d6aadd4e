#pragma once

#include <limits>
#include <string>
#include <vector>

#include "hallufault/world.hpp"

namespace hallufault {

struct PerceivedObject {
    std::string source_id;  // vehicle id, or "phantom:<template id>"
    Vec2 position;
    double speed = 0.0;
    Axis heading = Axis::PlusX;

    bool is_phantom() const { return source_id.rfind("phantom:", 0) == 0; }
};

struct PerceptionFrame {
    long cycle = 0;
    double time = 0.0;
    std::vector<PerceivedObject> objects;
};

struct FovConfig {
    double half_angle = 90.0;  // degrees; 90 = 180-degree forward coverage
    double range = std::numeric_limits<double>::infinity();
};

// Signed angle in (-180, 180] between the AV heading and the ray AV->p.
// Left of heading is positive.
double bearing(const VehicleState& av, const Vec2& p);

// Ground-truth bypass: copies every crossing vehicle inside the FOV into the
// frame, positions and speeds exact.
PerceptionFrame sense(const WorldState& world, const FovConfig& fov, long cycle);

}  // namespace hallufault
