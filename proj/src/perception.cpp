#include "hallufault/perception.hpp"

#include <cmath>
#include <stdexcept>

namespace hallufault {

double bearing(const VehicleState& av, const Vec2& p) {
    double dx = p.x - av.position.x;
    double dz = p.z - av.position.z;
    if (dx == 0.0 && dz == 0.0)
        throw std::domain_error("bearing: point coincides with AV position");
    // Forward/lateral components relative to the AV heading; left positive.
    double forward, left;
    if (av.heading == Axis::PlusZ) {
        forward = dz;
        left = -dx;
    } else {
        forward = dx;
        left = dz;
    }
    double deg = rad2deg(std::atan2(left, forward));
    if (deg <= -180.0) deg += 360.0;
    return deg;
}

PerceptionFrame sense(const WorldState& world, const FovConfig& fov, long cycle) {
    PerceptionFrame frame;
    frame.cycle = cycle;
    frame.time = world.time;
    frame.objects.reserve(world.traffic.size());
    for (const auto& car : world.traffic) {
        Vec2 delta = car.position - world.av.position;
        double dist = delta.norm();
        if (dist > fov.range) continue;
        if (dist > 0.0) {
            double b = bearing(world.av, car.position);
            if (std::abs(b) > fov.half_angle) continue;
        }
        frame.objects.push_back(PerceivedObject{car.id, car.position, car.speed, car.heading});
    }
    return frame;
}

}  // namespace hallufault
