#include "hallufault/hallucination.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hallufault {

AffectedDomain domain_of(HallucinationType type) {
    switch (type) {
        case HallucinationType::LinDrift:
        case HallucinationType::AngDrift:
            return AffectedDomain::Pos;
        case HallucinationType::Phant:
        case HallucinationType::Missed:
        case HallucinationType::Blind:
            return AffectedDomain::Rec;
        case HallucinationType::Latency:
            return AffectedDomain::Time;
    }
    throw std::logic_error("domain_of: unknown type");
}

std::string to_label(HallucinationType t) {
    switch (t) {
        case HallucinationType::LinDrift: return "LinDrift";
        case HallucinationType::Phant: return "Phant";
        case HallucinationType::Missed: return "Missed";
        case HallucinationType::AngDrift: return "AngDrift";
        case HallucinationType::Blind: return "Blind";
        case HallucinationType::Latency: return "Latency";
    }
    throw std::logic_error("to_label: unknown type");
}

std::string to_label(AffectedDomain d) {
    switch (d) {
        case AffectedDomain::Pos: return "Pos";
        case AffectedDomain::Rec: return "Rec";
        case AffectedDomain::Time: return "Time";
    }
    throw std::logic_error("to_label: unknown domain");
}

std::string to_label(Persistence p) {
    switch (p) {
        case Persistence::Baseline: return "Baseline";
        case Persistence::Intermittent: return "Intermittent";
        case Persistence::Permanent: return "Permanent";
    }
    throw std::logic_error("to_label: unknown persistence");
}

std::string configuration_label(HallucinationType type, const HallucinationConfiguration& cfg) {
    switch (type) {
        case HallucinationType::LinDrift:
            return "Location";
        case HallucinationType::Phant:
        case HallucinationType::Missed:
            return "Car" + std::to_string(std::get<TargetCarCfg>(cfg).car);
        case HallucinationType::AngDrift: {
            const auto& a = std::get<AngleCfg>(cfg);
            char buf[16];
            std::snprintf(buf, sizeof(buf), "Ang%02d%c", static_cast<int>(a.magnitude),
                          a.side == Side::L ? 'L' : 'R');
            return buf;
        }
        case HallucinationType::Blind: {
            const auto& b = std::get<BlindCfg>(cfg);
            char buf[16];
            std::snprintf(buf, sizeof(buf), "Blind%02d%c", static_cast<int>(b.center),
                          b.side == Side::L ? 'L' : 'R');
            return buf;
        }
        case HallucinationType::Latency:
            return "Lat" + std::to_string(std::get<LatencyCfg>(cfg).cycles);
    }
    throw std::logic_error("configuration_label: unknown type");
}

void HIConfig::validate() const {
    if (!module_activation) {
        if (persistence != Persistence::Baseline)
            throw ConfigError("hi: OFF requires persistence = Baseline");
        return;
    }
    if (persistence == Persistence::Baseline)
        throw ConfigError("hi: ON requires persistence Intermittent or Permanent");
    if (!(probability >= 0.0 && probability <= 1.0))
        throw ConfigError("hi: probability must lie in [0, 1]");
    bool tag_ok = false;
    switch (type) {
        case HallucinationType::LinDrift:
            tag_ok = std::holds_alternative<LocationCfg>(configuration);
            break;
        case HallucinationType::Phant:
        case HallucinationType::Missed:
            tag_ok = std::holds_alternative<TargetCarCfg>(configuration);
            if (tag_ok) {
                int car = std::get<TargetCarCfg>(configuration).car;
                if (car < 1 || car > 3) throw ConfigError("hi: target car must be Car1..Car3");
            }
            break;
        case HallucinationType::AngDrift:
            tag_ok = std::holds_alternative<AngleCfg>(configuration);
            break;
        case HallucinationType::Blind:
            tag_ok = std::holds_alternative<BlindCfg>(configuration);
            if (tag_ok && !(std::get<BlindCfg>(configuration).width > 0.0))
                throw ConfigError("hi: blind width must be > 0");
            break;
        case HallucinationType::Latency:
            tag_ok = std::holds_alternative<LatencyCfg>(configuration);
            if (tag_ok && std::get<LatencyCfg>(configuration).cycles < 0)
                throw ConfigError("hi: latency cycles must be >= 0");
            break;
    }
    if (!tag_ok) throw ConfigError("hi: configuration tag incompatible with type");
}

namespace {

HallucinationType type_from_label(const std::string& s) {
    if (s == "LinDrift") return HallucinationType::LinDrift;
    if (s == "Phant") return HallucinationType::Phant;
    if (s == "Missed") return HallucinationType::Missed;
    if (s == "AngDrift") return HallucinationType::AngDrift;
    if (s == "Blind") return HallucinationType::Blind;
    if (s == "Latency") return HallucinationType::Latency;
    throw ConfigError("hi: unknown type label '" + s + "'");
}

Persistence persistence_from_label(const std::string& s) {
    if (s == "Baseline") return Persistence::Baseline;
    if (s == "Intermittent") return Persistence::Intermittent;
    if (s == "Permanent") return Persistence::Permanent;
    throw ConfigError("hi: unknown persistence label '" + s + "'");
}

HallucinationConfiguration configuration_from_label(HallucinationType type,
                                                    const std::string& s) {
    switch (type) {
        case HallucinationType::LinDrift:
            if (s == "Location") return LocationCfg{};
            break;
        case HallucinationType::Phant:
        case HallucinationType::Missed:
            if (s.size() == 4 && s.rfind("Car", 0) == 0 && s[3] >= '1' && s[3] <= '3')
                return TargetCarCfg{s[3] - '0'};
            break;
        case HallucinationType::AngDrift:
            if (s.size() == 6 && s.rfind("Ang", 0) == 0 && (s[5] == 'L' || s[5] == 'R')) {
                int mag = std::stoi(s.substr(3, 2));
                if (mag == 5 || mag == 10 || mag == 20 || mag == 25)
                    return AngleCfg{static_cast<double>(mag),
                                    s[5] == 'L' ? Side::L : Side::R};
            }
            break;
        case HallucinationType::Blind:
            if (s.size() == 8 && s.rfind("Blind", 0) == 0 && s[7] == 'L') {
                int center = std::stoi(s.substr(5, 2));
                if (center == 40 || center == 50 || center == 60)
                    return BlindCfg{static_cast<double>(center), Side::L};
            }
            break;
        case HallucinationType::Latency:
            if (s == "Lat20") return LatencyCfg{20};
            if (s == "Lat40") return LatencyCfg{40};
            break;
    }
    throw ConfigError("hi: configuration label '" + s + "' invalid for type " + to_label(type));
}

}  // namespace

std::string hi_to_json(const HIConfig& c) {
    nlohmann::json j;
    j["module_activation"] = c.module_activation ? "ON" : "OFF";
    if (c.module_activation) {
        j["type"] = to_label(c.type);
        j["domain"] = to_label(c.domain());
        j["configuration"] = configuration_label(c.type, c.configuration);
        j["probability"] = c.probability;
        if (const auto* loc = std::get_if<LocationCfg>(&c.configuration))
            j["lin_drift_offset"] = {{"x", loc->offset.x}, {"z", loc->offset.z}};
        if (const auto* t = std::get_if<TargetCarCfg>(&c.configuration))
            if (c.type == HallucinationType::Phant) j["phantom_offset_m"] = t->phantom_offset;
        if (const auto* b = std::get_if<BlindCfg>(&c.configuration))
            j["blind_width_deg"] = b->width;
    }
    j["persistence"] = to_label(c.persistence);
    return j.dump(2);
}

HIConfig hi_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("hi: invalid JSON: ") + e.what());
    }
    HIConfig c;
    if (!j.contains("module_activation") || !j.at("module_activation").is_string())
        throw ConfigError("hi: missing or non-string key 'module_activation'");
    std::string act = j.at("module_activation").get<std::string>();
    if (act != "ON" && act != "OFF")
        throw ConfigError("hi: 'module_activation' must be \"ON\" or \"OFF\"");
    c.module_activation = act == "ON";
    if (j.contains("persistence"))
        c.persistence = persistence_from_label(j.at("persistence").get<std::string>());
    else
        c.persistence = c.module_activation ? Persistence::Intermittent : Persistence::Baseline;
    if (!c.module_activation) {
        c.validate();
        return c;
    }
    if (!j.contains("type")) throw ConfigError("hi: missing key 'type'");
    c.type = type_from_label(j.at("type").get<std::string>());
    if (j.contains("domain")) {
        std::string d = j.at("domain").get<std::string>();
        if (d != to_label(c.domain()))
            throw ConfigError("hi: key 'domain' inconsistent with type " + to_label(c.type));
    }
    if (!j.contains("configuration")) throw ConfigError("hi: missing key 'configuration'");
    c.configuration = configuration_from_label(c.type, j.at("configuration").get<std::string>());
    if (!j.contains("probability")) throw ConfigError("hi: missing key 'probability'");
    if (!j.at("probability").is_number()) throw ConfigError("hi: key 'probability' must be numeric");
    c.probability = j.at("probability").get<double>();
    if (j.contains("lin_drift_offset")) {
        if (auto* loc = std::get_if<LocationCfg>(&c.configuration)) {
            loc->offset.x = j.at("lin_drift_offset").at("x").get<double>();
            loc->offset.z = j.at("lin_drift_offset").at("z").get<double>();
        }
    }
    if (j.contains("phantom_offset_m"))
        if (auto* t = std::get_if<TargetCarCfg>(&c.configuration))
            t->phantom_offset = j.at("phantom_offset_m").get<double>();
    if (j.contains("blind_width_deg"))
        if (auto* b = std::get_if<BlindCfg>(&c.configuration))
            b->width = j.at("blind_width_deg").get<double>();
    c.validate();
    return c;
}

PerceptionFrame inject_linear_drift(const PerceptionFrame& frame, const Vec2& offset) {
    PerceptionFrame out = frame;
    for (auto& obj : out.objects) obj.position = obj.position + offset;
    return out;
}

PerceptionFrame inject_phantom(const PerceptionFrame& frame, int target_car,
                               double phantom_offset) {
    PerceptionFrame out = frame;
    std::string target = "Car" + std::to_string(target_car);
    for (const auto& obj : frame.objects) {
        if (obj.source_id == target) {
            PerceivedObject ghost = obj;
            ghost.source_id = "phantom:" + target;
            if (ghost.heading == Axis::PlusX)
                ghost.position.x += phantom_offset;
            else
                ghost.position.z += phantom_offset;
            out.objects.push_back(ghost);
            break;
        }
    }
    return out;
}

PerceptionFrame inject_missed(const PerceptionFrame& frame, int target_car) {
    PerceptionFrame out = frame;
    std::string target = "Car" + std::to_string(target_car);
    std::erase_if(out.objects,
                  [&](const PerceivedObject& o) { return o.source_id == target; });
    return out;
}

PerceptionFrame inject_angular_drift(const PerceptionFrame& frame, const VehicleState& av,
                                     double signed_angle_deg) {
    PerceptionFrame out = frame;
    double rad = deg2rad(signed_angle_deg);
    double c = std::cos(rad), s = std::sin(rad);
    for (auto& obj : out.objects) {
        Vec2 d = obj.position - av.position;
        // Positive angle rotates perceived objects to the left of the AV
        // heading (+z up, left = -x): (x,z) -> (x cos a - z sin a, z cos a + x sin a)
        // with left-positive convention.
        Vec2 r{d.x * c - d.z * s, d.z * c + d.x * s};
        obj.position = av.position + r;
    }
    return out;
}

PerceptionFrame inject_blind_region(const PerceptionFrame& frame, const VehicleState& av,
                                    double center_deg, double width_deg) {
    PerceptionFrame out = frame;
    double lo = center_deg - width_deg / 2.0;
    double hi = center_deg + width_deg / 2.0;
    std::erase_if(out.objects, [&](const PerceivedObject& o) {
        if (o.position.x == av.position.x && o.position.z == av.position.z) return false;
        double b = bearing(av, o.position);
        return b >= lo && b <= hi;
    });
    return out;
}

HIState::HIState(HIConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
    config_.validate();
}

bool HIState::sample_activation() {
    if (!config_.module_activation)
        throw std::logic_error("sample_activation: module is OFF");
    if (config_.persistence == Persistence::Permanent) {
        if (triggered_) return true;
        triggered_ = rng_.next_bernoulli(config_.probability);
        return triggered_;
    }
    return rng_.next_bernoulli(config_.probability);
}

PerceptionFrame HIState::apply(const PerceptionFrame& frame, const VehicleState& av) {
    if (!config_.module_activation) return frame;

    if (config_.type == HallucinationType::Latency) {
        // History advances every cycle so mid-run activation sees a complete
        // delay line. Capacity N+1 keeps exactly the frames [t-N, t].
        size_t cap = static_cast<size_t>(std::get<LatencyCfg>(config_.configuration).cycles) + 1;
        delay_line_.push_back(frame);
        if (delay_line_.size() > cap) delay_line_.pop_front();
        bool active = sample_activation();
        return active ? delay_line_.front() : frame;
    }

    if (!sample_activation()) return frame;

    switch (config_.type) {
        case HallucinationType::LinDrift:
            return inject_linear_drift(frame, std::get<LocationCfg>(config_.configuration).offset);
        case HallucinationType::Phant: {
            const auto& t = std::get<TargetCarCfg>(config_.configuration);
            return inject_phantom(frame, t.car, t.phantom_offset);
        }
        case HallucinationType::Missed:
            return inject_missed(frame, std::get<TargetCarCfg>(config_.configuration).car);
        case HallucinationType::AngDrift: {
            const auto& a = std::get<AngleCfg>(config_.configuration);
            double signed_deg = a.side == Side::L ? a.magnitude : -a.magnitude;
            return inject_angular_drift(frame, av, signed_deg);
        }
        case HallucinationType::Blind: {
            const auto& b = std::get<BlindCfg>(config_.configuration);
            return inject_blind_region(frame, av, b.center, b.width);
        }
        case HallucinationType::Latency:
            break;  // handled above
    }
    return frame;
}

}  // namespace hallufault
