#include "lcsnav/predicates.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace lcsnav {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_double(const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw std::invalid_argument("not a boolean: '" + s + "'");
}

std::string_view frame_name(VisionFrame f) {
    switch (f) {
        case VisionFrame::None: return "none";
        case VisionFrame::Relative: return "relative";
        case VisionFrame::Absolute: return "absolute";
    }
    return "none";
}

Cell ahead(Cell p, Direction d, int k) { return {p.x + k * dx(d), p.y + k * dy(d)}; }

}  // namespace

std::map<std::string, std::string> RegistryConfig::to_map() const {
    std::map<std::string, std::string> kv;
    kv["vision"] = std::string(frame_name(vision));
    kv["window"] = std::to_string(window);
    kv["absolute_width"] = std::to_string(absolute_width);
    kv["absolute_height"] = std::to_string(absolute_height);
    kv["position"] = position ? "true" : "false";
    kv["goal"] = goal ? "true" : "false";
    std::string a;
    for (std::size_t i = 0; i < anchors.size(); ++i) a += (i ? "," : "") + fmt_double(anchors[i]);
    kv["anchors"] = a;
    kv["direction"] = direction ? "true" : "false";
    kv["distance"] = distance ? "true" : "false";
    kv["naive"] = naive ? "true" : "false";
    kv["predictive"] = predictive ? "true" : "false";
    kv["dead_end"] = dead_end ? "true" : "false";
    kv["obstacles"] = obstacles ? "true" : "false";
    kv["obstacle_range"] = fmt_double(obstacle_range);
    return kv;
}

RegistryConfig RegistryConfig::from_map(const std::map<std::string, std::string>& kv) {
    RegistryConfig c;
    for (const auto& [key, value] : kv) {
        if (key == "vision") {
            if (value == "none") c.vision = VisionFrame::None;
            else if (value == "relative") c.vision = VisionFrame::Relative;
            else if (value == "absolute") c.vision = VisionFrame::Absolute;
            else throw std::invalid_argument("registry.vision must be none|relative|absolute");
        } else if (key == "window") c.window = std::stoi(value);
        else if (key == "absolute_width") c.absolute_width = std::stoi(value);
        else if (key == "absolute_height") c.absolute_height = std::stoi(value);
        else if (key == "position") c.position = parse_bool(value);
        else if (key == "goal") c.goal = parse_bool(value);
        else if (key == "anchors") {
            c.anchors.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) c.anchors.push_back(parse_double(item));
        } else if (key == "direction") c.direction = parse_bool(value);
        else if (key == "distance") c.distance = parse_bool(value);
        else if (key == "naive") c.naive = parse_bool(value);
        else if (key == "predictive") c.predictive = parse_bool(value);
        else if (key == "dead_end") c.dead_end = parse_bool(value);
        else if (key == "obstacles") c.obstacles = parse_bool(value);
        else if (key == "obstacle_range") c.obstacle_range = parse_double(value);
        else throw std::invalid_argument("unknown registry key '" + key + "'");
    }
    return c;
}

PredicateRegistry::PredicateRegistry(RegistryConfig cfg) : cfg_(std::move(cfg)) {
    auto add = [&](PredicateFamily f, int a, int b, double anchor, std::string name) {
        defs_.push_back({f, a, b, anchor, std::move(name)});
    };
    if (cfg_.vision == VisionFrame::Relative) {
        if (cfg_.window < 0) throw std::invalid_argument("vision window must be non-negative");
        for (int f = -cfg_.window; f <= cfg_.window; ++f)
            for (int l = -cfg_.window; l <= cfg_.window; ++l)
                add(PredicateFamily::Vision, f, l, 0,
                    "v[" + std::to_string(f) + "," + std::to_string(l) + "]");
    } else if (cfg_.vision == VisionFrame::Absolute) {
        if (cfg_.absolute_width <= 0 || cfg_.absolute_height <= 0)
            throw std::invalid_argument("absolute vision needs absolute_width/absolute_height");
        for (int y = 0; y < cfg_.absolute_height; ++y)
            for (int x = 0; x < cfg_.absolute_width; ++x)
                add(PredicateFamily::Vision, x, y, 0,
                    "v@" + std::to_string(x) + "," + std::to_string(y));
    }
    if (cfg_.position) {
        for (double a : cfg_.anchors) add(PredicateFamily::PositionX, 0, 0, a, "px@" + fmt_double(a));
        for (double a : cfg_.anchors) add(PredicateFamily::PositionY, 0, 0, a, "py@" + fmt_double(a));
    }
    if (cfg_.goal) {
        for (double a : cfg_.anchors) add(PredicateFamily::GoalX, 0, 0, a, "gx@" + fmt_double(a));
        for (double a : cfg_.anchors) add(PredicateFamily::GoalY, 0, 0, a, "gy@" + fmt_double(a));
    }
    if (cfg_.direction)
        for (Direction d : kDirections)
            add(PredicateFamily::Heading, static_cast<int>(d), 0, 0,
                "heading:" + std::string(direction_name(d)));
    if (cfg_.distance) add(PredicateFamily::Distance, 0, 0, 0, "goal_distance");
    if (cfg_.naive)
        for (Action a : kActions)
            add(PredicateFamily::Naive, static_cast<int>(a), 0, 0, "naive:" + std::string(action_name(a)));
    if (cfg_.predictive) add(PredicateFamily::PredictForward, 0, 0, 0, "predict_forward");
    if (cfg_.dead_end) add(PredicateFamily::DeadEnd, 0, 0, 0, "dead_end");
    if (cfg_.obstacles) {
        add(PredicateFamily::ObstacleLeft, 0, 0, 0, "obstacle_left");
        add(PredicateFamily::ObstacleRight, 0, 0, 0, "obstacle_right");
        add(PredicateFamily::ObstacleAhead, 0, 0, 0, "obstacle_ahead");
    }
    if (defs_.empty()) throw std::invalid_argument("predicate registry configuration is empty");
    needs_optimistic_ = cfg_.naive || cfg_.predictive;
    needs_pessimistic_ = cfg_.predictive;
}

std::vector<std::string> PredicateRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(defs_.size());
    for (const auto& d : defs_) out.push_back(d.name);
    return out;
}

std::size_t PredicateRegistry::find(PredicateFamily family, int a) const {
    for (std::size_t i = 0; i < defs_.size(); ++i)
        if (defs_[i].family == family && (family != PredicateFamily::Naive || defs_[i].a == a))
            return i;
    return defs_.size();
}

void PredicateRegistry::evaluate(const PredicateContext& ctx, std::span<double> out) const {
    assert(out.size() == defs_.size());
    const FullObservation& obs = ctx.obs;
    const ObservationMap& map = *obs.map;
    const Cell p = obs.robot.position;
    const Direction d = obs.robot.direction;
    const Direction right = turn_right(d);
    const double W = map.width(), H = map.height();

    std::optional<DistanceField> own_optimistic, own_pessimistic;
    const DistanceField* optimistic = ctx.optimistic;
    const DistanceField* pessimistic = ctx.pessimistic;
    if (needs_optimistic_ && !optimistic) {
        own_optimistic.emplace(GridView(map, UnknownMode::AsFree), obs.goal);
        optimistic = &*own_optimistic;
    }
    if (needs_pessimistic_ && !pessimistic) {
        own_pessimistic.emplace(GridView(map, UnknownMode::AsOccupied), obs.goal);
        pessimistic = &*own_pessimistic;
    }
    std::optional<Action> naive;

    for (std::size_t i = 0; i < defs_.size(); ++i) {
        const PredicateDef& def = defs_[i];
        double v = 0.0;
        switch (def.family) {
            case PredicateFamily::Vision:
                if (cfg_.vision == VisionFrame::Relative) {
                    const Cell c{p.x + def.a * dx(d) + def.b * dx(right),
                                 p.y + def.a * dy(d) + def.b * dy(right)};
                    v = map.at_or_unknown(c);
                } else {
                    v = map.at_or_unknown({def.a, def.b});
                }
                break;
            case PredicateFamily::PositionX: v = (p.x - def.anchor * W) / W; break;
            case PredicateFamily::PositionY: v = (p.y - def.anchor * H) / H; break;
            case PredicateFamily::GoalX: v = (obs.goal.x - def.anchor * W) / W; break;
            case PredicateFamily::GoalY: v = (obs.goal.y - def.anchor * H) / H; break;
            case PredicateFamily::Heading: {
                const auto other = static_cast<Direction>(def.a);
                v = dx(d) * dx(other) + dy(d) * dy(other);
                break;
            }
            case PredicateFamily::Distance: {
                const double ex = p.x - obs.goal.x, ey = p.y - obs.goal.y;
                v = 1.0 - 2.0 * std::sqrt(ex * ex + ey * ey) / std::sqrt(H * H + W * W);
                break;
            }
            case PredicateFamily::Naive:
                if (!naive) naive = naive_action(*optimistic, obs.robot);
                v = static_cast<int>(*naive) == def.a ? 1.0 : -1.0;
                break;
            case PredicateFamily::PredictForward:
                v = predictive_forward(obs, *optimistic, *pessimistic);
                break;
            case PredicateFamily::DeadEnd: v = dead_end_predicate(obs); break;
            case PredicateFamily::ObstacleLeft:
                v = obstacle_ray_predicate(obs, turn_left(d), cfg_.obstacle_range);
                break;
            case PredicateFamily::ObstacleRight:
                v = obstacle_ray_predicate(obs, right, cfg_.obstacle_range);
                break;
            case PredicateFamily::ObstacleAhead:
                v = obstacle_ray_predicate(obs, d, cfg_.obstacle_range);
                break;
        }
        out[i] = v;
    }
}

PredicateRegistry build_registry(const RegistryConfig& cfg) { return PredicateRegistry(cfg); }

PredicateVector eval_registry(const PredicateRegistry& reg, const PredicateContext& ctx) {
    PredicateVector out(reg.size());
    reg.evaluate(ctx, out);
    return out;
}

PredicateVector eval_registry(const PredicateRegistry& reg, const FullObservation& obs) {
    return eval_registry(reg, PredicateContext{obs});
}

double convolve(std::span<const double> alpha, std::span<const double> values) {
    assert(alpha.size() == values.size());
    double norm = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        norm += std::abs(alpha[i]);
        sum += alpha[i] * values[i];
    }
    assert(norm > 0.0);
    return sum / norm;
}

// Flood fill over known-free cells with the cell behind the robot removed.
//  1: the pocket holds neither the goal nor a frontier cell (only way on is back)
// -1: goal or frontier reachable without going back
//  0: cell behind is not known free, so "back" is undefined
double dead_end_predicate(const FullObservation& obs) {
    const ObservationMap& map = *obs.map;
    const Cell p = obs.robot.position;
    const Cell behind = ahead(p, obs.robot.direction, -1);
    if (!map.in_bounds(behind) || map.at(behind) != kFree) return 0.0;

    const int W = map.width();
    std::vector<char> seen(map.values().size(), 0);
    seen[map.index(behind)] = 1;
    std::vector<Cell> stack{p};
    seen[map.index(p)] = 1;
    while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        if (c == obs.goal) return -1.0;
        for (Direction d : kDirections) {
            const Cell n = ahead(c, d, 1);
            if (!map.in_bounds(n)) continue;
            const auto v = map.at(n);
            if (v == kUnknown) return -1.0;  // c is a frontier cell
            const std::size_t i = static_cast<std::size_t>(n.y) * W + n.x;
            if (v != kFree || seen[i]) continue;
            seen[i] = 1;
            stack.push_back(n);
        }
    }
    return 1.0;
}

// Cells beyond the grid edge count as occupied.
double obstacle_ray_predicate(const FullObservation& obs, Direction ray, double range) {
    const ObservationMap& map = *obs.map;
    const int reach = static_cast<int>(std::floor(range));
    bool partial = false;
    for (int k = 1; k <= reach; ++k) {
        const Cell c = ahead(obs.robot.position, ray, k);
        if (!map.in_bounds(c)) return 1.0;
        const auto v = map.at(c);
        if (v == kOccupied) return 1.0;
        if (v == kUnknown) partial = true;
    }
    return partial ? 0.0 : -1.0;
}

// 1 when Forward provably lengthens the true remaining path, -1 when it
// provably shortens it, 0 otherwise. Uses lower (unknown free) and upper
// (unknown occupied) distance bounds; only a known-free cell ahead gives a
// determined successor.
double predictive_forward(const FullObservation& obs, const DistanceField& optimistic,
                          const DistanceField& pessimistic) {
    const RobotState& s = obs.robot;
    const Cell n = ahead(s.position, s.direction, 1);
    const ObservationMap& map = *obs.map;
    if (!map.in_bounds(n) || map.at(n) != kFree) return 0.0;
    const RobotState after{n, s.direction};
    const std::uint32_t lower_before = optimistic.distance(s);
    const std::uint32_t upper_before = pessimistic.distance(s);
    const std::uint32_t lower_after = optimistic.distance(after);
    const std::uint32_t upper_after = pessimistic.distance(after);
    if (upper_before != kUnreachable && lower_after != kUnreachable && lower_after > upper_before)
        return 1.0;
    if (upper_after != kUnreachable && upper_after < lower_before) return -1.0;
    return 0.0;
}

}  // namespace lcsnav
