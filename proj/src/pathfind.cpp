#include "lcsnav/pathfind.hpp"

namespace lcsnav {

DistanceField::DistanceField(const GridView& view, Cell goal)
    : width_(view.width()), height_(view.height()), goal_(goal) {
    const std::size_t cells = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    passable_.resize(cells);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            passable_[static_cast<std::size_t>(y) * width_ + x] = view.traversable({x, y}, goal);
    dist_.assign(cells * 4, kUnreachable);
    if (!view.map().in_bounds(goal)) return;

    // Flat ring buffer; every state enters at most once.
    std::vector<std::uint32_t> queue(cells * 4);
    std::size_t head = 0, tail = 0;
    const std::size_t g = static_cast<std::size_t>(goal.y) * width_ + goal.x;
    for (std::uint32_t d = 0; d < 4; ++d) {
        dist_[g * 4 + d] = 0;
        queue[tail++] = static_cast<std::uint32_t>(g * 4 + d);
    }
    while (head < tail) {
        const std::uint32_t s = queue[head++];
        const std::uint32_t next = dist_[s] + 1;
        const std::uint32_t cell = s >> 2;
        const auto dir = static_cast<Direction>(s & 3);
        const std::uint32_t base = cell << 2;
        // Predecessors by a turn: the same cell with a neighbouring heading.
        const std::uint32_t via_left = base | static_cast<std::uint32_t>(turn_right(dir));
        const std::uint32_t via_right = base | static_cast<std::uint32_t>(turn_left(dir));
        if (dist_[via_left] == kUnreachable) {
            dist_[via_left] = next;
            queue[tail++] = via_left;
        }
        if (dist_[via_right] == kUnreachable) {
            dist_[via_right] = next;
            queue[tail++] = via_right;
        }
        // Predecessor by Forward: the cell behind, same heading.
        const int x = static_cast<int>(cell % static_cast<std::uint32_t>(width_)) - dx(dir);
        const int y = static_cast<int>(cell / static_cast<std::uint32_t>(width_)) - dy(dir);
        if (x < 0 || y < 0 || x >= width_ || y >= height_) continue;
        const std::uint32_t prev_cell = static_cast<std::uint32_t>(y * width_ + x);
        if (!passable_[prev_cell]) continue;
        const std::uint32_t prev = (prev_cell << 2) | (s & 3);
        if (dist_[prev] == kUnreachable) {
            dist_[prev] = next;
            queue[tail++] = prev;
        }
    }
}

RobotState DistanceField::successor(const RobotState& s, Action a) const {
    switch (a) {
        case Action::TurnLeft: return {s.position, turn_left(s.direction)};
        case Action::TurnRight: return {s.position, turn_right(s.direction)};
        case Action::Forward: break;
    }
    const Cell n{s.position.x + dx(s.direction), s.position.y + dy(s.direction)};
    if (n.x < 0 || n.y < 0 || n.x >= width_ || n.y >= height_) return s;
    if (!passable_[static_cast<std::size_t>(n.y) * width_ + n.x]) return s;
    return {n, s.direction};
}

PathResult DistanceField::query(const RobotState& s) const {
    PathResult r;
    r.length = distance(s);
    if (r.length == kUnreachable || r.length == 0) return r;
    for (Action a : kActions) {
        if (distance(successor(s, a)) == r.length - 1) {
            r.first_action = a;
            break;
        }
    }
    return r;
}

PathResult shortest_path(const GridView& view, const RobotState& from, Cell goal) {
    return DistanceField(view, goal).query(from);
}

DistanceField true_distances(const GridDomain& domain) {
    const ObservationMap full = ObservationMap::revealed(domain);
    return DistanceField(GridView(full, UnknownMode::AsFree), domain.goal());
}

Action naive_action(const DistanceField& optimistic, const RobotState& robot) {
    const PathResult r = optimistic.query(robot);
    if (!r.reachable()) throw UnsolvableError("goal unreachable even with unknown cells as free");
    return r.first_action.value_or(Action::Forward);
}

Action naive_policy(const FullObservation& obs) {
    return naive_action(DistanceField(GridView(*obs.map, UnknownMode::AsFree), obs.goal), obs.robot);
}

DistanceBounds distance_bounds(const FullObservation& obs, const RobotState& state) {
    DistanceBounds b;
    b.lower = DistanceField(GridView(*obs.map, UnknownMode::AsFree), obs.goal).distance(state);
    if (obs.map->in_bounds(state.position) && obs.map->at(state.position) == kUnknown) {
        // The robot stands on its own cell, so that cell is free whatever the map says.
        ObservationMap m = *obs.map;
        m.set(state.position, kFree);
        b.upper = DistanceField(GridView(m, UnknownMode::AsOccupied), obs.goal).distance(state);
    } else {
        b.upper = DistanceField(GridView(*obs.map, UnknownMode::AsOccupied), obs.goal).distance(state);
    }
    return b;
}

}  // namespace lcsnav
