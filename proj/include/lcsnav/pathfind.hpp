#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "lcsnav/gridworld.hpp"

namespace lcsnav {

enum class UnknownMode : std::uint8_t { AsFree, AsOccupied };

// Read-only three-valued grid with a rule for unknown cells. The goal cell is
// always traversable: the robot knows its target is a free cell.
class GridView {
public:
    GridView(const ObservationMap& map, UnknownMode mode) : map_(&map), mode_(mode) {}

    int width() const { return map_->width(); }
    int height() const { return map_->height(); }
    UnknownMode mode() const { return mode_; }
    bool traversable(Cell c, Cell goal) const {
        if (!map_->in_bounds(c)) return false;
        if (c == goal) return true;
        const auto v = map_->at(c);
        return v == kFree || (v == kUnknown && mode_ == UnknownMode::AsFree);
    }
    const ObservationMap& map() const { return *map_; }

private:
    const ObservationMap* map_;
    UnknownMode mode_;
};

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

struct PathResult {
    std::uint32_t length = kUnreachable;
    std::optional<Action> first_action;

    bool reachable() const { return length != kUnreachable; }
};

// Command-count distance to the goal for every (cell, heading) state of a
// view, computed by one reverse breadth-first sweep from the goal.
class DistanceField {
public:
    DistanceField(const GridView& view, Cell goal);

    std::uint32_t distance(const RobotState& s) const { return dist_[state_index(s)]; }
    // Successor under the view's own traversability (blocked Forward stays put).
    RobotState successor(const RobotState& s, Action a) const;
    PathResult query(const RobotState& s) const;
    Cell goal() const { return goal_; }
    int width() const { return width_; }
    int height() const { return height_; }

private:
    std::size_t state_index(const RobotState& s) const {
        return (static_cast<std::size_t>(s.position.y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(s.position.x)) * 4 +
               static_cast<std::size_t>(s.direction);
    }

    int width_;
    int height_;
    Cell goal_;
    std::vector<char> passable_;
    std::vector<std::uint32_t> dist_;
};

PathResult shortest_path(const GridView& view, const RobotState& from, Cell goal);

// Distances on the fully known domain.
DistanceField true_distances(const GridDomain& domain);

class UnsolvableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Replanning follower that treats unknown cells as free.
Action naive_policy(const FullObservation& obs);
Action naive_action(const DistanceField& optimistic, const RobotState& robot);

struct DistanceBounds {
    std::uint32_t lower = kUnreachable;
    std::uint32_t upper = kUnreachable;
};

DistanceBounds distance_bounds(const FullObservation& obs, const RobotState& state);

}  // namespace lcsnav
