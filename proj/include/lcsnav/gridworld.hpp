#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lcsnav {

// Grid coordinates: x grows to the right, y grows downward (row index in the
// map file). All modules use this convention.
struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

// The four headings in clockwise order as seen on screen (y down).
enum class Direction : std::uint8_t { East = 0, South = 1, West = 2, North = 3 };

inline constexpr std::array<Direction, 4> kDirections = {Direction::East, Direction::South,
                                                         Direction::West, Direction::North};

constexpr int dx(Direction d) {
    constexpr int t[4] = {1, 0, -1, 0};
    return t[static_cast<int>(d)];
}
constexpr int dy(Direction d) {
    constexpr int t[4] = {0, 1, 0, -1};
    return t[static_cast<int>(d)];
}
// Left/right from the robot's point of view on screen: facing East, the
// robot's left is North.
constexpr Direction turn_left(Direction d) {
    return static_cast<Direction>((static_cast<int>(d) + 3) & 3);
}
constexpr Direction turn_right(Direction d) {
    return static_cast<Direction>((static_cast<int>(d) + 1) & 3);
}
constexpr Direction reverse(Direction d) {
    return static_cast<Direction>((static_cast<int>(d) + 2) & 3);
}
std::optional<Direction> direction_from_step(int stepx, int stepy);
std::string_view direction_name(Direction d);

// Declaration order is the tie-break order used everywhere.
enum class Action : std::uint8_t { Forward = 0, TurnLeft = 1, TurnRight = 2 };

inline constexpr std::array<Action, 3> kActions = {Action::Forward, Action::TurnLeft,
                                                   Action::TurnRight};

std::string_view action_name(Action a);
std::optional<Action> parse_action(std::string_view name);

struct RobotState {
    Cell position;
    Direction direction = Direction::South;
    friend bool operator==(const RobotState&, const RobotState&) = default;
};

// Occupancy values shared by domains and observation maps.
inline constexpr std::int8_t kFree = -1;
inline constexpr std::int8_t kUnknown = 0;
inline constexpr std::int8_t kOccupied = 1;

class GridDomain {
public:
    // Validates dimensions, marker cells and solvability.
    GridDomain(int width, int height, std::vector<std::int8_t> cells, Cell start, Cell goal,
               Direction initial = Direction::South);

    int width() const { return width_; }
    int height() const { return height_; }
    Cell start_cell() const { return start_; }
    RobotState start() const { return {start_, initial_}; }
    Cell goal() const { return goal_; }

    bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
    std::int8_t at(Cell c) const { return cells_[index(c)]; }
    bool free(Cell c) const { return in_bounds(c) && at(c) == kFree; }
    const std::vector<std::int8_t>& cells() const { return cells_; }
    std::size_t index(Cell c) const {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c.x);
    }

private:
    int width_;
    int height_;
    std::vector<std::int8_t> cells_;
    Cell start_;
    Cell goal_;
    Direction initial_;
};

// Three-valued accumulated knowledge of a domain.
class ObservationMap {
public:
    ObservationMap() = default;
    ObservationMap(int width, int height)
        : width_(width),
          height_(height),
          values_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), kUnknown) {}
    // Fully revealed view of a domain.
    static ObservationMap revealed(const GridDomain& domain);

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
    std::int8_t at(Cell c) const { return values_[index(c)]; }
    // 0 outside the grid.
    std::int8_t at_or_unknown(Cell c) const { return in_bounds(c) ? at(c) : kUnknown; }
    void set(Cell c, std::int8_t v) { values_[index(c)] = v; }
    const std::vector<std::int8_t>& values() const { return values_; }
    std::size_t known_count() const;
    std::size_t index(Cell c) const {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c.x);
    }

    friend bool operator==(const ObservationMap&, const ObservationMap&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::int8_t> values_;
};

struct FullObservation {
    RobotState robot;
    const ObservationMap* map = nullptr;
    Cell goal;
};

struct VisionConfig {
    double radius = 5.0;
};

struct DomainEnsemble {
    std::vector<GridDomain> domains;
    std::vector<double> weights;

    // Equal weights over the given domains.
    static DomainEnsemble uniform(std::vector<GridDomain> domains);
    void validate() const;
};

class MapError : public std::runtime_error {
public:
    enum class Kind { Header, BadCharacter, RowLength, RowCount, MissingStart, MissingGoal,
                      DuplicateStart, DuplicateGoal, Unsolvable };
    MapError(Kind kind, int line, int column, const std::string& what);
    Kind kind() const { return kind_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    Kind kind_;
    int line_;
    int column_;
};

GridDomain load_map(std::istream& in);
GridDomain load_map_string(std::string_view text);
GridDomain load_map_file(const std::string& path);
std::string save_map(const GridDomain& domain);

struct OfficeParams {
    int corridor_width = 3;
    int block_min = 18;          // corridor spacing lower bound
    int block_max = 30;          // corridor spacing upper bound
    int room_min = 5;            // smallest room side before recursion stops
    int door_width = 2;
    double corridor_door_prob = 0.35;  // chance of an extra door from a room onto a corridor
    double clutter = 0.01;       // isolated obstacles in rooms
    int max_retries = 64;
};

GridDomain generate_office_map(std::uint64_t seed, int width, int height,
                               const OfficeParams& params = {});

// True cell values inside the vision disc, 0 elsewhere.
ObservationMap visible_patch(const GridDomain& domain, Cell position, const VisionConfig& cfg);
ObservationMap accumulate(const ObservationMap& map, const ObservationMap& patch);
// In-place accumulate of the vision disc; returns the number of newly known cells.
std::size_t observe(ObservationMap& map, const GridDomain& domain, Cell position,
                    const VisionConfig& cfg);

RobotState step(const GridDomain& domain, const RobotState& state, Action action);

}  // namespace lcsnav
