#include "lcsnav/gridworld.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <sstream>

namespace lcsnav {

namespace {

bool cells_connected(int width, int height, const std::vector<std::int8_t>& cells, Cell from,
                     Cell to) {
    std::vector<char> seen(cells.size(), 0);
    std::deque<Cell> queue{from};
    seen[static_cast<std::size_t>(from.y) * width + from.x] = 1;
    while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        if (c == to) return true;
        for (Direction d : kDirections) {
            const Cell n{c.x + dx(d), c.y + dy(d)};
            if (n.x < 0 || n.y < 0 || n.x >= width || n.y >= height) continue;
            const std::size_t i = static_cast<std::size_t>(n.y) * width + n.x;
            if (seen[i] || cells[i] != kFree) continue;
            seen[i] = 1;
            queue.push_back(n);
        }
    }
    return false;
}

}  // namespace

std::optional<Direction> direction_from_step(int stepx, int stepy) {
    for (Direction d : kDirections)
        if (dx(d) == stepx && dy(d) == stepy) return d;
    return std::nullopt;
}

std::string_view direction_name(Direction d) {
    constexpr std::string_view names[4] = {"E", "S", "W", "N"};
    return names[static_cast<int>(d)];
}

std::string_view action_name(Action a) {
    constexpr std::string_view names[3] = {"Forward", "TurnLeft", "TurnRight"};
    return names[static_cast<int>(a)];
}

std::optional<Action> parse_action(std::string_view name) {
    for (Action a : kActions)
        if (action_name(a) == name) return a;
    return std::nullopt;
}

GridDomain::GridDomain(int width, int height, std::vector<std::int8_t> cells, Cell start,
                       Cell goal, Direction initial)
    : width_(width),
      height_(height),
      cells_(std::move(cells)),
      start_(start),
      goal_(goal),
      initial_(initial) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("grid dimensions must be positive");
    if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw std::invalid_argument("cell array does not match dimensions");
    for (auto v : cells_)
        if (v != kFree && v != kOccupied) throw std::invalid_argument("cells must be -1 or 1");
    if (!in_bounds(start) || !in_bounds(goal)) throw std::invalid_argument("start/goal out of bounds");
    if (at(start) != kFree || at(goal) != kFree)
        throw std::invalid_argument("start and goal must be free cells");
    if (start == goal) throw std::invalid_argument("start and goal must differ");
    if (!cells_connected(width, height, cells_, start, goal))
        throw MapError(MapError::Kind::Unsolvable, 0, 0, "no path from start to goal");
}

ObservationMap ObservationMap::revealed(const GridDomain& domain) {
    ObservationMap m(domain.width(), domain.height());
    m.values_ = domain.cells();
    return m;
}

std::size_t ObservationMap::known_count() const {
    std::size_t n = 0;
    for (auto v : values_) n += v != kUnknown;
    return n;
}

DomainEnsemble DomainEnsemble::uniform(std::vector<GridDomain> domains) {
    DomainEnsemble e;
    const double w = domains.empty() ? 0.0 : 1.0 / static_cast<double>(domains.size());
    e.weights.assign(domains.size(), w);
    e.domains = std::move(domains);
    return e;
}

void DomainEnsemble::validate() const {
    if (domains.empty()) throw std::invalid_argument("domain ensemble is empty");
    if (weights.size() != domains.size())
        throw std::invalid_argument("ensemble weights do not match domains");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("ensemble weights must be positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("ensemble weights must sum to 1");
}

MapError::MapError(Kind kind, int line, int column, const std::string& what)
    : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ")"),
      kind_(kind),
      line_(line),
      column_(column) {}

GridDomain load_map(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw MapError(MapError::Kind::Header, 1, 1, "missing header");
    std::istringstream hs(header);
    int w = 0, h = 0;
    std::string rest;
    if (!(hs >> w >> h) || (hs >> rest) || w <= 0 || h <= 0)
        throw MapError(MapError::Kind::Header, 1, 1, "header must be 'W H' with positive integers");

    std::vector<std::int8_t> cells(static_cast<std::size_t>(w) * h, kFree);
    std::optional<Cell> start, goal;
    std::string line;
    for (int y = 0; y < h; ++y) {
        const int lineno = y + 2;
        if (!std::getline(in, line))
            throw MapError(MapError::Kind::RowCount, lineno, 1, "expected " + std::to_string(h) + " rows");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (static_cast<int>(line.size()) != w)
            throw MapError(MapError::Kind::RowLength, lineno, static_cast<int>(line.size()) + 1,
                           "row must have " + std::to_string(w) + " characters");
        for (int x = 0; x < w; ++x) {
            const char ch = line[static_cast<std::size_t>(x)];
            auto& cell = cells[static_cast<std::size_t>(y) * w + x];
            switch (ch) {
                case '.': break;
                case '#': cell = kOccupied; break;
                case 'S':
                    if (start) throw MapError(MapError::Kind::DuplicateStart, lineno, x + 1, "duplicate 'S'");
                    start = Cell{x, y};
                    break;
                case 'G':
                    if (goal) throw MapError(MapError::Kind::DuplicateGoal, lineno, x + 1, "duplicate 'G'");
                    goal = Cell{x, y};
                    break;
                default:
                    throw MapError(MapError::Kind::BadCharacter, lineno, x + 1,
                                   std::string("unexpected character '") + ch + "'");
            }
        }
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line != "\r")
            throw MapError(MapError::Kind::RowCount, h + 2, 1, "trailing content after grid");
    }
    if (!start) throw MapError(MapError::Kind::MissingStart, 0, 0, "missing 'S'");
    if (!goal) throw MapError(MapError::Kind::MissingGoal, 0, 0, "missing 'G'");
    if (!cells_connected(w, h, cells, *start, *goal))
        throw MapError(MapError::Kind::Unsolvable, start->y + 2, start->x + 1,
                       "goal is unreachable from start");
    return GridDomain(w, h, std::move(cells), *start, *goal);
}

GridDomain load_map_string(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_map(in);
}

GridDomain load_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open map file " + path);
    return load_map(in);
}

std::string save_map(const GridDomain& domain) {
    std::string out = std::to_string(domain.width()) + " " + std::to_string(domain.height()) + "\n";
    out.reserve(out.size() + static_cast<std::size_t>(domain.width() + 1) * domain.height());
    for (int y = 0; y < domain.height(); ++y) {
        for (int x = 0; x < domain.width(); ++x) {
            const Cell c{x, y};
            if (c == domain.start_cell()) out += 'S';
            else if (c == domain.goal()) out += 'G';
            else out += domain.at(c) == kOccupied ? '#' : '.';
        }
        out += '\n';
    }
    return out;
}

ObservationMap visible_patch(const GridDomain& domain, Cell position, const VisionConfig& cfg) {
    ObservationMap patch(domain.width(), domain.height());
    observe(patch, domain, position, cfg);
    return patch;
}

std::size_t observe(ObservationMap& map, const GridDomain& domain, Cell position,
                    const VisionConfig& cfg) {
    const double r2 = cfg.radius * cfg.radius;
    const int reach = static_cast<int>(std::floor(cfg.radius));
    std::size_t fresh = 0;
    for (int oy = -reach; oy <= reach; ++oy) {
        for (int ox = -reach; ox <= reach; ++ox) {
            if (static_cast<double>(ox * ox + oy * oy) > r2) continue;
            const Cell c{position.x + ox, position.y + oy};
            if (!domain.in_bounds(c)) continue;
            const auto truth = domain.at(c);
            const auto known = map.at(c);
            if (known == kUnknown) {
                map.set(c, truth);
                ++fresh;
            } else if (known != truth) {
                throw std::logic_error("observation contradicts accumulated map");
            }
        }
    }
    return fresh;
}

ObservationMap accumulate(const ObservationMap& map, const ObservationMap& patch) {
    if (map.width() != patch.width() || map.height() != patch.height())
        throw std::invalid_argument("accumulate: dimension mismatch");
    ObservationMap out = map;
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            const Cell c{x, y};
            const auto p = patch.at(c);
            if (p == kUnknown) continue;
            const auto m = map.at(c);
            if (m != kUnknown && m != p)
                throw std::logic_error("accumulate: patch contradicts map at (" + std::to_string(x) +
                                       "," + std::to_string(y) + ")");
            out.set(c, p);
        }
    }
    return out;
}

RobotState step(const GridDomain& domain, const RobotState& state, Action action) {
    switch (action) {
        case Action::TurnLeft: return {state.position, turn_left(state.direction)};
        case Action::TurnRight: return {state.position, turn_right(state.direction)};
        case Action::Forward: {
            const Cell next{state.position.x + dx(state.direction),
                            state.position.y + dy(state.direction)};
            if (domain.free(next)) return {next, state.direction};
            return state;
        }
    }
    return state;
}

}  // namespace lcsnav
