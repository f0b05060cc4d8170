#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lcsnav/gridworld.hpp"
#include "lcsnav/pathfind.hpp"

namespace lcsnav {

enum class VisionFrame : std::uint8_t { None, Relative, Absolute };

// Which predicate families a registry holds. Anchors are fractions of the
// grid extent, so one configuration serves maps of any size.
struct RegistryConfig {
    VisionFrame vision = VisionFrame::Relative;
    int window = 5;                       // relative window half-size
    int absolute_width = 0;               // absolute frame only
    int absolute_height = 0;
    bool position = true;
    bool goal = true;
    std::vector<double> anchors = {0.0, 1.0};
    bool direction = true;
    bool distance = true;
    bool naive = true;
    bool predictive = true;
    bool dead_end = true;
    bool obstacles = true;
    double obstacle_range = 5.0;

    // Flat key/value form stored in policy files; from_map inverts it.
    std::map<std::string, std::string> to_map() const;
    static RegistryConfig from_map(const std::map<std::string, std::string>& kv);
    friend bool operator==(const RegistryConfig&, const RegistryConfig&) = default;
};

enum class PredicateFamily : std::uint8_t {
    Vision, PositionX, PositionY, GoalX, GoalY, Heading, Distance, Naive, PredictForward,
    DeadEnd, ObstacleLeft, ObstacleRight, ObstacleAhead
};

struct PredicateDef {
    PredicateFamily family;
    int a = 0;         // vision: forward offset or x; heading index; naive action
    int b = 0;         // vision: lateral offset or y
    double anchor = 0; // anchor fraction for position/goal predicates
    std::string name;
};

// Per-observation inputs shared by all predicates. Distance fields are
// optional; eval computes whatever is missing.
struct PredicateContext {
    FullObservation obs;
    const DistanceField* optimistic = nullptr;   // unknown as free
    const DistanceField* pessimistic = nullptr;  // unknown as occupied
};

class PredicateRegistry {
public:
    explicit PredicateRegistry(RegistryConfig cfg);

    std::size_t size() const { return defs_.size(); }
    const std::vector<PredicateDef>& definitions() const { return defs_; }
    const RegistryConfig& config() const { return cfg_; }
    std::vector<std::string> names() const;
    bool needs_optimistic() const { return needs_optimistic_; }
    bool needs_pessimistic() const { return needs_pessimistic_; }
    // Index of the first predicate of a family, or size() if absent.
    std::size_t find(PredicateFamily family, int a = 0) const;

    void evaluate(const PredicateContext& ctx, std::span<double> out) const;

private:
    RegistryConfig cfg_;
    std::vector<PredicateDef> defs_;
    bool needs_optimistic_ = false;
    bool needs_pessimistic_ = false;
};

using PredicateVector = std::vector<double>;

PredicateRegistry build_registry(const RegistryConfig& cfg);
PredicateVector eval_registry(const PredicateRegistry& reg, const FullObservation& obs);
PredicateVector eval_registry(const PredicateRegistry& reg, const PredicateContext& ctx);

// Normalised linear combination sum(alpha_i * b_i) / |alpha|_1, in [-1, 1].
double convolve(std::span<const double> alpha, std::span<const double> values);

// Individual heuristic predicates, exposed for tests.
double dead_end_predicate(const FullObservation& obs);
double obstacle_ray_predicate(const FullObservation& obs, Direction ray, double range);
double predictive_forward(const FullObservation& obs, const DistanceField& optimistic,
                          const DistanceField& pessimistic);

}  // namespace lcsnav
