#pragma once

#include <cstdint>
#include <algorithm>
#include <array>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lcsnav/gridworld.hpp"
#include "lcsnav/predicates.hpp"
#include "lcsnav/rng.hpp"

namespace lcsnav {

// Condition-action pair. The condition is convolve(alpha, b(obs)).
struct Gene {
    std::vector<double> alpha;
    Action action = Action::Forward;
    double weight = 1.0;
    std::int64_t birth_step = 0;
    bool active = false;
    bool permanent = false;  // naive seed genes survive every cull
};

enum class FusionRule : std::uint8_t { Rule1, Rule2 };

std::string_view fusion_rule_name(FusionRule r);
FusionRule parse_fusion_rule(std::string_view s);

struct GeneInit {
    double spread = 1.0;      // std-dev of non-zero coefficients
    double zero_prob = 0.97;  // per-coordinate sparsification
};

struct MutationConfig {
    double rate = 0.02;        // per-coordinate perturbation probability
    double scale = 0.3;
    double action_flip = 0.05;
};

struct PopulationConfig {
    std::size_t capacity = 200;
    std::size_t active_size = 50;
    std::int64_t min_lifetime = 400;  // steps before a gene may enter the active zone
    double cull_threshold = 0.05;
    double fresh_fraction = 0.2;
    double seed_weight = 10.0;
    double seed_floor = 0.1;  // permanent genes are clamped up to this at selection
    double activation_weight = 0.0;  // genes at or below this weight stay out of the active zone
    bool refresh_each_step = true;   // re-rank the active zone after every learning step
    bool credit_incubating = true;   // incubating genes share rule-2 rewards
    GeneInit init;
    MutationConfig mutation;
};

class GeneSet {
public:
    GeneSet() = default;
    GeneSet(std::size_t predicate_count, PopulationConfig cfg)
        : n_(predicate_count), cfg_(std::move(cfg)) {}

    std::vector<Gene>& genes() { return genes_; }
    const std::vector<Gene>& genes() const { return genes_; }
    std::size_t predicate_count() const { return n_; }
    const PopulationConfig& config() const { return cfg_; }
    PopulationConfig& config() { return cfg_; }
    std::int64_t clock() const { return clock_; }
    void tick() { ++clock_; }
    void set_clock(std::int64_t c) { clock_ = c; }

    std::size_t active_count() const;
    // Participates in fusion right now. Seed genes fall silent below the cull
    // level too, until selection restores their floor.
    bool votes(const Gene& g) const { return g.active && g.weight > cull_level(); }
    // Eligible for credit; culled at the next selection otherwise.
    bool alive(const Gene& g) const { return g.permanent || g.weight > cull_level(); }
    double cull_level() const { return std::max(0.0, cfg_.cull_threshold); }

    void add(Gene g);

private:
    std::size_t n_ = 0;
    PopulationConfig cfg_;
    std::vector<Gene> genes_;
    std::int64_t clock_ = 0;
};

class EmptyActiveZone : public std::runtime_error {
public:
    EmptyActiveZone() : std::runtime_error("gene set has no active gene") {}
};

double eval_condition(const Gene& gene, std::span<const double> values);

struct Rule1Choice {
    Action action;
    std::size_t winner;
};

// Gene index with its condition value at decision time.
using Contributions = std::vector<std::pair<std::size_t, double>>;

struct Rule2Choice {
    Action action = Action::Forward;
    bool fallback = false;        // no positive vote, rule 1 decided
    std::size_t winner = 0;       // rule-1 winner when fallback
    std::array<double, 3> score{};  // NaN for actions without votes
    Contributions votes;          // active genes voting for the chosen action
};

// `conditions` holds eval_condition for every gene of G, in order.
Rule1Choice fuse_rule1(const GeneSet& G, std::span<const double> conditions);
Rule2Choice fuse_rule2(const GeneSet& G, std::span<const double> conditions);
Rule1Choice fuse_rule1(const GeneSet& G, const PredicateVector& values);
Rule2Choice fuse_rule2(const GeneSet& G, const PredicateVector& values);

Gene random_gene(Rng& rng, std::size_t n, const GeneInit& cfg);
Gene mutate(const Gene& gene, Rng& rng, const MutationConfig& cfg);
Gene crossover(const Gene& g1, const Gene& g2, Rng& rng);

// Cull, refill to capacity with offspring, then recompute the active zone.
void select(GeneSet& G, std::int64_t current_step, Rng& rng);
// Active zone only (no cull, no offspring).
void refresh_active(GeneSet& G, std::int64_t current_step);

// Three permanent one-hot genes on the naive-action predicates.
std::vector<Gene> naive_seed_genes(const PredicateRegistry& reg, double weight);
// Seeds plus random genes up to capacity, all newborn at step 0.
GeneSet initial_population(const PredicateRegistry& reg, const PopulationConfig& cfg, Rng& rng);

struct Policy {
    RegistryConfig registry;
    std::vector<std::string> predicate_names;
    FusionRule fusion = FusionRule::Rule2;
    GeneSet genes;
};

class PolicyFormatError : public std::runtime_error {
public:
    PolicyFormatError(int line, const std::string& what)
        : std::runtime_error("policy line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

std::string save_policy(const Policy& p);
Policy load_policy(std::istream& in);
Policy load_policy_string(const std::string& text);
Policy load_policy_file(const std::string& path);

}  // namespace lcsnav
