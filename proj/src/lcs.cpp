#include "lcsnav/lcs.hpp"

#include <cmath>
#include <numeric>

#include "lcsnav/kernels.hpp"

namespace lcsnav {

namespace {

double l1(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += std::abs(v);
    return s;
}

Action random_action(Rng& rng) { return kActions[rng.below(kActions.size())]; }

}  // namespace

std::string_view fusion_rule_name(FusionRule r) { return r == FusionRule::Rule1 ? "rule1" : "rule2"; }

FusionRule parse_fusion_rule(std::string_view s) {
    if (s == "rule1" || s == "1") return FusionRule::Rule1;
    if (s == "rule2" || s == "2") return FusionRule::Rule2;
    throw std::invalid_argument("fusion rule must be rule1 or rule2");
}

std::size_t GeneSet::active_count() const {
    std::size_t n = 0;
    for (const auto& g : genes_) n += g.active;
    return n;
}

void GeneSet::add(Gene g) {
    if (g.alpha.size() != n_) throw std::invalid_argument("gene length does not match registry");
    if (!(l1(g.alpha) > 0.0)) throw std::invalid_argument("gene coefficients must not all be zero");
    genes_.push_back(std::move(g));
}

double eval_condition(const Gene& gene, std::span<const double> values) {
    return convolve(gene.alpha, values);
}

Rule1Choice fuse_rule1(const GeneSet& G, std::span<const double> conditions) {
    const auto& genes = G.genes();
    bool found = false;
    Rule1Choice best{Action::Forward, 0};
    double best_score = 0.0;
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (!G.votes(genes[i])) continue;
        const double score = genes[i].weight * conditions[i];
        if (!found || score > best_score ||
            (score == best_score && genes[i].action < best.action)) {
            found = true;
            best_score = score;
            best = {genes[i].action, i};
        }
    }
    if (!found) throw EmptyActiveZone();
    return best;
}

Rule2Choice fuse_rule2(const GeneSet& G, std::span<const double> conditions) {
    const auto& genes = G.genes();
    std::array<double, 3> num{}, den{};
    for (std::size_t i = 0; i < genes.size(); ++i) {
        const Gene& g = genes[i];
        if (!G.votes(g) || !(conditions[i] > 0.0)) continue;
        const auto a = static_cast<std::size_t>(g.action);
        const double w = g.weight;
        num[a] += w * conditions[i];
        den[a] += w;
    }
    Rule2Choice choice;
    bool any = false;
    double best = 0.0;
    for (Action a : kActions) {
        const auto k = static_cast<std::size_t>(a);
        if (!(den[k] > 0.0)) {
            choice.score[k] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        choice.score[k] = num[k] / den[k];
        if (!any || choice.score[k] > best) {
            any = true;
            best = choice.score[k];
            choice.action = a;
        }
    }
    if (!any) {
        const Rule1Choice r1 = fuse_rule1(G, conditions);
        choice.action = r1.action;
        choice.fallback = true;
        choice.winner = r1.winner;
        return choice;
    }
    for (std::size_t i = 0; i < genes.size(); ++i)
        if (G.votes(genes[i]) && genes[i].action == choice.action && conditions[i] > 0.0)
            choice.votes.emplace_back(i, conditions[i]);
    return choice;
}

Rule1Choice fuse_rule1(const GeneSet& G, const PredicateVector& values) {
    std::vector<double> c(G.genes().size());
    kernels::conditions_serial(G.genes(), values, c);
    return fuse_rule1(G, std::span<const double>(c));
}

Rule2Choice fuse_rule2(const GeneSet& G, const PredicateVector& values) {
    std::vector<double> c(G.genes().size());
    kernels::conditions_serial(G.genes(), values, c);
    return fuse_rule2(G, std::span<const double>(c));
}

Gene random_gene(Rng& rng, std::size_t n, const GeneInit& cfg) {
    if (n == 0) throw std::invalid_argument("random_gene: empty registry");
    Gene g;
    g.alpha.assign(n, 0.0);
    do {
        for (auto& a : g.alpha) {
            const double v = rng.normal() * cfg.spread;
            a = rng.bernoulli(cfg.zero_prob) ? 0.0 : v;
        }
    } while (!(l1(g.alpha) > 0.0));
    g.action = random_action(rng);
    g.weight = 1.0;
    return g;
}

Gene mutate(const Gene& gene, Rng& rng, const MutationConfig& cfg) {
    Gene out;
    do {
        out = gene;
        for (auto& a : out.alpha)
            if (rng.bernoulli(cfg.rate)) a += rng.normal() * cfg.scale;
        if (rng.bernoulli(cfg.action_flip)) out.action = random_action(rng);
    } while (!(l1(out.alpha) > 0.0));
    out.weight = 1.0;
    out.active = false;
    out.permanent = false;
    return out;
}

Gene crossover(const Gene& g1, const Gene& g2, Rng& rng) {
    if (g1.alpha.size() != g2.alpha.size()) throw std::invalid_argument("crossover: length mismatch");
    Gene child;
    child.alpha.resize(g1.alpha.size());
    do {
        for (std::size_t i = 0; i < child.alpha.size(); ++i)
            child.alpha[i] = rng.bernoulli(0.5) ? g1.alpha[i] : g2.alpha[i];
    } while (!(l1(child.alpha) > 0.0));
    child.action = rng.bernoulli(0.5) ? g1.action : g2.action;
    child.weight = 1.0;
    return child;
}

void refresh_active(GeneSet& G, std::int64_t current_step) {
    auto& genes = G.genes();
    const auto& cfg = G.config();
    std::vector<std::size_t> eligible;
    std::size_t seeds = 0;
    for (std::size_t i = 0; i < genes.size(); ++i) {
        Gene& g = genes[i];
        g.active = g.permanent;
        seeds += g.permanent;
        if (!g.permanent && G.alive(g) && g.weight > cfg.activation_weight &&
            current_step - g.birth_step >= cfg.min_lifetime)
            eligible.push_back(i);
    }
    std::stable_sort(eligible.begin(), eligible.end(),
                     [&](std::size_t a, std::size_t b) { return genes[a].weight > genes[b].weight; });
    const std::size_t room = cfg.active_size > seeds ? cfg.active_size - seeds : 0;
    for (std::size_t k = 0; k < eligible.size() && k < room; ++k) genes[eligible[k]].active = true;
}

void select(GeneSet& G, std::int64_t current_step, Rng& rng) {
    auto& genes = G.genes();
    const auto& cfg = G.config();
    std::erase_if(genes, [&](const Gene& g) { return !g.permanent && !G.alive(g); });
    for (auto& g : genes)
        if (g.permanent && g.weight < cfg.seed_floor) g.weight = cfg.seed_floor;

    // Roulette parents among the survivors present before refilling.
    const std::size_t parents = genes.size();
    std::vector<double> cumulative(parents);
    double total = 0.0;
    for (std::size_t i = 0; i < parents; ++i) cumulative[i] = (total += genes[i].weight);
    auto pick = [&]() {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), parents - 1);
    };

    while (genes.size() < cfg.capacity) {
        Gene child;
        if (parents == 0 || rng.bernoulli(cfg.fresh_fraction)) {
            child = random_gene(rng, G.predicate_count(), cfg.init);
        } else {
            const std::size_t a = pick(), b = pick();
            child = mutate(crossover(genes[a], genes[b], rng), rng, cfg.mutation);
        }
        child.birth_step = current_step;
        child.active = false;
        child.permanent = false;
        genes.push_back(std::move(child));
    }
    refresh_active(G, current_step);
}

std::vector<Gene> naive_seed_genes(const PredicateRegistry& reg, double weight) {
    std::vector<Gene> seeds;
    for (Action a : kActions) {
        const std::size_t idx = reg.find(PredicateFamily::Naive, static_cast<int>(a));
        if (idx == reg.size()) throw std::invalid_argument("registry has no naive-policy predicates");
        Gene g;
        g.alpha.assign(reg.size(), 0.0);
        g.alpha[idx] = 1.0;
        g.action = a;
        g.weight = weight;
        g.birth_step = std::numeric_limits<std::int32_t>::min();
        g.active = true;
        g.permanent = true;
        seeds.push_back(std::move(g));
    }
    return seeds;
}

GeneSet initial_population(const PredicateRegistry& reg, const PopulationConfig& cfg, Rng& rng) {
    GeneSet G(reg.size(), cfg);
    for (auto& g : naive_seed_genes(reg, cfg.seed_weight)) G.add(std::move(g));
    while (G.genes().size() < cfg.capacity) {
        Gene g = random_gene(rng, reg.size(), cfg.init);
        g.birth_step = 0;
        G.add(std::move(g));
    }
    refresh_active(G, 0);
    return G;
}

}  // namespace lcsnav
