#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "lcsnav/harness.hpp"

namespace lcsnav {

namespace pt = boost::property_tree;

namespace {

template <typename T>
T number(const std::string& section, const std::string& key, const std::string& value) {
    T v{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw ConfigError("[" + section + "] " + key + ": not a number '" + value + "'");
    return v;
}

bool boolean(const std::string& section, const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("[" + section + "] " + key + ": not a boolean '" + value + "'");
}

void apply_learning(LearningConfig& l, const std::string& section, const std::string& key,
                    const std::string& value) {
    if (key == "beta") l.beta = number<double>(section, key, value);
    else if (key == "fusion") {
        try {
            l.fusion = parse_fusion_rule(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("[" + section + "] fusion: " + e.what());
        }
    } else if (key == "hold" || key == "m_initial") l.hold = number<int>(section, key, value);
    else if (key == "hold_increment" || key == "m_increment") l.hold_increment = number<int>(section, key, value);
    else if (key == "step_limit_factor") l.step_limit_factor = number<double>(section, key, value);
    else if (key == "wall_guard") l.wall_guard = boolean(section, key, value);
    else if (key == "loop_escape") l.loop_escape = boolean(section, key, value);
    else if (key == "credit_overrides") l.credit_overrides = boolean(section, key, value);
    else throw ConfigError("[" + section + "] unknown key '" + key + "'");
    if (!(l.beta > 0.0)) throw ConfigError("[" + section + "] beta must be positive");
    if (l.hold < 0) throw ConfigError("[" + section + "] hold must be non-negative");
    if (!(l.step_limit_factor > 0.0)) throw ConfigError("[" + section + "] step_limit_factor must be positive");
}

}  // namespace

LearningConfig ExperimentConfig::learning_for(Potential p) const {
    auto it = variants.find(p);
    LearningConfig l = it != variants.end() ? it->second : learning;
    l.potential = p;
    l.vision.radius = vision_radius;
    return l;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    ExperimentConfig cfg;
    std::vector<Potential> variant_order = {Potential::Supervised, Potential::Classical,
                                            Potential::Retrospective};
    std::map<std::string, std::string> registry_kv;
    bool obstacle_range_set = false;
    const std::set<std::string> variant_sections = {"supervised", "classical", "retrospective"};

    // [learning] first so variant sections override it regardless of file order.
    if (auto l = tree.get_child_optional("learning"))
        for (const auto& [key, node] : *l) apply_learning(cfg.learning, "learning", key, node.data());

    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("key '" + section + "' outside of a section");
        for (const auto& [key, node] : body) {
            const std::string& v = node.data();
            if (section == "experiment") {
                if (key == "seed") cfg.seed = number<std::uint64_t>(section, key, v);
                else if (key == "generations") cfg.generations = number<int>(section, key, v);
                else if (key == "output") cfg.output = v;
                else if (key == "traces") cfg.traces = boolean(section, key, v);
                else if (key == "variants") {
                    variant_order.clear();
                    std::stringstream ss(v);
                    std::string item;
                    while (std::getline(ss, item, ',')) {
                        if (item.empty()) continue;
                        try {
                            variant_order.push_back(parse_potential(item));
                        } catch (const std::invalid_argument& e) {
                            throw ConfigError("[experiment] variants: " + std::string(e.what()));
                        }
                    }
                } else throw ConfigError("[experiment] unknown key '" + key + "'");
            } else if (section == "maps") {
                auto& m = cfg.maps;
                if (key == "source") m.directory = v == "generate" ? "" : v;
                else if (key == "count") m.count = number<int>(section, key, v);
                else if (key == "width") m.width = number<int>(section, key, v);
                else if (key == "height") m.height = number<int>(section, key, v);
                else if (key == "seed") m.seed = number<std::uint64_t>(section, key, v);
                else if (key == "corridor_width") m.office.corridor_width = number<int>(section, key, v);
                else if (key == "block_min") m.office.block_min = number<int>(section, key, v);
                else if (key == "block_max") m.office.block_max = number<int>(section, key, v);
                else if (key == "room_min") m.office.room_min = number<int>(section, key, v);
                else if (key == "door_width") m.office.door_width = number<int>(section, key, v);
                else if (key == "corridor_door_prob") m.office.corridor_door_prob = number<double>(section, key, v);
                else if (key == "clutter") m.office.clutter = number<double>(section, key, v);
                else throw ConfigError("[maps] unknown key '" + key + "'");
            } else if (section == "vision") {
                if (key == "radius") cfg.vision_radius = number<double>(section, key, v);
                else throw ConfigError("[vision] unknown key '" + key + "'");
            } else if (section == "registry") {
                registry_kv[key] = v;
                obstacle_range_set = obstacle_range_set || key == "obstacle_range";
            } else if (section == "population") {
                auto& p = cfg.population;
                if (key == "capacity") p.capacity = number<std::size_t>(section, key, v);
                else if (key == "active") p.active_size = number<std::size_t>(section, key, v);
                else if (key == "min_lifetime") p.min_lifetime = number<std::int64_t>(section, key, v);
                else if (key == "cull") p.cull_threshold = number<double>(section, key, v);
                else if (key == "fresh_fraction") p.fresh_fraction = number<double>(section, key, v);
                else if (key == "seed_weight") p.seed_weight = number<double>(section, key, v);
                else if (key == "seed_floor") p.seed_floor = number<double>(section, key, v);
                else if (key == "activation_weight") p.activation_weight = number<double>(section, key, v);
                else if (key == "refresh_each_step") p.refresh_each_step = boolean(section, key, v);
                else if (key == "credit_incubating") p.credit_incubating = boolean(section, key, v);
                else if (key == "init_spread") p.init.spread = number<double>(section, key, v);
                else if (key == "init_zero_prob") p.init.zero_prob = number<double>(section, key, v);
                else if (key == "mutation_rate") p.mutation.rate = number<double>(section, key, v);
                else if (key == "mutation_scale") p.mutation.scale = number<double>(section, key, v);
                else if (key == "action_flip") p.mutation.action_flip = number<double>(section, key, v);
                else throw ConfigError("[population] unknown key '" + key + "'");
            } else if (section == "learning") {
                // handled above
            } else if (variant_sections.contains(section)) {
                // handled below
            } else {
                throw ConfigError("unknown section [" + section + "]");
            }
        }
    }

    for (Potential p : variant_order) {
        LearningConfig l = cfg.learning;
        if (auto sec = tree.get_child_optional(std::string(potential_name(p))))
            for (const auto& [key, node] : *sec) apply_learning(l, std::string(potential_name(p)), key, node.data());
        cfg.variants[p] = l;
    }
    // Sections for variants not listed are ignored.
    for (auto it = cfg.variants.begin(); it != cfg.variants.end();) {
        if (std::find(variant_order.begin(), variant_order.end(), it->first) == variant_order.end())
            it = cfg.variants.erase(it);
        else
            ++it;
    }

    try {
        cfg.registry = RegistryConfig::from_map(registry_kv);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("[registry] ") + e.what());
    }
    if (!obstacle_range_set) cfg.registry.obstacle_range = cfg.vision_radius;
    cfg.learning.vision.radius = cfg.vision_radius;

    if (cfg.generations < 0) throw ConfigError("[experiment] generations must be non-negative");
    if (cfg.maps.directory.empty() && cfg.maps.count < 1) throw ConfigError("[maps] count must be at least 1");
    if (!(cfg.vision_radius >= 1.0)) throw ConfigError("[vision] radius must be at least 1");
    if (cfg.population.capacity < 3 || cfg.population.active_size < 3)
        throw ConfigError("[population] capacity and active must be at least 3");
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

}  // namespace lcsnav
