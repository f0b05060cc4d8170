#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "lcsnav/harness.hpp"

using namespace lcsnav;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string maps;
    std::string policy;
    std::string map_file;
    std::optional<double> radius;
    std::string variant;
    std::optional<int> generations;
};

ExperimentConfig resolve(const Options& o) {
    ExperimentConfig cfg = o.config.empty() ? parse_experiment_config("") : load_experiment_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out.empty()) cfg.output = o.out;
    if (!o.maps.empty()) cfg.maps.directory = o.maps;
    if (o.radius) {
        cfg.vision_radius = *o.radius;
        cfg.learning.vision.radius = *o.radius;
    }
    if (o.generations) cfg.generations = *o.generations;
    if (!o.variant.empty()) {
        const Potential p = parse_potential(o.variant);
        const LearningConfig l = cfg.variants.contains(p) ? cfg.variants.at(p) : cfg.learning;
        cfg.variants.clear();
        cfg.variants[p] = l;
    }
    return cfg;
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learning-classifier navigation: map generation, training, evaluation, traces"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("generate-maps", "Write an office-like map suite and manifest");
    gen->add_option("--config", o.config, "Experiment config file");
    gen->add_option("--seed", o.seed, "Map suite seed");
    gen->add_option("--out", o.out, "Output directory")->required();

    auto* train = app.add_subcommand("train", "Train one policy per variant, write metrics.csv and policies");
    train->add_option("--config", o.config, "Experiment config file");
    train->add_option("--seed", o.seed, "Global seed");
    train->add_option("--out", o.out, "Output directory");
    train->add_option("--maps", o.maps, "Directory of .map files (overrides generation)");
    train->add_option("--radius", o.radius, "Vision radius");
    train->add_option("--variant", o.variant, "supervised | classical | retrospective");
    train->add_option("--generations", o.generations, "Number of generations");

    std::string csv_path;
    auto* eval = app.add_subcommand("eval", "Evaluate a trained policy over a map suite");
    eval->add_option("--policy", o.policy, "Policy file")->required();
    eval->add_option("--config", o.config, "Experiment config file (registry must match the policy)");
    eval->add_option("--maps", o.maps, "Directory of .map files");
    eval->add_option("--radius", o.radius, "Vision radius");
    eval->add_option("--seed", o.seed, "Unused; accepted for symmetry");
    eval->add_option("--out", csv_path, "CSV output path");

    std::string trace_path = "trace.csv";
    auto* trace = app.add_subcommand("trace", "Record the pose sequence of a policy on one map");
    trace->add_option("--policy", o.policy, "Policy file")->required();
    trace->add_option("--map", o.map_file, "Map file")->required();
    trace->add_option("--radius", o.radius, "Vision radius");
    trace->add_option("--out", trace_path, "Trace CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            ExperimentConfig cfg = o.config.empty() ? parse_experiment_config("") : load_experiment_config(o.config);
            if (o.seed) cfg.maps.seed = *o.seed;
            cmd_generate_maps(cfg, o.out);
        } else if (train->parsed()) {
            cmd_train(resolve(o), std::cerr);
        } else if (eval->parsed()) {
            const ExperimentConfig cfg = resolve(o);
            std::optional<RegistryConfig> expected;
            if (!o.config.empty()) expected = cfg.registry;
            cmd_eval(o.policy, cfg, expected, csv_path, std::cout);
        } else if (trace->parsed()) {
            const EpisodeResult ep = cmd_trace(o.policy, o.map_file, o.radius.value_or(5.0), trace_path);
            std::cout << (ep.reached ? "reached" : "capped") << " commands " << ep.commands.size()
                      << " cost " << format_real(ep.cost) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "lcsnav: error: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 0;
}
