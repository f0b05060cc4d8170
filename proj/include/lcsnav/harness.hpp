#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <map>
#include <string>
#include <vector>

#include "lcsnav/gridworld.hpp"
#include "lcsnav/learning.hpp"
#include "lcsnav/lcs.hpp"
#include "lcsnav/predicates.hpp"

namespace lcsnav {

struct MapSource {
    std::string directory;  // empty: generate
    int count = 20;
    int width = 100;
    int height = 100;
    std::uint64_t seed = 7;
    OfficeParams office;
};

struct ExperimentConfig {
    MapSource maps;
    double vision_radius = 5.0;
    RegistryConfig registry;
    PopulationConfig population;
    LearningConfig learning;                        // shared defaults
    std::map<Potential, LearningConfig> variants;   // variants to run, with their settings
    int generations = 50;
    std::uint64_t seed = 1;
    std::string output = "out";
    bool traces = false;

    LearningConfig learning_for(Potential p) const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// INI-style text: [experiment] [maps] [vision] [registry] [population]
// [learning] and one optional section per variant overriding [learning].
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

std::uint64_t map_seed(const MapSource& src, int index);
DomainEnsemble load_ensemble(const MapSource& src);

struct MetricsRow {
    int generation = 0;
    Potential variant = Potential::Supervised;
    double mean_cost = 0.0;
    double std_cost = 0.0;
    std::size_t failures = 0;
    std::size_t active_genes = 0;
    int hold = 0;
};

inline constexpr std::string_view kMetricsHeader = "generation,variant,mean_cost,std_cost,failures,active_genes,M";
std::string format_metrics_row(const MetricsRow& row);
std::string format_real(double v);

struct TrainingOutcome {
    std::vector<MetricsRow> rows;  // row 0 evaluates the seed policy
    Policy policy;
};

using RowCallback = std::function<void(const MetricsRow&)>;

// Independent run of one variant: seeded population, `generations` passes.
TrainingOutcome train_variant(const DomainEnsemble& ensemble, const ExperimentConfig& cfg,
                              Potential variant, const RowCallback& on_row = {});

// Command implementations behind the CLI; failures throw.
void cmd_generate_maps(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_train(const ExperimentConfig& cfg, std::ostream& log);
CostReport cmd_eval(const std::string& policy_path, const ExperimentConfig& cfg,
                    const std::optional<RegistryConfig>& expected_registry,
                    const std::string& csv_path, std::ostream& out);
EpisodeResult cmd_trace(const std::string& policy_path, const std::string& map_path, double radius,
                        const std::string& trace_path);

std::string format_trace(const EpisodeResult& episode);

}  // namespace lcsnav
