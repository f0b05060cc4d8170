#include "lcsnav/harness.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <utility>

namespace lcsnav {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string map_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "map_%03d.map", index);
    return buf;
}

}  // namespace

std::string format_real(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::uint64_t map_seed(const MapSource& src, int index) {
    return src.seed * 1000003ULL + static_cast<std::uint64_t>(index);
}

DomainEnsemble load_ensemble(const MapSource& src) {
    std::vector<GridDomain> domains;
    if (src.directory.empty()) {
        for (int i = 0; i < src.count; ++i)
            domains.push_back(generate_office_map(map_seed(src, i), src.width, src.height, src.office));
    } else {
        std::vector<fs::path> files;
        if (!fs::is_directory(src.directory))
            throw std::runtime_error("map directory " + src.directory + " does not exist");
        for (const auto& entry : fs::directory_iterator(src.directory))
            if (entry.is_regular_file() && entry.path().extension() == ".map") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw std::runtime_error("no .map files in " + src.directory);
        for (const auto& f : files) {
            try {
                domains.push_back(load_map_file(f.string()));
            } catch (const MapError& e) {
                throw std::runtime_error(f.filename().string() + ": " + e.what());
            }
        }
    }
    return DomainEnsemble::uniform(std::move(domains));
}

std::string format_metrics_row(const MetricsRow& r) {
    return std::to_string(r.generation) + "," + std::string(potential_name(r.variant)) + "," +
           format_real(r.mean_cost) + "," + format_real(r.std_cost) + "," + std::to_string(r.failures) +
           "," + std::to_string(r.active_genes) + "," + std::to_string(r.hold);
}

TrainingOutcome train_variant(const DomainEnsemble& ensemble, const ExperimentConfig& cfg,
                              Potential variant, const RowCallback& on_row) {
    const PredicateRegistry reg = build_registry(cfg.registry);
    LearningConfig learning = cfg.learning_for(variant);
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(variant));
    GeneSet G = initial_population(reg, cfg.population, rng);

    TrainingOutcome out;
    auto emit = [&](int generation, const CostReport& report, int hold) {
        MetricsRow row{generation, variant, report.mean, report.stddev, report.failures,
                       G.active_count(), hold};
        out.rows.push_back(row);
        if (on_row) on_row(row);
    };
    emit(0, evaluate_policy(ensemble, G, reg, learning), learning.hold);
    for (int g = 1; g <= cfg.generations; ++g) {
        const int hold = learning.hold;
        const CostReport report = run_generation(ensemble, G, reg, learning, rng);
        emit(g, report, hold);
    }
    out.policy = Policy{cfg.registry, reg.names(), learning.fusion, std::move(G)};
    return out;
}

void cmd_generate_maps(const ExperimentConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::string manifest = "index,seed,file,width,height\n";
    for (int i = 0; i < cfg.maps.count; ++i) {
        const std::uint64_t seed = map_seed(cfg.maps, i);
        const GridDomain d = generate_office_map(seed, cfg.maps.width, cfg.maps.height, cfg.maps.office);
        write_file(fs::path(out_dir) / map_name(i), save_map(d));
        manifest += std::to_string(i) + "," + std::to_string(seed) + "," + map_name(i) + "," +
                    std::to_string(cfg.maps.width) + "," + std::to_string(cfg.maps.height) + "\n";
    }
    write_file(fs::path(out_dir) / "manifest.csv", manifest);
}

void cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
    const DomainEnsemble ensemble = load_ensemble(cfg.maps);
    fs::create_directories(cfg.output);
    std::string csv = std::string(kMetricsHeader) + "\n";
    for (const auto& [variant, learning] : cfg.variants) {
        const std::string name(potential_name(variant));
        TrainingOutcome outcome;
        try {
            outcome = train_variant(ensemble, cfg, variant, [&](const MetricsRow& row) {
                log << name << " generation " << row.generation << " mean " << format_real(row.mean_cost)
                    << " failures " << row.failures << "\n";
                log.flush();
            });
        } catch (const std::exception& e) {
            throw std::runtime_error("variant " + name + ": " + e.what());
        }
        for (const auto& row : outcome.rows) csv += format_metrics_row(row) + "\n";
        write_file(fs::path(cfg.output) / ("policy_" + name + ".txt"), save_policy(outcome.policy));
        if (cfg.traces) {
            const PredicateRegistry reg = build_registry(outcome.policy.registry);
            LearningConfig l = cfg.learning_for(variant);
            for (std::size_t i = 0; i < ensemble.domains.size(); ++i) {
                const EpisodeResult ep = run_episode(ensemble.domains[i], std::as_const(outcome.policy.genes),
                                                     reg, l, true);
                write_file(fs::path(cfg.output) / ("trace_" + name + "_" + std::to_string(i) + ".csv"),
                           format_trace(ep));
            }
        }
    }
    write_file(fs::path(cfg.output) / "metrics.csv", csv);
}

CostReport cmd_eval(const std::string& policy_path, const ExperimentConfig& cfg,
                    const std::optional<RegistryConfig>& expected_registry,
                    const std::string& csv_path, std::ostream& out) {
    const Policy policy = load_policy_file(policy_path);
    if (expected_registry && !(*expected_registry == policy.registry))
        throw std::runtime_error("registry configuration in " + policy_path +
                                 " does not match the evaluation config");
    const PredicateRegistry reg = build_registry(policy.registry);
    if (reg.names() != policy.predicate_names)
        throw std::runtime_error("predicate list in " + policy_path + " does not match its registry");
    const DomainEnsemble ensemble = load_ensemble(cfg.maps);
    LearningConfig l = cfg.learning;
    l.fusion = policy.fusion;
    l.vision.radius = cfg.vision_radius;
    const CostReport report = evaluate_policy(ensemble, policy.genes, reg, l);

    std::string csv = "domain,cost\n";
    out << "domain  cost\n";
    for (const auto& [i, c] : report.per_domain) {
        csv += std::to_string(i) + "," + format_real(c) + "\n";
        out << i << "  " << format_real(c) << "\n";
    }
    csv += "mean," + format_real(report.mean) + "\nstd," + format_real(report.stddev) + "\n";
    out << "mean " << format_real(report.mean) << "\nstd " << format_real(report.stddev)
        << "\nfailures " << report.failures << "\n";
    if (!csv_path.empty()) write_file(csv_path, csv);
    return report;
}

std::string format_trace(const EpisodeResult& ep) {
    std::string out = "step,x,y,dx,dy,action,reached\n";
    for (std::size_t k = 0; k < ep.poses.size(); ++k) {
        const RobotState& s = ep.poses[k];
        const bool last = k + 1 == ep.poses.size();
        const char* flag = !last ? "0" : ep.reached ? "1" : "-1";
        out += std::to_string(k) + "," + std::to_string(s.position.x) + "," + std::to_string(s.position.y) +
               "," + std::to_string(dx(s.direction)) + "," + std::to_string(dy(s.direction)) + "," +
               (k == 0 ? std::string("start") : std::string(action_name(ep.commands[k - 1]))) + "," + flag + "\n";
    }
    return out;
}

EpisodeResult cmd_trace(const std::string& policy_path, const std::string& map_path, double radius,
                        const std::string& trace_path) {
    const Policy policy = load_policy_file(policy_path);
    const PredicateRegistry reg = build_registry(policy.registry);
    if (reg.names() != policy.predicate_names)
        throw std::runtime_error("predicate list in " + policy_path + " does not match its registry");
    const GridDomain domain = load_map_file(map_path);
    LearningConfig l;
    l.fusion = policy.fusion;
    l.vision.radius = radius;
    EpisodeResult ep = run_episode(domain, policy.genes, reg, l, true);
    write_file(trace_path, format_trace(ep));
    return ep;
}

}  // namespace lcsnav
