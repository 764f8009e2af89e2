#include "graybatt/cli_commands.hpp"

#include <cstdio>

#include "graybatt/analysis.hpp"
#include "graybatt/csv.hpp"
#include "graybatt/errors.hpp"
#include "graybatt/pipeline.hpp"

namespace graybatt::cli {

namespace {

std::filesystem::path ensure_out_dir(const GlobalOpts& g) {
    std::filesystem::create_directories(g.out);
    return g.out;
}

std::vector<DriveCycle> load_cycles(const std::vector<std::filesystem::path>& paths) {
    std::vector<DriveCycle> cycles;
    cycles.reserve(paths.size());
    for (const auto& p : paths) cycles.push_back(load_cycle_csv(p));
    return cycles;
}

void require_stats_cycles(const RunConfig& cfg,
                          const std::vector<std::filesystem::path>& stats_paths) {
    if (cfg.reference_mode == ReferenceMode::surrogate && !cfg.surrogate.planted_ids.empty() &&
        stats_paths.empty())
        throw ConfigError("surrogate has planted terms: pass --stats-cycles with the cycles the "
                          "planted dynamics were normalized against (the training cycles)");
}

}  // namespace

RunConfig load_config(const GlobalOpts& g) {
    return g.config ? RunConfig::from_file(*g.config) : RunConfig::defaults();
}

int cmd_build_cycle(const GlobalOpts& g) {
    RunConfig cfg = load_config(g);
    cfg.cycle.seed = g.seed;
    const DriveCycle cycle = build_cycle(cfg.cycle);
    const auto out = ensure_out_dir(g) / (cycle.name + ".csv");
    save_cycle_csv(out, cycle);
    std::printf("wrote %s (%zu samples, dt=%g s)\n", out.string().c_str(), cycle.size(),
                cycle.dt());
    return 0;
}

int cmd_simulate(const GlobalOpts& g, const std::filesystem::path& cycle_path) {
    const RunConfig cfg = load_config(g);
    const DriveCycle cycle = load_cycle_csv(cycle_path);
    const VoltageTrace trace = simulate_cycle(cfg.cell, cycle).trace;
    const auto out = ensure_out_dir(g) / (cycle.name + "_lfm.csv");
    save_trace_csv(out, trace);
    std::printf("wrote %s\n", out.string().c_str());
    return 0;
}

int cmd_gen_data(const GlobalOpts& g, const std::vector<std::filesystem::path>& cycle_paths,
                 std::vector<std::filesystem::path> stats_cycle_paths) {
    const RunConfig cfg = load_config(g);
    if (stats_cycle_paths.empty()) stats_cycle_paths = cycle_paths;
    const auto cycles = load_cycles(cycle_paths);
    const auto stats_cycles = load_cycles(stats_cycle_paths);

    const FeatureLibrary lib = FeatureLibrary::build(cfg.library);
    const auto refs = make_references(cfg, g.seed, lib, cycles, stats_cycles, {});

    const auto dir = ensure_out_dir(g);
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const VoltageTrace trace = simulate_cycle(cfg.cell, cycles[i]).trace;
        const auto er = compute_error_series(refs[i], trace);

        save_trace_csv(dir / (cycles[i].name + "_lfm.csv"), trace);
        save_reference_csv(dir / (cycles[i].name + "_ref.csv"), refs[i]);
        csvio::write_csv(dir / (cycles[i].name + "_error.csv"), {"t_s", "e_r_v"},
                         {&trace.timestamps, &er});
        std::printf("wrote %s_{lfm,ref,error}.csv\n", (dir / cycles[i].name).string().c_str());
    }
    return 0;
}

int cmd_train(const GlobalOpts& g, const std::vector<std::filesystem::path>& train_paths,
              const std::filesystem::path& valid_path,
              const std::vector<std::filesystem::path>& train_ref_paths,
              const std::optional<std::filesystem::path>& valid_ref_path) {
    if (!g.seed_set)
        throw ConfigError("train requires an explicit --seed for reproducibility");
    const RunConfig cfg = load_config(g);
    const auto train = load_cycles(train_paths);
    const DriveCycle valid = load_cycle_csv(valid_path);

    const TrainOutcome outcome =
        train_model(cfg, g.seed, train, valid, train_ref_paths, valid_ref_path);

    const auto dir = ensure_out_dir(g);
    save_model_json(dir / "model.json", outcome.model);
    save_history_csv(dir / "history.csv", outcome.ga.history);

    const auto& best = outcome.ga.best;
    std::printf("best: fitness=%.9g loss=%.9g n_active=%d mse_train=%.6g mse_valid=%.6g "
                "lambda1=%.3g lambda2=%.3g feasible=%s (%d generations)\n",
                best.fitness, best.loss, best.n_active, best.mse_train, best.mse_valid,
                best.genome.lambda1(), best.genome.lambda2(), best.feasible ? "yes" : "no",
                outcome.ga.generations_run);
    std::printf("wrote %s and %s\n", (dir / "model.json").string().c_str(),
                (dir / "history.csv").string().c_str());

    if (outcome.ga.no_feasible_warning) {
        std::fprintf(stderr, "warning: no candidate met the training-error constraint; "
                             "returning best by loss\n");
        return 2;
    }
    return 0;
}

int cmd_evaluate(const GlobalOpts& g, const std::filesystem::path& model_path,
                 const std::vector<std::filesystem::path>& cycle_paths,
                 const std::vector<std::filesystem::path>& ref_paths,
                 std::vector<std::filesystem::path> stats_cycle_paths, bool with_timing,
                 bool teacher_forced) {
    const RunConfig cfg = load_config(g);
    const SparseErrorModel model = load_model_json(model_path);
    const auto cycles = load_cycles(cycle_paths);

    if (!ref_paths.empty() && ref_paths.size() != cycles.size())
        throw ConfigError("--refs must pair 1:1 with --cycles");
    if (ref_paths.empty()) require_stats_cycles(cfg, stats_cycle_paths);
    const auto stats_cycles = stats_cycle_paths.empty() ? cycles : load_cycles(stats_cycle_paths);

    std::vector<HybridEvaluation> rows;
    std::vector<TimingReport> timings;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        std::optional<std::filesystem::path> ref;
        if (!ref_paths.empty()) ref = ref_paths[i];
        rows.push_back(
            evaluate_on_cycle(cfg, g.seed, model, cycles[i], stats_cycles, ref, teacher_forced));
        const auto& ev = rows.back();
        std::printf("%s: rmse_lfm=%.6g V rmse_hybrid=%.6g V rrr=%.2f%% rho=%.4f\n",
                    cycles[i].name.c_str(), ev.lfm.rmse, ev.hybrid.rmse, ev.hybrid.rrr_percent,
                    ev.hybrid.pearson_rho);

        if (with_timing) {
            const auto& cyc = cycles[i];
            timings.push_back(time_component(
                "lfm", cyc.name, [&] { simulate_cycle(cfg.cell, cyc); }));
            timings.push_back(time_component("hybrid", cyc.name, [&] {
                const auto trace = simulate_cycle(cfg.cell, cyc).trace;
                simulate_recursive(model, trace, 0.0);
            }));
            // surrogate timing only applies when this run generates one
            if (ref_paths.empty() && cfg.reference_mode == ReferenceMode::surrogate) {
                const FeatureLibrary lib = FeatureLibrary::build(cfg.library);
                timings.push_back(time_component("surrogate", cyc.name, [&] {
                    make_references(cfg, g.seed, lib, {cyc}, stats_cycles, {});
                }));
            }
        }
    }

    const auto dir = ensure_out_dir(g);
    save_metrics_csv(dir / "metrics.csv", rows);
    std::printf("wrote %s\n", (dir / "metrics.csv").string().c_str());
    if (with_timing) {
        save_timing_csv(dir / "timing.csv", timings);
        std::printf("wrote %s\n", (dir / "timing.csv").string().c_str());
    }
    return 0;
}

int cmd_rank(const GlobalOpts& g, const std::filesystem::path& model_path,
             const std::filesystem::path& cycle_path) {
    const RunConfig cfg = load_config(g);
    const SparseErrorModel model = load_model_json(model_path);
    const DriveCycle cycle = load_cycle_csv(cycle_path);
    const VoltageTrace trace = simulate_cycle(cfg.cell, cycle).trace;

    const RankingReport report = svd_rank(model, trace);
    const auto dir = ensure_out_dir(g);
    save_ranking_csv(dir / "ranking.csv", report);
    for (const auto& f : report.features)
        std::printf("rank %2d  id %3d  %-18s xbar=%.6g cumulative=%.4f\n", f.rank, f.descriptor_id,
                    f.name.c_str(), f.xbar, f.cumulative_info);
    std::printf("wrote %s\n", (dir / "ranking.csv").string().c_str());
    return 0;
}

}  // namespace graybatt::cli
