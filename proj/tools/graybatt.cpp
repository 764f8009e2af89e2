#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graybatt/cli_commands.hpp"

using graybatt::cli::GlobalOpts;

int main(int argc, char** argv) {
    CLI::App app{"grey-box battery model identification toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "run configuration file")->expected(1);
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_dir, "output directory (default .)");

    auto* build = app.add_subcommand("build-cycle", "build the synthetic cycle from [cycle] config");

    std::string sim_cycle;
    auto* simulate = app.add_subcommand("simulate", "simulate the cell model on a cycle");
    simulate->add_option("--cycle", sim_cycle, "drive-cycle CSV")->required();

    std::vector<std::string> gen_cycles, gen_stats;
    auto* gen = app.add_subcommand("gen-data", "simulate + reference + error CSVs per cycle");
    gen->add_option("--cycles", gen_cycles, "drive-cycle CSVs")->required()->delimiter(',');
    gen->add_option("--stats-cycles", gen_stats,
                    "cycles fixing the surrogate normalization (default: --cycles)")
        ->delimiter(',');

    std::vector<std::string> train_cycles, train_refs;
    std::string valid_cycle, valid_ref;
    auto* train = app.add_subcommand("train", "search for a sparse error model");
    train->add_option("--train", train_cycles, "training cycle CSVs")->required()->delimiter(',');
    train->add_option("--valid", valid_cycle, "validation cycle CSV")->required();
    train->add_option("--train-refs", train_refs, "reference CSVs paired with --train")
        ->delimiter(',');
    train->add_option("--valid-ref", valid_ref, "reference CSV for --valid");

    std::string eval_model;
    std::vector<std::string> eval_cycles, eval_refs, eval_stats;
    bool eval_timing = false, eval_teacher = false;
    auto* evaluate = app.add_subcommand("evaluate", "hybrid-vs-baseline metrics on cycles");
    evaluate->add_option("--model", eval_model, "model JSON")->required();
    evaluate->add_option("--cycles", eval_cycles, "test cycle CSVs")->required()->delimiter(',');
    evaluate->add_option("--refs", eval_refs, "reference CSVs paired with --cycles")
        ->delimiter(',');
    evaluate->add_option("--stats-cycles", eval_stats,
                         "training cycles fixing the surrogate normalization")
        ->delimiter(',');
    evaluate->add_flag("--timing", eval_timing, "also write timing.csv (median of 5 runs)");
    evaluate->add_flag("--teacher-forced", eval_teacher,
                       "one-step predictions instead of free-running rollout");

    std::string rank_model, rank_cycle;
    auto* rank = app.add_subcommand("rank", "SVD importance ranking of the model's features");
    rank->add_option("--model", rank_model, "model JSON")->required();
    rank->add_option("--cycle", rank_cycle, "cycle CSV to rank on")->required();

    CLI11_PARSE(app, argc, argv);

    if (!config_path.empty()) g.config = config_path;
    g.seed = seed;
    g.seed_set = seed_opt->count() > 0;
    g.out = out_dir;

    auto to_paths = [](const std::vector<std::string>& v) {
        return std::vector<std::filesystem::path>(v.begin(), v.end());
    };

    try {
        if (build->parsed()) return graybatt::cli::cmd_build_cycle(g);
        if (simulate->parsed()) return graybatt::cli::cmd_simulate(g, sim_cycle);
        if (gen->parsed())
            return graybatt::cli::cmd_gen_data(g, to_paths(gen_cycles), to_paths(gen_stats));
        if (train->parsed())
            return graybatt::cli::cmd_train(
                g, to_paths(train_cycles), valid_cycle, to_paths(train_refs),
                valid_ref.empty() ? std::nullopt
                                  : std::optional<std::filesystem::path>(valid_ref));
        if (evaluate->parsed())
            return graybatt::cli::cmd_evaluate(g, eval_model, to_paths(eval_cycles),
                                               to_paths(eval_refs), to_paths(eval_stats),
                                               eval_timing, eval_teacher);
        if (rank->parsed()) return graybatt::cli::cmd_rank(g, rank_model, rank_cycle);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
