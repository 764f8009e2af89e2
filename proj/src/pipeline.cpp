#include "graybatt/pipeline.hpp"

#include <stdexcept>

#include "graybatt/errors.hpp"

namespace graybatt {

namespace {

SignalSeries regressor_rows(const VoltageTrace& trace, const std::vector<double>& er) {
    SignalSeries s;
    s.er.assign(er.begin(), er.end() - 1);
    s.current.assign(trace.current.begin(), trace.current.end() - 1);
    s.csp.assign(trace.c_sp.begin(), trace.c_sp.end() - 1);
    s.csn.assign(trace.c_sn.begin(), trace.c_sn.end() - 1);
    return s;
}

}  // namespace

std::vector<ReferenceTrace> make_references(const RunConfig& cfg, std::uint64_t seed,
                                            const FeatureLibrary& lib,
                                            const std::vector<DriveCycle>& cycles,
                                            const std::vector<DriveCycle>& stats_cycles,
                                            const std::vector<std::filesystem::path>& ref_files) {
    // explicit reference files always win; the configured mode only decides
    // what happens when none are given
    std::vector<ReferenceTrace> refs;
    if (!ref_files.empty()) {
        if (ref_files.size() != cycles.size())
            throw ConfigError("reference files must pair 1:1 with cycles");
        for (const auto& f : ref_files) refs.push_back(load_reference_csv(f));
        return refs;
    }
    if (cfg.reference_mode == ReferenceMode::files)
        throw ConfigError("reference.mode=files but no reference files were provided");
    const SurrogateGenerator gen(cfg.surrogate.make_spec(cfg.cell, seed), cfg.cell, lib,
                                 stats_cycles);
    for (const auto& c : cycles) refs.push_back(gen.generate(c));
    return refs;
}

TrainingBundle prepare_training(const RunConfig& cfg, std::uint64_t seed,
                                const std::vector<DriveCycle>& train, const DriveCycle& valid,
                                const std::vector<std::filesystem::path>& train_ref_files,
                                const std::optional<std::filesystem::path>& valid_ref_file) {
    if (train.empty()) throw ConfigError("training needs >= 1 cycle");
    if (train_ref_files.empty() != !valid_ref_file)
        throw ConfigError("reference files must cover both training and validation cycles");
    if (!train_ref_files.empty() && train_ref_files.size() != train.size())
        throw ConfigError("training reference files must pair 1:1 with training cycles");

    TrainingBundle bundle;
    bundle.lib = std::make_shared<FeatureLibrary>(FeatureLibrary::build(cfg.library));

    const auto train_refs = make_references(cfg, seed, *bundle.lib, train, train, train_ref_files);
    const auto valid_refs =
        make_references(cfg, seed, *bundle.lib, {valid}, train,
                        valid_ref_file ? std::vector<std::filesystem::path>{*valid_ref_file}
                                       : std::vector<std::filesystem::path>{});

    for (std::size_t c = 0; c < train.size(); ++c) {
        PreparedCycle pc;
        pc.cycle = train[c];
        pc.lfm = simulate_cycle(cfg.cell, train[c]).trace;
        pc.ref = train_refs[c];
        pc.er = compute_error_series(pc.ref, pc.lfm);
        bundle.train_cycles.push_back(std::move(pc));
    }
    bundle.valid_cycle.cycle = valid;
    bundle.valid_cycle.lfm = simulate_cycle(cfg.cell, valid).trace;
    bundle.valid_cycle.ref = valid_refs.front();
    bundle.valid_cycle.er = compute_error_series(bundle.valid_cycle.ref, bundle.valid_cycle.lfm);

    // normalization from pooled training regressor rows only
    std::vector<SignalSeries> blocks;
    blocks.reserve(bundle.train_cycles.size());
    for (const auto& pc : bundle.train_cycles) blocks.push_back(regressor_rows(pc.lfm, pc.er));
    std::vector<const SignalSeries*> ptrs;
    for (const auto& b : blocks) ptrs.push_back(&b);
    bundle.lib->fit_normalization(ptrs);

    std::vector<const VoltageTrace*> traces;
    std::vector<const std::vector<double>*> errors;
    for (const auto& pc : bundle.train_cycles) {
        traces.push_back(&pc.lfm);
        errors.push_back(&pc.er);
    }
    bundle.dataset.lib = bundle.lib.get();
    bundle.dataset.train = RegressionDataset::prepare(*bundle.lib, traces, errors);
    bundle.dataset.valid =
        RegressionDataset::prepare(*bundle.lib, bundle.valid_cycle.lfm, bundle.valid_cycle.er);
    return bundle;
}

TrainOutcome train_model(const RunConfig& cfg, std::uint64_t seed,
                         const std::vector<DriveCycle>& train, const DriveCycle& valid,
                         const std::vector<std::filesystem::path>& train_ref_files,
                         const std::optional<std::filesystem::path>& valid_ref_file) {
    const TrainingBundle bundle =
        prepare_training(cfg, seed, train, valid, train_ref_files, valid_ref_file);

    GaConfig ga_cfg = cfg.ga;
    ga_cfg.seed = seed;
    TrainOutcome out;
    out.ga = run_ga(ga_cfg, bundle.dataset);
    out.model = out.ga.best.model;
    out.model.metadata["train_cycles"] = bundle.dataset.train.cycle_names;
    out.model.metadata["valid_cycle"] = bundle.dataset.valid.cycle_names;
    out.model.metadata["seed"] = std::to_string(seed);
    out.model.metadata["generations_run"] = std::to_string(out.ga.generations_run);
    out.model.metadata["feasible"] = out.ga.best.feasible ? "true" : "false";
    return out;
}

HybridEvaluation evaluate_on_cycle(const RunConfig& cfg, std::uint64_t seed,
                                   const SparseErrorModel& model, const DriveCycle& cycle,
                                   const std::vector<DriveCycle>& stats_cycles,
                                   const std::optional<std::filesystem::path>& ref_file,
                                   bool teacher_forced) {
    // the library only matters for surrogate planted terms; rebuild from config
    const FeatureLibrary lib = FeatureLibrary::build(cfg.library);
    const auto refs =
        make_references(cfg, seed, lib, {cycle}, stats_cycles,
                        ref_file ? std::vector<std::filesystem::path>{*ref_file}
                                 : std::vector<std::filesystem::path>{});
    const VoltageTrace lfm = simulate_cycle(cfg.cell, cycle).trace;
    return evaluate_hybrid(model, lfm, refs.front(), teacher_forced);
}

}  // namespace graybatt
