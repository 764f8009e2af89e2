#include "graybatt/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "graybatt/csv.hpp"
#include "graybatt/errors.hpp"
#include "graybatt/parallel.hpp"

namespace graybatt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool better(const EvaluatedCandidate& a, const EvaluatedCandidate& b) {
    if (a.feasible != b.feasible) return a.feasible;
    return a.fitness > b.fitness;
}

}  // namespace

double Genome::lambda1() const { return std::pow(10.0, log_lambda1); }
double Genome::lambda2() const { return std::pow(10.0, log_lambda2); }

void GaConfig::validate() const {
    if (population_size < 2) throw ConfigError("ga population_size must be >= 2");
    if (generations < 1) throw ConfigError("ga generations must be >= 1");
    if (tournament_size < 1) throw ConfigError("ga tournament_size must be >= 1");
    auto rate = [](double r, const char* name) {
        if (!(r >= 0.0 && r <= 1.0)) throw ConfigError(std::string("ga ") + name + " must be in [0,1]");
    };
    rate(crossover_rate, "crossover_rate");
    rate(mutation_rate_mask, "mutation_rate_mask");
    rate(init_mask_density, "init_mask_density");
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !(alpha + beta < 1.0))
        throw ConfigError("ga weights need alpha >= 0, beta >= 0, alpha + beta < 1");
    if (!(epsilon > 0.0)) throw ConfigError("ga epsilon must be > 0");
    if (mutation_sigma_lambda < 0.0) throw ConfigError("ga mutation_sigma_lambda must be >= 0");
    if (stagnation_patience < 1) throw ConfigError("ga stagnation_patience must be >= 1");
    if (!(log_lambda1_min <= log_lambda1_max) || !(log_lambda2_min <= log_lambda2_max))
        throw ConfigError("ga lambda bounds inverted");
    if (stridge_max_iters < 1) throw ConfigError("ga stridge_max_iters must be >= 1");
}

RegressionDataset RegressionDataset::prepare(const FeatureLibrary& lib,
                                             const std::vector<const VoltageTrace*>& traces,
                                             const std::vector<const std::vector<double>*>& errors) {
    if (traces.empty() || traces.size() != errors.size())
        throw ParameterDomainError("dataset needs aligned trace/error lists");

    RegressionDataset ds;
    ds.lfm_trace = *traces.front();
    ds.er_full = *errors.front();

    for (std::size_t c = 0; c < traces.size(); ++c) {
        const VoltageTrace& trace = *traces[c];
        const std::vector<double>& er = *errors[c];
        const std::size_t n = trace.size();
        if (er.size() != n) throw ParameterDomainError("error series length mismatch");
        if (n < 3) throw ParameterDomainError("trace too short to form regression pairs");

        ds.cycle_names += (c ? "+" : "") + trace.cycle_name;
        ds.signals.er.insert(ds.signals.er.end(), er.begin(), er.end() - 1);
        ds.signals.current.insert(ds.signals.current.end(), trace.current.begin(),
                                  trace.current.end() - 1);
        ds.signals.csp.insert(ds.signals.csp.end(), trace.c_sp.begin(), trace.c_sp.end() - 1);
        ds.signals.csn.insert(ds.signals.csn.end(), trace.c_sn.begin(), trace.c_sn.end() - 1);
        ds.target.insert(ds.target.end(), er.begin() + 1, er.end());
    }

    // Evaluate the full library column by column; a descriptor that cannot be
    // evaluated on this data poisons only candidates that select it.
    const std::size_t m = lib.size();
    const std::size_t rows = ds.signals.size();
    ds.theta_full = Matrix(rows, m);
    ds.poisoned.assign(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
        SelectedLibrary one = SelectedLibrary::from_ids(lib, {static_cast<int>(j)});
        try {
            Matrix col = evaluate_features(one, ds.signals);
            for (std::size_t k = 0; k < rows; ++k) ds.theta_full.at(k, j) = col.at(k, 0);
        } catch (const EvaluationError&) {
            ds.poisoned[j] = 1;
            for (std::size_t k = 0; k < rows; ++k) ds.theta_full.at(k, j) = 0.0;
        }
    }
    ds.gram_full = GramSystem::from(ds.theta_full, ds.target);
    return ds;
}

RegressionDataset RegressionDataset::prepare(const FeatureLibrary& lib, const VoltageTrace& trace,
                                             const std::vector<double>& er) {
    return prepare(lib, std::vector<const VoltageTrace*>{&trace},
                   std::vector<const std::vector<double>*>{&er});
}

EvaluatedCandidate evaluate_candidate(const Genome& genome, const GaDataset& data,
                                      const GaConfig& cfg) {
    const FeatureLibrary& lib = *data.lib;
    EvaluatedCandidate cand;
    cand.genome = genome;

    auto fail = [&]() {
        cand.eval_failed = true;
        cand.feasible = false;
        cand.loss = kInf;
        cand.fitness = -kInf;
        cand.n_active = 0;
        return cand;
    };

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < genome.mask.size(); ++i) {
        if (!genome.mask[i]) continue;
        if (data.train.poisoned[i] || data.valid.poisoned[i]) return fail();
        idx.push_back(i);
    }
    if (idx.empty()) return fail();

    const GramSystem train_sys = data.train.gram_full.subset(idx);
    StridgeResult fit = stridge_solve(train_sys, genome.lambda1(), genome.lambda2(),
                                      cfg.stridge_max_iters);

    cand.mse_train = fit.training_mse;
    cand.n_active = 0;
    for (double v : fit.xi) cand.n_active += (v != 0.0);

    // assemble the self-contained model
    cand.model.descriptors.reserve(idx.size());
    for (std::size_t i : idx) cand.model.descriptors.push_back(lib.descriptors()[i]);
    cand.model.xi = fit.xi;
    cand.model.normalization = lib.normalization();
    cand.model.lambda1 = genome.lambda1();
    cand.model.lambda2 = genome.lambda2();
    cand.model.training_mse = fit.training_mse;
    cand.model.all_thresholded = fit.all_thresholded;
    cand.model.library_size = lib.size();

    if (cfg.free_running_fitness) {
        try {
            const auto e_hat = simulate_recursive(cand.model, data.valid.lfm_trace, 0.0);
            double sse = 0.0;
            for (std::size_t k = 0; k < e_hat.size(); ++k) {
                const double d = data.valid.er_full[k] - e_hat[k];
                sse += d * d;
            }
            cand.mse_valid = sse / static_cast<double>(e_hat.size());
        } catch (const DivergenceError&) {
            cand.mse_valid = kInf;
        }
    } else {
        // teacher-forced one-step residual on the validation split
        const GramSystem valid_sys = data.valid.gram_full.subset(idx);
        double cross = 0.0, quad = 0.0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            cross += fit.xi[i] * valid_sys.rhs[i];
            double gi = 0.0;
            for (std::size_t j = 0; j < idx.size(); ++j) gi += valid_sys.gram.at(i, j) * fit.xi[j];
            quad += fit.xi[i] * gi;
        }
        const double sse = valid_sys.target_sq_sum - 2.0 * cross + quad;
        cand.mse_valid = std::max(sse, 0.0) / static_cast<double>(valid_sys.rows);
    }

    const double complexity = cfg.raw_count_complexity
                                  ? static_cast<double>(cand.n_active)
                                  : static_cast<double>(cand.n_active) / static_cast<double>(lib.size());
    double loss = (1.0 - cfg.alpha - cfg.beta) * complexity;
    if (cfg.alpha > 0.0) loss += cfg.alpha * cand.mse_train;
    if (cfg.beta > 0.0) loss += cfg.beta * cand.mse_valid;
    cand.loss = loss;
    cand.fitness = 1.0 - loss;
    cand.feasible = cand.mse_train < cfg.epsilon;
    return cand;
}

const EvaluatedCandidate& tournament_select(const std::vector<EvaluatedCandidate>& population,
                                            int k, Rng& rng) {
    const std::size_t n = population.size();
    std::size_t best = rng.uniform_index(n);
    for (int i = 1; i < k; ++i) {
        const std::size_t pick = rng.uniform_index(n);
        if (better(population[pick], population[best])) best = pick;
    }
    return population[best];
}

namespace {

void repair_mask(std::vector<std::uint8_t>& mask, Rng& rng) {
    for (auto b : mask)
        if (b) return;
    mask[rng.uniform_index(mask.size())] = 1;
}

}  // namespace

std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, Rng& rng,
                                    const GaConfig& cfg) {
    Genome c1 = a, c2 = b;
    for (std::size_t i = 0; i < a.mask.size(); ++i) {
        if (rng.bernoulli(0.5)) {
            c1.mask[i] = a.mask[i];
            c2.mask[i] = b.mask[i];
        } else {
            c1.mask[i] = b.mask[i];
            c2.mask[i] = a.mask[i];
        }
    }
    const double w = rng.uniform();
    c1.log_lambda1 = w * a.log_lambda1 + (1.0 - w) * b.log_lambda1;
    c2.log_lambda1 = (1.0 - w) * a.log_lambda1 + w * b.log_lambda1;
    c1.log_lambda2 = w * a.log_lambda2 + (1.0 - w) * b.log_lambda2;
    c2.log_lambda2 = (1.0 - w) * a.log_lambda2 + w * b.log_lambda2;
    for (Genome* g : {&c1, &c2}) {
        g->log_lambda1 = std::clamp(g->log_lambda1, cfg.log_lambda1_min, cfg.log_lambda1_max);
        g->log_lambda2 = std::clamp(g->log_lambda2, cfg.log_lambda2_min, cfg.log_lambda2_max);
        repair_mask(g->mask, rng);
    }
    return {std::move(c1), std::move(c2)};
}

Genome mutate(const Genome& g, Rng& rng, const GaConfig& cfg, double mask_rate) {
    Genome out = g;
    for (auto& bit : out.mask)
        if (rng.bernoulli(mask_rate)) bit = !bit;
    if (cfg.mutation_sigma_lambda > 0.0) {
        out.log_lambda1 = std::clamp(out.log_lambda1 + cfg.mutation_sigma_lambda * rng.normal(),
                                     cfg.log_lambda1_min, cfg.log_lambda1_max);
        out.log_lambda2 = std::clamp(out.log_lambda2 + cfg.mutation_sigma_lambda * rng.normal(),
                                     cfg.log_lambda2_min, cfg.log_lambda2_max);
    }
    repair_mask(out.mask, rng);
    return out;
}

Genome random_genome(std::size_t library_size, Rng& rng, const GaConfig& cfg) {
    Genome g;
    g.mask.resize(library_size);
    for (auto& bit : g.mask) bit = rng.bernoulli(cfg.init_mask_density);
    g.log_lambda1 = rng.uniform(cfg.log_lambda1_min, cfg.log_lambda1_max);
    g.log_lambda2 = rng.uniform(cfg.log_lambda2_min, cfg.log_lambda2_max);
    repair_mask(g.mask, rng);
    return g;
}

namespace {

GenerationStats make_stats(int gen, const std::vector<EvaluatedCandidate>& pop) {
    GenerationStats st;
    st.generation = gen;
    const EvaluatedCandidate* best = &pop.front();
    for (const auto& c : pop)
        if (better(c, *best)) best = &c;
    st.best_fitness = best->fitness;
    st.best_n_active = best->n_active;
    st.best_mse_train = best->mse_train;
    st.best_mse_valid = best->mse_valid;
    double sum = 0.0;
    std::size_t cnt = 0;
    for (const auto& c : pop) {
        if (!c.feasible) continue;
        sum += c.fitness;
        ++cnt;
    }
    st.mean_fitness = cnt ? sum / static_cast<double>(cnt)
                          : std::numeric_limits<double>::quiet_NaN();
    return st;
}

}  // namespace

GaResult run_ga(const GaConfig& cfg, const GaDataset& data) {
    cfg.validate();
    if (data.lib == nullptr) throw ConfigError("ga dataset has no library");
    const std::size_t lib_size = data.lib->size();
    const double mask_rate = cfg.mutation_rate_mask > 0.0
                                 ? cfg.mutation_rate_mask
                                 : 1.0 / static_cast<double>(lib_size);

    const auto pop_size = static_cast<std::size_t>(cfg.population_size);
    std::vector<EvaluatedCandidate> pop(pop_size);
    {
        std::vector<Genome> genomes(pop_size);
        for (std::size_t i = 0; i < pop_size; ++i) {
            Rng rng = Rng::derive(cfg.seed, 0xFFFFFFFFULL, i);
            genomes[i] = random_genome(lib_size, rng, cfg);
        }
        parallel_for(pop_size, cfg.threads,
                     [&](std::size_t i) { pop[i] = evaluate_candidate(genomes[i], data, cfg); });
    }

    GaResult result;
    result.history.push_back(make_stats(0, pop));
    result.best = *std::max_element(pop.begin(), pop.end(),
                                    [](const auto& a, const auto& b) { return better(b, a); });
    result.generations_run = 0;

    int stagnation = 0;
    for (int gen = 1; gen <= cfg.generations; ++gen) {
        // variation operators run serially on per-pair derived streams, so
        // results do not depend on evaluation scheduling
        std::vector<Genome> children;
        children.reserve(pop_size);
        const std::size_t pairs = (pop_size + 1) / 2;
        for (std::size_t pair = 0; pair < pairs && children.size() < pop_size; ++pair) {
            Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(gen), pair);
            const Genome& p1 = tournament_select(pop, cfg.tournament_size, rng).genome;
            const Genome& p2 = tournament_select(pop, cfg.tournament_size, rng).genome;
            Genome c1 = p1, c2 = p2;
            if (rng.bernoulli(cfg.crossover_rate)) std::tie(c1, c2) = crossover(p1, p2, rng, cfg);
            c1 = mutate(c1, rng, cfg, mask_rate);
            c2 = mutate(c2, rng, cfg, mask_rate);
            children.push_back(std::move(c1));
            if (children.size() < pop_size) children.push_back(std::move(c2));
        }

        std::vector<EvaluatedCandidate> evaluated(children.size());
        parallel_for(children.size(), cfg.threads,
                     [&](std::size_t i) { evaluated[i] = evaluate_candidate(children[i], data, cfg); });

        std::size_t feasible_count = 0;
        for (const auto& c : pop) feasible_count += c.feasible;
        for (const auto& c : evaluated) feasible_count += c.feasible;
        const bool waive = feasible_count < 2;

        std::vector<EvaluatedCandidate> merged = pop;
        for (auto& c : evaluated)
            if (waive || c.feasible) merged.push_back(std::move(c));
        std::stable_sort(merged.begin(), merged.end(),
                         [](const auto& a, const auto& b) { return better(a, b); });
        merged.resize(pop_size);
        pop = std::move(merged);

        result.history.push_back(make_stats(gen, pop));
        result.generations_run = gen;

        const EvaluatedCandidate& cur = pop.front();  // sorted best-first
        if (better(cur, result.best)) {
            const bool improved = cur.fitness > result.best.fitness + 1e-9 ||
                                  (cur.feasible && !result.best.feasible);
            result.best = cur;
            stagnation = improved ? 0 : stagnation + 1;
        } else {
            ++stagnation;
        }
        if (stagnation >= cfg.stagnation_patience) break;
    }

    result.no_feasible_warning = !result.best.feasible;
    return result;
}

void save_history_csv(const std::filesystem::path& path,
                      const std::vector<GenerationStats>& history) {
    std::vector<double> gen, best_f, mean_f, best_n, best_mt, best_mv;
    for (const auto& h : history) {
        gen.push_back(h.generation);
        best_f.push_back(h.best_fitness);
        mean_f.push_back(h.mean_fitness);
        best_n.push_back(h.best_n_active);
        best_mt.push_back(h.best_mse_train);
        best_mv.push_back(h.best_mse_valid);
    }
    csvio::write_csv(path,
                     {"generation", "best_fitness", "mean_fitness", "best_n_active",
                      "best_mse_train", "best_mse_valid"},
                     {&gen, &best_f, &mean_f, &best_n, &best_mt, &best_mv});
}

}  // namespace graybatt
