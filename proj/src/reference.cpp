#include "graybatt/reference.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "graybatt/csv.hpp"
#include "graybatt/errors.hpp"
#include "graybatt/rng.hpp"

namespace graybatt {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Regressor-row view (all rows but the last), the rows a one-step-ahead fit
// normalizes over.
SignalSeries regressor_rows(const VoltageTrace& trace, const std::vector<double>& er) {
    const std::size_t n = trace.size();
    SignalSeries s;
    if (n < 2) throw ParameterDomainError("trace too short for regression rows");
    s.er.assign(er.begin(), er.end() - 1);
    s.current.assign(trace.current.begin(), trace.current.end() - 1);
    s.csp.assign(trace.c_sp.begin(), trace.c_sp.end() - 1);
    s.csn.assign(trace.c_sn.begin(), trace.c_sn.end() - 1);
    return s;
}

}  // namespace

void SurrogateSpec::validate(const FeatureLibrary& lib) const {
    if (noise_std < 0.0) throw ParameterDomainError("surrogate noise_std must be >= 0");
    for (const auto& [id, coeff] : planted_terms) {
        if (id < 0 || static_cast<std::size_t>(id) >= lib.size())
            throw ParameterDomainError("planted descriptor id " + std::to_string(id) +
                                       " outside the candidate library");
        if (!std::isfinite(coeff)) throw ParameterDomainError("planted coefficient must be finite");
    }
}

std::vector<double> compute_error_series(const ReferenceTrace& ref, const VoltageTrace& lfm) {
    const std::size_t n = std::min(ref.size(), lfm.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(ref.timestamps[k] - lfm.timestamps[k]) > 1e-9)
            throw AlignmentError(k, "reference/lfm traces disagree at sample " + std::to_string(k));
    }
    if (ref.size() != lfm.size())
        throw AlignmentError(n, "reference/lfm traces have different lengths (" +
                                     std::to_string(ref.size()) + " vs " + std::to_string(lfm.size()) +
                                     ")");
    std::vector<double> e(n);
    for (std::size_t k = 0; k < n; ++k) e[k] = ref.v_ref[k] - lfm.v_lfm[k];
    return e;
}

SurrogateGenerator::SurrogateGenerator(SurrogateSpec spec, CellParameters base,
                                       const FeatureLibrary& lib,
                                       const std::vector<DriveCycle>& training_cycles)
    : spec_(std::move(spec)), base_(std::move(base)), lib_(&lib) {
    spec_.validate(lib);
    if (!has_planted()) return;
    if (training_cycles.empty())
        throw ParameterDomainError("surrogate with planted terms needs >= 1 training cycle");

    // Base and perturbed traces per training cycle; the discrepancy component
    // of the error is fixed, only the planted component depends on the stats.
    std::vector<VoltageTrace> base_traces;
    std::vector<std::vector<double>> delta_v;
    for (const auto& cycle : training_cycles) {
        base_traces.push_back(simulate_cycle(base_, cycle).trace);
        const auto pert = simulate_cycle(spec_.perturbed, cycle).trace;
        std::vector<double> dv(cycle.size());
        for (std::size_t k = 0; k < dv.size(); ++k)
            dv[k] = pert.v_lfm[k] - base_traces.back().v_lfm[k];
        delta_v.push_back(std::move(dv));
    }

    // Current/concentration statistics come straight off the base traces
    // (regressor rows, the rows a one-step fit normalizes over).
    for (std::size_t s = 1; s < kNumSignals; ++s) {
        std::vector<std::vector<double>> rows;
        for (const auto& t : base_traces) {
            const auto& src = s == 1 ? t.current : (s == 2 ? t.c_sp : t.c_sn);
            rows.emplace_back(src.begin(), src.end() - 1);
        }
        std::vector<const std::vector<double>*> ptrs;
        for (const auto& r : rows) ptrs.push_back(&r);
        const auto [mean, stddev] = pooled_mean_std(ptrs, kSignalNames[s]);
        stats_.mean[s] = mean;
        stats_.stddev[s] = stddev;
    }

    // The error-signal statistics must equal the statistics of the error
    // series the recursion produces. The produced std falls as the assumed
    // std rises (stronger normalization weakens the feedback) and likewise
    // for the mean, so the self-consistent pair is found by nested bisection:
    // mean inner, std outer. Dynamics with no finite-sample fixed point
    // (error feedback too strong for their drive) are rejected.

    // pooled moments of the error rows for candidate stats; nullopt when the
    // recursion blows past the divergence guard
    auto moments = [&](double mu, double sigma) -> std::optional<std::pair<double, double>> {
        SignalStats st = stats_;
        st.mean[0] = mu;
        st.stddev[0] = sigma;
        std::vector<std::vector<double>> e_rows;
        try {
            for (std::size_t c = 0; c < base_traces.size(); ++c) {
                const auto planted = rollout_with(base_traces[c], st);
                std::vector<double> e(planted.size() - 1);
                for (std::size_t k = 0; k + 1 < planted.size(); ++k)
                    e[k] = delta_v[c][k] + planted[k];
                e_rows.push_back(std::move(e));
            }
        } catch (const DivergenceError&) {
            return std::nullopt;
        }
        std::vector<const std::vector<double>*> ptrs;
        for (const auto& r : e_rows) ptrs.push_back(&r);
        return pooled_mean_std(ptrs, kSignalNames[0]);
    };

    // mean self-consistency at fixed sigma; produced-minus-assumed mean is
    // decreasing in the assumed mean
    auto solve_mu = [&](double sigma) -> std::optional<double> {
        auto h = [&](double mu) -> std::optional<double> {
            const auto m = moments(mu, sigma);
            if (!m) return std::nullopt;
            return m->first - mu;
        };
        double lo = -1.0, hi = 1.0;
        auto h_lo = h(lo), h_hi = h(hi);
        for (int grow = 0; grow < 60 && h_lo && h_hi && (*h_lo < 0.0 || *h_hi > 0.0); ++grow) {
            lo *= 2.0;
            hi *= 2.0;
            h_lo = h(lo);
            h_hi = h(hi);
        }
        if (!h_lo || !h_hi || *h_lo < 0.0 || *h_hi > 0.0) return std::nullopt;
        for (int it = 0; it < 90; ++it) {
            const double mid = 0.5 * (lo + hi);
            const auto hm = h(mid);
            if (!hm) return std::nullopt;
            (*hm >= 0.0 ? lo : hi) = mid;
            if (hi - lo <= 1e-16 * std::max(1.0, std::abs(mid))) break;
        }
        return 0.5 * (lo + hi);
    };

    // produced-minus-assumed std at the mean-consistent point; +inf stands
    // for "assumed std too small, recursion unstable"
    auto h_sigma = [&](double sigma) -> double {
        const auto mu = solve_mu(sigma);
        if (!mu) return std::numeric_limits<double>::infinity();
        const auto m = moments(*mu, sigma);
        if (!m) return std::numeric_limits<double>::infinity();
        return m->second - sigma;
    };

    double sig_hi = 1.0;
    int grow = 0;
    for (; grow < 80 && h_sigma(sig_hi) > 0.0; ++grow) sig_hi *= 2.0;
    if (grow == 80)
        throw ConfigError("surrogate planted dynamics have no self-consistent normalization; "
                          "weaken the error-feedback coefficient or strengthen the drive terms");
    double sig_lo = sig_hi / 2.0;
    while (h_sigma(sig_lo) <= 0.0) {
        sig_hi = sig_lo;
        sig_lo /= 2.0;
        if (sig_lo < 1e-300) break;
    }
    for (int it = 0; it < 110; ++it) {
        const double mid = 0.5 * (sig_lo + sig_hi);
        (h_sigma(mid) > 0.0 ? sig_lo : sig_hi) = mid;
        if (sig_hi - sig_lo <= 1e-16 * sig_hi) break;
    }

    const double sigma_star = sig_hi;
    const auto mu_star = solve_mu(sigma_star);
    if (!mu_star)
        throw ConfigError("surrogate normalization fixed point did not converge");
    stats_.mean[0] = *mu_star;
    stats_.stddev[0] = sigma_star;

    // the gate: generated-data statistics must reproduce the stats in use
    const auto check = moments(stats_.mean[0], stats_.stddev[0]);
    if (!check || std::abs(check->first - stats_.mean[0]) > 1e-12 * sigma_star ||
        std::abs(check->second - sigma_star) > 1e-12 * sigma_star)
        throw ConfigError("surrogate normalization fixed point did not converge; "
                          "planted dynamics may be unstable");
}

std::vector<double> SurrogateGenerator::planted_rollout(const VoltageTrace& base_trace) const {
    return rollout_with(base_trace, stats_);
}

std::vector<double> SurrogateGenerator::rollout_with(const VoltageTrace& base_trace,
                                                     const SignalStats& st) const {
    const std::size_t n = base_trace.size();
    std::vector<double> e_hat(n, 0.0);
    if (!has_planted() || n == 0) return e_hat;

    const auto& descs = lib_->descriptors();
    std::array<double, kNumSignals> raw{}, z{};
    for (std::size_t k = 0; k + 1 < n; ++k) {
        raw = {e_hat[k], base_trace.current[k], base_trace.c_sp[k], base_trace.c_sn[k]};
        for (std::size_t s = 0; s < kNumSignals; ++s)
            z[s] = (raw[s] - st.mean[s]) / st.stddev[s];
        double next = 0.0;
        for (const auto& [id, coeff] : spec_.planted_terms) {
            const double val = eval_descriptor(descs[static_cast<std::size_t>(id)], z);
            if (!std::isfinite(val))
                throw EvaluationError(id, k, "planted descriptor " + std::to_string(id) +
                                                 " non-finite during surrogate generation");
            next += coeff * val;
        }
        if (!std::isfinite(next) || std::abs(next) > 10.0)
            throw DivergenceError(k + 1, "planted error recursion diverged at step " +
                                             std::to_string(k + 1));
        e_hat[k + 1] = next;
    }
    return e_hat;
}

ReferenceTrace SurrogateGenerator::generate(const DriveCycle& cycle) const {
    const auto base_trace = simulate_cycle(base_, cycle).trace;
    const auto pert_trace = simulate_cycle(spec_.perturbed, cycle).trace;
    const auto planted = planted_rollout(base_trace);

    ReferenceTrace ref;
    ref.timestamps = cycle.timestamps;
    ref.current = cycle.current;
    ref.cycle_name = cycle.name;
    ref.source_tag = ReferenceTrace::Source::surrogate;
    ref.v_ref.resize(cycle.size());

    if (spec_.noise_std > 0.0) {
        Rng rng = Rng::derive(spec_.seed, fnv1a(cycle.name), 0x522e0a7eULL);
        for (std::size_t k = 0; k < ref.v_ref.size(); ++k)
            ref.v_ref[k] = pert_trace.v_lfm[k] + planted[k] + rng.normal(0.0, spec_.noise_std);
    } else {
        for (std::size_t k = 0; k < ref.v_ref.size(); ++k)
            ref.v_ref[k] = pert_trace.v_lfm[k] + planted[k];
    }
    return ref;
}

ReferenceTrace generate_surrogate_trace(const SurrogateSpec& spec, const DriveCycle& cycle,
                                        const CellParameters& p_base, const FeatureLibrary& lib) {
    SurrogateGenerator gen(spec, p_base, lib, {cycle});
    return gen.generate(cycle);
}

ReferenceTrace load_reference_csv(const std::filesystem::path& path) {
    auto t = csvio::read_csv(path, {"t_s", "current_a", "v_ref_v"});
    ReferenceTrace r;
    r.timestamps = std::move(t.columns[0]);
    r.current = std::move(t.columns[1]);
    r.v_ref = std::move(t.columns[2]);
    r.cycle_name = path.stem().string();
    r.source_tag = ReferenceTrace::Source::ingested;

    if (r.size() < 2) throw ParseError(path.string(), 2, path.string() + ": needs >= 2 samples");
    const double dt = r.timestamps[1] - r.timestamps[0];
    if (!(dt > 0.0))
        throw ParseError(path.string(), 3, path.string() + ": timestamps must be increasing");
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (std::abs((r.timestamps[i] - r.timestamps[i - 1]) - dt) > 1e-9)
            throw ParseError(path.string(), i + 2,
                             path.string() + ":" + std::to_string(i + 2) + ": non-uniform timestamp");
    }
    return r;
}

void save_reference_csv(const std::filesystem::path& path, const ReferenceTrace& ref) {
    csvio::write_csv(path, {"t_s", "current_a", "v_ref_v"},
                     {&ref.timestamps, &ref.current, &ref.v_ref});
}

}  // namespace graybatt
