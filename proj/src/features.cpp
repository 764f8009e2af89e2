#include "graybatt/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "graybatt/errors.hpp"
#include "graybatt/kernels.hpp"

namespace graybatt {

namespace {

constexpr double kDomainEps = 1e-12;
constexpr double kTanClip = std::numbers::pi / 2.0 - 0.01;

double apply_family(BasisFamily f, double x) {
    switch (f) {
        case BasisFamily::pol: return x;
        case BasisFamily::cos: return std::cos(x);
        case BasisFamily::sin: return std::sin(x);
        case BasisFamily::tan: return std::tan(std::clamp(x, -kTanClip, kTanClip));
        case BasisFamily::cosh: return std::cosh(x);
        case BasisFamily::sinh: return std::sinh(x);
        case BasisFamily::tanh: return std::tanh(x);
        case BasisFamily::ln: return std::log(std::abs(x) + kDomainEps);
        case BasisFamily::exp: return std::exp(x);
        case BasisFamily::sqrt: return std::sqrt(std::abs(x) + kDomainEps);
    }
    return x;
}

}  // namespace

const std::vector<double>& SignalSeries::signal(std::size_t idx) const {
    switch (idx) {
        case 0: return er;
        case 1: return current;
        case 2: return csp;
        default: return csn;
    }
}

const char* family_name(BasisFamily f) {
    switch (f) {
        case BasisFamily::pol: return "pol";
        case BasisFamily::cos: return "cos";
        case BasisFamily::sin: return "sin";
        case BasisFamily::tan: return "tan";
        case BasisFamily::cosh: return "cosh";
        case BasisFamily::sinh: return "sinh";
        case BasisFamily::tanh: return "tanh";
        case BasisFamily::ln: return "ln";
        case BasisFamily::exp: return "exp";
        case BasisFamily::sqrt: return "sqrt";
    }
    return "?";
}

std::optional<BasisFamily> family_from_name(const std::string& name) {
    static const std::pair<const char*, BasisFamily> table[] = {
        {"pol", BasisFamily::pol},   {"cos", BasisFamily::cos},   {"sin", BasisFamily::sin},
        {"tan", BasisFamily::tan},   {"cosh", BasisFamily::cosh}, {"sinh", BasisFamily::sinh},
        {"tanh", BasisFamily::tanh}, {"ln", BasisFamily::ln},     {"exp", BasisFamily::exp},
        {"sqrt", BasisFamily::sqrt}};
    for (const auto& [n, f] : table)
        if (name == n) return f;
    return std::nullopt;
}

std::string BasisDescriptor::name() const {
    std::string mono;
    for (std::size_t s = 0; s < kNumSignals; ++s) {
        for (int e = 0; e < exponents[s]; ++e) {
            if (!mono.empty()) mono += "*";
            mono += kSignalNames[s];
        }
    }
    if (mono.empty()) mono = "1";
    if (family == BasisFamily::pol) return mono;
    return std::string(family_name(family)) + "(" + mono + ")";
}

std::pair<double, double> pooled_mean_std(const std::vector<const std::vector<double>*>& series,
                                          const char* label) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto* v : series) {
        for (double x : *v) sum += x;
        n += v->size();
    }
    if (n < 2)
        throw NormalizationError(label, std::string("signal '") + label + "' needs >= 2 samples");
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto* v : series) {
        for (double x : *v) {
            const double dx = x - mean;
            ss += dx * dx;
        }
    }
    const double var = ss / static_cast<double>(n);
    if (!(var > 0.0))
        throw NormalizationError(label, std::string("signal '") + label +
                                            "' has zero variance; cannot z-score");
    return {mean, std::sqrt(var)};
}

SignalStats fit_signal_stats(const std::vector<const SignalSeries*>& blocks) {
    SignalStats stats;
    for (std::size_t s = 0; s < kNumSignals; ++s) {
        std::vector<const std::vector<double>*> series;
        series.reserve(blocks.size());
        for (const auto* b : blocks) series.push_back(&b->signal(s));
        const auto [mean, stddev] = pooled_mean_std(series, kSignalNames[s]);
        stats.mean[s] = mean;
        stats.stddev[s] = stddev;
    }
    return stats;
}

FeatureLibrary FeatureLibrary::build(const LibraryConfig& config) {
    LibraryConfig cfg = config;
    if (cfg.preset == "ext81") {
        cfg.max_degree = 3;
        cfg.families = LibraryConfig{}.families;
    } else if (!cfg.preset.empty()) {
        throw ConfigError("unknown library preset '" + cfg.preset + "'");
    }
    if (cfg.max_degree < 1) throw ConfigError("library max_degree must be >= 1");
    if (cfg.families.empty()) throw ConfigError("library family set must not be empty");

    FeatureLibrary lib;
    auto push = [&lib](BasisFamily f, std::array<int, kNumSignals> exps) {
        BasisDescriptor d;
        d.id = static_cast<int>(lib.descriptors_.size());
        d.family = f;
        d.exponents = exps;
        lib.descriptors_.push_back(d);
    };

    const bool has_pol =
        std::find(cfg.families.begin(), cfg.families.end(), BasisFamily::pol) != cfg.families.end();

    // the constant term is always present
    push(BasisFamily::pol, {0, 0, 0, 0});

    std::vector<std::array<int, kNumSignals>> degree2;
    if (has_pol) {
        for (int d = 1; d <= cfg.max_degree; ++d) {
            for (int e0 = d; e0 >= 0; --e0) {
                for (int e1 = d - e0; e1 >= 0; --e1) {
                    for (int e2 = d - e0 - e1; e2 >= 0; --e2) {
                        const int e3 = d - e0 - e1 - e2;
                        push(BasisFamily::pol, {e0, e1, e2, e3});
                        if (d == 2) degree2.push_back({e0, e1, e2, e3});
                    }
                }
            }
        }
    }

    for (BasisFamily f : cfg.families) {
        if (f == BasisFamily::pol) continue;
        for (std::size_t s = 0; s < kNumSignals; ++s) {
            std::array<int, kNumSignals> exps{};
            exps[s] = 1;
            push(f, exps);
        }
    }

    if (cfg.preset == "ext81")
        for (const auto& exps : degree2) push(BasisFamily::tanh, exps);

    return lib;
}

void FeatureLibrary::fit_normalization(const std::vector<const SignalSeries*>& training_blocks) {
    stats_ = fit_signal_stats(training_blocks);
}

const SignalStats& FeatureLibrary::normalization() const {
    if (!stats_) throw ConfigError("feature library normalization has not been fitted");
    return *stats_;
}

void FeatureLibrary::normalize(const std::array<double, kNumSignals>& raw,
                               std::array<double, kNumSignals>& z) const {
    const SignalStats& st = normalization();
    for (std::size_t s = 0; s < kNumSignals; ++s) z[s] = (raw[s] - st.mean[s]) / st.stddev[s];
}

SelectedLibrary SelectedLibrary::all(const FeatureLibrary& lib) {
    SelectedLibrary s;
    s.parent = &lib;
    s.mask.assign(lib.size(), 1);
    return s;
}

SelectedLibrary SelectedLibrary::from_ids(const FeatureLibrary& lib, const std::vector<int>& ids) {
    SelectedLibrary s;
    s.parent = &lib;
    s.mask.assign(lib.size(), 0);
    for (int id : ids) {
        if (id < 0 || static_cast<std::size_t>(id) >= lib.size())
            throw ConfigError("descriptor id " + std::to_string(id) + " outside library");
        s.mask[static_cast<std::size_t>(id)] = 1;
    }
    return s;
}

std::size_t SelectedLibrary::count() const {
    std::size_t c = 0;
    for (auto b : mask) c += b;
    return c;
}

std::vector<int> SelectedLibrary::selected_ids() const {
    std::vector<int> ids;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) ids.push_back(static_cast<int>(i));
    return ids;
}

void SelectedLibrary::validate() const {
    if (parent == nullptr) throw ConfigError("selected library has no parent");
    if (mask.size() != parent->size()) throw ConfigError("selection mask length mismatch");
    if (count() == 0) throw ConfigError("selection must keep at least one descriptor");
}

double eval_descriptor(const BasisDescriptor& d, const std::array<double, kNumSignals>& z) {
    // multiply in signal order so the column evaluation path reproduces this
    // value bit-for-bit
    double mono = 1.0;
    for (std::size_t s = 0; s < kNumSignals; ++s)
        for (int e = 0; e < d.exponents[s]; ++e) mono *= z[s];
    return apply_family(d.family, mono);
}

Matrix evaluate_features(const SelectedLibrary& sel, const SignalSeries& signals) {
    sel.validate();
    const FeatureLibrary& lib = *sel.parent;
    const std::size_t n = signals.size();
    if (n == 0) throw ConfigError("evaluate_features: empty signals");
    if (signals.current.size() != n || signals.csp.size() != n || signals.csn.size() != n)
        throw ConfigError("evaluate_features: ragged signal series");

    const SignalStats& st = lib.normalization();
    std::array<std::vector<double>, kNumSignals> z;
    for (std::size_t s = 0; s < kNumSignals; ++s) {
        z[s].resize(n);
        kern::scale_shift(signals.signal(s).data(), st.mean[s], st.stddev[s], z[s].data(), n);
    }

    const auto ids = sel.selected_ids();
    const std::size_t m = ids.size();
    Matrix theta(n, m);

    std::vector<double> col(n);
    for (std::size_t j = 0; j < m; ++j) {
        const BasisDescriptor& d = lib.descriptors()[static_cast<std::size_t>(ids[j])];
        std::fill(col.begin(), col.end(), 1.0);
        for (std::size_t s = 0; s < kNumSignals; ++s)
            for (int e = 0; e < d.exponents[s]; ++e) kern::mul(col.data(), z[s].data(), col.data(), n);
        if (d.family != BasisFamily::pol)
            for (std::size_t k = 0; k < n; ++k) col[k] = apply_family(d.family, col[k]);
        for (std::size_t k = 0; k < n; ++k) {
            if (!std::isfinite(col[k]))
                throw EvaluationError(d.id, k,
                                      "descriptor " + d.name() + " (id " + std::to_string(d.id) +
                                          ") non-finite at row " + std::to_string(k));
            theta.at(k, j) = col[k];
        }
    }
    return theta;
}

}  // namespace graybatt
