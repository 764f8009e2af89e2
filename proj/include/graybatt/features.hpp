#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graybatt/linalg.hpp"

namespace graybatt {

// Regression signal order everywhere: [er, i, csp, csn]
// (voltage error, applied current, positive and negative surface concentration).
inline constexpr std::size_t kNumSignals = 4;
inline constexpr std::array<const char*, kNumSignals> kSignalNames = {"er", "i", "csp", "csn"};

struct SignalSeries {
    std::vector<double> er;
    std::vector<double> current;
    std::vector<double> csp;
    std::vector<double> csn;

    std::size_t size() const { return er.size(); }
    const std::vector<double>& signal(std::size_t idx) const;
};

enum class BasisFamily : std::uint8_t { pol, cos, sin, tan, cosh, sinh, tanh, ln, exp, sqrt };

const char* family_name(BasisFamily f);
std::optional<BasisFamily> family_from_name(const std::string& name);

// One candidate basis function: family applied to a monomial of the four
// z-scored signals. family == pol with all exponents zero is the constant.
struct BasisDescriptor {
    int id = 0;  // stable index into the full library
    BasisFamily family = BasisFamily::pol;
    std::array<int, kNumSignals> exponents{};

    int degree() const { return exponents[0] + exponents[1] + exponents[2] + exponents[3]; }
    std::string name() const;

    bool operator==(const BasisDescriptor&) const = default;
};

struct SignalStats {
    std::array<double, kNumSignals> mean{};
    std::array<double, kNumSignals> stddev{{1.0, 1.0, 1.0, 1.0}};

    bool operator==(const SignalStats&) const = default;
};

// Population mean/std pooled over series blocks in order. Throws
// NormalizationError (naming `label`) on < 2 samples or zero variance.
// Single arithmetic path shared by every consumer, so independently computed
// statistics of the same data are bit-identical.
std::pair<double, double> pooled_mean_std(const std::vector<const std::vector<double>*>& series,
                                          const char* label);

// Population z-score statistics over one or more signal blocks. Throws
// NormalizationError naming the offending signal when a series is constant
// or shorter than 2 samples.
SignalStats fit_signal_stats(const std::vector<const SignalSeries*>& blocks);

struct LibraryConfig {
    int max_degree = 2;
    std::vector<BasisFamily> families = {
        BasisFamily::pol,  BasisFamily::cos, BasisFamily::sin, BasisFamily::tan,
        BasisFamily::cosh, BasisFamily::sinh, BasisFamily::tanh, BasisFamily::ln,
        BasisFamily::exp,  BasisFamily::sqrt};
    // "": compose from max_degree+families; "ext81": 81-term preset
    // (degree-3 monomials, every non-polynomial family on single signals,
    // tanh on the ten degree-2 monomials).
    std::string preset;
};

// Ordered candidate set plus the normalization applied to its inputs.
class FeatureLibrary {
public:
    static FeatureLibrary build(const LibraryConfig& config);

    const std::vector<BasisDescriptor>& descriptors() const { return descriptors_; }
    std::size_t size() const { return descriptors_.size(); }

    void fit_normalization(const std::vector<const SignalSeries*>& training_blocks);
    void set_normalization(const SignalStats& stats) { stats_ = stats; }
    bool normalized() const { return stats_.has_value(); }
    const SignalStats& normalization() const;

    // raw[4] -> z[4]
    void normalize(const std::array<double, kNumSignals>& raw,
                   std::array<double, kNumSignals>& z) const;

private:
    std::vector<BasisDescriptor> descriptors_;
    std::optional<SignalStats> stats_;
};

// Boolean column selection over a parent library.
struct SelectedLibrary {
    const FeatureLibrary* parent = nullptr;
    std::vector<std::uint8_t> mask;

    static SelectedLibrary all(const FeatureLibrary& lib);
    static SelectedLibrary from_ids(const FeatureLibrary& lib, const std::vector<int>& ids);

    std::size_t count() const;
    std::vector<int> selected_ids() const;
    void validate() const;  // mask length matches, count >= 1
};

// Shared single-point evaluation used by both matrix building and recursive
// rollout. z holds the four normalized signals. Domain guards: ln/sqrt act on
// |arg| + 1e-12, tan clips its argument to (-pi/2 + 0.01, pi/2 - 0.01).
double eval_descriptor(const BasisDescriptor& d, const std::array<double, kNumSignals>& z);

// Theta matrix, rows = time steps, columns = selected descriptors in library
// order. Throws EvaluationError (descriptor id + row) on non-finite output.
Matrix evaluate_features(const SelectedLibrary& sel, const SignalSeries& signals);

}  // namespace graybatt
