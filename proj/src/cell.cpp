#include "graybatt/cell.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graybatt/errors.hpp"

namespace graybatt {

MonotoneCubic MonotoneCubic::from_table(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ParameterDomainError("ocv table needs >= 2 paired knots");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ParameterDomainError("ocv table x must be strictly increasing");
    const bool inc = y.back() > y.front();
    for (std::size_t i = 1; i < y.size(); ++i) {
        const double dy = y[i] - y[i - 1];
        if ((inc && dy < 0.0) || (!inc && dy > 0.0))
            throw ParameterDomainError("ocv table y must be monotone");
    }

    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        d[0] = d[1] = delta[0];
    } else {
        // interior slopes: weighted harmonic mean, zero across sign changes
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        auto endpoint = [](double h0, double h1, double d0, double d1) {
            double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (s * d0 <= 0.0)
                s = 0.0;
            else if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0))
                s = 3.0 * d0;
            return s;
        };
        d[0] = endpoint(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    MonotoneCubic c;
    c.x_ = std::move(x);
    c.y_ = std::move(y);
    c.d_ = std::move(d);
    return c;
}

double MonotoneCubic::operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

void ElectrodeParameters::validate(const char* label) const {
    auto positive_check = [&](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ParameterDomainError(std::string(label) + "." + field + " must be > 0");
    };
    positive_check(particle_radius, "particle_radius");
    positive_check(diffusion_coefficient, "diffusion_coefficient");
    positive_check(active_material_fraction, "active_material_fraction");
    positive_check(thickness, "thickness");
    positive_check(max_concentration, "max_concentration");
    positive_check(reaction_rate, "reaction_rate");
    positive_check(activation_energy, "activation_energy");
    positive_check(electrolyte_concentration, "electrolyte_concentration");
    if (!std::isfinite(current_density_scaling) || current_density_scaling == 0.0)
        throw ParameterDomainError(std::string(label) + ".current_density_scaling must be nonzero");
    if (!(initial_concentration > 0.0) || !(initial_concentration < max_concentration))
        throw ParameterDomainError(std::string(label) +
                                   ".initial_concentration must lie in (0, max_concentration)");
}

void CellParameters::validate() const {
    positive.validate("positive");
    negative.validate("negative");
    auto positive_check = [&](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ParameterDomainError(std::string("cell.") + field + " must be > 0");
    };
    positive_check(cell_thickness, "cell_thickness");
    positive_check(area, "area");
    positive_check(surface_area, "surface_area");
    positive_check(contact_resistance, "contact_resistance");
    positive_check(electrolyte_diffusivity, "electrolyte_diffusivity");
    positive_check(initial_electrolyte_concentration, "initial_electrolyte_concentration");
    positive_check(gamma_pos, "gamma_pos");
    positive_check(gamma_neg, "gamma_neg");
    positive_check(conductivity, "conductivity");
    positive_check(temperature, "temperature");
    positive_check(reference_temperature, "reference_temperature");
    positive_check(gas_constant, "gas_constant");
    positive_check(faraday_constant, "faraday_constant");
    positive_check(beta, "beta");
    if (!(transference_number > 0.0) || !(transference_number < 1.0))
        throw ParameterDomainError("cell.transference_number must lie in (0,1)");
    if (ocv_positive.empty() || ocv_negative.empty())
        throw ParameterDomainError("cell OCV tables must be provided");
}

CellParameters default_cell_parameters() {
    CellParameters p;

    p.positive.particle_radius = 3.6e-6;
    p.positive.diffusion_coefficient = 1.0e-14;
    p.positive.active_material_fraction = 0.445;
    p.positive.thickness = 7.0e-5;
    p.positive.max_concentration = 49500.0;
    p.positive.initial_concentration = 0.9 * 49500.0;  // stoichiometry 0.9 at full charge
    p.positive.reaction_rate = 4.8e-10;
    p.positive.activation_energy = 3.0e4;
    p.positive.electrolyte_concentration = 1000.0;

    p.negative.particle_radius = 5.0e-6;
    p.negative.diffusion_coefficient = 2.0e-14;
    p.negative.active_material_fraction = 0.51;
    p.negative.thickness = 7.35e-5;
    p.negative.max_concentration = 31080.0;
    p.negative.initial_concentration = 0.85 * 31080.0;
    p.negative.reaction_rate = 1.0e-9;
    p.negative.activation_energy = 3.5e4;
    p.negative.electrolyte_concentration = 1000.0;

    p.cell_thickness = 1.7e-4;
    p.area = 0.1;
    p.surface_area = 5.0;
    p.contact_resistance = 2.0e-3;
    p.electrolyte_diffusivity = 2.6e-10;
    p.initial_electrolyte_concentration = 1000.0;
    p.transference_number = 0.363;
    p.beta = 1.5;
    p.gamma_pos = 1.0;
    p.gamma_neg = 1.0;
    p.conductivity = 1.0;
    p.temperature = 298.15;
    p.reference_temperature = 298.15;

    // Signed kinetic scaling: magnitude 1/(a_s L A) with a_s = 3 eps/R, sign
    // chosen so a discharge current produces a voltage drop through both
    // overpotential terms.
    auto j_mag = [&](const ElectrodeParameters& e) {
        const double a_s = 3.0 * e.active_material_fraction / e.particle_radius;
        return 1.0 / (a_s * e.thickness * p.area);
    };
    p.positive.current_density_scaling = -j_mag(p.positive);
    p.negative.current_density_scaling = j_mag(p.negative);

    // Discharge lowers both surface stoichiometries, so the positive curve
    // rises with stoichiometry and the graphite-like negative curve falls.
    p.ocv_positive = MonotoneCubic::from_table(
        {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0},
        {3.00, 3.30, 3.55, 3.68, 3.76, 3.84, 3.93, 4.03, 4.15, 4.29, 4.40});
    p.ocv_negative = MonotoneCubic::from_table(
        {0.0, 0.02, 0.05, 0.10, 0.20, 0.30, 0.40, 0.50, 0.70, 0.90, 1.00},
        {1.20, 0.70, 0.50, 0.32, 0.22, 0.17, 0.14, 0.125, 0.10, 0.085, 0.08});

    return p;
}

}  // namespace graybatt
