#pragma once

#include <vector>

namespace graybatt {

// Monotone cubic interpolation (Fritsch-Carlson) over tabulated knots.
// Input data must be strictly monotone in x and monotone in y; evaluation
// clamps x to the knot range.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    static MonotoneCubic from_table(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    bool empty() const { return x_.empty(); }
    const std::vector<double>& knots_x() const { return x_; }
    const std::vector<double>& knots_y() const { return y_; }

private:
    std::vector<double> x_, y_, d_;  // knots and knot slopes
};

// Physical constants of one electrode. current_density_scaling is the signed
// factor multiplying the applied current in the kinetic overpotential; all
// other fields are strictly positive.
struct ElectrodeParameters {
    double particle_radius = 0.0;           // m
    double diffusion_coefficient = 0.0;     // m^2/s
    double active_material_fraction = 0.0;  // -
    double thickness = 0.0;                 // m
    double max_concentration = 0.0;         // mol/m^3
    double initial_concentration = 0.0;     // mol/m^3
    double reaction_rate = 0.0;             // exchange-current rate constant
    double activation_energy = 0.0;         // J/mol
    double electrolyte_concentration = 0.0; // mol/m^3
    double current_density_scaling = 0.0;   // signed, 1/m^2 scale

    void validate(const char* label) const;
};

struct CellParameters {
    ElectrodeParameters positive;
    ElectrodeParameters negative;

    double cell_thickness = 0.0;       // m
    double area = 0.0;                 // m^2 (electrode plate area)
    double surface_area = 0.0;         // m^2 (total interfacial area)
    double contact_resistance = 0.0;   // ohm
    double electrolyte_diffusivity = 0.0;            // m^2/s
    double initial_electrolyte_concentration = 0.0;  // mol/m^3
    double transference_number = 0.0;  // in (0,1)
    double beta = 0.0;                 // -
    double gamma_pos = 0.0;            // -
    double gamma_neg = 0.0;            // -
    double conductivity = 0.0;         // S/m
    double temperature = 0.0;          // K
    double reference_temperature = 0.0;// K
    double gas_constant = 8.31446261815324;   // J/(mol K)
    double faraday_constant = 96485.33212331; // C/mol

    MonotoneCubic ocv_positive;  // stoichiometry in [0,1] -> volts
    MonotoneCubic ocv_negative;

    void validate() const;
};

// Literature-plausible NMC/graphite parameter set; every field can be
// overridden from the config file.
CellParameters default_cell_parameters();

}  // namespace graybatt
