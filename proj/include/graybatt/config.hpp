#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "graybatt/cell.hpp"
#include "graybatt/cycle.hpp"
#include "graybatt/features.hpp"
#include "graybatt/ga.hpp"
#include "graybatt/reference.hpp"

namespace graybatt {

// Flat [section] key = value file. Values: number, bool, "string", or
// [array] of numbers/strings. '#' starts a comment.
class ConfigFile {
public:
    using Value = std::variant<double, bool, std::string, std::vector<double>,
                               std::vector<std::string>>;

    static ConfigFile parse_file(const std::filesystem::path& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    std::vector<double> get_double_array(const std::string& section, const std::string& key) const;
    std::vector<std::string> get_string_array(const std::string& section,
                                              const std::string& key) const;

private:
    const Value* find(const std::string& section, const std::string& key) const;
    std::map<std::string, std::map<std::string, Value>> sections_;
    std::string origin_;
};

// Perturbation scales and corruption applied by the built-in reference
// surrogate.
struct SurrogateSettings {
    double d_pos_scale = 1.0;
    double d_neg_scale = 1.0;
    double k_pos_scale = 1.0;
    double k_neg_scale = 1.0;
    double kappa_scale = 1.0;
    double noise_std = 0.0;
    std::vector<int> planted_ids;
    std::vector<double> planted_coeffs;

    CellParameters perturbed_params(const CellParameters& base) const;
    SurrogateSpec make_spec(const CellParameters& base, std::uint64_t seed) const;
};

enum class ReferenceMode { surrogate, files };

// Everything a run needs; every field carries a built-in default so the CLI
// works without a config file.
struct RunConfig {
    CellParameters cell = default_cell_parameters();
    LibraryConfig library;
    GaConfig ga;
    SurrogateSettings surrogate;
    CycleBuildSpec cycle;
    ReferenceMode reference_mode = ReferenceMode::surrogate;
    double dt = 1.0;

    static RunConfig defaults() { return RunConfig{}; }
    static RunConfig from_file(const std::filesystem::path& path);
    static RunConfig from_config(const ConfigFile& file);
};

}  // namespace graybatt
