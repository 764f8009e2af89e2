#include "graybatt/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "graybatt/errors.hpp"

namespace graybatt {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// strips a trailing comment that is not inside quotes
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

bool parse_number(const std::string& s, double& out) {
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

ConfigFile::Value parse_scalar(const std::string& raw, const std::string& origin, std::size_t line) {
    const std::string s = trim(raw);
    if (s.empty()) throw ParseError(origin, line, origin + ":" + std::to_string(line) + ": empty value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ParseError(origin, line, origin + ":" + std::to_string(line) + ": unterminated string");
        return s.substr(1, s.size() - 2);
    }
    if (s == "true") return true;
    if (s == "false") return false;
    double v = 0.0;
    if (parse_number(s, v)) return v;
    return s;  // bare string
}

std::vector<std::string> split_top_level(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    bool quoted = false;
    for (char ch : s) {
        if (ch == '"') quoted = !quoted;
        if (ch == ',' && !quoted) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!trim(cur).empty() || !parts.empty()) parts.push_back(cur);
    return parts;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError(origin, lineno,
                                 origin + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ParseError(origin, lineno,
                                 origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin, lineno,
                             origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError(origin, lineno, origin + ":" + std::to_string(lineno) + ": empty key");

        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw ParseError(origin, lineno,
                                 origin + ":" + std::to_string(lineno) + ": unterminated array");
            const auto inner = value.substr(1, value.size() - 2);
            const auto parts = split_top_level(inner);
            std::vector<double> nums;
            std::vector<std::string> strs;
            bool all_num = true;
            for (const auto& p : parts) {
                const auto v = parse_scalar(p, origin, lineno);
                if (std::holds_alternative<double>(v) && all_num) {
                    nums.push_back(std::get<double>(v));
                } else {
                    all_num = false;
                }
                if (std::holds_alternative<std::string>(v))
                    strs.push_back(std::get<std::string>(v));
                else if (std::holds_alternative<double>(v))
                    strs.push_back(trim(p));
                else
                    throw ParseError(origin, lineno,
                                     origin + ":" + std::to_string(lineno) + ": bad array element");
            }
            if (all_num && !nums.empty())
                cfg.sections_[section][key] = std::move(nums);
            else
                cfg.sections_[section][key] = std::move(strs);
        } else {
            cfg.sections_[section][key] = parse_scalar(value, origin, lineno);
        }
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path.string());
}

const ConfigFile::Value* ConfigFile::find(const std::string& section, const std::string& key) const {
    const auto sit = sections_.find(section);
    if (sit == sections_.end()) return nullptr;
    const auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    return &kit->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    const Value* v = find(section, key);
    if (!v) return fallback;
    if (const auto* d = std::get_if<double>(v)) return *d;
    throw ConfigError(origin_ + ": [" + section + "] " + key + " must be a number");
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    const double d = get_double(section, key, static_cast<double>(fallback));
    return static_cast<int>(d);
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const Value* v = find(section, key);
    if (!v) return fallback;
    if (const auto* b = std::get_if<bool>(v)) return *b;
    throw ConfigError(origin_ + ": [" + section + "] " + key + " must be true/false");
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    const Value* v = find(section, key);
    if (!v) return fallback;
    if (const auto* s = std::get_if<std::string>(v)) return *s;
    throw ConfigError(origin_ + ": [" + section + "] " + key + " must be a string");
}

std::vector<double> ConfigFile::get_double_array(const std::string& section,
                                                 const std::string& key) const {
    const Value* v = find(section, key);
    if (!v) return {};
    if (const auto* a = std::get_if<std::vector<double>>(v)) return *a;
    throw ConfigError(origin_ + ": [" + section + "] " + key + " must be a numeric array");
}

std::vector<std::string> ConfigFile::get_string_array(const std::string& section,
                                                      const std::string& key) const {
    const Value* v = find(section, key);
    if (!v) return {};
    if (const auto* a = std::get_if<std::vector<std::string>>(v)) return *a;
    if (const auto* s = std::get_if<std::string>(v)) return {*s};
    throw ConfigError(origin_ + ": [" + section + "] " + key + " must be a string array");
}

CellParameters SurrogateSettings::perturbed_params(const CellParameters& base) const {
    CellParameters p = base;
    p.positive.diffusion_coefficient *= d_pos_scale;
    p.negative.diffusion_coefficient *= d_neg_scale;
    p.positive.reaction_rate *= k_pos_scale;
    p.negative.reaction_rate *= k_neg_scale;
    p.conductivity *= kappa_scale;
    return p;
}

SurrogateSpec SurrogateSettings::make_spec(const CellParameters& base, std::uint64_t seed) const {
    if (planted_ids.size() != planted_coeffs.size())
        throw ConfigError("surrogate planted_ids and planted_coeffs must be paired arrays");
    SurrogateSpec spec;
    spec.perturbed = perturbed_params(base);
    spec.noise_std = noise_std;
    spec.seed = seed;
    for (std::size_t i = 0; i < planted_ids.size(); ++i)
        spec.planted_terms.emplace_back(planted_ids[i], planted_coeffs[i]);
    return spec;
}

namespace {

void load_electrode(const ConfigFile& f, const std::string& section, ElectrodeParameters& e) {
    e.particle_radius = f.get_double(section, "particle_radius", e.particle_radius);
    e.diffusion_coefficient = f.get_double(section, "diffusion_coefficient", e.diffusion_coefficient);
    e.active_material_fraction =
        f.get_double(section, "active_material_fraction", e.active_material_fraction);
    e.thickness = f.get_double(section, "thickness", e.thickness);
    e.max_concentration = f.get_double(section, "max_concentration", e.max_concentration);
    e.reaction_rate = f.get_double(section, "reaction_rate", e.reaction_rate);
    e.activation_energy = f.get_double(section, "activation_energy", e.activation_energy);
    e.electrolyte_concentration =
        f.get_double(section, "electrolyte_concentration", e.electrolyte_concentration);
    if (f.has(section, "initial_stoichiometry"))
        e.initial_concentration =
            f.get_double(section, "initial_stoichiometry", 0.5) * e.max_concentration;
}

}  // namespace

RunConfig RunConfig::from_config(const ConfigFile& f) {
    RunConfig cfg;

    load_electrode(f, "positive", cfg.cell.positive);
    load_electrode(f, "negative", cfg.cell.negative);

    auto& c = cfg.cell;
    c.cell_thickness = f.get_double("cell", "cell_thickness", c.cell_thickness);
    c.area = f.get_double("cell", "area", c.area);
    c.surface_area = f.get_double("cell", "surface_area", c.surface_area);
    c.contact_resistance = f.get_double("cell", "contact_resistance", c.contact_resistance);
    c.electrolyte_diffusivity = f.get_double("cell", "electrolyte_diffusivity", c.electrolyte_diffusivity);
    c.initial_electrolyte_concentration =
        f.get_double("cell", "initial_electrolyte_concentration", c.initial_electrolyte_concentration);
    c.transference_number = f.get_double("cell", "transference_number", c.transference_number);
    c.beta = f.get_double("cell", "beta", c.beta);
    c.gamma_pos = f.get_double("cell", "gamma_pos", c.gamma_pos);
    c.gamma_neg = f.get_double("cell", "gamma_neg", c.gamma_neg);
    c.conductivity = f.get_double("cell", "conductivity", c.conductivity);
    c.temperature = f.get_double("cell", "temperature", c.temperature);
    c.reference_temperature = f.get_double("cell", "reference_temperature", c.reference_temperature);
    c.gas_constant = f.get_double("cell", "gas_constant", c.gas_constant);
    c.faraday_constant = f.get_double("cell", "faraday_constant", c.faraday_constant);

    // kinetic current scaling: explicit value wins, otherwise keep the
    // auto-derived default recomputed for the loaded geometry
    auto auto_scaling = [&](const ElectrodeParameters& e) {
        const double a_s = 3.0 * e.active_material_fraction / e.particle_radius;
        return 1.0 / (a_s * e.thickness * c.area);
    };
    c.positive.current_density_scaling =
        f.get_double("positive", "current_density_scaling", -auto_scaling(c.positive));
    c.negative.current_density_scaling =
        f.get_double("negative", "current_density_scaling", auto_scaling(c.negative));

    auto ocv_pair = [&](const char* tkey, const char* vkey, const MonotoneCubic& fallback) {
        const auto t = f.get_double_array("cell", tkey);
        const auto v = f.get_double_array("cell", vkey);
        if (t.empty() && v.empty()) return fallback;
        if (t.size() != v.size() || t.size() < 2)
            throw ConfigError(std::string("cell.") + tkey + "/" + vkey +
                              " must be paired arrays of >= 2 knots");
        return MonotoneCubic::from_table(t, v);
    };
    c.ocv_positive = ocv_pair("ocv_positive_theta", "ocv_positive_volts", c.ocv_positive);
    c.ocv_negative = ocv_pair("ocv_negative_theta", "ocv_negative_volts", c.ocv_negative);

    cfg.dt = f.get_double("sim", "dt", cfg.dt);

    cfg.library.max_degree = f.get_int("library", "max_degree", cfg.library.max_degree);
    cfg.library.preset = f.get_string("library", "preset", cfg.library.preset);
    if (f.has("library", "families")) {
        cfg.library.families.clear();
        for (const auto& name : f.get_string_array("library", "families")) {
            const auto fam = family_from_name(name);
            if (!fam) throw ConfigError("unknown basis family '" + name + "'");
            cfg.library.families.push_back(*fam);
        }
    }

    auto& g = cfg.ga;
    g.population_size = f.get_int("ga", "population_size", g.population_size);
    g.generations = f.get_int("ga", "generations", g.generations);
    g.tournament_size = f.get_int("ga", "tournament_size", g.tournament_size);
    g.crossover_rate = f.get_double("ga", "crossover_rate", g.crossover_rate);
    g.mutation_rate_mask = f.get_double("ga", "mutation_rate_mask", g.mutation_rate_mask);
    g.mutation_sigma_lambda = f.get_double("ga", "mutation_sigma_lambda", g.mutation_sigma_lambda);
    g.alpha = f.get_double("ga", "alpha", g.alpha);
    g.beta = f.get_double("ga", "beta", g.beta);
    g.epsilon = f.get_double("ga", "epsilon", g.epsilon);
    g.stagnation_patience = f.get_int("ga", "stagnation_patience", g.stagnation_patience);
    g.log_lambda1_min = f.get_double("ga", "log_lambda1_min", g.log_lambda1_min);
    g.log_lambda1_max = f.get_double("ga", "log_lambda1_max", g.log_lambda1_max);
    g.log_lambda2_min = f.get_double("ga", "log_lambda2_min", g.log_lambda2_min);
    g.log_lambda2_max = f.get_double("ga", "log_lambda2_max", g.log_lambda2_max);
    g.init_mask_density = f.get_double("ga", "init_mask_density", g.init_mask_density);
    g.stridge_max_iters = f.get_int("ga", "stridge_max_iters", g.stridge_max_iters);
    g.raw_count_complexity = f.get_bool("ga", "raw_count_complexity", g.raw_count_complexity);
    g.free_running_fitness = f.get_bool("ga", "free_running_fitness", g.free_running_fitness);
    g.threads = static_cast<unsigned>(f.get_int("ga", "threads", static_cast<int>(g.threads)));

    auto& s = cfg.surrogate;
    s.d_pos_scale = f.get_double("surrogate", "d_pos_scale", s.d_pos_scale);
    s.d_neg_scale = f.get_double("surrogate", "d_neg_scale", s.d_neg_scale);
    s.k_pos_scale = f.get_double("surrogate", "k_pos_scale", s.k_pos_scale);
    s.k_neg_scale = f.get_double("surrogate", "k_neg_scale", s.k_neg_scale);
    s.kappa_scale = f.get_double("surrogate", "kappa_scale", s.kappa_scale);
    s.noise_std = f.get_double("surrogate", "noise_std", s.noise_std);
    {
        const auto ids = f.get_double_array("surrogate", "planted_ids");
        for (double id : ids) s.planted_ids.push_back(static_cast<int>(id));
        s.planted_coeffs = f.get_double_array("surrogate", "planted_coeffs");
        if (s.planted_ids.size() != s.planted_coeffs.size())
            throw ConfigError("surrogate planted_ids and planted_coeffs must be paired arrays");
    }

    auto& cy = cfg.cycle;
    cy.capacity_ah = f.get_double("cycle", "capacity_ah", cy.capacity_ah);
    cy.dt = f.get_double("cycle", "dt", cfg.dt);
    cy.charge_crate = f.get_double("cycle", "charge_crate", cy.charge_crate);
    cy.charge_s = f.get_double("cycle", "charge_s", cy.charge_s);
    cy.name = f.get_string("cycle", "name", cy.name);
    for (const auto& seg : f.get_string_array("cycle", "segments"))
        cy.segments.push_back(CycleSegment::parse(seg));

    const std::string mode = f.get_string("reference", "mode", "surrogate");
    if (mode == "surrogate")
        cfg.reference_mode = ReferenceMode::surrogate;
    else if (mode == "files")
        cfg.reference_mode = ReferenceMode::files;
    else
        throw ConfigError("reference.mode must be 'surrogate' or 'files'");

    cfg.cell.validate();
    return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    return from_config(ConfigFile::parse_file(path));
}

}  // namespace graybatt
