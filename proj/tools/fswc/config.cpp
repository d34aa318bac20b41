#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fswc::cli {

namespace {
std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}
}  // namespace

ConfigMap ConfigMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

ConfigMap ConfigMap::from_string(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected key=value, got: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key in: " + line);
        cfg.kv_[section.empty() ? key : section + "." + key] = val;
    }
    return cfg;
}

void ConfigMap::apply_override(const std::string& spec) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("--override expects section.key=value");
    kv_[trim(spec.substr(0, eq))] = trim(spec.substr(eq + 1));
}

std::string ConfigMap::get_str(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

std::string ConfigMap::require_str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing required key " + key);
    return it->second;
}

Real ConfigMap::get_real(const std::string& key, Real dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    try {
        return std::stod(it->second);
    } catch (...) {
        throw ConfigError("config: " + key + " is not a number: " + it->second);
    }
}

Real ConfigMap::require_real(const std::string& key) const {
    if (!has(key)) throw ConfigError("config: missing required key " + key);
    return get_real(key, 0);
}

int ConfigMap::get_int(const std::string& key, int dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    try {
        return std::stoi(it->second);
    } catch (...) {
        throw ConfigError("config: " + key + " is not an integer: " + it->second);
    }
}

bool ConfigMap::get_bool(const std::string& key, bool dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: " + key + " is not a boolean: " + it->second);
}

std::vector<Real> ConfigMap::get_real_list(const std::string& key) const {
    std::vector<Real> out;
    auto it = kv_.find(key);
    if (it == kv_.end()) return out;
    std::istringstream ss(it->second);
    std::string tok;
    while (ss >> tok) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw ConfigError("config: bad number '" + tok + "' in " + key);
        }
    }
    return out;
}

std::string ConfigMap::canonical() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
    return os.str();
}

Potential potential_from_config(const ConfigMap& cfg) {
    int d = cfg.get_int("potential.d", 2);
    Complex A(cfg.get_real("potential.amplitude", 1.0), cfg.get_real("potential.amplitude_im", 0.0));
    std::string model = cfg.get_str("potential.model", "gaussian");
    if (model == "gaussian")
        return Potential::gaussian(d, A, cfg.get_real("potential.width", 1.0));
    if (model == "ball") return Potential::ball(d, A, cfg.get_real("potential.radius", 1.0));
    if (model == "power")
        return Potential::power_law(d, cfg.require_real("potential.a"),
                                    cfg.require_real("potential.b"), A);
    if (model == "logdecay") return Potential::log_decay(d, cfg.require_real("potential.b"), A);
    if (model == "slab")
        return Potential::oscillating_slab(d, cfg.get_real("potential.eps", 0.5), A);
    throw ConfigError("config: unknown potential.model " + model +
                      " (gaussian|ball|power|logdecay|slab)");
}

KineticSymbol symbol_from_config(const ConfigMap& cfg) {
    int d = cfg.get_int("potential.d", 2);
    d = cfg.get_int("symbol.d", d);
    Real tau = cfg.get_real("symbol.tau", 0.5);
    std::string conv = cfg.get_str("symbol.convention", "lebesgue");
    MeasureConvention mc;
    if (conv == "lebesgue")
        mc = MeasureConvention::lebesgue_dw;
    else if (conv == "weighted")
        mc = MeasureConvention::weighted_ds;
    else
        throw ConfigError("config: symbol.convention must be lebesgue|weighted");
    std::string prof = cfg.get_str("symbol.profile", "bcs");
    if (prof == "bcs") return KineticSymbol::bcs(d, tau, mc);
    if (prof == "power_shift")
        return KineticSymbol::power_shift(d, cfg.require_real("symbol.s"), tau, mc);
    throw ConfigError("config: symbol.profile must be bcs|power_shift");
}

BoxGrid grid_from_config(const ConfigMap& cfg, const Potential* V) {
    int d = cfg.get_int("potential.d", 2);
    Real L = cfg.get_real("grid.L", 16.0);
    int N = cfg.get_int("grid.N", 256);
    if (cfg.get_bool("grid.avoid_fermi_lattice", false))
        L = BoxGrid::side_avoiding_fermi_lattice(d, L);
    return BoxGrid::make(d, L, N, V);
}

}  // namespace fswc::cli
