#pragma once

#include <map>
#include <string>
#include <vector>

#include "fswc/birman_schwinger.hpp"
#include "fswc/harmonic.hpp"
#include "fswc/potentials.hpp"

namespace fswc::cli {

/// Flat key=value configuration with [section] headers; keys are stored as
/// "section.key". '#' starts a comment.
class ConfigMap {
  public:
    static ConfigMap load(const std::string& path);
    static ConfigMap from_string(const std::string& text);

    void apply_override(const std::string& spec);  // "section.key=value"
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_str(const std::string& key, const std::string& dflt) const;
    std::string require_str(const std::string& key) const;
    Real get_real(const std::string& key, Real dflt) const;
    Real require_real(const std::string& key) const;
    int get_int(const std::string& key, int dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;
    std::vector<Real> get_real_list(const std::string& key) const;

    /// sorted "key = value" lines; input to the config hash and the manifest
    std::string canonical() const;
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

Potential potential_from_config(const ConfigMap& cfg);
KineticSymbol symbol_from_config(const ConfigMap& cfg);
BoxGrid grid_from_config(const ConfigMap& cfg, const Potential* V);

}  // namespace fswc::cli
