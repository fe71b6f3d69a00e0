#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace gaussnet {

struct Diagnostic {
    std::string path;     // dotted field path, e.g. "network.p_w"
    std::string message;
};

struct ValidationReport {
    std::vector<Diagnostic> errors;
    bool ok() const { return errors.empty(); }
    std::string to_string() const;
};

// A scenario configuration: JSON document plus the directory it was loaded
// from (file references resolve against it).
class ScenarioConfig {
  public:
    static ScenarioConfig from_file(const std::string& path);
    static ScenarioConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");

    const nlohmann::json& raw() const { return json_; }
    nlohmann::json& raw() { return json_; }
    std::string id() const;
    std::string base_dir() const { return base_dir_; }
    std::string resolve_path(const std::string& rel) const;
    uint64_t hash() const;  // FNV-1a of the canonical dump

    // Dotted-path override, e.g. set("window.samples", "100").  Values parse
    // as JSON when possible, else as strings.
    void set_override(const std::string& dotted, const std::string& value);

  private:
    nlohmann::json json_;
    std::string base_dir_;
};

ValidationReport validate_config(const ScenarioConfig& config);

struct ScenarioResult {
    std::vector<std::string> output_files;  // paths written
    std::string summary;                    // one-screen human summary
    nlohmann::json metrics;                 // machine-readable aggregates
};

// Executes the scenario, writes CSV outputs plus a manifest into the output
// directory, and returns the aggregates.  `workers` <= 0 means the config /
// environment default.
ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& output_dir = "",
                            int workers = 0);

struct CatalogEntry {
    std::string id;
    std::string figures;      // figure ids this scenario reproduces
    std::string description;
    std::string desk_config;  // bundled config paths (relative to repo root)
    std::string paper_config;
};

std::vector<CatalogEntry> scenario_catalog();

std::string catalog_json();

}  // namespace gaussnet
