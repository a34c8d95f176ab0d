#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rmtlab {

/// Flattened key=value config with [section] prefixes ("section.key").
class ParsedConfig {
public:
    static ParsedConfig parse_string(const std::string& text);
    static ParsedConfig parse_file(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback = "") const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key, double fallback) const;
    uint64_t get_u64(const std::string& key, uint64_t fallback) const;
    std::vector<int> get_int_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    /// Sorted key=value serialization (hash input; stable across reorderings).
    std::string canonical() const;
    uint64_t content_hash = 0; // hash of the raw file bytes, when file-loaded

private:
    std::map<std::string, std::string> kv_;
};

struct ReportRow {
    std::string statistic;
    int n = 0;
    double e = 0.0, eta = 0.0;
    double value = 0.0;
    double stderr_ = 0.0;
    double envelope = 0.0;
    std::string status; // "pass", "fail", "info", "na"
    int samples = 0;
};

struct ExperimentReport {
    std::string experiment;
    uint64_t config_hash = 0;
    uint64_t content_hash = 0;
    uint64_t master_seed = 0;
    std::string tool_version;
    double wall_seconds = 0.0;
    std::vector<ReportRow> rows;

    bool all_passed() const;
    /// Deterministic CSV body (no wall time; byte-identical under rerun).
    std::string to_csv() const;
    /// JSON summary; mirrors the CSV and adds the wall time.
    std::string to_json() const;
};

/// Test-envelope constants (the generous factors in the assertions). Values
/// live in a compiled defaults table and may be overridden per config under
/// [envelopes] or via a separate key=value file.
class Envelopes {
public:
    Envelopes();
    double get(const std::string& name) const;
    void set(const std::string& name, double v) { values_[name] = v; }
    void load_overrides(const ParsedConfig& cfg);

private:
    std::map<std::string, double> values_;
};

std::vector<std::string> experiment_names();

// Forward declaration; defined in ensembles.hpp.
struct EnsembleSpec;

/// Serialize an ensemble spec to its [ensemble] config block and parse one
/// back; round-trips through ParsedConfig.
std::string ensemble_to_config(const EnsembleSpec& spec);
EnsembleSpec ensemble_from_config(const ParsedConfig& cfg, int n_fallback = 0);

/// Run the named experiment from a parsed config. Unknown names throw
/// std::invalid_argument; invalid spec blocks throw before any sampling.
ExperimentReport run_experiment(const ParsedConfig& cfg, int threads = 0);

/// Validate all spec blocks of a config without sampling.
void validate_config(const ParsedConfig& cfg);

/// Full CLI: run / list-experiments / validate. Returns the process exit
/// code (0 ok, 1 failed checks, 2 unknown experiment, 3 invalid spec,
/// 4 I/O failure).
int run_cli(int argc, char** argv);

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace rmtlab
