#ifndef WVS_EXPERIMENTS_HPP
#define WVS_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wvs/config.hpp"

namespace wvs {

inline constexpr const char* kArtifactVersion = "0.1.0";

enum class TraceFormat { csv, jsonl };
TraceFormat parse_trace_format(std::string_view name);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// Shortest round-trip decimal; -0 prints as 0 and infinities as inf/-inf.
std::string format_number(double v);
std::string render_table(const Table& table, TraceFormat format);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ExperimentResult {
    std::string experiment;
    nlohmann::json config;  // resolved config
    std::vector<Check> checks;
    nlohmann::json results = nlohmann::json::object();
    std::vector<Table> tables;

    bool passed() const;
    nlohmann::json summary(TraceFormat format) const;
};

struct RunManifest {
    std::string experiment;
    std::string config_hash;
    std::string version = kArtifactVersion;
    std::vector<Check> verdicts;
    bool passed = false;
    double wall_seconds = 0.0;
    std::filesystem::path out_dir;
    std::vector<std::string> files;  // written files, manifest.json excluded

    nlohmann::json to_json() const;
};

// Names accepted in the "experiment" field, one per acceptance check.
const std::vector<std::string>& experiment_names();

// FNV-1a of the compact dump of the resolved config, as 16 hex digits.
std::string config_hash(const nlohmann::json& resolved);

// Runs the named experiment without touching the filesystem (except "determinism",
// which writes its nested runs under the experiment's output directory).
// Unknown names raise ConfigError listing the valid ones.
ExperimentResult evaluate_experiment(const ExperimentConfig& cfg);

// Output directory: $WVS_OUT_DIR/<experiment> when the variable is set, else cfg.out.
std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg);

// Writes summary.json, one trace file per table, and manifest.json (the only file
// holding wall time, so every other file is byte-reproducible).
RunManifest write_result(const ExperimentResult& result, const std::filesystem::path& dir,
                         TraceFormat format, double wall_seconds);

RunManifest run_experiment(const ExperimentConfig& cfg, TraceFormat format = TraceFormat::csv);

}  // namespace wvs

#endif
