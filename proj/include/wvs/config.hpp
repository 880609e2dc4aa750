#ifndef WVS_CONFIG_HPP
#define WVS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wvs/sources.hpp"
#include "wvs/wordcode.hpp"

namespace wvs {

// Schema violation; `json_path` points at the offending field ("$.model.dist").
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& json_path, const std::string& message)
        : std::runtime_error(json_path + ": " + message), json_path_(json_path) {}
    const std::string& json_path() const noexcept { return json_path_; }

private:
    std::string json_path_;
};

// Model JSON:
//   {"type":"iid","dist":[...]}
//   {"type":"markov","P":[[...],...],"init":[...]}
//   {"type":"mixture","weights":[...],"components":[<model>,...]}
// Probability vectors within 1e-9 of summing to 1 are renormalised; anything further
// off is rejected.
SourceModel model_from_json(const nlohmann::json& j, const std::string& path = "$");
nlohmann::json model_to_json(const SourceModel& model);

// Codebook JSON: {"input_alphabet":2,"output_alphabet":2,"code":["0","10"]}
WordFunction codebook_from_json(const nlohmann::json& j, const std::string& path = "$");
nlohmann::json codebook_to_json(const WordFunction& wf);

// A JSON object, or a path to a file holding one (relative to base_dir).
nlohmann::json load_json_ref(const nlohmann::json& ref, const std::filesystem::path& base_dir,
                             const std::string& path);

struct ExperimentConfig {
    std::string experiment;
    std::optional<SourceModel> model;
    std::map<std::string, SourceModel> models;  // extra named models
    std::optional<WordFunction> codebook;
    std::map<std::string, WordFunction> codebooks;  // extra named codebooks
    std::size_t horizon = 10'000;
    std::size_t paths = 100;
    std::uint64_t seed = 0;  // required in config files
    double tolerance = 0.02;
    std::string out = "results";
    nlohmann::json params = nlohmann::json::object();  // experiment-specific knobs
    std::filesystem::path base_dir = ".";

    // Fully resolved config (inline models/codebooks, defaults filled) for provenance.
    nlohmann::json to_json() const;
};

// Schema-checks a config document and fills documented defaults. Throws ConfigError.
ExperimentConfig validate_config_json(const nlohmann::json& doc,
                                      const std::filesystem::path& base_dir = ".");
ExperimentConfig validate_config(const std::filesystem::path& file);

}  // namespace wvs

#endif
