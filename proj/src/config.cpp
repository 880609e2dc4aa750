#include "wvs/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wvs/errors.hpp"

namespace wvs {
namespace {

constexpr double kRenormalizeTolerance = 1e-9;

using nlohmann::json;

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(path + "." + key, "missing required field");
    return *it;
}

std::vector<double> probability_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
    std::vector<double> p;
    double sum = 0.0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
        const double v = j[i].get<double>();
        if (!std::isfinite(v) || v < 0.0)
            throw ConfigError(path + "[" + std::to_string(i) + "]", "negative or non-finite probability");
        p.push_back(v);
        sum += v;
    }
    if (std::abs(sum - 1.0) > kRenormalizeTolerance) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "probabilities sum to " << sum << " (must be within 1e-9 of 1)";
        throw ConfigError(path, msg.str());
    }
    for (double& v : p) v /= sum;
    return p;
}

std::size_t positive_count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 1)
        throw ConfigError(path, "expected a positive integer");
    return j.get<std::size_t>();
}

template <typename Fn>
auto wrap_domain(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace

SourceModel model_from_json(const json& j, const std::string& path) {
    const auto& type_j = require(j, "type", path);
    if (!type_j.is_string()) throw ConfigError(path + ".type", "expected a string");
    const auto type = type_j.get<std::string>();
    if (type == "iid") {
        auto dist = probability_vector(require(j, "dist", path), path + ".dist");
        return wrap_domain(path, [&] { return SourceModel::iid(std::move(dist)); });
    }
    if (type == "markov") {
        const auto& pj = require(j, "P", path);
        if (!pj.is_array() || pj.empty()) throw ConfigError(path + ".P", "expected a matrix");
        Matrix p;
        for (std::size_t i = 0; i < pj.size(); ++i)
            p.push_back(probability_vector(pj[i], path + ".P[" + std::to_string(i) + "]"));
        auto init = probability_vector(require(j, "init", path), path + ".init");
        return wrap_domain(path, [&] { return SourceModel::markov(std::move(p), std::move(init)); });
    }
    if (type == "mixture") {
        auto weights = probability_vector(require(j, "weights", path), path + ".weights");
        const auto& cj = require(j, "components", path);
        if (!cj.is_array()) throw ConfigError(path + ".components", "expected an array");
        std::vector<SourceModel> comps;
        for (std::size_t i = 0; i < cj.size(); ++i)
            comps.push_back(model_from_json(cj[i], path + ".components[" + std::to_string(i) + "]"));
        return wrap_domain(path, [&] {
            return SourceModel::mixture(std::move(weights), std::move(comps));
        });
    }
    throw ConfigError(path + ".type", "unknown model type '" + type +
                                          "' (expected iid, markov or mixture)");
}

json model_to_json(const SourceModel& model) {
    switch (model.kind()) {
        case SourceKind::iid: return {{"type", "iid"}, {"dist", model.distribution()}};
        case SourceKind::markov:
            return {{"type", "markov"}, {"P", model.transitions()}, {"init", model.initial()}};
        case SourceKind::mixture: {
            json comps = json::array();
            for (const auto& c : model.components()) comps.push_back(model_to_json(c));
            return {{"type", "mixture"}, {"weights", model.weights()}, {"components", comps}};
        }
    }
    return {};
}

WordFunction codebook_from_json(const json& j, const std::string& path) {
    const auto in = positive_count(require(j, "input_alphabet", path), path + ".input_alphabet");
    const auto out = positive_count(require(j, "output_alphabet", path), path + ".output_alphabet");
    if (out > 10) throw ConfigError(path + ".output_alphabet", "digit codewords allow at most 10 symbols");
    const auto& code = require(j, "code", path);
    if (!code.is_array()) throw ConfigError(path + ".code", "expected an array of strings");
    std::vector<SymbolTuple> words;
    for (std::size_t i = 0; i < code.size(); ++i) {
        const std::string where = path + ".code[" + std::to_string(i) + "]";
        if (!code[i].is_string()) throw ConfigError(where, "expected a digit string");
        const auto text = code[i].get<std::string>();
        if (text.empty()) throw ConfigError(where, "empty codeword");
        SymbolTuple word = wrap_domain(where, [&] { return parse_digits(text); });
        for (std::size_t t = 0; t < word.size(); ++t)
            if (word[t] >= out)
                throw ConfigError(where, "symbol '" + std::string(1, text[t]) +
                                             "' outside output alphabet of size " +
                                             std::to_string(out));
        words.push_back(std::move(word));
    }
    if (words.size() != in)
        throw ConfigError(path + ".code", "expected " + std::to_string(in) +
                                              " codewords (one per input symbol), got " +
                                              std::to_string(words.size()));
    return wrap_domain(path, [&] { return WordFunction(in, out, std::move(words)); });
}

json codebook_to_json(const WordFunction& wf) {
    json code = json::array();
    for (const auto& c : wf.codewords()) code.push_back(format_digits(c));
    return {{"input_alphabet", wf.input_alphabet()},
            {"output_alphabet", wf.output_alphabet()},
            {"code", code}};
}

json load_json_ref(const json& ref, const std::filesystem::path& base_dir, const std::string& path) {
    if (ref.is_object()) return ref;
    if (!ref.is_string()) throw ConfigError(path, "expected an object or a file path");
    std::filesystem::path file = ref.get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    std::ifstream in(file);
    if (!in) throw ConfigError(path, "referenced file '" + file.string() + "' does not exist");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, "cannot parse '" + file.string() + "': " + e.what());
    }
}

json ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = experiment;
    if (model) j["model"] = model_to_json(*model);
    if (!models.empty()) {
        json m = json::object();
        for (const auto& [name, model_value] : models) m[name] = model_to_json(model_value);
        j["models"] = m;
    }
    if (codebook) j["codebook"] = codebook_to_json(*codebook);
    if (!codebooks.empty()) {
        json m = json::object();
        for (const auto& [name, wf] : codebooks) m[name] = codebook_to_json(wf);
        j["codebooks"] = m;
    }
    j["horizon"] = horizon;
    j["paths"] = paths;
    j["seed"] = seed;
    j["tolerance"] = tolerance;
    j["out"] = out;
    j["params"] = params;
    return j;
}

ExperimentConfig validate_config_json(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("$", "config must be a JSON object");
    static const char* const known[] = {"experiment", "model", "models", "codebook", "codebooks", "horizon",
                                        "paths", "seed", "tolerance", "out", "params"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw ConfigError("$." + key, "unknown field");
    }
    ExperimentConfig cfg;
    cfg.base_dir = base_dir;
    const auto& name = require(doc, "experiment", "$");
    if (!name.is_string() || name.get<std::string>().empty())
        throw ConfigError("$.experiment", "expected a non-empty string");
    cfg.experiment = name.get<std::string>();
    cfg.out = "results/" + cfg.experiment;

    if (doc.contains("model"))
        cfg.model = model_from_json(load_json_ref(doc["model"], base_dir, "$.model"), "$.model");
    if (doc.contains("models")) {
        const auto& m = doc["models"];
        if (!m.is_object()) throw ConfigError("$.models", "expected an object of named models");
        for (const auto& [key, value] : m.items()) {
            const std::string where = "$.models." + key;
            cfg.models.emplace(key, model_from_json(load_json_ref(value, base_dir, where), where));
        }
    }
    if (doc.contains("codebook"))
        cfg.codebook =
            codebook_from_json(load_json_ref(doc["codebook"], base_dir, "$.codebook"), "$.codebook");
    if (doc.contains("codebooks")) {
        const auto& m = doc["codebooks"];
        if (!m.is_object()) throw ConfigError("$.codebooks", "expected an object of named codebooks");
        for (const auto& [key, value] : m.items()) {
            const std::string where = "$.codebooks." + key;
            cfg.codebooks.emplace(key, codebook_from_json(load_json_ref(value, base_dir, where), where));
        }
    }
    if (cfg.model && cfg.codebook && cfg.model->alphabet_size() != cfg.codebook->input_alphabet())
        throw ConfigError("$.codebook.input_alphabet",
                          "does not match the model alphabet of size " +
                              std::to_string(cfg.model->alphabet_size()));

    if (doc.contains("horizon")) cfg.horizon = positive_count(doc["horizon"], "$.horizon");
    if (doc.contains("paths")) cfg.paths = positive_count(doc["paths"], "$.paths");
    const auto& seed = require(doc, "seed", "$");
    if (!seed.is_number_unsigned()) throw ConfigError("$.seed", "expected a non-negative integer");
    cfg.seed = seed.get<std::uint64_t>();
    if (doc.contains("tolerance")) {
        const auto& t = doc["tolerance"];
        if (!t.is_number() || !(t.get<double>() > 0.0))
            throw ConfigError("$.tolerance", "expected a positive number");
        cfg.tolerance = t.get<double>();
    }
    if (doc.contains("out")) {
        if (!doc["out"].is_string() || doc["out"].get<std::string>().empty())
            throw ConfigError("$.out", "expected a non-empty path");
        cfg.out = doc["out"].get<std::string>();
    }
    if (doc.contains("params")) {
        if (!doc["params"].is_object()) throw ConfigError("$.params", "expected an object");
        cfg.params = doc["params"];
    }
    return cfg;
}

ExperimentConfig validate_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("$", "cannot read config file '" + file.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("malformed JSON: ") + e.what());
    }
    return validate_config_json(doc, file.parent_path().empty() ? "." : file.parent_path());
}

}  // namespace wvs
