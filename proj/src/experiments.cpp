#include "wvs/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "wvs/entropy.hpp"
#include "wvs/ergodic.hpp"
#include "wvs/errors.hpp"
#include "wvs/logspace.hpp"
#include "wvs/oracle.hpp"
#include "wvs/parallel.hpp"
#include "wvs/rng.hpp"
#include "wvs/shifts.hpp"

namespace wvs {

using nlohmann::json;

TraceFormat parse_trace_format(std::string_view name) {
    if (name == "csv") return TraceFormat::csv;
    if (name == "jsonl") return TraceFormat::jsonl;
    throw ConfigError("--format", "expected csv or jsonl, got '" + std::string(name) + "'");
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const Cell& cell) {
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
    const auto& s = std::get<std::string>(cell);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::string json_field(const Cell& cell) {
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&cell))
        return std::isfinite(*d) ? format_number(*d) : "null";
    return json(std::get<std::string>(cell)).dump();
}

}  // namespace

std::string render_table(const Table& table, TraceFormat format) {
    std::string out;
    if (format == TraceFormat::csv) {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            out += (c ? "," : "") + table.columns[c];
        out += '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_field(row[c]);
            out += '\n';
        }
        return out;
    }
    for (const auto& row : table.rows) {
        out += '{';
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += json(table.columns[c]).dump() + ':' + json_field(row[c]);
        }
        out += "}\n";
    }
    return out;
}

bool ExperimentResult::passed() const {
    return !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

std::string trace_file(const Table& t, TraceFormat format) {
    return t.name + (format == TraceFormat::csv ? ".csv" : ".jsonl");
}

json checks_json(const std::vector<Check>& checks) {
    json out = json::array();
    for (const auto& c : checks)
        out.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return out;
}

}  // namespace

json ExperimentResult::summary(TraceFormat format) const {
    json traces = json::array();
    for (const auto& t : tables) traces.push_back(trace_file(t, format));
    return {{"experiment", experiment},
            {"artifact_version", kArtifactVersion},
            {"passed", passed()},
            {"checks", checks_json(checks)},
            {"results", results},
            {"traces", traces},
            {"config", config}};
}

json RunManifest::to_json() const {
    json v = json::object();
    for (const auto& c : verdicts) v[c.name] = c.passed;
    return {{"experiment", experiment}, {"config_hash", config_hash},
            {"artifact_version", version}, {"verdicts", v},
            {"passed", passed},         {"wall_seconds", wall_seconds},
            {"files", files}};
}

std::string config_hash(const json& resolved) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : resolved.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// Reads experiment knobs from cfg.params and records the values actually used, so the
// summary shows defaults as well as overrides.
class Params {
public:
    explicit Params(const json& src) : src_(src) {}

    std::size_t count(const char* key, std::size_t fallback) {
        const auto it = src_.find(key);
        std::size_t v = fallback;
        if (it != src_.end()) {
            if (!it->is_number_integer() || it->get<long long>() < 1)
                throw ConfigError(std::string("$.params.") + key, "expected a positive integer");
            v = it->get<std::size_t>();
        }
        used_[key] = v;
        return v;
    }

    double positive(const char* key, double fallback) {
        const auto it = src_.find(key);
        double v = fallback;
        if (it != src_.end()) {
            if (!it->is_number() || !(it->get<double>() > 0.0))
                throw ConfigError(std::string("$.params.") + key, "expected a positive number");
            v = it->get<double>();
        }
        used_[key] = v;
        return v;
    }

    std::string text(const char* key, const std::string& fallback) {
        const auto it = src_.find(key);
        std::string v = fallback;
        if (it != src_.end()) {
            if (!it->is_string()) throw ConfigError(std::string("$.params.") + key, "expected a string");
            v = it->get<std::string>();
        }
        used_[key] = v;
        return v;
    }

    std::vector<std::string> names(const char* key, std::vector<std::string> fallback) {
        const auto it = src_.find(key);
        if (it != src_.end()) {
            if (!it->is_array()) throw ConfigError(std::string("$.params.") + key, "expected an array of strings");
            fallback.clear();
            for (std::size_t i = 0; i < it->size(); ++i) {
                if (!(*it)[i].is_string())
                    throw ConfigError(std::string("$.params.") + key + "[" + std::to_string(i) + "]",
                                      "expected a string");
                fallback.push_back((*it)[i].get<std::string>());
            }
        }
        used_[key] = fallback;
        return fallback;
    }

    std::vector<std::size_t> counts(const char* key, std::vector<std::size_t> fallback) {
        const auto it = src_.find(key);
        if (it != src_.end()) {
            if (!it->is_array() || it->empty())
                throw ConfigError(std::string("$.params.") + key, "expected a non-empty array");
            fallback.clear();
            for (std::size_t i = 0; i < it->size(); ++i) {
                const auto& e = (*it)[i];
                if (!e.is_number_integer() || e.get<long long>() < 1)
                    throw ConfigError(std::string("$.params.") + key + "[" + std::to_string(i) + "]",
                                      "expected a positive integer");
                fallback.push_back(e.get<std::size_t>());
            }
        }
        used_[key] = fallback;
        return fallback;
    }

    const json& used() const { return used_; }

private:
    const json& src_;
    json used_ = json::object();
};

struct Context {
    const ExperimentConfig& cfg;
    Params params;
    ExperimentResult& out;

    void check(std::string name, bool passed, std::string detail) {
        out.checks.push_back({std::move(name), passed, std::move(detail)});
    }

    const SourceModel& model() const {
        if (!cfg.model) throw ConfigError("$.model", "required by experiment '" + cfg.experiment + "'");
        return *cfg.model;
    }
    const SourceModel& named_model(const std::string& name) const {
        const auto it = cfg.models.find(name);
        if (it == cfg.models.end())
            throw ConfigError("$.models." + name, "required by experiment '" + cfg.experiment + "'");
        return it->second;
    }
    const WordFunction& codebook() const {
        if (!cfg.codebook)
            throw ConfigError("$.codebook", "required by experiment '" + cfg.experiment + "'");
        return *cfg.codebook;
    }
    const WordFunction& named_codebook(const std::string& name) const {
        const auto it = cfg.codebooks.find(name);
        if (it == cfg.codebooks.end())
            throw ConfigError("$.codebooks." + name, "required by experiment '" + cfg.experiment + "'");
        return it->second;
    }
};

std::string fmt(double v) { return format_number(v); }

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

void require_alphabets(const SourceModel& model, const WordFunction& wf, const std::string& where) {
    if (model.alphabet_size() != wf.input_alphabet())
        throw ConfigError(where, "codebook input alphabet " + std::to_string(wf.input_alphabet()) +
                                     " does not match model alphabet " +
                                     std::to_string(model.alphabet_size()));
}

// ---------------------------------------------------------------- dp-oracle

std::vector<double> random_simplex(Rng& rng, std::size_t k) {
    std::vector<double> v(k);
    double sum = 0.0;
    for (auto& x : v) sum += (x = 0.05 + uniform01(rng));
    for (auto& x : v) x /= sum;
    return v;
}

SourceModel random_markov(Rng& rng, std::size_t k, bool point_start) {
    Matrix p(k);
    for (auto& row : p) row = random_simplex(rng, k);
    std::vector<double> init;
    if (point_start) {
        init.assign(k, 0.0);
        init[rng() % k] = 1.0;
    } else {
        init = random_simplex(rng, k);
    }
    return SourceModel::markov(std::move(p), std::move(init));
}

SourceModel random_model(Rng& rng, std::size_t k, std::size_t kind) {
    switch (kind % 3) {
        case 0: return SourceModel::iid(random_simplex(rng, k));
        case 1: return random_markov(rng, k, rng() % 2 == 0);
        default: {
            std::vector<SourceModel> comps{SourceModel::iid(random_simplex(rng, k)),
                                           random_markov(rng, k, true)};
            return SourceModel::mixture(random_simplex(rng, 2), std::move(comps));
        }
    }
}

SymbolTuple random_word(Rng& rng, std::size_t out_k, std::size_t max_len) {
    SymbolTuple w(1 + rng() % max_len);
    for (auto& s : w) s = static_cast<Symbol>(rng() % out_k);
    return w;
}

WordFunction random_codebook(Rng& rng, std::size_t in_k, std::size_t out_k, std::size_t max_len,
                             bool prefix_free) {
    std::vector<SymbolTuple> words(in_k);
    if (prefix_free) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            for (auto& w : words) w = random_word(rng, out_k, max_len);
            WordFunction wf(in_k, out_k, words);
            if (is_prefix_free(wf).prefix_free) return wf;
        }
        std::size_t len = 1;
        while (checked_power(out_k, len) < in_k) ++len;
        for (std::size_t a = 0; a < in_k; ++a) words[a] = tuple_from_index(a, len, out_k);
        return WordFunction(in_k, out_k, words);
    }
    for (auto& w : words) w = random_word(rng, out_k, max_len);
    const std::size_t i = rng() % in_k;
    const std::size_t j = (i + 1 + rng() % (in_k - 1)) % in_k;
    words[j] = words[i];
    if (words[j].size() < max_len && rng() % 2 == 0)
        words[j].push_back(static_cast<Symbol>(rng() % out_k));
    return WordFunction(in_k, out_k, words);
}

struct OracleComparison {
    std::size_t cylinders = 0;
    std::size_t mismatches = 0;
    double max_error = 0.0;
};

void compare_subtree(const MeasureScorer& scorer, std::uint64_t index, std::size_t depth,
                     const std::vector<std::vector<double>>& oracle, std::size_t out_k,
                     double tolerance, OracleComparison& cmp) {
    const std::size_t n = depth + 1;
    for (std::size_t b = 0; b < out_k; ++b) {
        MeasureScorer next = scorer;
        next.push(static_cast<Symbol>(b));
        const std::uint64_t id = index * out_k + b;
        const double dp = next.log_probability();
        const double q = oracle[n][id];
        ++cmp.cylinders;
        if (q == 0.0 || dp == kNegInf) {
            if (!(q == 0.0 && dp == kNegInf)) {
                ++cmp.mismatches;
                cmp.max_error = std::numeric_limits<double>::infinity();
            }
        } else {
            const double err = std::abs(std::log(q) - dp);
            cmp.max_error = std::max(cmp.max_error, err);
            if (err > tolerance) ++cmp.mismatches;
        }
        if (n + 1 < oracle.size()) compare_subtree(next, id, n, oracle, out_k, tolerance, cmp);
    }
}

void run_dp_oracle(Context& ctx) {
    const auto trials = ctx.params.count("trials", 50);
    const auto max_n = ctx.params.count("max_n", 8);
    const auto max_in = ctx.params.count("max_input_alphabet", 3);
    const auto max_out = ctx.params.count("max_output_alphabet", 3);
    const auto max_len = ctx.params.count("max_codeword_length", 3);
    const double tol = ctx.params.positive("log_tolerance", 1e-10);
    if (max_in < 2 || max_out < 2) throw ConfigError("$.params", "alphabets need at least 2 symbols");

    struct Trial {
        std::size_t in_k = 0, out_k = 0, max_length = 0;
        std::string kind;
        bool prefix_free = false;
        std::string code;
        OracleComparison cmp;
    };
    std::vector<Trial> rows(trials);
    parallel_for(trials, [&](std::size_t t) {
        Rng rng(derive_seed(ctx.cfg.seed, t));
        Trial& row = rows[t];
        row.in_k = 2 + rng() % (max_in - 1);
        row.out_k = 2 + rng() % (max_out - 1);
        const auto model = random_model(rng, row.in_k, t);
        const auto wf = random_codebook(rng, row.in_k, row.out_k, max_len, t % 2 == 0);
        row.kind = model.kind() == SourceKind::iid      ? "iid"
                   : model.kind() == SourceKind::markov ? "markov"
                                                        : "mixture";
        row.prefix_free = is_prefix_free(wf).prefix_free;
        row.max_length = wf.max_length();
        for (std::size_t a = 0; a < wf.input_alphabet(); ++a)
            row.code += (a ? " " : "") + format_digits(wf.codeword(static_cast<Symbol>(a)));

        std::vector<std::vector<double>> oracle(max_n + 1);
        for (std::size_t n = 1; n <= max_n; ++n) oracle[n] = oracle::induced_distribution(model, wf, n);
        const InducedMeasure eta(model, wf);
        compare_subtree(MeasureScorer(eta), 0, 0, oracle, row.out_k, tol, row.cmp);
    });

    Table table{"trials",
                {"trial", "model", "input_alphabet", "output_alphabet", "max_length", "code",
                 "prefix_free", "cylinders", "max_abs_log_error", "mismatches"},
                {}};
    std::size_t mismatches = 0, cylinders = 0, prefix_free = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto& r = rows[t];
        table.rows.push_back({as_int(t), r.kind, as_int(r.in_k), as_int(r.out_k),
                              as_int(r.max_length), r.code, as_int(r.prefix_free ? 1 : 0),
                              as_int(r.cmp.cylinders), r.cmp.max_error, as_int(r.cmp.mismatches)});
        mismatches += r.cmp.mismatches;
        cylinders += r.cmp.cylinders;
        prefix_free += r.prefix_free ? 1 : 0;
        worst = std::max(worst, r.cmp.max_error);
    }
    ctx.out.tables.push_back(std::move(table));
    ctx.out.results = {{"trials", trials},
                       {"cylinders_compared", cylinders},
                       {"prefix_free_trials", prefix_free},
                       {"max_abs_log_error", worst},
                       {"mismatches", mismatches}};
    ctx.check("dp_matches_enumeration", mismatches == 0,
              std::to_string(cylinders) + " cylinders, max |log error| " + fmt(worst) +
                  ", tolerance " + fmt(tol));
    ctx.check("mixed_code_types", prefix_free > 0 && prefix_free < trials,
              std::to_string(prefix_free) + " of " + std::to_string(trials) + " codebooks prefix-free");
}

// ---------------------------------------------------------------- aep-*

enum class AepMode { prefix_free, non_prefix_free, mixture };

Table aep_table(const AepExperiment& exp) {
    Table t{"paths",
            {"path", "seed", "component", "input_horizon", "output_horizon", "empirical_h",
             "bound", "source_sample_entropy", "scaled_output_entropy", "verdict"},
            {}};
    for (std::size_t p = 0; p < exp.paths.size(); ++p) {
        const auto& r = exp.paths[p];
        t.rows.push_back({as_int(p), std::to_string(r.seed), as_int(r.component),
                          as_int(r.input_horizon), as_int(r.output_horizon), r.empirical_h,
                          r.bound, r.source_sample_entropy, r.scaled_output_entropy,
                          std::string(to_string(r.verdict))});
    }
    return t;
}

json bounds_json(const std::vector<ComponentBound>& bounds) {
    json out = json::array();
    for (const auto& b : bounds)
        out.push_back({{"weight", b.weight},
                       {"entropy_rate", b.entropy_rate},
                       {"expected_length", b.expected_length},
                       {"bound", b.bound}});
    return out;
}

void run_aep(Context& ctx, AepMode mode) {
    const auto& model = ctx.model();
    const auto& wf = ctx.codebook();
    require_alphabets(model, wf, "$.codebook");
    const auto min_output = ctx.params.count("min_output_horizon", 10'000);
    const auto exp = aep_experiment(model, wf, ctx.cfg.horizon, ctx.cfg.paths, ctx.cfg.seed,
                                    ctx.cfg.tolerance);
    ctx.out.tables.push_back(aep_table(exp));

    const std::size_t paths = exp.paths.size();
    std::size_t within = 0, violations = 0, strict = 0, short_paths = 0, exact_zero = 0;
    for (const auto& r : exp.paths) {
        if (std::abs(r.empirical_h - r.bound) <= exp.tolerance) ++within;
        if (r.verdict == AepVerdict::violation) ++violations;
        if (r.verdict == AepVerdict::strict_inequality) ++strict;
        if (r.output_horizon < min_output) ++short_paths;
        if (r.empirical_h == 0.0) ++exact_zero;
    }
    json results = {{"per_component", bounds_json(exp.per_component)},
                    {"prefix_free", exp.prefix_free},
                    {"tolerance", exp.tolerance},
                    {"paths", paths},
                    {"within_tolerance", within},
                    {"strict_inequality", strict},
                    {"violations", violations}};
    if (exp.per_component.size() == 1) results["bound"] = exp.per_component[0].bound;

    ctx.check("output_horizon", short_paths == 0,
              std::to_string(short_paths) + " paths shorter than " + std::to_string(min_output) +
                  " output symbols");
    ctx.check("no_violation", violations == 0,
              std::to_string(violations) + " of " + std::to_string(paths) + " paths exceed the bound");

    if (mode == AepMode::prefix_free) {
        const double fraction = ctx.params.positive("required_fraction", 0.95);
        const auto block = ctx.params.count("block_length", kDefaultRateBlockLength);
        const double block_tol = ctx.params.positive("block_tolerance", 0.01);
        const double bound = exp.per_component.at(0).bound;
        const Measure eta = InducedMeasure(model, wf);
        const double rate = conditional_block_entropy(eta, block);
        results["block_length"] = block;
        results["block_entropy_rate"] = rate;
        ctx.check("prefix_free", exp.prefix_free, "codebook prefix-free: " + std::string(exp.prefix_free ? "yes" : "no"));
        ctx.check("paths_at_bound", static_cast<double>(within) >= fraction * static_cast<double>(paths),
                  std::to_string(within) + " of " + std::to_string(paths) + " paths within " +
                      fmt(exp.tolerance) + " of bound " + fmt(bound));
        ctx.check("block_entropy_at_bound", std::abs(rate - bound) <= block_tol,
                  "H_" + std::to_string(block) + " - H_" + std::to_string(block - 1) + " = " +
                      fmt(rate) + ", bound " + fmt(bound) + ", tolerance " + fmt(block_tol));
    } else if (mode == AepMode::non_prefix_free) {
        ctx.check("not_prefix_free", !exp.prefix_free, "codebook must not be prefix-free");
        ctx.check("strict_on_every_path", strict == paths,
                  std::to_string(strict) + " of " + std::to_string(paths) + " paths strictly below the bound");
        ctx.check("zero_sample_entropy", exact_zero == paths,
                  std::to_string(exact_zero) + " of " + std::to_string(paths) +
                      " paths with sample entropy exactly 0");
    } else {
        const double weight_tol = ctx.params.positive("weight_tolerance", 0.1);
        const auto& bounds = exp.per_component;
        std::vector<std::size_t> cluster_sizes(bounds.size(), 0);
        std::size_t misassigned = 0, own_within = 0;
        for (const auto& r : exp.paths) {
            std::size_t best = 0;
            for (std::size_t c = 1; c < bounds.size(); ++c)
                if (std::abs(r.empirical_h - bounds[c].bound) < std::abs(r.empirical_h - bounds[best].bound))
                    best = c;
            ++cluster_sizes[best];
            if (best != r.component) ++misassigned;
            if (std::abs(r.empirical_h - bounds[r.component].bound) <= exp.tolerance) ++own_within;
        }
        double worst_weight = 0.0;
        json clusters = json::array();
        for (std::size_t c = 0; c < bounds.size(); ++c) {
            const double share = static_cast<double>(cluster_sizes[c]) / static_cast<double>(paths);
            worst_weight = std::max(worst_weight, std::abs(share - bounds[c].weight));
            clusters.push_back({{"bound", bounds[c].bound}, {"paths", cluster_sizes[c]}, {"share", share}});
        }
        results["clusters"] = clusters;
        ctx.check("paths_at_component_bound", own_within == paths,
                  std::to_string(own_within) + " of " + std::to_string(paths) +
                      " paths within " + fmt(exp.tolerance) + " of their component's bound");
        ctx.check("clusters_match_components", misassigned == 0,
                  std::to_string(misassigned) + " paths nearest to another component's bound");
        ctx.check("cluster_weights", worst_weight <= weight_tol,
                  "largest |share - weight| = " + fmt(worst_weight) + ", tolerance " + fmt(weight_tol));
    }
    ctx.out.results = std::move(results);
}

// ---------------------------------------------------------------- conservation

void run_conservation(Context& ctx) {
    const auto& model = ctx.model();
    const auto& wf = ctx.codebook();
    require_alphabets(model, wf, "$.codebook");
    const auto block = ctx.params.count("block_length", kDefaultRateBlockLength);
    const auto report = conservation_report(model, wf, ctx.cfg.tolerance, block);

    const Measure eta = InducedMeasure(model, wf);
    Table table{"block_entropy", {"n", "joint_entropy", "conditional_entropy"}, {}};
    double previous = 0.0;
    for (std::size_t n = 1; n <= block; ++n) {
        const double h = joint_entropy_exact(eta, n);
        table.rows.push_back({as_int(n), h, h - previous});
        previous = h;
    }
    ctx.out.tables.push_back(std::move(table));
    ctx.out.results = {{"per_component", bounds_json(component_bounds(model, wf))},
                       {"integral_bound", report.integral_bound},
                       {"empirical_rate", report.empirical_rate},
                       {"block_length", report.block_length},
                       {"prefix_free", report.prefix_free},
                       {"within_bound", report.within_bound},
                       {"equality", report.equality}};
    ctx.check("rate_matches_integral", report.equality,
              "H_" + std::to_string(block) + " - H_" + std::to_string(block - 1) + " = " +
                  fmt(report.empirical_rate) + ", integral bound " + fmt(report.integral_bound) +
                  ", tolerance " + fmt(report.tolerance));
}

// ---------------------------------------------------------------- ams

// Probability of the cylinder under the stationary version (restarted at pi) of the model.
double stationary_cylinder_probability(const SourceModel& model, std::span<const Symbol> cyl) {
    switch (model.kind()) {
        case SourceKind::iid: return std::exp(cylinder_log_probability(model, cyl));
        case SourceKind::markov: {
            const auto pi = markov::stationary_distribution(model.transitions());
            const auto restarted = SourceModel::markov(model.transitions(), pi);
            return std::exp(cylinder_log_probability(restarted, cyl));
        }
        case SourceKind::mixture: {
            double total = 0.0;
            for (std::size_t c = 0; c < model.components().size(); ++c)
                total += model.weights()[c] * stationary_cylinder_probability(model.components()[c], cyl);
            return total;
        }
    }
    return 0.0;
}

void run_ams(Context& ctx) {
    const auto names = ctx.params.names("models", {"periodic", "aperiodic"});
    const auto cylinder_text = ctx.params.text("cylinder", "0");
    const double limit_tol = ctx.params.positive("limit_tolerance", 1e-3);
    const double per_step_floor = ctx.params.positive("non_convergence_floor", 0.1);
    const auto checkpoints = ctx.params.count("trace_points", 1000);
    const auto periodic = ctx.params.names("expect_non_convergent", {"periodic"});
    SymbolTuple cyl;
    try {
        cyl = parse_digits(cylinder_text);
    } catch (const DomainError& e) {
        throw ConfigError("$.params.cylinder", e.what());
    }
    const std::size_t horizon = ctx.cfg.horizon;
    json results = json::object();
    for (const auto& name : names) {
        const auto& model = ctx.named_model(name);
        check_alphabet(cyl, model.alphabet_size(), "ams cylinder");
        const auto series = shifted_cylinder_series(model, cyl, horizon);
        const double limit = stationary_cylinder_probability(model, cyl);

        Table table{"cesaro_" + name, {"n", "shifted", "cesaro"}, {}};
        const auto points = even_checkpoints(horizon, std::min(checkpoints, horizon));
        std::size_t next_point = 0;
        double sum = 0.0, worst_scaled = 0.0, tail_dev = 0.0;
        for (std::size_t i = 0; i < horizon; ++i) {
            sum += series[i];
            const std::size_t n = i + 1;
            const double cesaro = sum / static_cast<double>(n);
            worst_scaled = std::max(worst_scaled, std::abs(cesaro - limit) * static_cast<double>(n));
            if (4 * n > 3 * horizon) tail_dev = std::max(tail_dev, std::abs(series[i] - limit));
            if (next_point < points.size() && points[next_point] == n) {
                table.rows.push_back({as_int(n), series[i], cesaro});
                ++next_point;
            }
        }
        const double final = sum / static_cast<double>(horizon);
        ctx.out.tables.push_back(std::move(table));
        results[name] = {{"stationary_limit", limit},
                         {"cesaro_final", final},
                         {"cesaro_error", std::abs(final - limit)},
                         {"max_scaled_cesaro_error", worst_scaled},
                         {"per_step_tail_deviation", tail_dev}};
        ctx.check(name + "_cesaro_limit", std::abs(final - limit) <= limit_tol,
                  "Cesaro average " + fmt(final) + " at n = " + std::to_string(horizon) +
                      ", stationary value " + fmt(limit) + ", tolerance " + fmt(limit_tol));
        if (std::find(periodic.begin(), periodic.end(), name) != periodic.end()) {
            ctx.check(name + "_per_step_non_convergent", tail_dev >= per_step_floor,
                      "per-step deviation " + fmt(tail_dev) + " in the last quartile, floor " +
                          fmt(per_step_floor));
            ctx.check(name + "_cesaro_within_1_over_n", worst_scaled <= 1.0,
                      "max_n n |Cesaro_n - limit| = " + fmt(worst_scaled));
        }
    }
    ctx.out.results = std::move(results);
}

// ---------------------------------------------------------------- ergodic

void run_ergodic(Context& ctx) {
    const auto& wf = ctx.codebook();
    const auto ergodic = ctx.params.names("ergodic_models", {"periodic", "aperiodic", "fair_coin"});
    const auto controls = ctx.params.names("negative_controls", {"mixture"});
    const auto max_order = ctx.params.count("max_order", 3);
    const auto points = ctx.params.count("checkpoints", 100);
    const double threshold = ctx.params.positive("spread_threshold", kDefaultSpreadThreshold);
    const double control_floor = ctx.params.positive("negative_control_floor", 0.1);
    const std::size_t horizon = ctx.cfg.horizon;
    const auto indicators = cylinder_indicators(wf.output_alphabet(), max_order);
    const auto checkpoints = even_checkpoints(horizon, points);

    Table traces{"time_averages", {"source", "cylinder", "n", "value"}, {}};
    Table spreads{"spread", {"source", "cylinder", "mean", "spread"}, {}};
    json results = json::object();
    auto cylinder_name = [&](const CylinderFunction& g) {
        for (std::size_t i = 0; i < g.table().size(); ++i)
            if (g.table()[i] != 0.0)
                return format_digits(tuple_from_index(i, g.order(), g.alphabet_size()));
        return std::string();
    };

    auto spread_all = [&](const std::string& name, const SourceModel& model, std::size_t index) {
        double worst = 0.0;
        for (const auto& g : indicators) {
            const auto s = ergodicity_spread(model, wf, g, ctx.cfg.paths, horizon,
                                             derive_seed(ctx.cfg.seed, 1000 + index));
            spreads.rows.push_back({name, cylinder_name(g), s.mean, s.spread});
            worst = std::max(worst, s.spread);
        }
        return worst;
    };

    // Per-path time averages must converge for every source, the mixture included:
    // it is AMS. Only the cross-path spread separates ergodic sources from it.
    auto converge_all = [&](const std::string& name, const SourceModel& model, std::size_t index) {
        const auto y = encoded_path(model, wf, horizon + max_order - 1, derive_seed(ctx.cfg.seed, index));
        std::size_t converged = 0;
        double worst_tail = 0.0;
        for (const auto& g : indicators) {
            const auto v = time_average(y, g, checkpoints, threshold);
            const auto label = cylinder_name(g);
            for (std::size_t i = 0; i < v.horizons.size(); ++i)
                traces.rows.push_back({name, label, as_int(v.horizons[i]), v.partial_averages[i]});
            converged += v.converged ? 1 : 0;
            worst_tail = std::max(worst_tail, v.spread);
        }
        ctx.check(name + "_time_averages_converge", converged == indicators.size(),
                  std::to_string(converged) + " of " + std::to_string(indicators.size()) +
                      " indicators converged, worst last-quartile spread " + fmt(worst_tail));
        return json{{"indicators", indicators.size()},
                    {"converged", converged},
                    {"max_last_quartile_spread", worst_tail}};
    };

    std::size_t index = 0;
    for (const auto& name : ergodic) {
        const auto& model = ctx.named_model(name);
        require_alphabets(model, wf, "$.models." + name);
        auto entry = converge_all(name, model, index);
        const double worst_spread = spread_all(name, model, index);
        entry["max_cross_path_spread"] = worst_spread;
        results[name] = entry;
        ctx.check(name + "_output_ergodic", worst_spread < threshold,
                  "worst cross-path spread " + fmt(worst_spread) + ", threshold " + fmt(threshold));
        ++index;
    }
    for (const auto& name : controls) {
        const auto& model = ctx.named_model(name);
        require_alphabets(model, wf, "$.models." + name);
        auto entry = converge_all(name, model, index);
        const double worst_spread = spread_all(name, model, index);
        entry["max_cross_path_spread"] = worst_spread;
        results[name] = entry;
        ctx.check(name + "_negative_control", worst_spread > control_floor,
                  "worst cross-path spread " + fmt(worst_spread) + " must exceed " + fmt(control_floor));
        ++index;
    }
    ctx.out.tables.push_back(std::move(traces));
    ctx.out.tables.push_back(std::move(spreads));
    ctx.out.results = std::move(results);
}

// ---------------------------------------------------------------- coder-equivalence

void run_coder_equivalence(Context& ctx) {
    const auto trials = ctx.params.count("trials", 1000);
    const auto max_k = ctx.params.count("max_alphabet", 3);
    const auto max_m = ctx.params.count("max_lookahead", 4);
    const auto max_shift = ctx.params.count("max_shift", 6);
    const std::size_t max_horizon = ctx.cfg.horizon;
    if (max_k < 2) throw ConfigError("$.params.max_alphabet", "need at least 2 symbols");
    if (max_m > kMaxLookahead) throw ConfigError("$.params.max_lookahead", "at most 16");

    struct Row {
        std::size_t k = 0, m = 0, n_max = 0, horizon = 0, blocks = 0;
        bool equal = false;
    };
    std::vector<Row> rows(trials);
    parallel_for(trials, [&](std::size_t t) {
        Rng rng(derive_seed(ctx.cfg.seed, t));
        Row& row = rows[t];
        row.k = 2 + rng() % (max_k - 1);
        row.m = 1 + rng() % max_m;
        row.n_max = 1 + rng() % max_shift;
        // every tenth trial runs to the full horizon
        row.horizon = t % 10 == 0 ? max_horizon : 1 + rng() % max_horizon;
        std::vector<std::uint32_t> table(checked_power(row.k, row.m));
        for (auto& v : table) v = static_cast<std::uint32_t>(1 + rng() % row.n_max);
        const VariableLengthShiftSpec spec(row.k, row.m, row.n_max, std::move(table));
        SymbolTuple w(row.horizon * row.n_max + row.m);
        for (auto& s : w) s = static_cast<Symbol>(rng() % row.k);

        const auto ts = variable_length_orbit(spec, w, row.horizon);
        const auto xi = weight_sequence(ts, row.horizon).xi;
        const auto u = shift_lengths(spec, w, row.horizon);
        const auto z = finite_state_orbit_coder(u, row.horizon, row.n_max);
        row.equal = xi == z;
        row.blocks = static_cast<std::size_t>(std::count(xi.begin(), xi.end(), std::uint8_t{1}));
    });
    Table table{"trials", {"trial", "alphabet", "lookahead", "max_shift", "horizon", "block_starts", "equal"}, {}};
    std::size_t equal = 0, full = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto& r = rows[t];
        table.rows.push_back({as_int(t), as_int(r.k), as_int(r.m), as_int(r.n_max),
                              as_int(r.horizon), as_int(r.blocks), as_int(r.equal ? 1 : 0)});
        equal += r.equal ? 1 : 0;
        full += r.horizon == max_horizon ? 1 : 0;
    }
    ctx.out.tables.push_back(std::move(table));
    ctx.out.results = {{"trials", trials}, {"equal", equal}, {"full_horizon_trials", full}};
    ctx.check("coder_equals_weights", equal == trials,
              std::to_string(equal) + " of " + std::to_string(trials) + " trials bit-identical");
}

// ---------------------------------------------------------------- bellow

void run_bellow(Context& ctx) {
    const auto trials = ctx.params.count("trials", 100);
    const double gap_tol = ctx.params.positive("gap_tolerance", 0.01);
    const double example_tol = ctx.params.positive("example_tolerance", 1e-3);
    const double noise = ctx.params.positive("noise", 0.1);
    const auto points = ctx.params.count("trace_points", 100);
    const std::size_t n = ctx.cfg.horizon;

    // zeta = even times, r_i = (-1)^i: both sides tend to 1/2.
    {
        std::vector<std::size_t> zeta;
        for (std::size_t i = 0; i <= n + 1; i += 2) zeta.push_back(i);
        const auto ts = TimeSubsequence::from_zeta(std::move(zeta));
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = i % 2 == 0 ? 1.0 : -1.0;
        Table trace{"alternating_trace", {"n", "lhs", "rhs"}, {}};
        BellowPartials last;
        for (std::size_t cp : even_checkpoints(n, points)) {
            last = bellow_check(r, ts, cp);
            trace.rows.push_back({as_int(cp), last.lhs, last.rhs});
        }
        ctx.out.tables.push_back(std::move(trace));
        ctx.out.results["alternating"] = {{"lhs", last.lhs}, {"rhs", last.rhs}, {"limit", 0.5}};
        ctx.check("alternating_example",
                  std::abs(last.lhs - 0.5) <= example_tol && std::abs(last.rhs - 0.5) <= example_tol,
                  "lhs " + fmt(last.lhs) + ", rhs " + fmt(last.rhs) + " at n = " +
                      std::to_string(n) + ", tolerance " + fmt(example_tol));
    }

    struct Row {
        std::size_t period = 0, r_period = 0;
        std::string residues;
        BellowPartials partials;
        double limit = 0.0;
    };
    std::vector<Row> rows(trials);
    parallel_for(trials, [&](std::size_t t) {
        Rng rng(derive_seed(ctx.cfg.seed, t));
        Row& row = rows[t];
        // zeta: times whose residue mod `period` lies in a set containing 0.
        row.period = 2 + rng() % 5;
        std::vector<bool> in_set(row.period, false);
        in_set[0] = true;
        for (std::size_t j = 1; j < row.period; ++j) in_set[j] = rng() % 2 == 0;
        for (std::size_t j = 0; j < row.period; ++j)
            if (in_set[j]) row.residues += (row.residues.empty() ? "" : " ") + std::to_string(j);
        // r: periodic part plus bounded i.i.d. noise of mean zero.
        row.r_period = 1 + rng() % 6;
        std::vector<double> base(row.r_period);
        for (auto& v : base) v = 2.0 * uniform01(rng) - 1.0;
        const std::size_t cycle = std::lcm(row.period, row.r_period);
        double cycle_sum = 0.0;
        for (std::size_t i = 0; i < cycle; ++i)
            if (in_set[i % row.period]) cycle_sum += base[i % row.r_period];
        row.limit = cycle_sum / static_cast<double>(cycle);

        std::vector<std::size_t> zeta;
        for (std::size_t i = 0; zeta.empty() || zeta.back() < n; ++i)
            if (in_set[i % row.period]) zeta.push_back(i);
        const auto ts = TimeSubsequence::from_zeta(std::move(zeta));
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = base[i % row.r_period] + noise * (2.0 * uniform01(rng) - 1.0);
        row.partials = bellow_check(r, ts, n);
    });

    Table table{"trials", {"trial", "period", "residues", "r_period", "lhs", "rhs", "limit", "gap"}, {}};
    double worst_gap = 0.0, worst_limit = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto& r = rows[t];
        const double gap = std::abs(r.partials.lhs - r.partials.rhs);
        worst_gap = std::max(worst_gap, gap);
        worst_limit = std::max(worst_limit, std::max(std::abs(r.partials.lhs - r.limit),
                                                     std::abs(r.partials.rhs - r.limit)));
        table.rows.push_back({as_int(t), as_int(r.period), r.residues, as_int(r.r_period),
                              r.partials.lhs, r.partials.rhs, r.limit, gap});
    }
    ctx.out.tables.push_back(std::move(table));
    ctx.out.results["trials"] = trials;
    ctx.out.results["max_gap"] = worst_gap;
    ctx.out.results["max_limit_error"] = worst_limit;
    ctx.check("sides_agree", worst_gap < gap_tol,
              "max |lhs - rhs| = " + fmt(worst_gap) + " at n = " + std::to_string(n));
    ctx.check("closed_form_limits", worst_limit < gap_tol,
              "max distance to the closed-form limit " + fmt(worst_limit));
}

// ---------------------------------------------------------------- log-prob-identity

void run_log_prob_identity(Context& ctx) {
    const auto& model = ctx.model();
    const auto& wf = ctx.codebook();
    require_alphabets(model, wf, "$.codebook");
    const auto other_name = ctx.params.text("non_prefix_free_codebook", "non_prefix_free");
    const auto& other = ctx.named_codebook(other_name);
    require_alphabets(model, other, "$.codebooks." + other_name);
    const auto max_len = ctx.params.count("max_length", 8);
    const double tol = ctx.params.positive("identity_tolerance", 1e-12);
    const std::size_t k = model.alphabet_size();

    Table table{"tuples", {"codebook", "x", "log_mu", "log_eta", "difference"}, {}};
    std::size_t tuples = 0, identity_fail = 0, direction_fail = 0;
    double worst = 0.0;
    for (std::size_t n = 1; n <= max_len; ++n) {
        const auto count = checked_power(k, n);
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto x = tuple_from_index(i, n, k);
            const double log_mu = cylinder_log_probability(model, x);
            const double pf = induced_cylinder_log_probability(model, wf, encode_stream(wf, x).output);
            const double npf =
                induced_cylinder_log_probability(model, other, encode_stream(other, x).output);
            const double diff = std::abs(pf - log_mu);
            worst = std::max(worst, diff);
            if (!(diff <= tol)) ++identity_fail;
            if (!(npf >= log_mu - tol)) ++direction_fail;
            table.rows.push_back({std::string("prefix_free"), format_digits(x), log_mu, pf, pf - log_mu});
            table.rows.push_back({other_name, format_digits(x), log_mu, npf, npf - log_mu});
            ++tuples;
        }
    }
    ctx.out.tables.push_back(std::move(table));
    ctx.out.results = {{"tuples", tuples},
                       {"codebook_prefix_free", is_prefix_free(wf).prefix_free},
                       {"other_prefix_free", is_prefix_free(other).prefix_free},
                       {"max_abs_difference", worst},
                       {"identity_failures", identity_fail},
                       {"direction_failures", direction_fail}};
    ctx.check("prefix_free_identity", identity_fail == 0 && is_prefix_free(wf).prefix_free,
              std::to_string(tuples) + " tuples, max |log eta - log mu| = " + fmt(worst) +
                  ", tolerance " + fmt(tol));
    ctx.check("non_prefix_free_dominates", direction_fail == 0,
              std::to_string(direction_fail) + " tuples with eta < mu under '" + other_name + "'");
}

// ---------------------------------------------------------------- determinism

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void run_determinism(Context& ctx) {
    const auto configs = ctx.params.names(
        "configs", {"dp-oracle.json", "aep-prefix-free.json", "aep-non-prefix-free.json",
                    "aep-mixture.json", "conservation.json", "ams.json", "ergodic.json",
                    "coder-equivalence.json", "bellow.json", "log-prob-identity.json"});
    const auto threads = ctx.params.counts("threads", {1, 4});
    const auto root = resolve_out_dir(ctx.cfg) / "runs";
    const int previous_threads = max_threads();

    Table table{"files", {"config", "file", "bytes", "identical"}, {}};
    std::size_t compared = 0, differing = 0;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        const std::string where = "$.params.configs[" + std::to_string(c) + "]";
        std::filesystem::path file = configs[c];
        if (file.is_relative()) file = ctx.cfg.base_dir / file;
        if (!std::filesystem::exists(file)) throw ConfigError(where, "config '" + file.string() + "' does not exist");
        const auto nested = validate_config(file);
        if (nested.experiment == "determinism") throw ConfigError(where, "cannot nest determinism runs");
        const auto stem = file.stem().string();

        std::vector<RunManifest> runs;
        for (std::size_t t : threads) {
            set_threads(static_cast<int>(t));
            const auto result = evaluate_experiment(nested);
            runs.push_back(write_result(result, root / stem / ("threads-" + std::to_string(t)),
                                        TraceFormat::csv, 0.0));
        }
        set_threads(previous_threads);

        const auto& base = runs.front();
        for (const auto& name : base.files) {
            const auto bytes = read_file(base.out_dir / name);
            bool identical = true;
            for (std::size_t r = 1; r < runs.size(); ++r) {
                const auto& files = runs[r].files;
                identical = identical && std::find(files.begin(), files.end(), name) != files.end() &&
                            read_file(runs[r].out_dir / name) == bytes;
            }
            for (std::size_t r = 1; r < runs.size(); ++r)
                identical = identical && runs[r].files.size() == base.files.size();
            table.rows.push_back({stem, name, as_int(bytes.size()), as_int(identical ? 1 : 0)});
            ++compared;
            differing += identical ? 0 : 1;
        }
    }
    ctx.out.tables.push_back(std::move(table));
    ctx.out.results = {{"configs", configs.size()}, {"files_compared", compared}, {"differing", differing}};
    ctx.check("byte_identical", differing == 0 && compared > 0,
              std::to_string(compared) + " files compared across thread counts, " +
                  std::to_string(differing) + " differ");
}

using Runner = std::function<void(Context&)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
    static const std::vector<std::pair<std::string, Runner>> r = {
        {"dp-oracle", run_dp_oracle},
        {"aep-prefix-free", [](Context& c) { run_aep(c, AepMode::prefix_free); }},
        {"aep-non-prefix-free", [](Context& c) { run_aep(c, AepMode::non_prefix_free); }},
        {"aep-mixture", [](Context& c) { run_aep(c, AepMode::mixture); }},
        {"conservation", run_conservation},
        {"ams", run_ams},
        {"ergodic", run_ergodic},
        {"coder-equivalence", run_coder_equivalence},
        {"bellow", run_bellow},
        {"log-prob-identity", run_log_prob_identity},
        {"determinism", run_determinism},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, runner] : registry()) out.push_back(name);
        return out;
    }();
    return names;
}

ExperimentResult evaluate_experiment(const ExperimentConfig& cfg) {
    const auto& reg = registry();
    const auto it = std::find_if(reg.begin(), reg.end(),
                                 [&](const auto& entry) { return entry.first == cfg.experiment; });
    if (it == reg.end()) {
        std::string valid;
        for (const auto& name : experiment_names()) valid += (valid.empty() ? "" : ", ") + name;
        throw ConfigError("$.experiment", "unknown experiment '" + cfg.experiment +
                                              "'; valid names: " + valid);
    }
    ExperimentResult out;
    out.experiment = cfg.experiment;
    Context ctx{cfg, Params(cfg.params), out};
    try {
        it->second(ctx);
    } catch (const DomainError& e) {
        throw ConfigError("$", e.what());
    } catch (const UnsupportedError& e) {
        throw ConfigError("$", e.what());
    }
    out.config = cfg.to_json();
    out.config["params"] = ctx.params.used();
    return out;
}

std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("WVS_OUT_DIR"); env != nullptr && *env != '\0')
        return std::filesystem::path(env) / cfg.experiment;
    return cfg.out;
}

RunManifest write_result(const ExperimentResult& result, const std::filesystem::path& dir,
                         TraceFormat format, double wall_seconds) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ResourceError("cannot create output directory '" + dir.string() + "': " + ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot write '" + (dir / name).string() + "'");
        out << content;
    };

    RunManifest m;
    m.experiment = result.experiment;
    m.config_hash = config_hash(result.config);
    m.verdicts = result.checks;
    m.passed = result.passed();
    m.wall_seconds = wall_seconds;
    m.out_dir = dir;
    write("summary.json", result.summary(format).dump(2) + "\n");
    m.files.push_back("summary.json");
    for (const auto& t : result.tables) {
        const auto name = trace_file(t, format);
        write(name, render_table(t, format));
        m.files.push_back(name);
    }
    write("manifest.json", m.to_json().dump(2) + "\n");
    return m;
}

RunManifest run_experiment(const ExperimentConfig& cfg, TraceFormat format) {
    const auto start = std::chrono::steady_clock::now();
    const auto result = evaluate_experiment(cfg);
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    return write_result(result, resolve_out_dir(cfg), format, wall.count());
}

}  // namespace wvs
