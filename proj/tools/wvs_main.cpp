// Command-line front end: one subcommand per operation plus `run` for config files.
//
// Exit codes: 0 pass, 1 verdict failure, 2 config or input error, 3 resource error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wvs/config.hpp"
#include "wvs/entropy.hpp"
#include "wvs/ergodic.hpp"
#include "wvs/errors.hpp"
#include "wvs/experiments.hpp"
#include "wvs/logspace.hpp"
#include "wvs/shifts.hpp"

namespace {

using nlohmann::json;
using namespace wvs;

enum Exit { kPass = 0, kVerdictFailure = 1, kConfigError = 2, kResourceError = 3 };

json parse_ref(const std::string& text, const std::string& flag) {
    if (!text.empty() && text.front() == '{') {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(flag, std::string("malformed inline JSON: ") + e.what());
        }
    }
    return load_json_ref(json(text), ".", flag);
}

SourceModel load_model(const std::string& text) {
    return model_from_json(parse_ref(text, "--model"), "--model");
}

WordFunction load_codebook(const std::string& text) {
    return codebook_from_json(parse_ref(text, "--codebook"), "--codebook");
}

std::vector<double> parse_numbers(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(flag, "cannot parse number '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(flag, "expected a comma-separated list");
    return out;
}

struct Output {
    std::string path;
    std::string format = "csv";

    void emit(const Table& table) const {
        const auto text = render_table(table, parse_trace_format(format));
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot write '" + path + "'");
        out << text;
    }
};

void add_output(CLI::App* cmd, Output& out) {
    cmd->add_option("--out", out.path, "Write the table to this file instead of stdout");
    cmd->add_option("--format", out.format, "Table format")->check(CLI::IsMember({"csv", "jsonl"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Word-valued sources: induced measures, AEP bounds and ergodic diagnostics"};
    app.require_subcommand(1);

    std::string model_text, codebook_text, symbols_text, config_path, cylinder_text = "0";
    std::uint64_t seed = 1;
    std::size_t horizon = 10'000, paths = 100, checkpoints = 100, block = kDefaultRateBlockLength;
    std::size_t max_order = 3, steps = 10;
    double tolerance = kDefaultAepTolerance;
    Output out;

    auto* check_prefix = app.add_subcommand("check-prefix", "Report whether a codebook is prefix-free");
    check_prefix->add_option("--codebook", codebook_text, "Codebook JSON or file")->required();

    auto* encode = app.add_subcommand("encode", "Encode an input string with a codebook");
    encode->add_option("--codebook", codebook_text, "Codebook JSON or file")->required();
    encode->add_option("--input", symbols_text, "Input digits, e.g. 0110")->required();

    auto* decode = app.add_subcommand("decode", "Decode an output string with a prefix-free codebook");
    decode->add_option("--codebook", codebook_text, "Codebook JSON or file")->required();
    decode->add_option("--input", symbols_text, "Output digits")->required();

    auto* induced = app.add_subcommand("induced-prob", "Probability of an output cylinder");
    induced->add_option("--model", model_text, "Model JSON or file")->required();
    induced->add_option("--codebook", codebook_text, "Codebook JSON or file")->required();
    induced->add_option("--output", symbols_text, "Output digits")->required();

    auto* trace = app.add_subcommand("entropy-trace", "Sample entropy -(1/n) log2 rho(w^n) along one path");
    trace->add_option("--model", model_text, "Model JSON or file")->required();
    trace->add_option("--codebook", codebook_text, "Score the encoded path under the induced measure");
    trace->add_option("--seed", seed, "Path seed");
    trace->add_option("--horizon", horizon, "Path length in scored symbols");
    trace->add_option("--checkpoints", checkpoints, "Number of trace points");
    add_output(trace, out);

    auto* aep = app.add_subcommand("aep", "Per-path AEP check against the component bounds");
    aep->add_option("--model", model_text, "Model JSON or file")->required();
    aep->add_option("--codebook", codebook_text, "Codebook JSON or file")->required();
    aep->add_option("--seed", seed, "Ensemble seed");
    aep->add_option("--horizon", horizon, "Input symbols per path");
    aep->add_option("--paths", paths, "Number of paths");
    aep->add_option("--tolerance", tolerance, "Equality tolerance in bits");
    add_output(aep, out);

    auto* conservation = app.add_subcommand("conservation", "Block-entropy rate vs the integral bound");
    conservation->add_option("--model", model_text, "Model JSON or file")->required();
    conservation->add_option("--codebook", codebook_text, "Codebook JSON or file")->required();
    conservation->add_option("--block-length", block, "Block length n of H_n - H_{n-1}");
    conservation->add_option("--tolerance", tolerance, "Tolerance in bits");

    auto* ams = app.add_subcommand("ams-check", "Per-step and Cesaro-averaged cylinder probabilities");
    ams->add_option("--model", model_text, "Model JSON or file")->required();
    ams->add_option("--cylinder", cylinder_text, "Cylinder digits");
    ams->add_option("--horizon", horizon, "Number of shifts");
    ams->add_option("--checkpoints", checkpoints, "Number of trace points");
    add_output(ams, out);

    auto* ergodic = app.add_subcommand("ergodic-check", "Time averages and cross-path spread of cylinder indicators");
    ergodic->add_option("--model", model_text, "Model JSON or file")->required();
    ergodic->add_option("--codebook", codebook_text, "Check the encoded process instead of the source");
    ergodic->add_option("--seed", seed, "Ensemble seed");
    ergodic->add_option("--horizon", horizon, "Averaging horizon");
    ergodic->add_option("--paths", paths, "Number of paths for the spread");
    ergodic->add_option("--max-order", max_order, "Largest cylinder order");
    add_output(ergodic, out);

    std::string table_text;
    std::size_t lookahead = 1, max_shift = 1, alphabet = 2;
    auto* vls = app.add_subcommand("vls-orbit", "Block starts and weights of a variable-length shift orbit");
    vls->add_option("--codebook", codebook_text, "Use the codebook-driven shift");
    vls->add_option("--alphabet", alphabet, "Alphabet size for --table");
    vls->add_option("--lookahead", lookahead, "Window length M for --table");
    vls->add_option("--max-shift", max_shift, "Largest shift N for --table");
    vls->add_option("--table", table_text, "Comma-separated shifts, one per window in lexicographic order");
    vls->add_option("--input", symbols_text, "Sequence digits")->required();
    vls->add_option("--steps", steps, "Orbit steps");
    add_output(vls, out);

    std::string r_text = "1,-1";
    std::size_t every = 2;
    auto* bellow = app.add_subcommand("bellow", "Both sides of the subsequence averaging identity");
    bellow->add_option("--every", every, "Block starts at multiples of this period");
    bellow->add_option("--r", r_text, "Periodic sequence r, comma-separated");
    bellow->add_option("--horizon", horizon, "Horizon n");
    bellow->add_option("--checkpoints", checkpoints, "Number of trace points");
    add_output(bellow, out);

    std::optional<std::uint64_t> run_seed;
    std::optional<std::size_t> run_horizon, run_paths;
    std::string run_out, run_format = "csv";
    auto* run = app.add_subcommand("run", "Run a named experiment from a config file");
    run->add_option("--config", config_path, "Experiment config JSON")->required();
    run->add_option("--seed", run_seed, "Override the config seed");
    run->add_option("--horizon", run_horizon, "Override the config horizon");
    run->add_option("--paths", run_paths, "Override the config path count");
    run->add_option("--out", run_out, "Override the output directory");
    run->add_option("--format", run_format, "Trace format")->check(CLI::IsMember({"csv", "jsonl"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*check_prefix) {
            const auto wf = load_codebook(codebook_text);
            const auto check = is_prefix_free(wf);
            std::cout << "prefix_free " << (check.prefix_free ? "true" : "false") << "\n";
            if (check.witness)
                std::cout << "witness " << check.witness->first << " " << check.witness->second << " ("
                          << format_digits(wf.codeword(check.witness->first)) << ", "
                          << format_digits(wf.codeword(check.witness->second)) << ")\n";
            std::cout << "kraft_sum " << format_number(kraft_sum(wf)) << "\n";
            return kPass;
        }
        if (*encode) {
            const auto wf = load_codebook(codebook_text);
            const auto x = parse_digits(symbols_text);
            const auto r = encode_stream(wf, x);
            std::cout << "output " << format_digits(r.output) << "\nboundaries";
            for (auto z : r.boundaries) std::cout << " " << z;
            std::cout << "\n";
            return kPass;
        }
        if (*decode) {
            const auto wf = load_codebook(codebook_text);
            const auto r = decode_prefix_free(wf, parse_digits(symbols_text));
            std::cout << "symbols " << format_digits(r.symbols) << "\nconsumed " << r.consumed << "\n";
            return kPass;
        }
        if (*induced) {
            const auto model = load_model(model_text);
            const auto wf = load_codebook(codebook_text);
            const double lp = induced_cylinder_log_probability(model, wf, parse_digits(symbols_text));
            std::cout << "log_probability " << format_number(lp) << "\nprobability "
                      << format_number(std::exp(lp)) << "\n";
            return kPass;
        }
        if (*trace) {
            const auto model = load_model(model_text);
            std::optional<Measure> measure;
            SymbolTuple w;
            if (codebook_text.empty()) {
                measure.emplace(model);
                w = sample_path(model, horizon, seed).symbols;
            } else {
                const auto wf = load_codebook(codebook_text);
                measure.emplace(InducedMeasure(model, wf));
                w = encoded_path(model, wf, horizon, seed);
            }
            const auto cps = even_checkpoints(horizon, std::min(checkpoints, horizon));
            const auto t = sample_entropy_trace(*measure, w, cps);
            Table table{"entropy_trace", {"n", "value"}, {}};
            for (std::size_t i = 0; i < t.horizons.size(); ++i)
                table.rows.push_back({static_cast<std::int64_t>(t.horizons[i]), t.values[i]});
            out.emit(table);
            std::cerr << "limit_estimate " << format_number(t.limit_estimate) << " converged "
                      << (t.converged ? "true" : "false") << "\n";
            return t.converged ? kPass : kVerdictFailure;
        }
        if (*aep) {
            const auto model = load_model(model_text);
            const auto wf = load_codebook(codebook_text);
            const auto exp = aep_experiment(model, wf, horizon, paths, seed, tolerance);
            Table table{"aep", {"path", "component", "output_horizon", "empirical_h", "bound", "verdict"}, {}};
            bool violation = false;
            for (std::size_t p = 0; p < exp.paths.size(); ++p) {
                const auto& r = exp.paths[p];
                table.rows.push_back({static_cast<std::int64_t>(p), static_cast<std::int64_t>(r.component),
                                      static_cast<std::int64_t>(r.output_horizon), r.empirical_h,
                                      r.bound, std::string(to_string(r.verdict))});
                violation = violation || r.verdict == AepVerdict::violation;
            }
            out.emit(table);
            return violation ? kVerdictFailure : kPass;
        }
        if (*conservation) {
            const auto model = load_model(model_text);
            const auto wf = load_codebook(codebook_text);
            const auto r = conservation_report(model, wf, tolerance, block);
            std::cout << "integral_bound " << format_number(r.integral_bound) << "\nempirical_rate "
                      << format_number(r.empirical_rate) << "\nblock_length " << r.block_length
                      << "\nprefix_free " << (r.prefix_free ? "true" : "false") << "\nwithin_bound "
                      << (r.within_bound ? "true" : "false") << "\nequality "
                      << (r.equality ? "true" : "false") << "\n";
            return r.within_bound ? kPass : kVerdictFailure;
        }
        if (*ams) {
            const auto model = load_model(model_text);
            const SymbolTuple cyl = parse_digits(cylinder_text);
            const auto diag = ams_diagnostic(model, std::span<const SymbolTuple>(&cyl, 1), horizon);
            const auto series = shifted_cylinder_series(model, cyl, horizon);
            Table table{"ams", {"n", "shifted", "cesaro"}, {}};
            const auto& v = diag.front().cesaro;
            const auto cps = even_checkpoints(horizon, std::min(checkpoints, horizon));
            for (std::size_t n : cps)
                table.rows.push_back({static_cast<std::int64_t>(n), series[n - 1], v.partial_averages[n - 1]});
            out.emit(table);
            std::cerr << "cesaro_final " << format_number(v.final) << " converged "
                      << (v.converged ? "true" : "false") << " per_step_spread "
                      << format_number(diag.front().per_step_spread) << "\n";
            return v.converged ? kPass : kVerdictFailure;
        }
        if (*ergodic) {
            const auto model = load_model(model_text);
            std::optional<WordFunction> wf;
            if (!codebook_text.empty()) wf = load_codebook(codebook_text);
            const std::size_t k = wf ? wf->output_alphabet() : model.alphabet_size();
            const SymbolTuple w = wf ? encoded_path(model, *wf, horizon + max_order - 1, seed)
                                     : sample_path(model, horizon + max_order - 1, seed).symbols;
            const auto cps = even_checkpoints(horizon, std::min(checkpoints, horizon));
            Table table{"ergodic", {"cylinder", "time_average", "last_quartile_spread", "converged",
                                    "cross_path_mean", "cross_path_spread"}, {}};
            bool all_converged = true;
            for (const auto& g : cylinder_indicators(k, max_order)) {
                const auto v = time_average(w, g, cps, kDefaultSpreadThreshold);
                const auto s = wf ? ergodicity_spread(model, *wf, g, paths, horizon, seed + 1)
                                  : ergodicity_spread(model, g, paths, horizon, seed + 1);
                std::string label;
                for (std::size_t i = 0; i < g.table().size(); ++i)
                    if (g.table()[i] != 0.0) label = format_digits(tuple_from_index(i, g.order(), k));
                table.rows.push_back({label, v.final, v.spread,
                                      static_cast<std::int64_t>(v.converged ? 1 : 0), s.mean, s.spread});
                all_converged = all_converged && v.converged;
            }
            out.emit(table);
            return all_converged ? kPass : kVerdictFailure;
        }
        if (*vls) {
            const auto w = parse_digits(symbols_text);
            std::optional<VariableLengthShiftSpec> spec;
            if (!codebook_text.empty()) {
                spec.emplace(VariableLengthShiftSpec::from_codebook(load_codebook(codebook_text)));
            } else {
                std::vector<std::uint32_t> table;
                for (double v : parse_numbers(table_text, "--table")) {
                    if (v < 1 || v != std::floor(v)) throw ConfigError("--table", "shifts must be positive integers");
                    table.push_back(static_cast<std::uint32_t>(v));
                }
                spec.emplace(alphabet, lookahead, max_shift, std::move(table));
            }
            const auto ts = variable_length_orbit(*spec, w, steps);
            Table table{"orbit", {"i", "xi", "block_start"}, {}};
            std::size_t j = 0;
            for (std::size_t i = 0; i < ts.horizon; ++i) {
                const bool start = j < ts.zeta.size() && ts.zeta[j] == i;
                table.rows.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(ts.weights[i]),
                                      start ? static_cast<std::int64_t>(j) : std::int64_t{-1}});
                if (start) ++j;
            }
            out.emit(table);
            return kPass;
        }
        if (*bellow) {
            if (every == 0) throw ConfigError("--every", "must be positive");
            const auto values = parse_numbers(r_text, "--r");
            std::vector<std::size_t> zeta;
            for (std::size_t i = 0; zeta.empty() || zeta.back() < horizon; i += every) zeta.push_back(i);
            const auto ts = TimeSubsequence::from_zeta(std::move(zeta));
            std::vector<double> r(horizon);
            for (std::size_t i = 0; i < horizon; ++i) r[i] = values[i % values.size()];
            Table table{"bellow", {"n", "lhs", "rhs"}, {}};
            for (std::size_t n : even_checkpoints(horizon, std::min(checkpoints, horizon))) {
                const auto b = bellow_check(r, ts, n);
                table.rows.push_back({static_cast<std::int64_t>(n), b.lhs, b.rhs});
            }
            out.emit(table);
            return kPass;
        }
        if (*run) {
            auto cfg = validate_config(config_path);
            if (run_seed) cfg.seed = *run_seed;
            if (run_horizon) cfg.horizon = *run_horizon;
            if (run_paths) cfg.paths = *run_paths;
            if (!run_out.empty()) cfg.out = run_out;
            const auto manifest = run_experiment(cfg, parse_trace_format(run_format));
            for (const auto& c : manifest.verdicts)
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
            std::cout << "results written to " << manifest.out_dir.string() << "\n";
            return manifest.passed ? kPass : kVerdictFailure;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kResourceError;
    } catch (const DecodeError& e) {
        std::cerr << "decode error at position " << e.position() << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kPass;
}
