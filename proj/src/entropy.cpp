#include "wvs/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wvs/errors.hpp"
#include "wvs/logspace.hpp"
#include "wvs/parallel.hpp"
#include "wvs/rng.hpp"

namespace wvs {
namespace {

double bits_per_symbol(double log_prob, std::size_t n) {
    return -nats_to_bits(log_prob) / static_cast<double>(n);
}

// -p log2 p for p = exp(lp).
double entropy_term_from_log(double lp) {
    if (lp == kNegInf) return 0.0;
    return -std::exp(lp) * nats_to_bits(lp);
}

std::uint64_t enumeration_size(std::size_t k, std::size_t n, std::uint64_t cap) {
    const auto count = checked_power(k, n);
    if (count > cap)
        throw ResourceError("enumeration of " + std::to_string(k) + "^" + std::to_string(n) +
                            " cylinders exceeds cap " + std::to_string(cap));
    return count;
}

double sum_entropy_terms(const std::vector<double>& log_probs) {
    double h = 0.0;
    for (double lp : log_probs) h += entropy_term_from_log(lp);
    return h;
}

// Depth-first walk below a fixed prefix, sharing scorer state between siblings.
void enumerate_below(const MeasureScorer& scorer, std::size_t k, std::size_t remaining,
                     std::uint64_t index, std::vector<double>& out) {
    if (remaining == 0) {
        out[index] = scorer.log_probability();
        return;
    }
    for (std::size_t a = 0; a < k; ++a) {
        MeasureScorer child = scorer;
        child.push(static_cast<Symbol>(a));
        enumerate_below(child, k, remaining - 1, index * k + a, out);
    }
}

}  // namespace

InducedMeasure::InducedMeasure(SourceModel model, WordFunction wf)
    : model_(std::move(model)), wf_(std::move(wf)) {
    if (model_.alphabet_size() != wf_.input_alphabet())
        throw DomainError("induced measure: source alphabet " +
                          std::to_string(model_.alphabet_size()) +
                          " does not match word function input alphabet " +
                          std::to_string(wf_.input_alphabet()));
}

InducedForward::InducedForward(const SourceModel& part, const WordFunction& wf)
    : part_(&part),
      wf_(&wf),
      max_len_(wf.max_length()),
      ring_(wf.max_length() + 1),
      states_(part.chain_states()),
      rows_(ring_ * states_, kNegInf),
      recent_(wf.max_length(), 0) {
    if (part.alphabet_size() != wf.input_alphabet())
        throw DomainError("induced forward: alphabet mismatch");
    alpha(0, 0) = 0.0;
}

bool InducedForward::matches(Symbol a, std::size_t j, std::size_t len) const {
    const auto& c = wf_->codeword(a);
    const std::size_t overlap = std::min(len, c.size());
    for (std::size_t t = 0; t < overlap; ++t)
        if (c[t] != recent(j + t)) return false;
    return true;
}

void InducedForward::push(Symbol b) {
    if (b >= wf_->output_alphabet())
        throw DomainError("induced measure: output symbol " + std::to_string(b) +
                          " at position " + std::to_string(length_) + " outside alphabet");
    recent_[length_ % max_len_] = b;
    const std::size_t end = length_ + 1;
    for (std::size_t s = 0; s < states_; ++s) alpha(end, s) = kNegInf;
    const std::size_t first = end > max_len_ ? end - max_len_ : 0;
    const std::size_t k = part_->alphabet_size();
    for (std::size_t j = first; j < end; ++j) {
        const std::size_t len = end - j;
        for (std::size_t s = 0; s < states_; ++s) {
            const double from = alpha(j, s);
            if (from == kNegInf) continue;
            for (std::size_t a = 0; a < k; ++a) {
                const auto sym = static_cast<Symbol>(a);
                if (wf_->length(sym) != len || !matches(sym, j, len)) continue;
                const double lp = part_->log_transition(s, sym);
                if (lp == kNegInf) continue;
                double& to = alpha(end, part_->next_state(s, sym));
                to = log_add(to, from + lp);
            }
        }
    }
    length_ = end;
}

double InducedForward::log_probability() const {
    if (length_ == 0) return 0.0;
    const std::size_t first = length_ > max_len_ ? length_ - max_len_ : 0;
    const std::size_t k = part_->alphabet_size();
    double total = kNegInf;
    for (std::size_t j = first; j < length_; ++j) {
        const std::size_t len = length_ - j;
        for (std::size_t s = 0; s < states_; ++s) {
            const double from = alpha(j, s);
            if (from == kNegInf) continue;
            for (std::size_t a = 0; a < k; ++a) {
                const auto sym = static_cast<Symbol>(a);
                if (wf_->length(sym) < len || !matches(sym, j, len)) continue;
                const double lp = part_->log_transition(s, sym);
                if (lp == kNegInf) continue;
                total = log_add(total, from + lp);
            }
        }
    }
    // Rounding can push a certain cylinder a few ulps above probability one.
    return std::min(total, 0.0);
}

double InducedForward::newest_row_log_mass() const {
    double total = kNegInf;
    for (std::size_t s = 0; s < states_; ++s) total = log_add(total, alpha(length_, s));
    return total;
}

std::size_t measure_alphabet(const Measure& measure) {
    return std::visit([](const auto& m) { return m.alphabet_size(); }, measure);
}

MeasureScorer::MeasureScorer(const SourceModel& model)
    : alphabet_(model.alphabet_size()), source_(std::in_place, model) {}

MeasureScorer::MeasureScorer(const InducedMeasure& measure) : alphabet_(measure.alphabet_size()) {
    const auto& model = measure.model();
    if (model.kind() == SourceKind::mixture) {
        for (std::size_t c = 0; c < model.components().size(); ++c) {
            induced_.emplace_back(model.components()[c], measure.word_function());
            log_weights_.push_back(safe_log(model.weights()[c]));
        }
    } else {
        induced_.emplace_back(model, measure.word_function());
        log_weights_.push_back(0.0);
    }
}

MeasureScorer::MeasureScorer(const Measure& measure)
    : MeasureScorer(std::visit([](const auto& m) { return MeasureScorer(m); }, measure)) {}

void MeasureScorer::push(Symbol a) {
    if (a >= alphabet_)
        throw DomainError("symbol " + std::to_string(a) + " at position " +
                          std::to_string(length_) + " outside alphabet of size " +
                          std::to_string(alphabet_));
    if (source_) {
        source_->push(a);
    } else {
        for (auto& f : induced_) f.push(a);
    }
    ++length_;
}

double MeasureScorer::log_probability() const {
    if (source_) return length_ == 0 ? 0.0 : source_->log_probability();
    if (induced_.size() == 1) return induced_.front().log_probability();
    std::vector<double> terms(induced_.size());
    for (std::size_t c = 0; c < induced_.size(); ++c)
        terms[c] = log_weights_[c] + induced_[c].log_probability();
    return std::min(log_sum_exp(terms), 0.0);
}

double induced_cylinder_log_probability(const SourceModel& model, const WordFunction& wf,
                                        std::span<const Symbol> b) {
    const InducedMeasure measure(model, wf);
    check_alphabet(b, wf.output_alphabet(), "induced_cylinder_log_probability");
    MeasureScorer scorer(measure);
    for (Symbol s : b) scorer.push(s);
    return scorer.log_probability();
}

double log_probability(const Measure& measure, std::span<const Symbol> tuple) {
    check_alphabet(tuple, measure_alphabet(measure), "log_probability");
    MeasureScorer scorer(measure);
    for (Symbol s : tuple) scorer.push(s);
    return scorer.log_probability();
}

double joint_entropy_exact(const Measure& measure, std::size_t n, std::uint64_t cap) {
    if (n == 0) return 0.0;
    const std::size_t k = measure_alphabet(measure);
    const auto count = enumeration_size(k, n, cap);
    std::vector<double> log_probs(count);

    // Split on a prefix long enough to give the team work, then walk depth-first.
    std::size_t split = 0;
    std::uint64_t chunks = 1;
    while (split < n && chunks < 256) {
        chunks *= k;
        ++split;
    }
    const MeasureScorer root(measure);
    parallel_for(chunks, [&](std::size_t chunk) {
        MeasureScorer scorer = root;
        for (Symbol a : tuple_from_index(chunk, split, k)) scorer.push(a);
        enumerate_below(scorer, k, n - split, chunk, log_probs);
    });
    return sum_entropy_terms(log_probs);
}

double conditional_block_entropy(const Measure& measure, std::size_t n, std::uint64_t cap) {
    if (n == 0) throw DomainError("conditional_block_entropy: n must be at least 1");
    return joint_entropy_exact(measure, n, cap) - joint_entropy_exact(measure, n - 1, cap);
}

EntropyTrace sample_entropy_trace(const Measure& measure, std::span<const Symbol> w,
                                  std::span<const std::size_t> checkpoints, double tolerance) {
    check_alphabet(w, measure_alphabet(measure), "sample_entropy_trace");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0 || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
            throw DomainError("sample_entropy_trace: checkpoints must be positive and increasing");
    }
    if (!checkpoints.empty() && checkpoints.back() > w.size())
        throw RangeError("sample_entropy_trace: checkpoint " + std::to_string(checkpoints.back()) +
                         " beyond sequence of length " + std::to_string(w.size()));

    EntropyTrace trace;
    MeasureScorer scorer(measure);
    std::size_t next = 0;
    for (std::size_t i = 0; i < w.size() && next < checkpoints.size(); ++i) {
        scorer.push(w[i]);
        const double lp = scorer.log_probability();
        if (lp == kNegInf) {
            trace.left_support_at = i + 1;
            break;
        }
        if (i + 1 == checkpoints[next]) {
            trace.horizons.push_back(i + 1);
            trace.values.push_back(bits_per_symbol(lp, i + 1));
            ++next;
        }
    }
    if (!trace.values.empty()) {
        const auto verdict = assess_convergence(trace.horizons, trace.values, tolerance);
        trace.limit_estimate = verdict.final;
        trace.converged = verdict.converged && !trace.left_support_at;
    }
    return trace;
}

std::string_view to_string(AepVerdict v) {
    switch (v) {
        case AepVerdict::equality: return "equality";
        case AepVerdict::strict_inequality: return "strict_inequality";
        case AepVerdict::violation: return "violation";
    }
    return "unknown";
}

std::vector<ComponentBound> component_bounds(const SourceModel& model, const WordFunction& wf) {
    const auto lengths = expected_codeword_length(model, wf);
    const auto comps = ergodic_components(model);
    std::vector<ComponentBound> out;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        ComponentBound b;
        b.weight = comps[c].weight;
        b.entropy_rate = entropy_rate_exact(comps[c].model);
        b.expected_length = lengths[c].expected_length;
        b.bound = b.entropy_rate / b.expected_length;
        out.push_back(b);
    }
    return out;
}

AepVerdict classify_aep(double empirical, double bound, double tolerance) {
    if (std::abs(empirical - bound) <= tolerance) return AepVerdict::equality;
    return empirical < bound ? AepVerdict::strict_inequality : AepVerdict::violation;
}

AepReport aep_path(const InducedMeasure& measure, std::span<const ComponentBound> bounds,
                   std::size_t horizon, std::uint64_t path_seed, double tolerance) {
    const auto& model = measure.model();
    const auto sample = sample_path(model, horizon, path_seed);
    const auto encoded = encode_stream(measure.word_function(), sample.symbols);

    MeasureScorer scorer(measure);
    for (Symbol b : encoded.output) scorer.push(b);

    AepReport r;
    r.seed = path_seed;
    r.component = sample.component;
    r.input_horizon = horizon;
    r.output_horizon = encoded.boundaries.back();
    r.empirical_h = bits_per_symbol(scorer.log_probability(), r.output_horizon);
    r.bound = bounds[sample.component].bound;
    r.source_sample_entropy =
        bits_per_symbol(cylinder_log_probability(model, sample.symbols), horizon);
    r.scaled_output_entropy = static_cast<double>(r.output_horizon) /
                              static_cast<double>(horizon) * r.empirical_h;
    r.verdict = classify_aep(r.empirical_h, r.bound, tolerance);
    return r;
}

namespace {

AepExperiment prepare_aep(const SourceModel& model, const WordFunction& wf, std::size_t horizon,
                          std::size_t paths, double tolerance) {
    if (horizon < 10) throw DomainError("aep_experiment: horizon must be at least 10");
    if (paths == 0) throw DomainError("aep_experiment: need at least one path");
    if (!(tolerance > 0.0)) throw DomainError("aep_experiment: tolerance must be positive");
    AepExperiment exp;
    exp.per_component = component_bounds(model, wf);
    exp.prefix_free = is_prefix_free(wf).prefix_free;
    exp.tolerance = tolerance;
    exp.paths.resize(paths);
    return exp;
}

}  // namespace

AepExperiment aep_experiment(const SourceModel& model, const WordFunction& wf,
                             std::size_t horizon, std::size_t paths, std::uint64_t seed,
                             double tolerance) {
    auto exp = prepare_aep(model, wf, horizon, paths, tolerance);
    const InducedMeasure measure(model, wf);
    parallel_for(paths, [&](std::size_t p) {
        exp.paths[p] = aep_path(measure, exp.per_component, horizon, derive_seed(seed, p), tolerance);
    });
    return exp;
}

ConservationReport conservation_report(const SourceModel& model, const WordFunction& wf,
                                       double tolerance, std::size_t block_length,
                                       std::uint64_t cap) {
    if (!(tolerance > 0.0)) throw DomainError("conservation_report: tolerance must be positive");
    const std::size_t k = wf.output_alphabet();
    if (block_length == 0) {
        std::uint64_t count = 1;
        while (block_length < kDefaultRateBlockLength && count <= cap / k) {
            count *= k;
            ++block_length;
        }
        if (block_length == 0) throw ResourceError("conservation_report: cap below one symbol");
    }
    ConservationReport r;
    r.block_length = block_length;
    r.tolerance = tolerance;
    r.prefix_free = is_prefix_free(wf).prefix_free;
    for (const auto& c : component_bounds(model, wf)) r.integral_bound += c.weight * c.bound;
    const Measure eta = InducedMeasure(model, wf);
    r.empirical_rate = conditional_block_entropy(eta, block_length, cap);
    r.within_bound = r.empirical_rate <= r.integral_bound + tolerance;
    r.equality = std::abs(r.empirical_rate - r.integral_bound) <= tolerance;
    return r;
}

namespace reference {

double joint_entropy_exact(const Measure& measure, std::size_t n, std::uint64_t cap) {
    if (n == 0) return 0.0;
    const std::size_t k = measure_alphabet(measure);
    const auto count = enumeration_size(k, n, cap);
    std::vector<double> log_probs(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        MeasureScorer scorer(measure);
        for (Symbol a : tuple_from_index(i, n, k)) scorer.push(a);
        log_probs[i] = scorer.log_probability();
    }
    return sum_entropy_terms(log_probs);
}

AepExperiment aep_experiment(const SourceModel& model, const WordFunction& wf,
                             std::size_t horizon, std::size_t paths, std::uint64_t seed,
                             double tolerance) {
    auto exp = prepare_aep(model, wf, horizon, paths, tolerance);
    const InducedMeasure measure(model, wf);
    for (std::size_t p = 0; p < paths; ++p)
        exp.paths[p] = aep_path(measure, exp.per_component, horizon, derive_seed(seed, p), tolerance);
    return exp;
}

}  // namespace reference

}  // namespace wvs
