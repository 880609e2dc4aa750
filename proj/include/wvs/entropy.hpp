#ifndef WVS_ENTROPY_HPP
#define WVS_ENTROPY_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "wvs/convergence.hpp"
#include "wvs/sources.hpp"
#include "wvs/symbols.hpp"
#include "wvs/wordcode.hpp"

namespace wvs {

// The law eta = mu o F^{-1} of the word-valued output process.
class InducedMeasure {
public:
    // Throws DomainError when the source and input alphabets differ.
    InducedMeasure(SourceModel model, WordFunction wf);

    const SourceModel& model() const noexcept { return model_; }
    const WordFunction& word_function() const noexcept { return wf_; }
    std::size_t alphabet_size() const noexcept { return wf_.output_alphabet(); }

private:
    SourceModel model_;
    WordFunction wf_;
};

// Forward recursion for q(b^n) under one iid/markov source.
//
// alpha(j, s) is the probability that some codeword sequence spells b_1..b_j exactly
// and leaves the source in memory state s. Extending by a codeword that matches b
// moves mass from alpha(j, .) to alpha(j + |c|, .). The codeword that covers position
// n starts at some j in [n - N, n - 1]; summing alpha(j, s) P(a | s) over codewords
// f(a) that agree with b_{j+1..n} on their overlap gives q(b^n), the rest of the
// input marginalising to 1. Only the last N + 1 rows are kept, so pushing a symbol
// costs O(N^2 |A| |S|) and memory is independent of n.
class InducedForward {
public:
    InducedForward(const SourceModel& part, const WordFunction& wf);

    void push(Symbol b);
    // log q(b_1..b_n) for the pushed prefix; 0 for the empty prefix.
    double log_probability() const;
    // log sum_s alpha(n, s) for the newest row.
    double newest_row_log_mass() const;
    std::size_t length() const noexcept { return length_; }

private:
    double& alpha(std::size_t j, std::size_t s) { return rows_[(j % ring_) * states_ + s]; }
    double alpha(std::size_t j, std::size_t s) const { return rows_[(j % ring_) * states_ + s]; }
    Symbol recent(std::size_t pos) const { return recent_[pos % max_len_]; }
    // Does codeword a agree with b_{j+1..j+len} (positions j..j+len-1, 0-based)?
    bool matches(Symbol a, std::size_t j, std::size_t len) const;

    const SourceModel* part_;
    const WordFunction* wf_;
    std::size_t max_len_;
    std::size_t ring_;
    std::size_t states_;
    std::vector<double> rows_;
    std::vector<Symbol> recent_;
    std::size_t length_ = 0;
};

// A measure on sequences whose cylinder probabilities can be scored incrementally.
using Measure = std::variant<SourceModel, InducedMeasure>;

std::size_t measure_alphabet(const Measure& measure);

// Running log rho([w^n]). Holds references into `measure`, which must outlive it.
class MeasureScorer {
public:
    explicit MeasureScorer(const Measure& measure);
    explicit MeasureScorer(const SourceModel& model);
    explicit MeasureScorer(const InducedMeasure& measure);
    void push(Symbol a);
    double log_probability() const;
    std::size_t length() const noexcept { return length_; }

private:
    std::size_t alphabet_;
    std::optional<PrefixLikelihood> source_;
    std::vector<InducedForward> induced_;
    std::vector<double> log_weights_;
    std::size_t length_ = 0;
};

// log q(b^n) = log sum over a^n in f^{-1} b^n of mu([a^n]); -inf when b^n has no
// preimage. Mixtures combine the per-component results by log-sum.
double induced_cylinder_log_probability(const SourceModel& model, const WordFunction& wf,
                                        std::span<const Symbol> b);

double log_probability(const Measure& measure, std::span<const Symbol> tuple);

// Number of cylinders joint_entropy_exact may enumerate (16 binary symbols).
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 16;

// H_n in bits by enumerating every n-tuple. Throws ResourceError when |alphabet|^n
// exceeds `cap`. Cylinders are scored in parallel and summed in index order, so the
// result is identical for every thread count.
double joint_entropy_exact(const Measure& measure, std::size_t n,
                           std::uint64_t cap = kDefaultEnumerationCap);

// H_n - H_{n-1}, the conditional block entropy used as the entropy-rate estimate.
double conditional_block_entropy(const Measure& measure, std::size_t n,
                                 std::uint64_t cap = kDefaultEnumerationCap);

struct EntropyTrace {
    std::vector<std::size_t> horizons;
    std::vector<double> values;  // -(1/n) log2 rho([w^n]), bits/symbol
    double limit_estimate = 0.0;
    bool converged = false;
    // First n with rho([w^n]) = 0; the trace stops before it.
    std::optional<std::size_t> left_support_at;
};

EntropyTrace sample_entropy_trace(const Measure& measure, std::span<const Symbol> w,
                                  std::span<const std::size_t> checkpoints,
                                  double tolerance = kDefaultConvergenceTolerance);

inline constexpr double kDefaultAepTolerance = 0.02;

enum class AepVerdict { equality, strict_inequality, violation };
std::string_view to_string(AepVerdict v);

struct ComponentBound {
    double weight = 0.0;
    double entropy_rate = 0.0;     // bits per source symbol
    double expected_length = 0.0;  // E[l] under the component's stationary law
    double bound = 0.0;            // entropy_rate / expected_length
};

// Per-component right-hand side of the word-valued AEP bound.
std::vector<ComponentBound> component_bounds(const SourceModel& model, const WordFunction& wf);

struct AepReport {
    std::uint64_t seed = 0;
    std::size_t component = 0;
    std::size_t input_horizon = 0;
    std::size_t output_horizon = 0;     // zeta_n
    double empirical_h = 0.0;           // -(1/zeta_n) log2 eta([y^{zeta_n}])
    double bound = 0.0;
    double source_sample_entropy = 0.0; // -(1/n) log2 mu([x^n])
    double scaled_output_entropy = 0.0; // (zeta_n / n) * empirical_h
    AepVerdict verdict = AepVerdict::equality;
};

struct AepExperiment {
    std::vector<ComponentBound> per_component;
    bool prefix_free = false;
    double tolerance = kDefaultAepTolerance;
    std::vector<AepReport> paths;
};

AepVerdict classify_aep(double empirical, double bound, double tolerance);

// Paths run in parallel; path p uses derive_seed(seed, p) and owns slot p of the result.
AepExperiment aep_experiment(const SourceModel& model, const WordFunction& wf,
                             std::size_t horizon, std::size_t paths, std::uint64_t seed,
                             double tolerance = kDefaultAepTolerance);

// One path of aep_experiment.
AepReport aep_path(const InducedMeasure& measure, std::span<const ComponentBound> bounds,
                   std::size_t horizon, std::uint64_t path_seed, double tolerance);

struct ConservationReport {
    double integral_bound = 0.0;   // sum_c w_c H(c) / E_c[l]
    double empirical_rate = 0.0;   // H_n(eta) - H_{n-1}(eta)
    std::size_t block_length = 0;
    bool prefix_free = false;
    double tolerance = 0.0;
    bool within_bound = false;     // empirical <= bound + tol
    bool equality = false;         // |empirical - bound| <= tol
};

inline constexpr std::size_t kDefaultRateBlockLength = 14;

// `block_length` 0 selects min(kDefaultRateBlockLength, largest n under the cap).
ConservationReport conservation_report(const SourceModel& model, const WordFunction& wf,
                                       double tolerance, std::size_t block_length = 0,
                                       std::uint64_t cap = kDefaultEnumerationCap);

namespace reference {

// Serial per-cylinder evaluation, no prefix sharing. Kept as the oracle for the
// parallel kernels; bit-identical results are expected.
double joint_entropy_exact(const Measure& measure, std::size_t n,
                           std::uint64_t cap = kDefaultEnumerationCap);

AepExperiment aep_experiment(const SourceModel& model, const WordFunction& wf,
                             std::size_t horizon, std::size_t paths, std::uint64_t seed,
                             double tolerance = kDefaultAepTolerance);

}  // namespace reference

}  // namespace wvs

#endif
