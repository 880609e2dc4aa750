#ifndef WVS_SOURCES_HPP
#define WVS_SOURCES_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wvs/symbols.hpp"

namespace wvs {

using Matrix = std::vector<std::vector<double>>;

enum class SourceKind { iid, markov, mixture };

// A finite-alphabet source given by its Kolmogorov measure: i.i.d., first-order
// Markov with an arbitrary initial law, or a finite mixture of ergodic i.i.d./Markov
// components. Immutable once built; every factory validates its arguments and
// throws DomainError on malformed input.
class SourceModel {
public:
    static SourceModel iid(std::vector<double> dist);
    static SourceModel markov(Matrix transitions, std::vector<double> initial);
    static SourceModel mixture(std::vector<double> weights, std::vector<SourceModel> components);

    SourceKind kind() const noexcept { return kind_; }
    std::size_t alphabet_size() const noexcept { return alphabet_size_; }

    // iid only
    const std::vector<double>& distribution() const;
    // markov only
    const Matrix& transitions() const;
    const std::vector<double>& initial() const;
    // mixture only
    const std::vector<double>& weights() const;
    const std::vector<SourceModel>& components() const;

    // Memory-chain view of an iid/markov model. State 0 is the start state; for
    // markov, state 1+a means "last symbol was a". iid has the single state 0.
    std::size_t chain_states() const;
    double log_transition(std::size_t state, Symbol a) const {
        return log_table_[state * alphabet_size_ + a];
    }
    std::size_t next_state(std::size_t /*state*/, Symbol a) const {
        return kind_ == SourceKind::markov ? static_cast<std::size_t>(a) + 1 : 0;
    }

    // Stable identifier derived from the parameters (FNV-1a over their bytes).
    std::uint64_t fingerprint() const;

    bool operator==(const SourceModel& other) const;

private:
    SourceModel() = default;
    void build_log_table();

    SourceKind kind_ = SourceKind::iid;
    std::size_t alphabet_size_ = 0;
    std::vector<double> dist_;
    Matrix transitions_;
    std::vector<double> initial_;
    std::vector<double> weights_;
    std::vector<SourceModel> components_;
    std::vector<double> log_table_;
};

struct PathSample {
    SymbolTuple symbols;
    std::uint64_t seed = 0;
    std::uint64_t model_id = 0;
    // Mixture component the path was drawn from; 0 for non-mixtures.
    std::size_t component = 0;
};

struct WeightedComponent {
    double weight;
    SourceModel model;
};

// Longest shift accepted by shifted_cylinder_probability and the Cesàro helpers.
inline constexpr std::size_t kMaxShift = std::size_t{1} << 24;

namespace markov {

// Solves (P^T - I) pi = 0 with sum(pi) = 1 directly; falls back to power
// iteration on the lazy chain (tolerance 1e-12, at most 1e6 sweeps).
std::vector<double> stationary_distribution(const Matrix& transitions);
bool is_irreducible(const Matrix& transitions);
// Period of an irreducible chain (1 = aperiodic).
std::size_t period(const Matrix& transitions);

}  // namespace markov

// Natural log of mu([a^n]); -inf for zero-probability cylinders.
double cylinder_log_probability(const SourceModel& model, std::span<const Symbol> tuple);

// Mixtures pick one component per path from the weights and hold it fixed.
PathSample sample_path(const SourceModel& model, std::size_t length, std::uint64_t seed);

// Probability that the tuple occurs at positions shift+1 .. shift+n.
double shifted_cylinder_probability(const SourceModel& model, std::span<const Symbol> tuple,
                                    std::size_t shift);

// rho(T^{-i}[a^n]) for i = 0 .. count-1, computed by incremental propagation.
std::vector<double> shifted_cylinder_series(const SourceModel& model,
                                            std::span<const Symbol> tuple, std::size_t count);

// (1/n) * sum_{i<n} rho(T^{-i}[a^n]).
double cesaro_cylinder_average(const SourceModel& model, std::span<const Symbol> tuple,
                               std::size_t horizon);

std::vector<WeightedComponent> ergodic_components(const SourceModel& model);

// Law of X_1 under the stationary version of an iid/markov model.
std::vector<double> stationary_marginal(const SourceModel& model);

// Bits per symbol. Mixtures report the weighted average of component rates.
double entropy_rate_exact(const SourceModel& model);

// Running log mu([w^n]) as symbols are appended. Mixtures keep one running value per
// component and combine them by log-sum on demand.
class PrefixLikelihood {
public:
    explicit PrefixLikelihood(const SourceModel& model);
    void push(Symbol a);
    double log_probability() const;
    std::size_t length() const noexcept { return length_; }

private:
    const SourceModel* model_;
    std::vector<const SourceModel*> parts_;
    std::vector<double> log_weights_;
    std::vector<double> running_;
    std::vector<std::size_t> states_;
    std::size_t length_ = 0;
};

}  // namespace wvs

#endif
