#ifndef WVS_ERGODIC_HPP
#define WVS_ERGODIC_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wvs/convergence.hpp"
#include "wvs/sources.hpp"
#include "wvs/symbols.hpp"
#include "wvs/wordcode.hpp"

namespace wvs {

inline constexpr std::size_t kMaxCylinderOrder = 12;

// g(w) = table(w_1..w_k): the bounded functions the ergodic checks are run against.
class CylinderFunction {
public:
    CylinderFunction(std::size_t alphabet_size, std::size_t order, std::vector<double> table);

    static CylinderFunction indicator(std::size_t alphabet_size, std::span<const Symbol> tuple);
    static CylinderFunction constant(std::size_t alphabet_size, double value);

    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    std::size_t order() const noexcept { return order_; }
    double bound() const noexcept { return bound_; }
    const std::vector<double>& table() const noexcept { return table_; }

    // window.size() >= order(); symbols beyond the order are ignored.
    double operator()(std::span<const Symbol> window) const;

private:
    std::size_t alphabet_size_;
    std::size_t order_;
    std::vector<double> table_;
    double bound_ = 0.0;
};

// Every indicator of a cylinder of order 1..max_order.
std::vector<CylinderFunction> cylinder_indicators(std::size_t alphabet_size, std::size_t max_order);

// Partial averages (1/n) sum_{i<n} g(w_{i+1} ..) at each checkpoint.
ConvergenceVerdict time_average(std::span<const Symbol> w, const CylinderFunction& g,
                                 std::span<const std::size_t> checkpoints,
                                 double tolerance = kDefaultConvergenceTolerance);

struct SpreadReport {
    std::vector<double> final_averages;  // one per path, in path order
    double mean = 0.0;
    double spread = 0.0;  // sample standard deviation across paths
};

inline constexpr double kDefaultSpreadThreshold = 0.02;

// Cross-path spread of time averages of g at `horizon` on sampled source paths.
SpreadReport ergodicity_spread(const SourceModel& model, const CylinderFunction& g,
                               std::size_t paths, std::size_t horizon, std::uint64_t seed);

// Same on the encoded paths F(x); `horizon` counts output symbols.
SpreadReport ergodicity_spread(const SourceModel& model, const WordFunction& wf,
                               const CylinderFunction& g, std::size_t paths,
                               std::size_t horizon, std::uint64_t seed);

// Encoded path long enough to hold `output_length` output symbols.
SymbolTuple encoded_path(const SourceModel& model, const WordFunction& wf,
                         std::size_t output_length, std::uint64_t seed);

struct AmsDiagnostic {
    SymbolTuple cylinder;
    ConvergenceVerdict cesaro;  // trace of (1/n) sum_{i<n} rho(T^{-i}[a]), n = 1..horizon
    // max |rho(T^{-i}[a]) - cesaro.final| over the last quartile of shifts; stays
    // large for AMS sources that are not asymptotically stationary.
    double per_step_spread = 0.0;
};

std::vector<AmsDiagnostic> ams_diagnostic(const SourceModel& model,
                                          std::span<const SymbolTuple> cylinders,
                                          std::size_t horizon,
                                          double tolerance = kDefaultConvergenceTolerance);

inline constexpr std::size_t kInducedExactShiftCap = 10;

struct InducedAmsDiagnostic {
    SymbolTuple cylinder;
    // eta(T^{-i}[b]) for i + |b| <= exact cap, by enumerating the first i symbols.
    std::vector<double> exact_shifted;
    double exact_cesaro = 0.0;
    // Ensemble estimate of the Cesàro trace from path frequencies.
    ConvergenceVerdict ensemble;
    double two_sigma = 0.0;  // 2 * standard error of ensemble.final
};

std::vector<InducedAmsDiagnostic> induced_ams_diagnostic(
    const SourceModel& model, const WordFunction& wf, std::span<const SymbolTuple> cylinders,
    std::size_t horizon, std::size_t paths, std::uint64_t seed,
    double tolerance = kDefaultConvergenceTolerance);

// Relative frequencies of all cylinders of order 1..max_order in the first `horizon`
// windows of w.
class EmpiricalComponent {
public:
    EmpiricalComponent(std::span<const Symbol> w, std::size_t alphabet_size,
                       std::size_t max_order, std::size_t horizon);

    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    std::size_t max_order() const noexcept { return counts_.size(); }
    std::size_t horizon() const noexcept { return horizon_; }
    std::uint64_t count(std::span<const Symbol> tuple) const;
    double frequency(std::span<const Symbol> tuple) const;
    // counts for order k, indexed by tuple_index
    const std::vector<std::uint64_t>& counts(std::size_t order) const { return counts_.at(order - 1); }

private:
    std::size_t alphabet_size_;
    std::size_t horizon_;
    std::vector<std::vector<std::uint64_t>> counts_;
};

namespace reference {

SpreadReport ergodicity_spread(const SourceModel& model, const WordFunction& wf,
                               const CylinderFunction& g, std::size_t paths,
                               std::size_t horizon, std::uint64_t seed);

}  // namespace reference

}  // namespace wvs

#endif
