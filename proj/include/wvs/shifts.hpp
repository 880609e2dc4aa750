#ifndef WVS_SHIFTS_HPP
#define WVS_SHIFTS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wvs/symbols.hpp"
#include "wvs/wordcode.hpp"

namespace wvs {

inline constexpr std::size_t kMaxLookahead = 16;

// Shift function gamma defined on M-symbol windows, values in {1..N}. Because gamma is
// tabulated on windows, agreement on the first M symbols implies equal shifts.
class VariableLengthShiftSpec {
public:
    // table[tuple_index(window)] for every window of length `lookahead`.
    VariableLengthShiftSpec(std::size_t alphabet_size, std::size_t lookahead,
                            std::size_t max_shift, std::vector<std::uint32_t> table);

    // gamma == shift everywhere: the N-block shift (N = 1 is the left shift).
    static VariableLengthShiftSpec constant(std::size_t alphabet_size, std::size_t shift);

    // Shift on output sequences of wf: |c| when exactly one codeword c prefixes the
    // window, otherwise 1. Lookahead and max shift are wf.max_length().
    static VariableLengthShiftSpec from_codebook(const WordFunction& wf);

    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    std::size_t lookahead() const noexcept { return lookahead_; }
    std::size_t max_shift() const noexcept { return max_shift_; }
    const std::vector<std::uint32_t>& table() const noexcept { return table_; }

    // window.size() must be at least lookahead(); extra symbols are ignored.
    std::uint32_t operator()(std::span<const Symbol> window) const;

private:
    std::size_t alphabet_size_;
    std::size_t lookahead_;
    std::size_t max_shift_;
    std::vector<std::uint32_t> table_;
};

// Codebook-driven shift evaluated on a window that may be shorter than the longest
// codeword; only codewords that fit in the window are candidates.
std::uint32_t codebook_gamma(const WordFunction& wf, std::span<const Symbol> window);

// Block starts zeta of an orbit together with their indicator sequence xi.
struct TimeSubsequence {
    std::vector<std::size_t> zeta;
    std::vector<std::uint8_t> weights;  // xi_0 .. xi_{horizon-1}
    std::size_t horizon = 0;            // max(zeta) + 1

    // Validates that zeta starts at 0 and is strictly increasing.
    static TimeSubsequence from_zeta(std::vector<std::size_t> zeta);
};

// zeta_0 = 0, zeta_{n+1} = zeta_n + gamma(w[zeta_n ..]) for n < steps. Requires
// |w| >= zeta_steps + M; otherwise RangeError reports the length needed.
TimeSubsequence variable_length_orbit(const VariableLengthShiftSpec& spec,
                                      std::span<const Symbol> w, std::size_t steps);

// The n-fold image T_gamma^n(w), computed by applying the shift one step at a time.
std::span<const Symbol> apply_variable_length_shift(const VariableLengthShiftSpec& spec,
                                                    std::span<const Symbol> w,
                                                    std::size_t steps);

struct WeightSequence {
    std::vector<std::uint8_t> xi;
    double density = 0.0;  // (1/n) sum xi_i
};

WeightSequence weight_sequence(const TimeSubsequence& ts, std::size_t horizon);

// Finite-state coder with states {0..N-1}: emits 1 and reloads to u_i - 1 in state 0,
// otherwise emits 0 and counts down. Entries of u read in nonzero states are ignored,
// but every entry in the first n must lie in {1..N}.
std::vector<std::uint8_t> finite_state_orbit_coder(std::span<const std::uint32_t> u,
                                                   std::size_t horizon, std::size_t max_shift);

// u_i = gamma(w[i ..]) for i < count.
std::vector<std::uint32_t> shift_lengths(const VariableLengthShiftSpec& spec,
                                         std::span<const Symbol> w, std::size_t count);

struct BellowPartials {
    double lhs = 0.0;  // density * (1/k) sum_{j<k} r_{zeta_j}
    double rhs = 0.0;  // (1/n) sum_{i<n} xi_i r_i
    double density = 0.0;
    std::size_t k = 0;  // #{j : zeta_j < n}
};

BellowPartials bellow_check(std::span<const double> r, const TimeSubsequence& ts,
                            std::size_t horizon);

// F(T x) == T_gamma(F(x)) with gamma read against the codebook; the identity
// behind the stationarity of the decoder for prefix-free codes.
bool coder_commutes_with_shift(const WordFunction& wf, std::span<const Symbol> x);

}  // namespace wvs

#endif
