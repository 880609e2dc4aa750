#ifndef WVS_LOGSPACE_HPP
#define WVS_LOGSPACE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace wvs {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// log(exp(a) + exp(b)); a single finite operand is returned unchanged.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

// Max-shifted sum, accumulated in index order.
inline double log_sum_exp(std::span<const double> xs) {
    double hi = kNegInf;
    for (double x : xs) hi = std::max(hi, x);
    if (hi == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - hi);
    return hi + std::log(acc);
}

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

// -p log2 p with 0 log 0 := 0.
inline double entropy_term_bits(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

inline double binary_entropy(double p) {
    return entropy_term_bits(p) + entropy_term_bits(1.0 - p);
}

}  // namespace wvs

#endif
