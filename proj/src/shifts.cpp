#include "wvs/shifts.hpp"

#include <algorithm>
#include <string>

#include "wvs/errors.hpp"

namespace wvs {

VariableLengthShiftSpec::VariableLengthShiftSpec(std::size_t alphabet_size, std::size_t lookahead,
                                                 std::size_t max_shift,
                                                 std::vector<std::uint32_t> table)
    : alphabet_size_(alphabet_size),
      lookahead_(lookahead),
      max_shift_(max_shift),
      table_(std::move(table)) {
    if (alphabet_size_ < 1) throw DomainError("shift spec: empty alphabet");
    if (lookahead_ < 1 || lookahead_ > kMaxLookahead)
        throw DomainError("shift spec: lookahead must be in 1.." + std::to_string(kMaxLookahead));
    if (max_shift_ < 1) throw DomainError("shift spec: max shift must be at least 1");
    const auto windows = checked_power(alphabet_size_, lookahead_);
    if (table_.size() != windows)
        throw DomainError("shift spec: table has " + std::to_string(table_.size()) +
                          " entries, expected " + std::to_string(windows));
    for (std::size_t i = 0; i < table_.size(); ++i) {
        if (table_[i] < 1 || table_[i] > max_shift_)
            throw DomainError("shift spec: gamma at window " + std::to_string(i) + " is " +
                              std::to_string(table_[i]) + ", outside 1.." +
                              std::to_string(max_shift_));
    }
}

VariableLengthShiftSpec VariableLengthShiftSpec::constant(std::size_t alphabet_size,
                                                          std::size_t shift) {
    return VariableLengthShiftSpec(alphabet_size, 1, shift,
                                   std::vector<std::uint32_t>(alphabet_size,
                                                              static_cast<std::uint32_t>(shift)));
}

VariableLengthShiftSpec VariableLengthShiftSpec::from_codebook(const WordFunction& wf) {
    const std::size_t k = wf.output_alphabet();
    const std::size_t m = wf.max_length();
    if (m > kMaxLookahead) throw ResourceError("shift spec: codewords longer than lookahead cap");
    const auto windows = checked_power(k, m);
    std::vector<std::uint32_t> table(windows);
    for (std::uint64_t i = 0; i < windows; ++i) {
        const auto window = tuple_from_index(i, m, k);
        table[i] = codebook_gamma(wf, window);
    }
    return VariableLengthShiftSpec(k, m, m, std::move(table));
}

std::uint32_t VariableLengthShiftSpec::operator()(std::span<const Symbol> window) const {
    if (window.size() < lookahead_)
        throw RangeError("shift spec: window of " + std::to_string(window.size()) +
                         " symbols, lookahead needs " + std::to_string(lookahead_));
    const auto head = window.first(lookahead_);
    check_alphabet(head, alphabet_size_, "shift window");
    return table_[tuple_index(head, alphabet_size_)];
}

std::uint32_t codebook_gamma(const WordFunction& wf, std::span<const Symbol> window) {
    const SymbolTuple* match = nullptr;
    for (const auto& c : wf.codewords()) {
        if (c.size() > window.size() || !std::equal(c.begin(), c.end(), window.begin())) continue;
        if (match != nullptr && *match != c) return 1;  // not unique
        match = &c;
    }
    return match != nullptr ? static_cast<std::uint32_t>(match->size()) : 1;
}

TimeSubsequence TimeSubsequence::from_zeta(std::vector<std::size_t> zeta) {
    if (zeta.empty() || zeta.front() != 0)
        throw DomainError("time subsequence must start at 0");
    for (std::size_t i = 1; i < zeta.size(); ++i)
        if (zeta[i] <= zeta[i - 1])
            throw DomainError("time subsequence not strictly increasing at index " +
                              std::to_string(i));
    TimeSubsequence ts;
    ts.horizon = zeta.back() + 1;
    ts.weights.assign(ts.horizon, 0);
    for (std::size_t z : zeta) ts.weights[z] = 1;
    ts.zeta = std::move(zeta);
    return ts;
}

TimeSubsequence variable_length_orbit(const VariableLengthShiftSpec& spec,
                                      std::span<const Symbol> w, std::size_t steps) {
    const std::size_t m = spec.lookahead();
    std::vector<std::size_t> zeta{0};
    zeta.reserve(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) {
        const std::size_t pos = zeta.back();
        if (pos + m > w.size())
            throw RangeError("variable_length_orbit: input of " + std::to_string(w.size()) +
                             " symbols is too short; at least " + std::to_string(pos + m) +
                             " needed to evaluate the shift at block start " +
                             std::to_string(pos));
        if (n == steps) break;
        zeta.push_back(pos + spec(w.subspan(pos)));
    }
    return TimeSubsequence::from_zeta(std::move(zeta));
}

std::span<const Symbol> apply_variable_length_shift(const VariableLengthShiftSpec& spec,
                                                    std::span<const Symbol> w,
                                                    std::size_t steps) {
    for (std::size_t n = 0; n < steps; ++n) {
        const std::uint32_t g = spec(w);
        if (g > w.size()) throw RangeError("apply_variable_length_shift: ran past input");
        w = w.subspan(g);
    }
    return w;
}

WeightSequence weight_sequence(const TimeSubsequence& ts, std::size_t horizon) {
    if (horizon == 0) throw DomainError("weight_sequence: horizon must be at least 1");
    if (horizon > ts.horizon)
        throw RangeError("weight_sequence: horizon " + std::to_string(horizon) +
                         " beyond computed subsequence (max " + std::to_string(ts.horizon) + ")");
    WeightSequence out;
    out.xi.assign(ts.weights.begin(), ts.weights.begin() + static_cast<std::ptrdiff_t>(horizon));
    std::size_t ones = 0;
    for (auto v : out.xi) ones += v;
    out.density = static_cast<double>(ones) / static_cast<double>(horizon);
    return out;
}

std::vector<std::uint8_t> finite_state_orbit_coder(std::span<const std::uint32_t> u,
                                                   std::size_t horizon, std::size_t max_shift) {
    if (horizon > u.size())
        throw RangeError("finite_state_orbit_coder: horizon " + std::to_string(horizon) +
                         " exceeds " + std::to_string(u.size()) + " shift values");
    std::vector<std::uint8_t> z(horizon);
    std::uint32_t state = 0;
    for (std::size_t i = 0; i < horizon; ++i) {
        if (u[i] < 1 || u[i] > max_shift)
            throw DomainError("finite_state_orbit_coder: u[" + std::to_string(i) + "] = " +
                              std::to_string(u[i]) + " outside 1.." + std::to_string(max_shift));
        z[i] = state == 0 ? 1 : 0;
        state = state == 0 ? u[i] - 1 : state - 1;
    }
    return z;
}

std::vector<std::uint32_t> shift_lengths(const VariableLengthShiftSpec& spec,
                                         std::span<const Symbol> w, std::size_t count) {
    if (count + spec.lookahead() > w.size() + 1)
        throw RangeError("shift_lengths: input of " + std::to_string(w.size()) +
                         " symbols; at least " + std::to_string(count + spec.lookahead() - 1) +
                         " needed");
    std::vector<std::uint32_t> u(count);
    for (std::size_t i = 0; i < count; ++i) u[i] = spec(w.subspan(i));
    return u;
}

BellowPartials bellow_check(std::span<const double> r, const TimeSubsequence& ts,
                            std::size_t horizon) {
    if (r.size() < horizon)
        throw RangeError("bellow_check: sequence r has " + std::to_string(r.size()) +
                         " values, horizon is " + std::to_string(horizon));
    if (horizon > ts.horizon)
        throw RangeError("bellow_check: time subsequence computed only up to " +
                         std::to_string(ts.zeta.back()) + ", horizon is " +
                         std::to_string(horizon));
    BellowPartials out;
    double sub_sum = 0.0;
    for (std::size_t z : ts.zeta) {
        if (z >= horizon) break;
        sub_sum += r[z];
        ++out.k;
    }
    if (out.k == 0) throw DegenerateInputError("bellow_check: no block start below horizon");
    double weighted = 0.0;
    std::size_t ones = 0;
    for (std::size_t i = 0; i < horizon; ++i) {
        if (ts.weights[i] != 0) {
            weighted += r[i];
            ++ones;
        }
    }
    const double n = static_cast<double>(horizon);
    out.density = static_cast<double>(ones) / n;
    out.lhs = out.density * (sub_sum / static_cast<double>(out.k));
    out.rhs = weighted / n;
    return out;
}

bool coder_commutes_with_shift(const WordFunction& wf, std::span<const Symbol> x) {
    if (x.empty()) return true;
    const auto y = encode_stream(wf, x).output;
    const auto shifted_input = encode_stream(wf, x.subspan(1)).output;
    const std::uint32_t g = codebook_gamma(wf, y);
    if (g > y.size()) return false;
    const auto tail = std::span<const Symbol>(y).subspan(g);
    return std::equal(tail.begin(), tail.end(), shifted_input.begin(), shifted_input.end());
}

}  // namespace wvs
