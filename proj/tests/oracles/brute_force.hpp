// Test-only reference computations. Everything here works in linear space straight
// from the model parameters and shares no code with the library's recursions.
#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "wvs/shifts.hpp"
#include "wvs/sources.hpp"
#include "wvs/wordcode.hpp"

namespace oracle {

using wvs::SourceKind;
using wvs::SourceModel;
using wvs::Symbol;
using wvs::SymbolTuple;
using wvs::WordFunction;

inline double probability(const SourceModel& m, const SymbolTuple& a) {
    switch (m.kind()) {
        case SourceKind::iid: {
            double p = 1.0;
            for (Symbol s : a) p *= m.distribution()[s];
            return p;
        }
        case SourceKind::markov: {
            if (a.empty()) return 1.0;
            double p = m.initial()[a[0]];
            for (std::size_t i = 1; i < a.size(); ++i) p *= m.transitions()[a[i - 1]][a[i]];
            return p;
        }
        case SourceKind::mixture: {
            double p = 0.0;
            for (std::size_t c = 0; c < m.components().size(); ++c)
                p += m.weights()[c] * probability(m.components()[c], a);
            return p;
        }
    }
    return 0.0;
}

// All tuples of length n over {0..k-1}, last symbol varying fastest.
inline std::vector<SymbolTuple> all_tuples(std::size_t k, std::size_t n) {
    std::vector<SymbolTuple> out;
    SymbolTuple t(n, 0);
    while (true) {
        out.push_back(t);
        std::size_t i = n;
        while (i > 0 && ++t[i - 1] == k) t[--i] = 0;
        if (i == 0) break;
    }
    return out;
}

inline SymbolTuple concatenate(const WordFunction& wf, const SymbolTuple& x) {
    SymbolTuple y;
    for (Symbol s : x)
        for (Symbol b : wf.codewords()[s]) y.push_back(b);
    return y;
}

// q(b^n) for every b^n with positive mass.
inline std::map<SymbolTuple, double> induced(const SourceModel& m, const WordFunction& wf,
                                             std::size_t n) {
    std::map<SymbolTuple, double> q;
    for (const auto& a : all_tuples(wf.input_alphabet(), n)) {
        auto y = concatenate(wf, a);
        y.resize(n);
        q[y] += probability(m, a);
    }
    return q;
}

inline double entropy_bits(const std::map<SymbolTuple, double>& dist) {
    double h = 0.0;
    for (const auto& [t, p] : dist)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

inline double binary_entropy(double p) {
    return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

// Block starts obtained by evaluating gamma window by window.
inline std::vector<std::size_t> orbit(const wvs::VariableLengthShiftSpec& spec,
                                      const SymbolTuple& w, std::size_t steps) {
    std::vector<std::size_t> zeta{0};
    for (std::size_t j = 0; j < steps; ++j) {
        const std::size_t z = zeta.back();
        SymbolTuple window(w.begin() + static_cast<std::ptrdiff_t>(z),
                           w.begin() + static_cast<std::ptrdiff_t>(z + spec.lookahead()));
        std::size_t idx = 0;
        for (Symbol s : window) idx = idx * spec.alphabet_size() + s;
        zeta.push_back(z + spec.table()[idx]);
    }
    return zeta;
}

}  // namespace oracle
