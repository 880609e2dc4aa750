// Hand-rolled generators for property tests.
#pragma once

#include <cstdint>
#include <vector>

#include "wvs/rng.hpp"
#include "wvs/sources.hpp"
#include "wvs/wordcode.hpp"

namespace gen {

using wvs::Rng;

inline std::vector<double> simplex(Rng& rng, std::size_t k, double floor = 0.05) {
    std::vector<double> v(k);
    double sum = 0.0;
    for (auto& x : v) sum += (x = floor + wvs::uniform01(rng));
    for (auto& x : v) x /= sum;
    return v;
}

inline wvs::SourceModel iid(Rng& rng, std::size_t k) { return wvs::SourceModel::iid(simplex(rng, k)); }

inline wvs::SourceModel markov(Rng& rng, std::size_t k) {
    wvs::Matrix p(k);
    for (auto& row : p) row = simplex(rng, k);
    return wvs::SourceModel::markov(std::move(p), simplex(rng, k, 0.0));
}

inline wvs::SourceModel model(Rng& rng, std::size_t k, std::size_t kind) {
    switch (kind % 3) {
        case 0: return iid(rng, k);
        case 1: return markov(rng, k);
        default: return wvs::SourceModel::mixture(simplex(rng, 2), {iid(rng, k), markov(rng, k)});
    }
}

inline wvs::SymbolTuple word(Rng& rng, std::size_t k, std::size_t max_len) {
    wvs::SymbolTuple w(1 + rng() % max_len);
    for (auto& s : w) s = static_cast<wvs::Symbol>(rng() % k);
    return w;
}

inline wvs::WordFunction codebook(Rng& rng, std::size_t in_k, std::size_t out_k, std::size_t max_len) {
    std::vector<wvs::SymbolTuple> words(in_k);
    for (auto& w : words) w = word(rng, out_k, max_len);
    return wvs::WordFunction(in_k, out_k, std::move(words));
}

inline wvs::WordFunction prefix_free_codebook(Rng& rng, std::size_t in_k, std::size_t out_k,
                                              std::size_t max_len) {
    while (true) {
        auto wf = codebook(rng, in_k, out_k, max_len);
        if (wvs::is_prefix_free(wf).prefix_free) return wf;
    }
}

inline wvs::SymbolTuple sequence(Rng& rng, std::size_t k, std::size_t n) {
    wvs::SymbolTuple w(n);
    for (auto& s : w) s = static_cast<wvs::Symbol>(rng() % k);
    return w;
}

}  // namespace gen
