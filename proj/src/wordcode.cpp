#include "wvs/wordcode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wvs/errors.hpp"

namespace wvs {
namespace {

bool is_prefix_of(const SymbolTuple& a, const SymbolTuple& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

WordFunction::WordFunction(std::size_t input_alphabet, std::size_t output_alphabet,
                           std::vector<SymbolTuple> codewords)
    : input_alphabet_(input_alphabet),
      output_alphabet_(output_alphabet),
      codewords_(std::move(codewords)) {
    if (input_alphabet_ < 1) throw DomainError("word function: empty input alphabet");
    if (output_alphabet_ < 1) throw DomainError("word function: empty output alphabet");
    if (codewords_.size() != input_alphabet_)
        throw DomainError("word function: " + std::to_string(codewords_.size()) +
                          " codewords for input alphabet of size " +
                          std::to_string(input_alphabet_));
    for (std::size_t a = 0; a < codewords_.size(); ++a) {
        if (codewords_[a].empty())
            throw DomainError("word function: codeword " + std::to_string(a) + " is empty");
        check_alphabet(codewords_[a], output_alphabet_, "codeword " + std::to_string(a));
        max_length_ = std::max(max_length_, codewords_[a].size());
    }
}

PrefixCheck is_prefix_free(const WordFunction& wf) {
    const auto& cw = wf.codewords();
    for (std::size_t i = 0; i < cw.size(); ++i) {
        for (std::size_t j = i + 1; j < cw.size(); ++j) {
            // Equal codewords break injectivity; otherwise test the no-prefix clause.
            if (is_prefix_of(cw[i], cw[j]) || is_prefix_of(cw[j], cw[i]))
                return {false, std::pair{static_cast<Symbol>(i), static_cast<Symbol>(j)}};
        }
    }
    return {true, std::nullopt};
}

double kraft_sum(const WordFunction& wf) {
    double sum = 0.0;
    const auto base = static_cast<double>(wf.output_alphabet());
    for (const auto& c : wf.codewords()) sum += std::pow(base, -static_cast<double>(c.size()));
    return sum;
}

void StreamEncoder::push(Symbol a) {
    if (a >= wf_->input_alphabet())
        throw DomainError("encode: symbol " + std::to_string(a) + " at position " +
                          std::to_string(result_.boundaries.size() - 1) +
                          " is outside input alphabet of size " +
                          std::to_string(wf_->input_alphabet()));
    const auto& c = wf_->codeword(a);
    result_.output.insert(result_.output.end(), c.begin(), c.end());
    result_.boundaries.push_back(result_.output.size());
}

EncodeResult encode_stream(const WordFunction& wf, std::span<const Symbol> x) {
    StreamEncoder enc(wf);
    for (Symbol a : x) enc.push(a);
    return enc.take();
}

DecodeResult decode_prefix_free(const WordFunction& wf, std::span<const Symbol> y) {
    if (const auto check = is_prefix_free(wf); !check.prefix_free)
        throw PreconditionError("decode: word function is not prefix-free (codewords " +
                                std::to_string(check.witness->first) + " and " +
                                std::to_string(check.witness->second) + " collide)");
    check_alphabet(y, wf.output_alphabet(), "decode input");

    // Trie over codewords: node -> child per output symbol; leaves carry the input symbol.
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    const std::size_t k = wf.output_alphabet();
    std::vector<std::size_t> child(k, kNone);
    std::vector<std::size_t> leaf(1, kNone);
    for (std::size_t a = 0; a < wf.input_alphabet(); ++a) {
        std::size_t node = 0;
        for (Symbol b : wf.codeword(static_cast<Symbol>(a))) {
            std::size_t& next = child[node * k + b];
            if (next == kNone) {
                next = leaf.size();
                leaf.push_back(kNone);
                child.resize(child.size() + k, kNone);
            }
            node = child[node * k + b];
        }
        leaf[node] = a;
    }

    DecodeResult out;
    std::size_t node = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        node = child[node * k + y[i]];
        if (node == kNone)
            throw DecodeError("decode: block starting at position " + std::to_string(start) +
                                  " matches no codeword (mismatch at position " +
                                  std::to_string(i) + ")",
                              i);
        if (leaf[node] != kNone) {
            out.symbols.push_back(static_cast<Symbol>(leaf[node]));
            out.consumed = i + 1;
            node = 0;
            start = i + 1;
        }
    }
    return out;
}

std::vector<ComponentLength> expected_codeword_length(const SourceModel& model,
                                                      const WordFunction& wf) {
    if (model.alphabet_size() != wf.input_alphabet())
        throw DomainError("expected_codeword_length: source alphabet " +
                          std::to_string(model.alphabet_size()) +
                          " does not match word function input alphabet " +
                          std::to_string(wf.input_alphabet()));
    std::vector<ComponentLength> out;
    for (const auto& comp : ergodic_components(model)) {
        const auto marginal = stationary_marginal(comp.model);
        double e = 0.0;
        for (std::size_t a = 0; a < marginal.size(); ++a)
            e += marginal[a] * static_cast<double>(wf.length(static_cast<Symbol>(a)));
        out.push_back({comp.weight, e});
    }
    return out;
}

}  // namespace wvs
