#ifndef WVS_WORDCODE_HPP
#define WVS_WORDCODE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wvs/sources.hpp"
#include "wvs/symbols.hpp"

namespace wvs {

// f : A -> B^+, one codeword per input symbol. Codewords need not be distinct or
// prefix-free; only decode_prefix_free requires that.
class WordFunction {
public:
    WordFunction(std::size_t input_alphabet, std::size_t output_alphabet,
                 std::vector<SymbolTuple> codewords);

    std::size_t input_alphabet() const noexcept { return input_alphabet_; }
    std::size_t output_alphabet() const noexcept { return output_alphabet_; }
    std::size_t max_length() const noexcept { return max_length_; }
    const std::vector<SymbolTuple>& codewords() const noexcept { return codewords_; }
    const SymbolTuple& codeword(Symbol a) const { return codewords_.at(a); }
    std::size_t length(Symbol a) const { return codewords_.at(a).size(); }

    bool operator==(const WordFunction&) const = default;

private:
    std::size_t input_alphabet_;
    std::size_t output_alphabet_;
    std::size_t max_length_ = 0;
    std::vector<SymbolTuple> codewords_;
};

struct PrefixCheck {
    bool prefix_free = false;
    // Input symbols (i < j) whose codewords are equal or prefix one another.
    std::optional<std::pair<Symbol, Symbol>> witness;
};

PrefixCheck is_prefix_free(const WordFunction& wf);

// Sum over codewords of |B|^{-|c|}; at most 1 for prefix-free codes.
double kraft_sum(const WordFunction& wf);

struct EncodeResult {
    SymbolTuple output;
    // zeta_0 = 0 < zeta_1 < ... < zeta_n, cumulative codeword lengths.
    std::vector<std::size_t> boundaries;
};

// Appends f(x_1) f(x_2) ... one input symbol at a time.
class StreamEncoder {
public:
    explicit StreamEncoder(const WordFunction& wf) : wf_(&wf) { result_.boundaries.push_back(0); }
    void push(Symbol a);
    const EncodeResult& result() const noexcept { return result_; }
    EncodeResult take() { return std::move(result_); }

private:
    const WordFunction* wf_;
    EncodeResult result_;
};

EncodeResult encode_stream(const WordFunction& wf, std::span<const Symbol> x);

struct DecodeResult {
    SymbolTuple symbols;
    std::size_t consumed = 0;
};

// Greedy parse of complete codewords from the front of y. A trailing strict prefix of
// some codeword is left unconsumed. Throws PreconditionError if wf is not prefix-free
// and DecodeError (with the position) when y leaves the set of encoder outputs.
DecodeResult decode_prefix_free(const WordFunction& wf, std::span<const Symbol> y);

struct ComponentLength {
    double weight;
    double expected_length;
};

// E[l] under the stationary law of each ergodic component of the model.
std::vector<ComponentLength> expected_codeword_length(const SourceModel& model,
                                                      const WordFunction& wf);

}  // namespace wvs

#endif
