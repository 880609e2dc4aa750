#include "wvs/oracle.hpp"

#include <cmath>

#include "wvs/errors.hpp"

namespace wvs::oracle {

std::vector<double> induced_distribution(const SourceModel& model, const WordFunction& wf,
                                         std::size_t n) {
    if (model.alphabet_size() != wf.input_alphabet())
        throw DomainError("oracle: source and codebook alphabets differ");
    const std::size_t in_k = wf.input_alphabet();
    const std::size_t out_k = wf.output_alphabet();
    std::vector<double> q(checked_power(out_k, n), 0.0);
    const auto inputs = checked_power(in_k, n);
    // Every codeword has length >= 1, so n input symbols always cover n outputs.
    for (std::uint64_t i = 0; i < inputs; ++i) {
        const auto a = tuple_from_index(i, n, in_k);
        SymbolTuple out;
        for (Symbol s : a) {
            const auto& c = wf.codeword(s);
            out.insert(out.end(), c.begin(), c.end());
        }
        out.resize(n);
        q[tuple_index(out, out_k)] += std::exp(cylinder_log_probability(model, a));
    }
    return q;
}

}  // namespace wvs::oracle
