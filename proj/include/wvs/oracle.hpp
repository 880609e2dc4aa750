#ifndef WVS_ORACLE_HPP
#define WVS_ORACLE_HPP

#include <cstddef>
#include <vector>

#include "wvs/sources.hpp"
#include "wvs/wordcode.hpp"

namespace wvs::oracle {

// q(b^n) for every b^n, indexed by tuple_index, by enumerating all a^n and adding
// mu([a^n]) to the bucket of the first n symbols of F(a^n). Shares no code with the
// forward recursion; exponential in n, meant for small checks only.
std::vector<double> induced_distribution(const SourceModel& model, const WordFunction& wf,
                                         std::size_t n);

}  // namespace wvs::oracle

#endif
