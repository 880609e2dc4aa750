#ifndef WVS_SYMBOLS_HPP
#define WVS_SYMBOLS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wvs {

using Symbol = std::uint32_t;
using SymbolTuple = std::vector<Symbol>;

// Throws DomainError naming the first offending position.
void check_alphabet(std::span<const Symbol> symbols, std::size_t alphabet_size,
                    std::string_view what);

// Digit strings ("0110") are the textual form used by codebooks and the CLI;
// alphabets are therefore limited to 10 symbols on that path.
SymbolTuple parse_digits(std::string_view text);
std::string format_digits(std::span<const Symbol> symbols);

// Index of a tuple in lexicographic order over an alphabet of size k,
// first symbol most significant.
std::uint64_t tuple_index(std::span<const Symbol> symbols, std::size_t k);
SymbolTuple tuple_from_index(std::uint64_t index, std::size_t length, std::size_t k);

// k^n with overflow reported as ResourceError.
std::uint64_t checked_power(std::size_t k, std::size_t n);

}  // namespace wvs

#endif
