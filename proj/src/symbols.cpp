#include "wvs/symbols.hpp"

#include <limits>
#include <sstream>

#include "wvs/errors.hpp"

namespace wvs {

void check_alphabet(std::span<const Symbol> symbols, std::size_t alphabet_size,
                    std::string_view what) {
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (symbols[i] >= alphabet_size) {
            std::ostringstream msg;
            msg << what << ": symbol " << symbols[i] << " at position " << i
                << " is outside alphabet of size " << alphabet_size;
            throw DomainError(msg.str());
        }
    }
}

SymbolTuple parse_digits(std::string_view text) {
    SymbolTuple out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') {
            std::ostringstream msg;
            msg << "invalid symbol character '" << c << "' at position " << i;
            throw DomainError(msg.str());
        }
        out.push_back(static_cast<Symbol>(c - '0'));
    }
    return out;
}

std::string format_digits(std::span<const Symbol> symbols) {
    std::string out;
    out.reserve(symbols.size());
    for (Symbol s : symbols) {
        if (s > 9) throw DomainError("symbol " + std::to_string(s) + " has no digit form");
        out.push_back(static_cast<char>('0' + s));
    }
    return out;
}

std::uint64_t tuple_index(std::span<const Symbol> symbols, std::size_t k) {
    std::uint64_t idx = 0;
    for (Symbol s : symbols) idx = idx * k + s;
    return idx;
}

SymbolTuple tuple_from_index(std::uint64_t index, std::size_t length, std::size_t k) {
    SymbolTuple out(length);
    for (std::size_t i = length; i-- > 0;) {
        out[i] = static_cast<Symbol>(index % k);
        index /= k;
    }
    return out;
}

std::uint64_t checked_power(std::size_t k, std::size_t n) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (r > std::numeric_limits<std::uint64_t>::max() / k)
            throw ResourceError("alphabet power " + std::to_string(k) + "^" +
                                std::to_string(n) + " overflows");
        r *= k;
    }
    return r;
}

}  // namespace wvs
