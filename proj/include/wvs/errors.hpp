#ifndef WVS_ERRORS_HPP
#define WVS_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wvs {

// Symbol outside its alphabet, mismatched alphabets, malformed vectors.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Index or horizon outside the computed/configured range.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Model lacks a property an operation needs (irreducibility, aperiodicity).
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Enumeration or memory cap exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (e.g. decoding with a non prefix-free code).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Input that cannot arise as an encoder output.
class DecodeError : public std::runtime_error {
public:
    DecodeError(const std::string& what, std::size_t position)
        : std::runtime_error(what), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Too few samples or an empty selection where at least one is needed.
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wvs

#endif
