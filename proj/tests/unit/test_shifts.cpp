#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../oracles/brute_force.hpp"
#include "../support.hpp"
#include "wvs/errors.hpp"
#include "wvs/shifts.hpp"

using namespace wvs;

namespace {

// gamma = 1 when the window starts with 0, else 2
VariableLengthShiftSpec zero_one_two() { return VariableLengthShiftSpec(2, 1, 2, {1, 2}); }

VariableLengthShiftSpec random_spec(Rng& rng) {
    const std::size_t k = 2 + rng() % 2;
    const std::size_t m = 1 + rng() % 3;
    const std::size_t n = 1 + rng() % 5;
    std::vector<std::uint32_t> table(checked_power(k, m));
    for (auto& v : table) v = static_cast<std::uint32_t>(1 + rng() % n);
    return VariableLengthShiftSpec(k, m, n, std::move(table));
}

}  // namespace

TEST_CASE("orbits of simple shifts") {
    const SymbolTuple w = parse_digits("0110100111");
    const auto unit = variable_length_orbit(VariableLengthShiftSpec::constant(2, 1), w, 5);
    CHECK(unit.zeta == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});

    const SymbolTuple long_w(40, 0);
    const auto three = variable_length_orbit(VariableLengthShiftSpec::constant(2, 3), long_w, 4);
    CHECK(three.zeta == std::vector<std::size_t>{0, 3, 6, 9, 12});

    // w = 1 0 0 1 0 0: windows at 0, 2, 3 start with 1, 0, 1.
    const auto t = variable_length_orbit(zero_one_two(), parse_digits("100100"), 3);
    CHECK(t.zeta == std::vector<std::size_t>{0, 2, 3, 5});
    CHECK(t.horizon == 6);
}

TEST_CASE("orbit needs enough input") {
    try {
        variable_length_orbit(VariableLengthShiftSpec::constant(2, 3), SymbolTuple(5, 0), 3);
        FAIL("expected a range error");
    } catch (const RangeError& e) {
        CHECK(std::string(e.what()).find("at least 7") != std::string::npos);
    }
}

TEST_CASE("shift spec validation") {
    CHECK_THROWS_AS(VariableLengthShiftSpec(2, 1, 2, {1}), DomainError);
    CHECK_THROWS_AS(VariableLengthShiftSpec(2, 1, 2, {0, 1}), DomainError);
    CHECK_THROWS_AS(VariableLengthShiftSpec(2, 1, 2, {1, 3}), DomainError);
    CHECK_THROWS(VariableLengthShiftSpec(2, kMaxLookahead + 1, 2, {}));
}

TEST_CASE("weight sequences") {
    std::vector<std::size_t> evens;
    for (std::size_t i = 0; i <= 20; i += 2) evens.push_back(i);
    const auto e = weight_sequence(TimeSubsequence::from_zeta(evens), 10);
    CHECK(e.xi == std::vector<std::uint8_t>{1, 0, 1, 0, 1, 0, 1, 0, 1, 0});
    CHECK(e.density == 0.5);

    const auto ts = TimeSubsequence::from_zeta({0, 2, 3, 5});
    const auto w = weight_sequence(ts, 6);
    CHECK(w.xi == std::vector<std::uint8_t>{1, 0, 1, 1, 0, 1});
    CHECK(w.density == doctest::Approx(4.0 / 6.0));
    CHECK_THROWS_AS(weight_sequence(ts, 7), RangeError);

    std::vector<std::size_t> all(12);
    std::iota(all.begin(), all.end(), 0);
    const auto ones = weight_sequence(TimeSubsequence::from_zeta(all), 10);
    CHECK(ones.density == 1.0);

    CHECK_THROWS_AS(TimeSubsequence::from_zeta({1, 2}), DomainError);
    CHECK_THROWS_AS(TimeSubsequence::from_zeta({0, 2, 2}), DomainError);
}

TEST_CASE("finite-state orbit coder") {
    const std::vector<std::uint32_t> u{2, 9, 1, 3, 7, 8};
    CHECK(finite_state_orbit_coder(u, 6, 9) == std::vector<std::uint8_t>{1, 0, 1, 1, 0, 0});
    CHECK(finite_state_orbit_coder(std::vector<std::uint32_t>(8, 1), 8, 1) ==
          std::vector<std::uint8_t>(8, 1));
    CHECK(finite_state_orbit_coder(std::vector<std::uint32_t>(6, 2), 6, 2) ==
          std::vector<std::uint8_t>{1, 0, 1, 0, 1, 0});
    CHECK_THROWS_AS(finite_state_orbit_coder(std::vector<std::uint32_t>{1, 0}, 2, 3), DomainError);
    CHECK_THROWS_AS(finite_state_orbit_coder(std::vector<std::uint32_t>{4}, 1, 3), DomainError);
}

TEST_CASE("Bellow partial sums") {
    std::vector<std::size_t> evens;
    for (std::size_t i = 0; i <= 1002; i += 2) evens.push_back(i);
    const auto ts = TimeSubsequence::from_zeta(evens);

    std::vector<double> alt(1000);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 == 0 ? 1.0 : -1.0;
    const auto b = bellow_check(alt, ts, 1000);
    CHECK(b.lhs == doctest::Approx(0.5));
    CHECK(b.rhs == doctest::Approx(0.5));

    const auto odd_ts = TimeSubsequence::from_zeta({0, 3, 4, 9, 11, 30});
    const std::vector<double> c(20, 0.7);
    const auto cb = bellow_check(c, odd_ts, 20);
    CHECK(cb.density == doctest::Approx(5.0 / 20.0));
    CHECK(cb.lhs == doctest::Approx(cb.density * 0.7));
    CHECK(cb.rhs == doctest::Approx(cb.density * 0.7));

    std::vector<double> ind(20, 0.0);
    for (std::size_t z : odd_ts.zeta)
        if (z < 20) ind[z] = 1.0;
    const auto ib = bellow_check(ind, odd_ts, 20);
    CHECK(ib.lhs == doctest::Approx(ib.density));
    CHECK(ib.rhs == doctest::Approx(ib.density));

    CHECK_THROWS_AS(bellow_check(c, odd_ts, 40), RangeError);
}

TEST_CASE("property: coder output equals the orbit weight sequence") {
    Rng rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const auto spec = random_spec(rng);
        const std::size_t n = 1 + rng() % 2000;
        const auto w = gen::sequence(rng, spec.alphabet_size(), n * spec.max_shift() + spec.lookahead());
        const auto ts = variable_length_orbit(spec, w, n);
        CHECK(ts.zeta == oracle::orbit(spec, w, n));
        const auto z = finite_state_orbit_coder(shift_lengths(spec, w, n), n, spec.max_shift());
        REQUIRE(z == weight_sequence(ts, n).xi);
    }
}

TEST_CASE("property: the orbit reads the iterated shift image") {
    Rng rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const auto spec = random_spec(rng);
        const std::size_t steps = 1 + rng() % 50;
        const auto w = gen::sequence(rng, spec.alphabet_size(), steps * spec.max_shift() + spec.lookahead() + 5);
        const auto ts = variable_length_orbit(spec, w, steps);
        for (std::size_t j = 0; j <= steps; j += 1 + steps / 7) {
            const auto image = apply_variable_length_shift(spec, w, j);
            REQUIRE(image.size() == w.size() - ts.zeta[j]);
            CHECK(std::equal(image.begin(), image.end(), w.begin() + static_cast<std::ptrdiff_t>(ts.zeta[j])));
        }
    }
}

TEST_CASE("property: orbit densities lie in [1/N, 1]") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto spec = random_spec(rng);
        const std::size_t n = 50 + rng() % 500;
        const auto w = gen::sequence(rng, spec.alphabet_size(), n * spec.max_shift() + spec.lookahead());
        const auto ts = variable_length_orbit(spec, w, n);
        const double floor = 1.0 / static_cast<double>(spec.max_shift());
        for (std::size_t h = 1; h <= n; h += 1 + n / 10) {
            const double d = weight_sequence(ts, h).density;
            CHECK(d >= floor - 1e-12);
            CHECK(d <= 1.0);
        }
    }
}

TEST_CASE("property: Bellow sides agree within 10/sqrt(n) of each other and the limit") {
    Rng rng(24);
    const std::size_t n = 100'000;
    const double bound = 10.0 / std::sqrt(static_cast<double>(n));
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t p = 2 + rng() % 4;
        std::vector<std::size_t> zeta;
        const std::size_t offset = rng() % p;
        zeta.push_back(0);
        for (std::size_t i = offset == 0 ? p : offset; zeta.back() < n; i += p) zeta.push_back(i);
        const auto ts = TimeSubsequence::from_zeta(zeta);
        const double c = 2.0 * uniform01(rng) - 1.0;
        std::vector<double> r(n);
        for (auto& v : r) v = c + 0.2 * (uniform01(rng) - 0.5);
        const auto b = bellow_check(r, ts, n);
        CHECK(std::abs(b.lhs - b.rhs) < bound);
        CHECK(std::abs(b.rhs - c / static_cast<double>(p)) < bound);
    }
}

TEST_CASE("codebook-driven shift") {
    const WordFunction wf(2, 2, {{0}, {1, 0}});
    const auto spec = VariableLengthShiftSpec::from_codebook(wf);
    CHECK(spec.lookahead() == 2);
    CHECK(spec(parse_digits("01")) == 1);
    CHECK(spec(parse_digits("10")) == 2);
    CHECK(spec(parse_digits("11")) == 1);  // no codeword fits
    CHECK(codebook_gamma(wf, parse_digits("1")) == 1);
}

TEST_CASE("property: encoder commutes with the codebook shift for prefix-free codes") {
    Rng rng(25);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t in_k = 2 + trial % 2;
        const auto wf = gen::prefix_free_codebook(rng, in_k, 2 + rng() % 2, 3);
        for (std::size_t n = 1; n <= (in_k == 2 ? 8u : 6u); ++n)
            for (const auto& x : oracle::all_tuples(in_k, n)) REQUIRE(coder_commutes_with_shift(wf, x));
    }
    // fails for {0, 01}: "01" starts with both codewords, so gamma falls back to 1
    const WordFunction bad(2, 2, {{0}, {0, 1}});
    CHECK_FALSE(coder_commutes_with_shift(bad, SymbolTuple{1, 0}));
}
