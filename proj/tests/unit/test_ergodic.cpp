#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "../oracles/brute_force.hpp"
#include "../support.hpp"
#include "wvs/ergodic.hpp"
#include "wvs/errors.hpp"
#include "wvs/shifts.hpp"

using namespace wvs;

namespace {

const SourceModel kFair = SourceModel::iid({0.5, 0.5});
const SourceModel kBiased = SourceModel::iid({0.9, 0.1});
const SourceModel kPeriodic = SourceModel::markov({{0, 1}, {1, 0}}, {1, 0});
const SourceModel kSticky = SourceModel::markov({{0.9, 0.1}, {0.5, 0.5}}, {1, 0});
const SourceModel kMixture = SourceModel::mixture({0.5, 0.5}, {kFair, kBiased});
const WordFunction kPrefix(2, 2, {{0}, {1, 0}});

}  // namespace

TEST_CASE("time averages of cylinder indicators") {
    SymbolTuple alt(1001);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = static_cast<Symbol>(i % 2);
    const auto cps = even_checkpoints(1000, 10);
    const auto zero = CylinderFunction::indicator(2, SymbolTuple{0});
    const auto v = time_average(alt, zero, cps);
    CHECK(v.final == 0.5);
    CHECK(v.converged);

    const auto pair = CylinderFunction::indicator(2, SymbolTuple{0, 1});
    CHECK(time_average(alt, pair, cps).final == 0.5);
    CHECK(time_average(alt, CylinderFunction::indicator(2, SymbolTuple{0, 0}), cps).final == 0.0);
    CHECK(time_average(alt, CylinderFunction::constant(2, 3.5), cps).final == 3.5);

    const auto x = sample_path(kFair, 100'000, 7).symbols;
    CHECK(std::abs(time_average(x, zero, even_checkpoints(100'000, 20)).final - 0.5) < 0.01);

    CHECK_THROWS_AS(time_average(alt, pair, std::vector<std::size_t>{1001}), RangeError);
}

TEST_CASE("cylinder function validation") {
    CHECK_THROWS_AS(CylinderFunction(2, 1, {1.0}), DomainError);
    CHECK(CylinderFunction(2, 1, {-3.0, 2.0}).bound() == 3.0);
    CHECK(cylinder_indicators(2, 3).size() == 2 + 4 + 8);
    CHECK(cylinder_indicators(3, 2).size() == 3 + 9);
}

TEST_CASE("cross-path spread separates ergodic sources from mixtures") {
    const auto zero = CylinderFunction::indicator(2, SymbolTuple{0});
    const auto fair = ergodicity_spread(kFair, zero, 30, 10'000, 1);
    CHECK(fair.final_averages.size() == 30);
    CHECK(fair.spread < kDefaultSpreadThreshold);
    CHECK(std::abs(fair.mean - 0.5) < 0.01);

    const auto sticky = ergodicity_spread(kSticky, zero, 30, 10'000, 2);
    CHECK(sticky.spread < kDefaultSpreadThreshold);
    CHECK(std::abs(sticky.mean - 5.0 / 6.0) < 0.01);

    const auto mix = ergodicity_spread(kMixture, zero, 30, 10'000, 3);
    CHECK(mix.spread > 0.1);
    // each path sits near one of the component frequencies
    for (double a : mix.final_averages) CHECK(std::min(std::abs(a - 0.5), std::abs(a - 0.9)) < 0.03);

    const auto induced = ergodicity_spread(kFair, kPrefix, zero, 30, 10'000, 4);
    CHECK(induced.spread < kDefaultSpreadThreshold);
    CHECK(std::abs(induced.mean - 2.0 / 3.0) < 0.01);
    const auto induced_mix = ergodicity_spread(kMixture, kPrefix, zero, 30, 10'000, 5);
    CHECK(induced_mix.spread > 0.1);
}

TEST_CASE("asymptotic mean stationarity of Markov sources") {
    const std::vector<SymbolTuple> cyl{{0}};
    const auto periodic = ams_diagnostic(kPeriodic, cyl, 1000);
    REQUIRE(periodic.size() == 1);
    CHECK(std::abs(periodic[0].cesaro.final - 0.5) <= 1.0 / 1000);
    CHECK(periodic[0].per_step_spread >= 0.49);
    for (std::size_t i = 0; i < periodic[0].cesaro.horizons.size(); ++i) {
        const double n = static_cast<double>(periodic[0].cesaro.horizons[i]);
        CHECK(std::abs(periodic[0].cesaro.partial_averages[i] - 0.5) <= 1.0 / n + 1e-15);
    }

    const auto sticky = ams_diagnostic(kSticky, cyl, 10'000);
    CHECK(std::abs(sticky[0].cesaro.final - 5.0 / 6.0) < 1e-3);
    // only the O(1/n) bias of the Cesaro value remains
    CHECK(sticky[0].per_step_spread < 1e-3);
    CHECK(sticky[0].cesaro.converged);

    const std::vector<SymbolTuple> two{{0, 1}, {1, 1}};
    const auto fair = ams_diagnostic(kFair, two, 100);
    CHECK(fair[0].cesaro.final == doctest::Approx(0.25));
    CHECK(fair[1].per_step_spread == doctest::Approx(0.0));
}

TEST_CASE("induced measure is asymptotically mean stationary") {
    const std::vector<SymbolTuple> cyl{{0}, {1, 0}};
    const auto d = induced_ams_diagnostic(kFair, kPrefix, cyl, 2000, 200, 9);
    REQUIRE(d.size() == 2);
    // zeros occur at rate (0.5 * 1 + 0.5 * 1) / 1.5 in the output
    CHECK(std::abs(d[0].ensemble.final - 2.0 / 3.0) <= d[0].two_sigma + 0.01);
    CHECK(std::abs(d[1].ensemble.final - 1.0 / 3.0) <= d[1].two_sigma + 0.01);
    CHECK(std::abs(d[0].exact_cesaro - 2.0 / 3.0) < 0.05);
    // shift 0: eta([0]) = 1/2 exactly
    REQUIRE_FALSE(d[0].exact_shifted.empty());
    CHECK(d[0].exact_shifted[0] == doctest::Approx(0.5));
    // shift 1: P(y_2 = 0) by enumeration
    double q = 0.0;
    for (const auto& [b, p] : oracle::induced(kFair, kPrefix, 2))
        if (b[1] == 0) q += p;
    CHECK(d[0].exact_shifted[1] == doctest::Approx(q));
}

TEST_CASE("empirical component counts") {
    const SymbolTuple w = parse_digits("01101001100101101110");
    const EmpiricalComponent e(w, 2, 1, 20);
    CHECK(e.count(SymbolTuple{0}) == 9);
    CHECK(e.count(SymbolTuple{1}) == 11);
    CHECK(e.frequency(SymbolTuple{1}) == 0.55);

    const auto x = sample_path(kSticky, 20'002, 4).symbols;
    const EmpiricalComponent f(x, 2, 3, 20'000);
    CHECK(std::abs(f.frequency(SymbolTuple{0}) - 5.0 / 6.0) < 0.02);
    CHECK(std::abs(f.frequency(SymbolTuple{0, 0}) - 0.75) < 0.02);
    // every order counts the same horizon windows, so summing out the last symbol is exact
    for (std::size_t k = 1; k < 3; ++k) {
        const auto& lo = f.counts(k);
        const auto& hi = f.counts(k + 1);
        for (std::size_t i = 0; i < lo.size(); ++i) {
            const std::uint64_t s = hi[2 * i] + hi[2 * i + 1];
            CHECK(s == lo[i]);
        }
    }
    CHECK_THROWS_AS(EmpiricalComponent(x, 2, 8, 100), ResourceError);
    CHECK_THROWS_AS(EmpiricalComponent(x, 2, 0, 100), DomainError);
    CHECK_THROWS_AS(EmpiricalComponent(x, 2, 2, 20'002), RangeError);
}

TEST_CASE("property: source convergence carries over to the output") {
    Rng rng(41);
    for (std::size_t trial = 0; trial < 8; ++trial) {
        const auto m = gen::model(rng, 2, trial % 2);  // iid or Markov, both ergodic
        const auto wf = gen::codebook(rng, 2, 2, 3);
        const auto y = encoded_path(m, wf, 10'001, trial);
        for (const auto& g : cylinder_indicators(2, 2)) {
            const auto at3 = time_average(y, g, even_checkpoints(1000, 10), 0.05);
            const auto at4 = time_average(y, g, even_checkpoints(10'000, 20), 0.02);
            CHECK(at3.converged);
            CHECK(at4.converged);
            CHECK(std::abs(at3.final - at4.final) < 0.1);
        }
    }
}

TEST_CASE("codeword boundaries have density one over the mean length") {
    // The codebook shift walks the encoded stream word by word, so its orbit
    // density is the reciprocal of the expected codeword length.
    const auto spec = VariableLengthShiftSpec::from_codebook(kPrefix);
    for (const auto& [m, len] : {std::pair{kFair, 1.5}, std::pair{kBiased, 1.1}}) {
        const auto y = encoded_path(m, kPrefix, 40'000, 11);
        const std::size_t steps = 20'000;
        const auto ts = variable_length_orbit(spec, y, steps);
        const auto ws = weight_sequence(ts, 20'000);
        CHECK(std::abs(ws.density - 1.0 / len) < 0.01);

        // time average along the orbit of the indicator of "0", against the integral
        std::vector<double> r(20'000);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] == 0 ? 1.0 : 0.0;
        const auto b = bellow_check(r, ts, 20'000);
        CHECK(std::abs(b.lhs - b.rhs) < 1e-9);
    }
}
