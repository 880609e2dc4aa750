#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "../oracles/brute_force.hpp"
#include "../support.hpp"
#include "wvs/errors.hpp"
#include "wvs/logspace.hpp"
#include "wvs/sources.hpp"

using namespace wvs;

namespace {

const SourceModel kFair = SourceModel::iid({0.5, 0.5});
const SourceModel kBiased = SourceModel::iid({0.9, 0.1});
const SourceModel kPeriodic = SourceModel::markov({{0, 1}, {1, 0}}, {1, 0});
const SourceModel kSticky = SourceModel::markov({{0.9, 0.1}, {0.5, 0.5}}, {1, 0});
const SourceModel kMixture = SourceModel::mixture({0.5, 0.5}, {kFair, kBiased});

}  // namespace

TEST_CASE("cylinder probabilities of the reference models") {
    CHECK(cylinder_log_probability(kFair, SymbolTuple{0, 1, 0}) == doctest::Approx(std::log(0.125)));
    CHECK(cylinder_log_probability(kSticky, SymbolTuple{0, 0, 1}) == doctest::Approx(std::log(0.09)));
    CHECK(cylinder_log_probability(kMixture, SymbolTuple{0, 0}) ==
          doctest::Approx(std::log(0.5 * 0.25 + 0.5 * 0.81)));
    CHECK(cylinder_log_probability(kPeriodic, SymbolTuple{0, 0}) == kNegInf);
    CHECK_THROWS_AS(cylinder_log_probability(kFair, SymbolTuple{0, 2}), DomainError);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(SourceModel::iid({0.5, 0.4}), DomainError);
    CHECK_THROWS_AS(SourceModel::iid({1.2, -0.2}), DomainError);
    CHECK_THROWS_AS(SourceModel::iid({1.0}), DomainError);
    CHECK_THROWS_AS(SourceModel::markov({{0.5, 0.5}, {0.3, 0.6}}, {1, 0}), DomainError);
    CHECK_THROWS_AS(SourceModel::markov({{0.5, 0.5}}, {1, 0}), DomainError);
    CHECK_THROWS_AS(SourceModel::mixture({1.0}, {kMixture}), DomainError);
    CHECK_THROWS_AS(SourceModel::mixture({0.5, 0.5}, {kFair, SourceModel::iid({0.2, 0.3, 0.5})}),
                    DomainError);
    // components must be ergodic
    CHECK_THROWS(SourceModel::mixture({0.5, 0.5}, {kFair, kPeriodic}));
    CHECK_THROWS(SourceModel::mixture({0.5, 0.5}, {kFair, SourceModel::markov({{1, 0}, {0, 1}}, {1, 0})}));
    CHECK_NOTHROW(SourceModel::mixture({1.0, 0.0}, {kFair, kBiased}));
}

TEST_CASE("sampling is seeded and reproducible") {
    const auto a = sample_path(kSticky, 5, 42);
    const auto b = sample_path(kSticky, 5, 42);
    CHECK(a.symbols.size() == 5);
    CHECK(a.symbols == b.symbols);
    CHECK(a.model_id == kSticky.fingerprint());
    CHECK(sample_path(kSticky, 200, 1).symbols != sample_path(kSticky, 200, 2).symbols);
}

TEST_CASE("fair coin frequencies follow the law of large numbers") {
    const auto x = sample_path(kFair, 100'000, 3).symbols;
    const double zeros = static_cast<double>(std::count(x.begin(), x.end(), Symbol{0}));
    CHECK(std::abs(zeros / 1e5 - 0.5) < 0.01);
}

TEST_CASE("degenerate mixture always draws component 0") {
    const auto m = SourceModel::mixture({1.0, 0.0}, {kBiased, kFair});
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto p = sample_path(m, 2000, s);
        CHECK(p.component == 0);
        const double zeros = static_cast<double>(std::count(p.symbols.begin(), p.symbols.end(), Symbol{0}));
        CHECK(std::abs(zeros / 2000.0 - 0.9) < 0.05);
    }
}

TEST_CASE("shifted cylinder probabilities") {
    const SymbolTuple zero{0};
    CHECK(shifted_cylinder_probability(kFair, zero, 7) == doctest::Approx(0.5));
    CHECK(shifted_cylinder_probability(kPeriodic, zero, 0) == 1.0);
    CHECK(shifted_cylinder_probability(kPeriodic, zero, 1) == 0.0);
    CHECK(shifted_cylinder_probability(kSticky, zero, 200) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK_THROWS_AS(shifted_cylinder_probability(kFair, zero, kMaxShift + 1), RangeError);
    // two-symbol cylinder against the hand computation P^i then P(0,1)
    const double p1 = 0.9 * 0.9 + 0.1 * 0.5;
    CHECK(shifted_cylinder_probability(kSticky, SymbolTuple{0, 1}, 2) == doctest::Approx(p1 * 0.1));
}

TEST_CASE("Cesaro averages") {
    const SymbolTuple zero{0};
    CHECK(std::abs(cesaro_cylinder_average(kPeriodic, zero, 1000) - 0.5) <= 1.0 / 1000);
    CHECK(std::abs(cesaro_cylinder_average(kSticky, zero, 10'000) - 5.0 / 6.0) < 1e-3);
    for (std::size_t n : {1u, 10u, 333u})
        CHECK(cesaro_cylinder_average(kBiased, SymbolTuple{0, 1, 1}, n) ==
              doctest::Approx(std::exp(cylinder_log_probability(kBiased, SymbolTuple{0, 1, 1}))));
}

TEST_CASE("stationary models are fixed points of the Cesaro average") {
    const auto pi = markov::stationary_distribution(kSticky.transitions());
    const auto stationary = SourceModel::markov(kSticky.transitions(), pi);
    const SymbolTuple t{0, 1};
    const double p = std::exp(cylinder_log_probability(stationary, t));
    for (std::size_t n : {1u, 2u, 50u, 1000u})
        CHECK(cesaro_cylinder_average(stationary, t, n) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("ergodic components") {
    const auto fair = ergodic_components(kFair);
    REQUIRE(fair.size() == 1);
    CHECK(fair[0].weight == 1.0);
    CHECK(fair[0].model == kFair);

    const auto mix = ergodic_components(kMixture);
    REQUIRE(mix.size() == 2);
    CHECK(mix[0].weight == 0.5);
    CHECK(mix[1].model == kBiased);

    const auto sticky = ergodic_components(kSticky);
    REQUIRE(sticky.size() == 1);
    CHECK(sticky[0].model.initial()[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(sticky[0].model.initial()[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

    CHECK_THROWS_AS(ergodic_components(kPeriodic), UnsupportedError);
    CHECK_THROWS_AS(ergodic_components(SourceModel::markov({{1, 0}, {0.5, 0.5}}, {0, 1})),
                    UnsupportedError);
}

TEST_CASE("stationary distribution and chain structure") {
    const auto pi = markov::stationary_distribution({{0.7, 0.3}, {0.2, 0.8}});
    CHECK(pi[0] == doctest::Approx(0.2 / 0.5).epsilon(1e-12));
    CHECK(markov::period({{0, 1}, {1, 0}}) == 2);
    CHECK(markov::period({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}) == 3);
    CHECK(markov::period(kSticky.transitions()) == 1);
    CHECK_FALSE(markov::is_irreducible({{1, 0}, {0.5, 0.5}}));
    const auto pp = markov::stationary_distribution({{0, 1}, {1, 0}});
    CHECK(pp[0] == doctest::Approx(0.5));
}

TEST_CASE("entropy rates") {
    CHECK(entropy_rate_exact(kFair) == 1.0);
    CHECK(entropy_rate_exact(kBiased) == doctest::Approx(oracle::binary_entropy(0.9)));
    CHECK(entropy_rate_exact(kSticky) ==
          doctest::Approx(5.0 / 6.0 * oracle::binary_entropy(0.9) + 1.0 / 6.0));
    CHECK(entropy_rate_exact(kMixture) == doctest::Approx(0.5 + 0.5 * oracle::binary_entropy(0.9)));
    CHECK(entropy_rate_exact(kPeriodic) == 0.0);
    CHECK_THROWS_AS(entropy_rate_exact(SourceModel::markov({{1, 0}, {0.5, 0.5}}, {0, 1})),
                    UnsupportedError);
    for (std::size_t k : {2u, 3u, 4u, 8u})
        CHECK(entropy_rate_exact(SourceModel::iid(std::vector<double>(k, 1.0 / static_cast<double>(k)))) ==
              std::log2(static_cast<double>(k)));
}

TEST_CASE("property: cylinder laws are normalised and consistent") {
    Rng rng(11);
    for (std::size_t trial = 0; trial < 12; ++trial) {
        const std::size_t k = 2 + trial % 2;
        const auto m = gen::model(rng, k, trial);
        for (std::size_t n = 1; n <= (k == 2 ? 8u : 6u); ++n) {
            double total = 0.0;
            for (const auto& t : oracle::all_tuples(k, n)) {
                const double p = std::exp(cylinder_log_probability(m, t));
                total += p;
                CHECK(p == doctest::Approx(oracle::probability(m, t)).epsilon(1e-12));
                if (n <= 5) {
                    double children = 0.0;
                    auto ext = t;
                    ext.push_back(0);
                    for (Symbol a = 0; a < k; ++a) {
                        ext.back() = a;
                        children += std::exp(cylinder_log_probability(m, ext));
                    }
                    CHECK(std::abs(children - p) <= 1e-12);
                }
            }
            CHECK(std::abs(total - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("property: mixture cylinders are weighted component sums") {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = gen::model(rng, 3, 2);
        for (const auto& t : oracle::all_tuples(3, 4)) {
            double sum = 0.0;
            for (std::size_t c = 0; c < 2; ++c)
                sum += m.weights()[c] * std::exp(cylinder_log_probability(m.components()[c], t));
            CHECK(std::abs(cylinder_log_probability(m, t) - std::log(sum)) <= 1e-12);
        }
    }
}

TEST_CASE("property: mixture paths concentrate on one component") {
    std::size_t matched = 0;
    const std::size_t seeds = 200;
    for (std::uint64_t s = 0; s < seeds; ++s) {
        const auto p = sample_path(kMixture, 10'000, s);
        const double f = static_cast<double>(std::count(p.symbols.begin(), p.symbols.end(), Symbol{0})) / 1e4;
        const bool near_fair = std::abs(f - 0.5) <= 0.02;
        const bool near_biased = std::abs(f - 0.9) <= 0.02;
        const bool right = p.component == 0 ? near_fair : near_biased;
        matched += (right && near_fair != near_biased) ? 1 : 0;
    }
    CHECK(static_cast<double>(matched) >= 0.99 * static_cast<double>(seeds));
}

TEST_CASE("prefix likelihood agrees with cylinder probabilities") {
    const auto x = sample_path(kMixture, 500, 9).symbols;
    PrefixLikelihood lik(kMixture);
    for (std::size_t i = 0; i < x.size(); ++i) {
        lik.push(x[i]);
        if (i % 50 == 49)
            CHECK(lik.log_probability() ==
                  doctest::Approx(cylinder_log_probability(kMixture, std::span(x).first(i + 1))).epsilon(1e-12));
    }
}

TEST_CASE("stationary marginal") {
    const auto m = stationary_marginal(kSticky);
    CHECK(m[0] == doctest::Approx(5.0 / 6.0));
    CHECK(stationary_marginal(kBiased)[1] == doctest::Approx(0.1));
}
