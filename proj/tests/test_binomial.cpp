#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "epirl/binomial.hpp"
#include "epirl/errors.hpp"
#include "epirl/rng.hpp"
#include "support/stats.hpp"

using epirl::RngStream;
using epirl::sample_binomial;

namespace {

std::vector<std::int64_t> draw_histogram(std::uint64_t seed, std::int64_t n, double p,
                                         int samples) {
    RngStream rng(seed, 0);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
    for (int k = 0; k < samples; ++k) {
        const std::int64_t v = sample_binomial(rng, n, p);
        REQUIRE(v >= 0);
        REQUIRE(v <= n);
        ++counts[static_cast<std::size_t>(v)];
    }
    return counts;
}

}  // namespace

TEST_CASE("degenerate binomial cases", "[binomial]") {
    RngStream rng(1, 0);
    REQUIRE(sample_binomial(rng, 0, 0.5) == 0);
    REQUIRE(sample_binomial(rng, 100, 0.0) == 0);
    REQUIRE(sample_binomial(rng, 100, 1.0) == 100);
}

TEST_CASE("binomial rejects invalid arguments", "[binomial]") {
    RngStream rng(1, 0);
    REQUIRE_THROWS_AS(sample_binomial(rng, -1, 0.5), epirl::InvalidParams);
    REQUIRE_THROWS_AS(sample_binomial(rng, 10, -0.1), epirl::InvalidParams);
    REQUIRE_THROWS_AS(sample_binomial(rng, 10, 1.5), epirl::InvalidParams);
}

TEST_CASE("binomial draws are deterministic per stream", "[binomial]") {
    RngStream a(7, 3), b(7, 3);
    for (int k = 0; k < 200; ++k)
        REQUIRE(sample_binomial(a, 40, 0.3) == sample_binomial(b, 40, 0.3));
}

TEST_CASE("inversion regime matches the closed-form pmf", "[binomial]") {
    // n*p = 1.5 < 10 exercises the CDF-inversion path.
    const auto counts = draw_histogram(11, 30, 0.05, 200000);
    REQUIRE(testsupport::chi_square_binomial_pvalue(counts, 30, 0.05) > 0.01);
}

TEST_CASE("rejection regime matches the closed-form pmf", "[binomial]") {
    // n*p = 300 >= 10 exercises the transformed-rejection path.
    const auto counts = draw_histogram(12, 1000, 0.3, 200000);
    REQUIRE(testsupport::chi_square_binomial_pvalue(counts, 1000, 0.3) > 0.01);
}

TEST_CASE("p above one half uses the flipped tail correctly", "[binomial]") {
    const auto counts = draw_histogram(13, 50, 0.8, 200000);
    REQUIRE(testsupport::chi_square_binomial_pvalue(counts, 50, 0.8) > 0.01);
}

TEST_CASE("boundary between sampling regimes stays exact", "[binomial]") {
    // n*p = 9.9 (inversion) and 10.5 (rejection) straddle the switchover.
    const auto below = draw_histogram(14, 99, 0.1, 200000);
    REQUIRE(testsupport::chi_square_binomial_pvalue(below, 99, 0.1) > 0.01);
    const auto above = draw_histogram(15, 105, 0.1, 200000);
    REQUIRE(testsupport::chi_square_binomial_pvalue(above, 105, 0.1) > 0.01);
}
