#include <doctest.h>

#include <cmath>

#include "mmcoal/combinatorics.hpp"
#include "mmcoal/errors.hpp"
#include "mmcoal/rates.hpp"
#include "support.hpp"

using namespace mmcoal;

TEST_CASE("lambda_rate on the standard families") {
    const auto k = LambdaMeasure::kingman();
    CHECK(lambda_rate(k, 5, 2) == 1.0);
    CHECK(lambda_rate(k, 5, 3) == 0.0);
    CHECK(lambda_rate(k, 5, 2, false) == 0.0);

    const auto star = LambdaMeasure::star();
    CHECK(lambda_rate(star, 4, 4) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lambda_rate(star, 4, 2) == 0.0);

    const auto b = LambdaMeasure::beta(1.5);
    CHECK(std::abs(lambda_rate(b, 3, 2) - 0.75) < 1e-12);
    CHECK(std::abs(lambda_rate(b, 3, 3) - 0.25) < 1e-12);

    for (const auto& m : {k, star, b, LambdaMeasure::eldon_wakeley(0.3)})
        CHECK(std::abs(lambda_rate(m, 2, 2) - 1.0) < 1e-14);

    CHECK_THROWS_AS(lambda_rate(k, 3, 1), DomainError);
    CHECK_THROWS_AS(lambda_rate(k, 3, 4), DomainError);
}

TEST_CASE("total coalescence rate") {
    CHECK(total_coal_rate(LambdaMeasure::kingman(), 3) == 3.0);
    CHECK(total_coal_rate(LambdaMeasure::star(), 4) == doctest::Approx(1.0));
    CHECK(std::abs(total_coal_rate(LambdaMeasure::beta(1.5), 3) - 2.5) < 1e-12);
    for (int n = 2; n <= 300; ++n) CHECK(total_coal_rate(LambdaMeasure::kingman(), n) == binomial(n, 2));
    CHECK_THROWS_AS(total_coal_rate(LambdaMeasure::kingman(), 1), DomainError);
}

TEST_CASE("measure validation") {
    CHECK_THROWS_AS(LambdaMeasure(0.5, {}), ConfigError);
    CHECK_THROWS_AS(LambdaMeasure(0.5, {{1.5, 0.5}}), ConfigError);
    CHECK_THROWS_AS(LambdaMeasure(0.5, {{0.0, 0.5}}), ConfigError);
    CHECK_THROWS_AS(LambdaMeasure::beta(2.0), ConfigError);
    CHECK_THROWS_AS(LambdaMeasure(-0.1, {{0.5, 1.1}}), ConfigError);
    const auto ew = LambdaMeasure::eldon_wakeley(0.5);
    CHECK(ew.kingman_mass() == doctest::Approx(2.0 / 2.25));
}

TEST_CASE("rate table matches direct evaluation and is projective") {
    const std::vector<LambdaMeasure> measures = {
        LambdaMeasure::kingman(), LambdaMeasure::star(), LambdaMeasure::beta(1.5), LambdaMeasure::beta(1.05),
        LambdaMeasure::beta(1.95), LambdaMeasure::eldon_wakeley(0.5),
        LambdaMeasure(0.2, {{0.3, 0.3}, {1.0, 0.1}}, BetaComponent{1.2, 0.4})};
    for (const auto& m : measures) {
        const RateTable t(m, 200);
        for (int n = 2; n < 200; ++n)
            for (int k = 2; k <= n; ++k) {
                const double lhs = t.lambda(n, k);
                const double rhs = t.lambda(n + 1, k) + t.lambda(n + 1, k + 1);
                CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(lhs, 1e-300));
            }
        for (int n = 2; n <= 60; ++n) {
            double total = 0.0;
            for (int k = 2; k <= n; ++k) {
                CHECK(t.lambda(n, k) >= 0.0);
                CHECK(std::abs(t.lambda(n, k) - lambda_rate(m, n, k)) <= 1e-12 * std::max(t.lambda(n, k), 1e-300));
                total += binomial(n, k) * t.lambda(n, k);
            }
            CHECK(t.total(n) == doctest::Approx(total).epsilon(1e-12));
        }
    }
}

TEST_CASE("Beta closed form against numerical quadrature") {
    for (double alpha : {1.1, 1.5, 1.9}) {
        const auto m = LambdaMeasure::beta(alpha);
        for (int n = 2; n <= 50; n += 4)
            for (int k = 2; k <= n; k += 3)
                CHECK(std::abs(lambda_rate(m, n, k) - testsupport::beta_rate_quadrature(alpha, n, k)) < 1e-8);
    }
}

TEST_CASE("large tables stay finite") {
    const RateTable t(LambdaMeasure::beta(1.2), 1000);
    for (int k = 2; k <= 1000; k += 37) {
        CHECK(std::isfinite(t.lambda(1000, k)));
        CHECK(t.lambda(1000, k) >= 0.0);
    }
    CHECK(std::isfinite(t.total(1000)));
}

TEST_CASE("combinatorics helpers") {
    CHECK(binomial(10, 3) == 120.0);
    CHECK(binomial(60, 30) == 118264581564861424.0);
    CHECK(factorial(10) == 3628800ULL);
    CHECK(integer_partitions(5).size() == 7);
    const std::vector<int> parts = {2, 2, 1};
    CHECK(set_partition_count(parts) == 15);
    CHECK(std::exp(log_binomial(10, 3)) == doctest::Approx(120.0));
}
