#include <cmath>
#include <random>

#include <doctest.h>

#include "prtail/theory.hpp"
#include "support/fixtures.hpp"

using namespace prtail;

namespace {

// Published statistics of the three crawls.
TheoryParams indochina(double c) { return TheoryParams::from_values(c, 1.17, 26.17, 0.18, 0.65); }
TheoryParams eu2005(double c) { return TheoryParams::from_values(c, 1.1, 22.3, 0.08, 0.70); }
TheoryParams stanford(double c) { return TheoryParams::from_values(c, 1.1, 8.2032, 0.006, 0.8558); }

// Direct transcription of the limit and partial sums, used as an independent check.
double closed_form_C(double c, double a, double d, double p0, double b) {
    return std::pow(c, a) * std::pow(1 - p0, a) / (std::pow(d, a) * (1 - std::pow(c, a) * b));
}

double partial_sum_Ck(double c, double a, double d, double p0, double b, int k) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += std::pow(std::pow(c, a) * b, j);
    return std::pow(c * (1 - p0) / d, a) * s;
}

std::vector<double> random_hist(std::mt19937_64& rng) {
    const auto len = std::uniform_int_distribution<int>(2, 60)(rng);
    std::vector<double> h(static_cast<std::size_t>(len));
    std::exponential_distribution<double> e(1.0);
    double total = 0.0;
    for (auto& x : h) total += x = e(rng);
    h[1] += 0.05 * total;  // keep some non-dangling mass
    total *= 1.05;
    for (auto& x : h) x /= total;
    return h;
}

}  // namespace

TEST_CASE("b for a constant out-degree") {
    for (int d : {1, 3, 8, 26}) {
        std::vector<double> h(static_cast<std::size_t>(d) + 1, 0.0);
        h[static_cast<std::size_t>(d)] = 1.0;
        for (double a : {1.0, 1.1, 1.5, 2.5})
            CHECK(b_coefficient(h, a) == doctest::Approx(std::pow(d, 1.0 - a)).epsilon(1e-14));
    }
}

TEST_CASE("published coefficients") {
    SUBCASE("Indochina") {
        CHECK(std::abs(std::log10(coefficient_C(indochina(0.2))) - (-2.53)) <= 0.01);
        CHECK(std::abs(std::log10(coefficient_C(indochina(0.5))) - (-1.96)) <= 0.01);
        CHECK(std::abs(std::log10(coefficient_C(indochina(0.85))) - (-1.50)) <= 0.01);
    }
    SUBCASE("EU-2005") {
        CHECK(std::abs(std::log10(coefficient_C(eu2005(0.2))) - (-2.24)) <= 0.01);
        CHECK(std::abs(std::log10(coefficient_C(eu2005(0.5))) - (-1.68)) <= 0.01);
        CHECK(std::abs(std::log10(coefficient_C(eu2005(0.85))) - (-1.21)) <= 0.01);
    }
    SUBCASE("Stanford") {
        const auto p = stanford(0.85);
        CHECK(std::abs(std::log10(coefficient_Ck(p, 1)) - (-1.08)) <= 0.01);
        CHECK(std::abs(std::log10(coefficient_Ck(p, 2)) - (-0.85)) <= 0.01);
        CHECK(std::abs(std::log10(coefficient_C(p)) - (-0.54)) <= 0.01);
    }
}

TEST_CASE("closed forms agree with direct transcriptions") {
    for (double c : {0.2, 0.5, 0.85}) {
        const auto p = indochina(c);
        CHECK(coefficient_C(p) == doctest::Approx(closed_form_C(c, 1.17, 26.17, 0.18, 0.65)).epsilon(1e-13));
        for (int k = 1; k <= 6; ++k)
            CHECK(coefficient_Ck(p, k) ==
                  doctest::Approx(partial_sum_Ck(c, 1.17, 26.17, 0.18, 0.65, k)).epsilon(1e-13));
    }
}

TEST_CASE("b = 0 collapses every C_k to C_1") {
    const auto p = TheoryParams::from_values(0.85, 1.3, 5.0, 0.1, 0.0);
    for (int k = 1; k <= 5; ++k) CHECK(coefficient_Ck(p, k) == coefficient_Ck(p, 1));
    CHECK(coefficient_C(p) == doctest::Approx(coefficient_Ck(p, 1)));
    CHECK(coefficient_Ck(p, 1) == doctest::Approx(std::pow(0.85 * 0.9 / 5.0, 1.3)));
}

TEST_CASE("C_k increases to the limit geometrically") {
    const auto p = stanford(0.85);
    const double C = coefficient_C(p);
    const double ratio = p.growth_ratio();
    double prev = 0.0;
    for (int k = 1; k <= 40; ++k) {
        const double ck = coefficient_Ck(p, k);
        CHECK(ck > prev);
        CHECK(ck < C);
        CHECK((C - ck) == doctest::Approx(C * std::pow(ratio, k)).epsilon(1e-9));
        prev = ck;
    }
    const int terms = static_cast<int>(std::ceil(std::log(1e-12) / std::log(ratio)));
    CHECK(std::abs(coefficient_Ck(p, terms) - C) <= 1e-12 * C + 1e-300);
}

TEST_CASE("coefficient table") {
    const auto t = coefficient_table(indochina(0.85), 4);
    CHECK(t.b == 0.65);
    REQUIRE(t.C_k.size() == 4);
    for (std::size_t i = 1; i < t.C_k.size(); ++i) CHECK(t.C_k[i] > t.C_k[i - 1]);
    CHECK(t.C_limit >= t.C_lower_bound);
    const auto j = to_json(t);
    CHECK(j.at("C_k").size() == 4);
    CHECK(j.at("C_k")[0].at("k") == 1);
    CHECK(j.contains("C_limit"));
    CHECK(j.contains("C_lower_bound"));
}

TEST_CASE("divergent series is rejected") {
    // A published b above 1 - p0 can push c^alpha b past 1.
    CHECK_THROWS_AS(TheoryParams::from_values(0.9, 1.1, 1.0, 0.0, 1.2), DivergentSeries);
    TheoryParams p;
    p.c = 0.9;
    p.alpha = 1.1;
    p.d = 1.0;
    p.p0 = 0.0;
    p.b = 1.2;
    CHECK_THROWS_AS(coefficient_C(p), DivergentSeries);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS(TheoryParams::from_values(0.0, 1.1, 8, 0.1, 0.5));
    CHECK_THROWS(TheoryParams::from_values(1.0, 1.1, 8, 0.1, 0.5));
    CHECK_THROWS(TheoryParams::from_values(0.5, 0.9, 8, 0.1, 0.5));
    CHECK_THROWS(TheoryParams::from_values(0.5, 1.1, 0, 0.1, 0.5));
    CHECK_THROWS(TheoryParams::from_values(0.5, 1.1, 8, 1.0, 0.5));
    CHECK_THROWS(TheoryParams::from_histogram(0.5, 1.1, 2.0, std::vector<double>{0.5, 0.6}));
    CHECK_THROWS(TheoryParams::from_histogram(0.5, 1.1, 2.0, std::vector<double>{0.0, 1.0}));
    CHECK_THROWS_AS(coefficient_Ck(indochina(0.5), 0), std::invalid_argument);
}

TEST_CASE("lower bound") {
    SUBCASE("equality for a constant out-degree without dangling nodes") {
        std::vector<double> h(9, 0.0);
        h[8] = 1.0;
        const auto p = TheoryParams::from_histogram(0.85, 1.3, 8.0, h);
        CHECK(coefficient_lower_bound(p) == doctest::Approx(coefficient_C(p)).epsilon(1e-14));
    }
    SUBCASE("Indochina: bound below C, with the gap from direct evaluation") {
        for (double c : {0.2, 0.5, 0.85}) {
            const auto p = indochina(c);
            const double C = coefficient_C(p);
            const double bound = coefficient_lower_bound(p);
            const double jensen_b = std::pow(1 - 0.18, 1.17) * std::pow(26.17, 1 - 1.17);
            const double expected = closed_form_C(c, 1.17, 26.17, 0.18, jensen_b);
            CHECK(bound <= C);
            CHECK(bound == doctest::Approx(expected).epsilon(1e-13));
            MESSAGE("c=" << c << " relative gap " << (C - bound) / C);
        }
    }
    SUBCASE("alpha close to 1 closes the gap") {
        const auto h = testing::stanford_like_hist();
        const double d = testing::hist_mean(h);
        double prev_gap = 1.0;
        for (double a : {1.3, 1.1, 1.01, 1.0001}) {
            const auto p = TheoryParams::from_histogram(0.85, a, d, h);
            const double gap = (coefficient_C(p) - coefficient_lower_bound(p)) / coefficient_C(p);
            CHECK(gap >= 0.0);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
        CHECK(prev_gap < 1e-3);
    }
}

TEST_CASE("b lies between the Jensen bound and 1 - p0") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const auto h = random_hist(rng);
        const double d = testing::hist_mean(h);
        const double a = std::uniform_real_distribution<double>(1.0, 2.5)(rng);
        const double b = b_coefficient(h, a);
        CHECK(b <= 1.0 - h[0] + 1e-15);
        CHECK(b >= std::pow(1.0 - h[0], a) * std::pow(d, 1.0 - a) - 1e-15);
    }
}

TEST_CASE("Stanford-like histogram fixture") {
    const auto h = testing::stanford_like_hist();
    CHECK(h[0] == doctest::Approx(0.006));
    CHECK(testing::hist_mean(h) == doctest::Approx(8.2).epsilon(1e-6));
    CHECK(b_coefficient(h, 1.1) == doctest::Approx(0.8558).epsilon(1e-6));
}

TEST_CASE("mean field") {
    const auto no_dangling = TheoryParams::from_values(0.85, 1.1, 8.0, 0.0, 0.8);
    CHECK(mean_field(8.0, no_dangling) == doctest::Approx(1.0));
    CHECK(mean_field(3.0, no_dangling) == doctest::Approx(0.85 * 3.0 / 8.0 + 0.15));
    const auto p = indochina(0.5);
    CHECK(mean_field(0.0, p) == doctest::Approx(1.0 - 0.5 * (1 - 0.18)));
}

TEST_CASE("predicted lines") {
    const TailFit indeg{1.17, 1.0, 0.80, 1000};
    const auto line = predict_line(indeg, coefficient_C(indochina(0.5)));
    CHECK(line.slope == -1.17);
    CHECK(std::abs(line.intercept - (-1.16)) <= 0.01);
    CHECK(std::abs(predict_line(indeg, coefficient_C(indochina(0.2))).intercept - (-1.73)) <= 0.01);
    CHECK(std::abs(predict_line(indeg, coefficient_C(indochina(0.85))).intercept - (-0.70)) <= 0.01);
    CHECK(predict_line(indeg, 1.0).intercept == 0.80);

    const TailFit stanford_indeg{1.1, 1.0, 0.08, 1000};
    const auto s = predict_line(stanford_indeg, coefficient_C(stanford(0.85)));
    CHECK(s.slope == -1.1);
    CHECK(std::abs(s.intercept - (-0.46)) <= 0.01);
    CHECK_THROWS(predict_line(indeg, 0.0));
}

TEST_CASE("small damping drives C to zero") {
    double prev = coefficient_C(indochina(0.5));
    for (double c : {0.1, 1e-2, 1e-4, 1e-8}) {
        const double C = coefficient_C(indochina(c));
        CHECK(C < prev);
        prev = C;
    }
    CHECK(prev < 1e-10);
}

TEST_CASE("large degrees do not underflow") {
    const auto p = TheoryParams::from_values(0.85, 2.9, 1e9, 0.0, 1e-26);
    const double c1 = coefficient_Ck(p, 1);
    CHECK(c1 > 0.0);
    CHECK(std::isfinite(std::log10(c1)));
}
