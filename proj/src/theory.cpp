#include "prtail/theory.hpp"

#include <cmath>
#include <string>

namespace prtail {

TheoryParams TheoryParams::from_values(double c, double alpha, double d, double p0, double b) {
    TheoryParams params{c, alpha, d, p0, b};
    params.validate();
    return params;
}

TheoryParams TheoryParams::from_histogram(double c, double alpha, double d,
                                          std::span<const double> p_hist) {
    if (p_hist.empty()) throw std::invalid_argument("empty out-degree histogram");
    double total = 0.0;
    double first_moment = 0.0;
    for (std::size_t j = 0; j < p_hist.size(); ++j) {
        if (p_hist[j] < 0.0) throw std::invalid_argument("negative histogram entry");
        total += p_hist[j];
        first_moment += static_cast<double>(j) * p_hist[j];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("out-degree histogram does not sum to 1");
    if (std::abs(first_moment - d) > 1e-9 * std::max(1.0, d))
        throw std::invalid_argument("out-degree histogram mean " + std::to_string(first_moment) +
                                    " differs from d = " + std::to_string(d));
    return from_values(c, alpha, d, p_hist[0], b_coefficient(p_hist, alpha));
}

TheoryParams TheoryParams::from_profile(double c, double alpha, const DegreeProfile& profile) {
    const auto dense = dense_histogram(profile.p_hist);
    return from_histogram(c, alpha, profile.d, dense);
}

double TheoryParams::growth_ratio() const { return std::pow(c, alpha) * b; }

void TheoryParams::validate() const {
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("damping factor must lie in (0, 1)");
    if (!(alpha >= 1.0)) throw std::invalid_argument("tail exponent alpha must be at least 1");
    if (!(d > 0.0)) throw std::invalid_argument("mean degree d must be positive");
    if (!(p0 >= 0.0 && p0 < 1.0)) throw std::invalid_argument("dangling fraction must lie in [0, 1)");
    if (!(b >= 0.0)) throw std::invalid_argument("b must be non-negative");
    if (!(growth_ratio() < 1.0))
        throw DivergentSeries("series diverges: c^alpha * b = " + std::to_string(growth_ratio()));
}

double b_coefficient(std::span<const double> p_hist, double alpha) {
    double b = 0.0;
    for (std::size_t j = 1; j < p_hist.size(); ++j)
        if (p_hist[j] != 0.0) b += p_hist[j] * std::pow(static_cast<double>(j), 1.0 - alpha);
    return b;
}

double leading_coefficient(const TheoryParams& params) {
    return std::exp(params.alpha *
                    (std::log(params.c) + std::log1p(-params.p0) - std::log(params.d)));
}

double coefficient_Ck(const TheoryParams& params, int k) {
    if (k < 1) throw std::invalid_argument("C_k is defined for k >= 1");
    const double ratio = params.growth_ratio();
    double series = 0.0;
    double term = 1.0;
    for (int j = 0; j < k; ++j) {
        series += term;
        term *= ratio;
    }
    return leading_coefficient(params) * series;
}

double coefficient_C(const TheoryParams& params) {
    const double ratio = params.growth_ratio();
    if (!(ratio < 1.0))
        throw DivergentSeries("series diverges: c^alpha * b = " + std::to_string(ratio));
    return leading_coefficient(params) / (1.0 - ratio);
}

double coefficient_lower_bound(const TheoryParams& params) {
    const double jensen_b =
        std::exp(params.alpha * std::log1p(-params.p0) + (1.0 - params.alpha) * std::log(params.d));
    const double denom = 1.0 - std::pow(params.c, params.alpha) * jensen_b;
    if (!(denom > 0.0)) throw DivergentSeries("lower-bound denominator is not positive");
    return leading_coefficient(params) / denom;
}

double mean_field(double indegree, const TheoryParams& params) {
    if (indegree < 0.0) throw std::invalid_argument("in-degree must be non-negative");
    const double reach = params.c * (1.0 - params.p0);
    return reach / params.d * indegree + (1.0 - reach);
}

PredictedLine predict_line(const TailFit& indegree_fit, double C_value) {
    if (!(C_value > 0.0)) throw std::invalid_argument("coefficient must be positive");
    return {-indegree_fit.alpha_hat, indegree_fit.intercept + std::log10(C_value)};
}

CoefficientTable coefficient_table(const TheoryParams& params, int max_k) {
    params.validate();
    CoefficientTable table;
    table.b = params.b;
    for (int k = 1; k <= max_k; ++k) table.C_k.push_back(coefficient_Ck(params, k));
    table.C_limit = coefficient_C(params);
    table.C_lower_bound = coefficient_lower_bound(params);
    return table;
}

nlohmann::json to_json(const CoefficientTable& table) {
    nlohmann::json ck = nlohmann::json::array();
    for (std::size_t i = 0; i < table.C_k.size(); ++i)
        ck.push_back({{"k", i + 1}, {"C", table.C_k[i]}, {"log10_C", std::log10(table.C_k[i])}});
    return {{"b", table.b},
            {"C_k", std::move(ck)},
            {"C_limit", table.C_limit},
            {"log10_C_limit", std::log10(table.C_limit)},
            {"C_lower_bound", table.C_lower_bound},
            {"log10_C_lower_bound", std::log10(table.C_lower_bound)}};
}

}  // namespace prtail
