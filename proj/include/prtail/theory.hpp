#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "prtail/graph.hpp"
#include "prtail/tail.hpp"

namespace prtail {

/// Thrown when c^alpha * b >= 1, i.e. the geometric series behind the limit coefficient diverges.
class DivergentSeries : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/**
 * Inputs of the tail-coefficient formulas. `alpha` is the cumulative tail exponent of the
 * in-degree (P(N > x) ~ x^-alpha), not the density exponent.
 */
struct TheoryParams {
    double c = 0.85;
    double alpha = 1.1;
    double d = 1.0;
    double p0 = 0.0;
    double b = 1.0;

    /// Published-value constructor: b is taken as given.
    static TheoryParams from_values(double c, double alpha, double d, double p0, double b);

    /// b computed from an out-degree histogram indexed by j (entry 0 is p0).
    /// Requires sum p_j = 1 within 1e-9 and sum j p_j = d within 1e-9 relative.
    static TheoryParams from_histogram(double c, double alpha, double d, std::span<const double> p_hist);

    static TheoryParams from_profile(double c, double alpha, const DegreeProfile& profile);

    /// c^alpha * b, the ratio of the geometric series in C_k.
    double growth_ratio() const;

    void validate() const;
};

struct CoefficientTable {
    double b = 0.0;
    std::vector<double> C_k;  ///< C_k[i] holds C_{i+1}
    double C_limit = 0.0;
    double C_lower_bound = 0.0;
};

/// sum_{j>=1} p_j j^(1-alpha), from a dense histogram indexed by out-degree.
double b_coefficient(std::span<const double> p_hist, double alpha);

/// (c (1-p0) / d)^alpha, evaluated in the log domain.
double leading_coefficient(const TheoryParams& params);

/// C_k = (c(1-p0)/d)^alpha * sum_{j=0}^{k-1} (c^alpha b)^j, k >= 1.
double coefficient_Ck(const TheoryParams& params, int k);

/// C = (c(1-p0)/d)^alpha / (1 - c^alpha b). Throws DivergentSeries when c^alpha b >= 1.
double coefficient_C(const TheoryParams& params);

/// The limit coefficient with b replaced by its Jensen lower bound (1-p0)^alpha d^(1-alpha),
/// i.e. the value for a constant out-degree among non-dangling nodes.
double coefficient_lower_bound(const TheoryParams& params);

/// E(R | N) = c(1-p0)/d * N + 1 - c(1-p0).
double mean_field(double indegree, const TheoryParams& params);

struct PredictedLine {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Shifts the in-degree line by log10(C): (-alpha_hat, intercept + log10 C).
PredictedLine predict_line(const TailFit& indegree_fit, double C_value);

CoefficientTable coefficient_table(const TheoryParams& params, int max_k);

nlohmann::json to_json(const CoefficientTable& table);

}  // namespace prtail
