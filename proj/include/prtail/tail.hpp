#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace prtail {

/// Empirical complementary CDF, strict convention: fraction = P(X > x).
/// Points with fraction 0 (the sample maximum) and x = 0 are omitted.
struct CcdfSeries {
    struct Point {
        double x;
        double fraction;
    };
    std::vector<Point> points;
    std::size_t source_count = 0;
    bool degenerate = false;  ///< set when no point survives (e.g. a single distinct value)
};

/// Cumulative power-law fit: log10 P(X > x) ~ -alpha_hat * log10 x + intercept for x >= x_min.
struct TailFit {
    double alpha_hat = 0.0;
    double x_min = 0.0;
    double intercept = 0.0;
    std::size_t tail_count = 0;
};

class InsufficientTail : public std::runtime_error {
public:
    InsufficientTail(std::size_t count, std::size_t required);
    std::size_t count() const noexcept { return count_; }

private:
    std::size_t count_;
};

struct XminChoice {
    double x_min = 0.0;
    bool degenerate = false;  ///< no value had its exceedance fraction inside [1%, 10%]
};

inline constexpr std::size_t kMinTailSamples = 10;
inline constexpr std::size_t kMinXminSamples = 100;

/// Throws std::invalid_argument on empty input, negative values, or all-zero input.
CcdfSeries ccdf(std::span<const double> values);

/**
 * Continuous maximum-likelihood estimate over samples >= x_min:
 *   density exponent = 1 + n_tail / sum ln(x_i / x_min),  alpha_hat = density exponent - 1.
 * The intercept is the least-squares offset of the log10 CCDF points with x >= x_min when the
 * slope is pinned to -alpha_hat. Throws InsufficientTail when fewer than 10 samples qualify.
 */
TailFit fit_exponent_mle(std::span<const double> values, double x_min);

/// Least-squares intercept of log10 CCDF points at x >= x_min for a fixed slope -alpha.
/// Returns NaN when no CCDF point lies at or above x_min.
double pinned_intercept(const CcdfSeries& series, double x_min, double alpha);

/// Smallest distinct value whose exceedance fraction lies in [0.01, 0.10]; the median otherwise.
/// Throws std::invalid_argument for fewer than 100 samples.
XminChoice choose_xmin(std::span<const double> values);

void write_ccdf_csv(const CcdfSeries& series, std::ostream& out);
nlohmann::json to_json(const TailFit& fit);

}  // namespace prtail
