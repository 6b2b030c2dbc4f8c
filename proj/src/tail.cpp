#include "prtail/tail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace prtail {

InsufficientTail::InsufficientTail(std::size_t count, std::size_t required)
    : std::runtime_error("tail has " + std::to_string(count) + " samples at or above x_min, need " +
                         std::to_string(required)),
      count_(count) {}

namespace {

std::vector<double> sorted_copy(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

}  // namespace

CcdfSeries ccdf(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("ccdf of an empty sample");
    const auto sorted = sorted_copy(values);
    if (sorted.front() < 0.0) throw std::invalid_argument("ccdf expects non-negative values");
    if (sorted.back() == 0.0) throw std::invalid_argument("ccdf of an all-zero sample");

    CcdfSeries series;
    series.source_count = sorted.size();
    const auto n = static_cast<double>(sorted.size());
    auto it = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
    while (it != sorted.end()) {
        const double x = *it;
        auto next = std::upper_bound(it, sorted.end(), x);
        const auto above = static_cast<double>(sorted.end() - next);
        if (above > 0.0) series.points.push_back({x, above / n});
        it = next;
    }
    series.degenerate = series.points.empty();
    return series;
}

double pinned_intercept(const CcdfSeries& series, double x_min, double alpha) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& p : series.points) {
        if (p.x < x_min) continue;
        sum += std::log10(p.fraction) + alpha * std::log10(p.x);
        ++count;
    }
    return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(count);
}

TailFit fit_exponent_mle(std::span<const double> values, double x_min) {
    if (!(x_min > 0.0)) throw std::invalid_argument("x_min must be positive");
    double log_sum = 0.0;
    std::size_t tail = 0;
    for (double x : values) {
        if (x >= x_min) {
            log_sum += std::log(x / x_min);
            ++tail;
        }
    }
    if (tail < kMinTailSamples) throw InsufficientTail(tail, kMinTailSamples);
    if (!(log_sum > 0.0)) throw std::domain_error("every tail sample equals x_min; exponent undefined");

    TailFit fit;
    fit.x_min = x_min;
    fit.tail_count = tail;
    fit.alpha_hat = static_cast<double>(tail) / log_sum;
    fit.intercept = pinned_intercept(ccdf(values), x_min, fit.alpha_hat);
    return fit;
}

XminChoice choose_xmin(std::span<const double> values) {
    if (values.size() < kMinXminSamples)
        throw std::invalid_argument("choose_xmin needs at least " + std::to_string(kMinXminSamples) +
                                    " samples");
    const auto sorted = sorted_copy(values);
    const auto n = static_cast<double>(sorted.size());
    auto it = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
    while (it != sorted.end()) {
        auto next = std::upper_bound(it, sorted.end(), *it);
        const double frac = static_cast<double>(sorted.end() - next) / n;
        if (frac <= 0.10) {
            if (frac >= 0.01) return {*it, false};
            break;
        }
        it = next;
    }
    return {sorted[sorted.size() / 2], true};
}

void write_ccdf_csv(const CcdfSeries& series, std::ostream& out) {
    out << "x,ccdf\n";
    const auto old_precision = out.precision(17);
    for (const auto& p : series.points) out << p.x << ',' << p.fraction << '\n';
    out.precision(old_precision);
}

nlohmann::json to_json(const TailFit& fit) {
    return {{"alpha", fit.alpha_hat},
            {"x_min", fit.x_min},
            {"intercept", fit.intercept},
            {"tail_count", fit.tail_count}};
}

}  // namespace prtail
