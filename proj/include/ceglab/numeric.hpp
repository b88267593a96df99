#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ceglab {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Strict full-string parse of a decimal or scientific-notation number.
/// Returns nullopt for empty input, trailing garbage, or non-finite results.
std::optional<double> parse_double(std::string_view text);

/// `count` values spaced uniformly in log between `lo` and `hi` inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t count);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double sse = 0.0; // sum of squared residuals
};

/// Ordinary least squares y = intercept + slope * x. Requires >= 2 points
/// with at least two distinct x values.
LinearFit fit_line(const std::vector<double> &xs, const std::vector<double> &ys);

/// Root of a monotone function on [lo, hi] with 0 < lo < hi, searched by
/// bisection in log space. Stops once hi/lo - 1 <= rel_tol. Throws
/// DomainError when f(lo) and f(hi) do not bracket zero.
double bisect_log(const std::function<double(double)> &f, double lo, double hi,
                  double rel_tol = 1e-6);

/// Minimizer of a unimodal function on [lo, hi] by golden-section search.
double golden_section_min(const std::function<double(double)> &f, double lo,
                          double hi, double abs_tol = 1e-10);

} // namespace ceglab
