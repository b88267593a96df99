#include "ceglab/numeric.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "ceglab/errors.hpp"

namespace ceglab {

std::string format_double(double value) {
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc{}) {
    throw std::logic_error("format_double: buffer too small");
  }
  return std::string(buffer.data(), end);
}

std::optional<double> parse_double(std::string_view text) {
  // from_chars rejects a leading '+', which hand-written logs sometimes carry.
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  if (text.empty()) {
    return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::vector<double> log_space(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (count == 0) {
    return out;
  }
  out.reserve(count);
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(std::exp(log_lo + t * (log_hi - log_lo)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

LinearFit fit_line(const std::vector<double> &xs, const std::vector<double> &ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 2) {
    throw std::invalid_argument("fit_line: need two or more paired samples");
  }
  // Centered sums are far better conditioned than raw normal equations when
  // x = log(compute) sits around 40.
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mean_x;
    sxx += dx * dx;
    sxy += dx * (ys[i] - mean_y);
  }
  if (sxx <= 0.0) {
    throw DomainError("fit_line: all x values are identical");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    fit.sse += r * r;
  }
  return fit;
}

double bisect_log(const std::function<double(double)> &f, double lo, double hi,
                  double rel_tol) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("bisect_log: need 0 < lo < hi");
  }
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) {
    return lo;
  }
  if (f_hi == 0.0) {
    return hi;
  }
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw DomainError("bisect_log: root not bracketed in [" + format_double(lo) +
                      ", " + format_double(hi) + "]");
  }
  while (hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      return mid;
    }
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo) * std::sqrt(hi);
}

double golden_section_min(const std::function<double(double)> &f, double lo,
                          double hi, double abs_tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > abs_tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

} // namespace ceglab
