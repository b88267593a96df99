#include "ceglab/allocator.hpp"

#include <cmath>

#include "ceglab/errors.hpp"
#include "ceglab/numeric.hpp"

namespace ceglab {

namespace {

void require_positive_compute(double compute) {
  if (!(compute > 0.0) || !std::isfinite(compute)) {
    throw ValidationError("compute must be a positive finite number, got " +
                          format_double(compute));
  }
}

} // namespace

void validate(const LossSurface &s) {
  if (!(s.A > 0.0) || !(s.B > 0.0)) {
    throw ValidationError("loss surface: A and B must be positive");
  }
  if (!(s.alpha > 0.0 && s.alpha < 1.0) || !(s.beta > 0.0 && s.beta < 1.0)) {
    throw ValidationError("loss surface: alpha and beta must lie in (0, 1)");
  }
  if (!(s.E >= 0.0) || !std::isfinite(s.E)) {
    throw ValidationError("loss surface: E must be non-negative");
  }
}

void validate(const KaplanFixed &p) {
  if (!(p.cN > 0.0) || !(p.cD > 0.0)) {
    throw ValidationError("kaplan policy: cN and cD must be positive");
  }
  if (!(p.pN > 0.0) || !(p.pD > 0.0)) {
    throw ValidationError("kaplan policy: pN and pD must be positive");
  }
}

double surface_loss(const LossSurface &s, double params, double tokens) {
  return s.E + s.A / std::pow(params, s.alpha) + s.B / std::pow(tokens, s.beta);
}

double optimal_g(const LossSurface &s) {
  return std::pow((s.alpha * s.A) / (s.beta * s.B), 1.0 / (s.alpha + s.beta));
}

double envelope_exponent(const LossSurface &s) {
  return s.alpha * s.beta / (s.alpha + s.beta);
}

double envelope_amplitude(const LossSurface &s) {
  // Substituting N = G x^(b/(a+b)), D = x^(a/(a+b)) / G with x = C/6 makes both
  // terms scale as x^(-ab/(a+b)).
  const double g = optimal_g(s);
  return s.A * std::pow(g, -s.alpha) + s.B * std::pow(g, s.beta);
}

double envelope_loss(const LossSurface &s, double compute) {
  const Allocation a = chinchilla_alloc(s, compute);
  return surface_loss(s, a.params, a.tokens);
}

Allocation chinchilla_alloc(const LossSurface &s, double compute) {
  require_positive_compute(compute);
  const double g = optimal_g(s);
  const double x = compute / 6.0;
  const double sum = s.alpha + s.beta;
  Allocation a;
  a.params = g * std::pow(x, s.beta / sum);
  // D is derived from N so that 6ND reproduces C to rounding.
  a.tokens = x / a.params;
  a.compute = compute;
  return a;
}

Allocation kaplan_alloc(const KaplanFixed &p, double compute) {
  require_positive_compute(compute);
  Allocation a;
  a.params = p.cN * std::pow(compute, p.pN);
  a.tokens = p.cD * std::pow(compute, p.pD);
  a.compute = compute;
  return a;
}

Allocation allocate(const AllocationPolicy &policy, double compute) {
  if (const auto *c = std::get_if<ChinchillaOptimal>(&policy)) {
    return chinchilla_alloc(c->surface, compute);
  }
  return kaplan_alloc(std::get<KaplanFixed>(policy), compute);
}

double chinchilla_compute_for_loss(const LossSurface &s, double loss) {
  if (!(loss > s.E)) {
    throw UnreachableError("performance unreachable: loss " + format_double(loss) +
                           " is at or below the irreducible loss " +
                           format_double(s.E));
  }
  const double gamma = envelope_exponent(s);
  const double k = envelope_amplitude(s);
  return 6.0 * std::pow(k / (loss - s.E), 1.0 / gamma);
}

double chinchilla_compute_for_loss_numeric(const LossSurface &s, double loss) {
  if (!(loss > s.E)) {
    throw UnreachableError("performance unreachable: loss " + format_double(loss) +
                           " is at or below the irreducible loss " +
                           format_double(s.E));
  }
  // Work in log reduced loss so the bracket ends do not lose precision.
  const double target = std::log(loss - s.E);
  return bisect_log(
      [&](double c) { return std::log(envelope_loss(s, c) - s.E) - target; }, 1.0,
      1e40, 1e-6);
}

double rebalance_multiplier_exact(const LossSurface &s, const KaplanFixed &kaplan,
                                  double compute) {
  const Allocation a = kaplan_alloc(kaplan, compute);
  const double loss = surface_loss(s, a.params, a.tokens);
  return compute / chinchilla_compute_for_loss(s, loss);
}

double rebalance_multiplier_approx(double compute) {
  require_positive_compute(compute);
  return 6.13e-12 * std::pow(compute, 0.508);
}

} // namespace ceglab
