#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ceglab/allocator.hpp"
#include "ceglab/frontier.hpp"

namespace ceglab {

class CegCurve;

struct ConstantCeg {
  double multiplier = 1.0;
};

// f(C) = k * C^delta
struct PowerLawCeg {
  double k = 1.0;
  double delta = 0.0;
};

// f(C) = M(C), the Kaplan -> compute-optimal rebalancing multiplier.
struct KaplanChinchillaCeg {
  LossSurface surface = LossSurface::chinchilla();
  KaplanFixed kaplan;
};

// Log-log linear interpolation between (compute, multiplier) knots; no
// extrapolation.
struct TabulatedCeg {
  std::vector<std::pair<double, double>> points;
};

struct ProductCeg {
  std::vector<CegCurve> factors;
};

struct QuotientCeg {
  std::shared_ptr<const CegCurve> numerator;
  std::shared_ptr<const CegCurve> denominator;
};

// A compute-equivalent-gain function f: algorithm B at compute C / f(C)
// matches algorithm A at compute C. Immutable once built.
class CegCurve {
public:
  using Node = std::variant<ConstantCeg, PowerLawCeg, KaplanChinchillaCeg, TabulatedCeg,
                            ProductCeg, QuotientCeg>;

  static CegCurve constant(double multiplier);
  static CegCurve power_law(double k, double delta);
  static CegCurve kaplan_chinchilla(LossSurface surface = LossSurface::chinchilla(),
                                    KaplanFixed kaplan = {});
  static CegCurve tabulated(std::vector<std::pair<double, double>> points);
  static CegCurve product(std::vector<CegCurve> factors);
  static CegCurve quotient(CegCurve numerator, CegCurve denominator);

  const Node &node() const { return node_; }

  /// One of constant, power_law, kaplan_chinchilla, tabulated, product, quotient.
  std::string kind() const;

  template <typename T> const T *as() const { return std::get_if<T>(&node_); }

private:
  explicit CegCurve(Node node) : node_(std::move(node)) {}
  Node node_;
};

struct CegMultiplier {
  double value = 1.0;
  double reference_compute = 0.0; // compute the reference (old) algorithm needs
  std::optional<double> threshold_loss;
};

// Frontier compute as an exponential function of calendar year.
struct ComputeTimeline {
  double anchor_year = 2025.0;
  double anchor_compute = 2e23;
  double annual_factor = 4.2;

  // 2025 frontier at 2e23 FLOPs.
  static ComputeTimeline frontier_2025() { return {2025.0, 2e23, 4.2}; }
  // 2023 frontier at 1.3e22 FLOPs. Not consistent with frontier_2025 under
  // exact 4.2x/yr growth (it puts 2025 at 2.3e23).
  static ComputeTimeline frontier_2023() { return {2023.0, 1.3e22, 4.2}; }
};

void validate(const ComputeTimeline &timeline);

/// Ratio of the compute algorithm A needs over the compute B needs to reach
/// `threshold`. Throws UnreachableError when threshold <= either E.
CegMultiplier ceg_multiplier_at_threshold(const PowerLawFit &fit_a, const PowerLawFit &fit_b,
                                          double threshold);

/// Closed-form PowerLaw CEG between two fits sharing E:
/// k = (A_a/A_b)^(1/alpha_b), delta = 1 - alpha_a/alpha_b.
/// Throws DomainError when the irreducible losses differ; use ceg_numeric.
CegCurve ceg_from_power_laws(const PowerLawFit &fit_a, const PowerLawFit &fit_b);

/// f(C) for arbitrary fits by bisecting predict_loss(fit_b, .) onto
/// predict_loss(fit_a, C) over [1e6, 1e30] FLOPs, relative tolerance 1e-6.
double ceg_numeric(const PowerLawFit &fit_a, const PowerLawFit &fit_b, double compute);

double ceg_eval(const CegCurve &curve, double compute);

/// PowerLaw through two (compute, multiplier) points.
CegCurve calibrate_power_ceg(std::pair<double, double> p1, std::pair<double, double> p2);

/// m_i^gamma with gamma = ln(joint) / ln(prod m_i): the product becomes
/// `measured_joint` while log-ratios between members are preserved.
std::vector<double> rescale_log_proportional(const std::vector<double> &multipliers,
                                             double measured_joint);

double timeline_compute(const ComputeTimeline &timeline, double year);
double timeline_year(const ComputeTimeline &timeline, double compute);

/// f(C(year + 1)) / f(C(year)). Constant curves give exactly 1 and power laws
/// exactly annual_factor^delta; products and quotients combine member rates.
double growth_rate(const CegCurve &curve, const ComputeTimeline &timeline, double year);

} // namespace ceglab
