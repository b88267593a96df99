#include "ceglab/ceg.hpp"

#include <algorithm>
#include <cmath>

#include "ceglab/errors.hpp"
#include "ceglab/numeric.hpp"

namespace ceglab {

namespace {

template <class... Ts> struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double value, const char *what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string(what) + " must be a positive finite number, got " +
                          format_double(value));
  }
}

} // namespace

CegCurve CegCurve::constant(double multiplier) {
  require_positive(multiplier, "constant CEG multiplier");
  return CegCurve(ConstantCeg{multiplier});
}

CegCurve CegCurve::power_law(double k, double delta) {
  require_positive(k, "power-law CEG coefficient k");
  if (!std::isfinite(delta)) {
    throw ValidationError("power-law CEG exponent must be finite");
  }
  return CegCurve(PowerLawCeg{k, delta});
}

CegCurve CegCurve::kaplan_chinchilla(LossSurface surface, KaplanFixed kaplan) {
  validate(surface);
  validate(kaplan);
  return CegCurve(KaplanChinchillaCeg{surface, kaplan});
}

CegCurve CegCurve::tabulated(std::vector<std::pair<double, double>> points) {
  if (points.empty()) {
    throw ValidationError("tabulated CEG needs at least one point");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    require_positive(points[i].first, "tabulated CEG compute");
    require_positive(points[i].second, "tabulated CEG multiplier");
    if (i > 0 && !(points[i].first > points[i - 1].first)) {
      throw ValidationError("tabulated CEG computes must be strictly increasing");
    }
  }
  return CegCurve(TabulatedCeg{std::move(points)});
}

CegCurve CegCurve::product(std::vector<CegCurve> factors) {
  if (factors.empty()) {
    throw ValidationError("product CEG needs at least one factor");
  }
  return CegCurve(ProductCeg{std::move(factors)});
}

CegCurve CegCurve::quotient(CegCurve numerator, CegCurve denominator) {
  return CegCurve(QuotientCeg{std::make_shared<const CegCurve>(std::move(numerator)),
                              std::make_shared<const CegCurve>(std::move(denominator))});
}

std::string CegCurve::kind() const {
  return std::visit(Overloaded{
                        [](const ConstantCeg &) { return std::string("constant"); },
                        [](const PowerLawCeg &) { return std::string("power_law"); },
                        [](const KaplanChinchillaCeg &) { return std::string("kaplan_chinchilla"); },
                        [](const TabulatedCeg &) { return std::string("tabulated"); },
                        [](const ProductCeg &) { return std::string("product"); },
                        [](const QuotientCeg &) { return std::string("quotient"); },
                    },
                    node_);
}

void validate(const ComputeTimeline &tl) {
  require_positive(tl.anchor_compute, "timeline anchor_compute");
  if (!std::isfinite(tl.anchor_year)) {
    throw ValidationError("timeline anchor_year must be finite");
  }
  if (!(tl.annual_factor > 1.0) || !std::isfinite(tl.annual_factor)) {
    throw ValidationError("timeline annual_factor must exceed 1");
  }
}

CegMultiplier ceg_multiplier_at_threshold(const PowerLawFit &fit_a, const PowerLawFit &fit_b,
                                          double threshold) {
  const double compute_a = compute_for_loss(fit_a, threshold);
  const double compute_b = compute_for_loss(fit_b, threshold);
  CegMultiplier m;
  m.value = compute_a / compute_b;
  m.reference_compute = compute_a;
  m.threshold_loss = threshold;
  return m;
}

CegCurve ceg_from_power_laws(const PowerLawFit &fit_a, const PowerLawFit &fit_b) {
  if (fit_a.E != fit_b.E) {
    throw DomainError("closed-form CEG needs a shared irreducible loss (E_a = " +
                      format_double(fit_a.E) + ", E_b = " + format_double(fit_b.E) +
                      "); use numeric evaluation instead");
  }
  const double k = std::pow(fit_a.A / fit_b.A, 1.0 / fit_b.alpha);
  const double delta = 1.0 - fit_a.alpha / fit_b.alpha;
  return CegCurve::power_law(k, delta);
}

double ceg_numeric(const PowerLawFit &fit_a, const PowerLawFit &fit_b, double compute) {
  require_positive(compute, "CEG evaluation compute");
  // Reduced loss B must reach, formed without subtracting nearly equal numbers.
  const double reduced_target = (fit_a.E - fit_b.E) + fit_a.A * std::pow(compute, -fit_a.alpha);
  if (!(reduced_target > 0.0)) {
    throw UnreachableError("performance unreachable: algorithm B cannot reach loss " +
                           format_double(fit_a.E + fit_a.A * std::pow(compute, -fit_a.alpha)) +
                           " (its irreducible loss is " + format_double(fit_b.E) + ")");
  }
  const double log_target = std::log(reduced_target);
  const auto gap = [&](double c) {
    return std::log(fit_b.A) - fit_b.alpha * std::log(c) - log_target;
  };
  // Grow the bracket around the query compute until it straddles the root.
  double lo = compute, hi = compute;
  while (gap(lo) < 0.0 && lo > 1e-290) {
    lo *= 1e-6;
  }
  while (gap(hi) > 0.0 && hi < 1e290) {
    hi *= 1e6;
  }
  if (gap(lo) < 0.0 || gap(hi) > 0.0) {
    throw UnreachableError("performance unreachable: matched compute for algorithm B is "
                           "outside the representable range");
  }
  return compute / bisect_log(gap, lo, hi, 1e-9);
}

double ceg_eval(const CegCurve &curve, double compute) {
  require_positive(compute, "CEG evaluation compute");
  return std::visit(
      Overloaded{
          [](const ConstantCeg &c) { return c.multiplier; },
          [compute](const PowerLawCeg &p) { return p.k * std::pow(compute, p.delta); },
          [compute](const KaplanChinchillaCeg &kc) {
            return rebalance_multiplier_exact(kc.surface, kc.kaplan, compute);
          },
          [compute](const TabulatedCeg &t) {
            const auto &pts = t.points;
            if (compute < pts.front().first || compute > pts.back().first) {
              throw DomainError("tabulated CEG: compute " + format_double(compute) +
                                " outside [" + format_double(pts.front().first) + ", " +
                                format_double(pts.back().first) + "]");
            }
            if (pts.size() == 1) {
              return pts.front().second;
            }
            auto hi = std::lower_bound(
                pts.begin(), pts.end(), compute,
                [](const std::pair<double, double> &p, double c) { return p.first < c; });
            if (hi->first == compute) {
              return hi->second;
            }
            auto lo = std::prev(hi);
            const double t_log = (std::log(compute) - std::log(lo->first)) /
                                 (std::log(hi->first) - std::log(lo->first));
            return std::exp(std::log(lo->second) +
                            t_log * (std::log(hi->second) - std::log(lo->second)));
          },
          [compute](const ProductCeg &p) {
            double out = 1.0;
            for (const CegCurve &f : p.factors) {
              out *= ceg_eval(f, compute);
            }
            return out;
          },
          [compute](const QuotientCeg &q) {
            return ceg_eval(*q.numerator, compute) / ceg_eval(*q.denominator, compute);
          },
      },
      curve.node());
}

CegCurve calibrate_power_ceg(std::pair<double, double> p1, std::pair<double, double> p2) {
  require_positive(p1.first, "calibration compute");
  require_positive(p2.first, "calibration compute");
  require_positive(p1.second, "calibration multiplier");
  require_positive(p2.second, "calibration multiplier");
  if (p1.first == p2.first) {
    throw ValidationError("power-law calibration needs two distinct computes");
  }
  const double delta = std::log(p2.second / p1.second) / std::log(p2.first / p1.first);
  const double k = p1.second / std::pow(p1.first, delta);
  return CegCurve::power_law(k, delta);
}

std::vector<double> rescale_log_proportional(const std::vector<double> &multipliers,
                                             double measured_joint) {
  require_positive(measured_joint, "measured joint multiplier");
  double log_product = 0.0;
  for (const double m : multipliers) {
    require_positive(m, "multiplier");
    log_product += std::log(m);
  }
  if (log_product == 0.0) {
    throw DomainError("log-proportional rescaling undefined: multipliers multiply to 1");
  }
  const double gamma = std::log(measured_joint) / log_product;
  std::vector<double> out;
  out.reserve(multipliers.size());
  for (const double m : multipliers) {
    out.push_back(std::exp(gamma * std::log(m)));
  }
  return out;
}

double timeline_compute(const ComputeTimeline &tl, double year) {
  return tl.anchor_compute * std::pow(tl.annual_factor, year - tl.anchor_year);
}

double timeline_year(const ComputeTimeline &tl, double compute) {
  require_positive(compute, "timeline compute");
  return tl.anchor_year + std::log(compute / tl.anchor_compute) / std::log(tl.annual_factor);
}

double growth_rate(const CegCurve &curve, const ComputeTimeline &tl, double year) {
  return std::visit(
      Overloaded{
          [](const ConstantCeg &) { return 1.0; },
          [&tl](const PowerLawCeg &p) { return std::pow(tl.annual_factor, p.delta); },
          [&](const ProductCeg &p) {
            double out = 1.0;
            for (const CegCurve &f : p.factors) {
              out *= growth_rate(f, tl, year);
            }
            return out;
          },
          [&](const QuotientCeg &q) {
            return growth_rate(*q.numerator, tl, year) / growth_rate(*q.denominator, tl, year);
          },
          [&](const auto &) {
            return ceg_eval(curve, timeline_compute(tl, year + 1.0)) /
                   ceg_eval(curve, timeline_compute(tl, year));
          },
      },
      curve.node());
}

} // namespace ceglab
