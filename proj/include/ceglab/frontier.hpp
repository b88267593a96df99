#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ceglab/ingest.hpp"

namespace ceglab {

struct FrontierPoint {
  double compute = 0.0; // FLOPs
  double loss = 0.0;    // nats/token

  bool operator==(const FrontierPoint &) const = default;
};

// L = E + A * C^(-alpha), fitted on [c_min, c_max].
struct PowerLawFit {
  double E = 0.0;
  double A = 1.0;
  double alpha = 1.0;
  double c_min = 0.0;
  double c_max = 0.0;
  double rmse = 0.0; // in log reduced-loss space
};

struct XYPowerFit {
  double a = 1.0;
  double b = 0.0;
};

struct FitOptions {
  double e_min = 1.3;
  double e_max = 2.2;
  double grid_step = 0.005;
  // Minimum gap between the upper E bound and the smallest observed loss.
  double floor_gap = 1e-6;
};

/// Points of the pooled set that no other point dominates, restricted to
/// compute >= min_compute. Domination is judged against every pooled point,
/// including ones below the cutoff. Sorted by compute; loss strictly
/// decreasing; exact duplicates collapse to one. Throws DomainError when the
/// result is empty.
std::vector<FrontierPoint> extract_frontier(std::vector<FrontierPoint> points,
                                            double min_compute = 0.0);
std::vector<FrontierPoint> extract_frontier(const RunSet &runs, double min_compute = 0.0);

std::vector<FrontierPoint> pooled_points(const RunSet &runs);

/// Sum of squared residuals of the log-space regression at a fixed E, with A
/// and alpha profiled out. Infinite when some loss is <= E.
double profile_objective(const std::vector<FrontierPoint> &points, double E);

/// Constrained fit of L = E + A C^(-alpha) with E in
/// [e_min, min(e_max, min loss - floor_gap)]: coarse grid over E, closed-form
/// log-space regression per candidate, golden-section refinement around the
/// best cell. Deterministic; ties go to the smaller E.
PowerLawFit fit_power_law(const std::vector<FrontierPoint> &points,
                          const FitOptions &options = {});
PowerLawFit fit_power_law(const std::vector<FrontierPoint> &points, double e_min,
                          double e_max);

struct LossPrediction {
  double loss = 0.0;
  bool extrapolated = false; // compute outside [c_min, c_max]
};

LossPrediction predict_loss(const PowerLawFit &fit, double compute);

/// (A / (loss - E))^(1/alpha). Throws UnreachableError for loss <= E.
double compute_for_loss(const PowerLawFit &fit, double loss);

/// Least squares on log y = log a + b log x.
XYPowerFit fit_xy_power(const std::vector<double> &xs, const std::vector<double> &ys);

/// Flat `key=value` block, one field per line.
std::string format_fit(const PowerLawFit &fit);
PowerLawFit parse_fit(const std::string &text);
PowerLawFit read_fit_file(const std::string &path);

} // namespace ceglab
