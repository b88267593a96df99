#pragma once

#include <variant>

namespace ceglab {

// Parametric loss L(N, D) = E + A / N^alpha + B / D^beta.
struct LossSurface {
  double E = 1.69;
  double A = 406.4;
  double B = 410.7;
  double alpha = 0.34;
  double beta = 0.28;

  // Hoffmann et al. fit; the values the rest of the toolkit treats as default.
  static LossSurface chinchilla() { return {}; }
};

/// Throws ValidationError unless A, B > 0, 0 < alpha, beta < 1 and E >= 0.
void validate(const LossSurface &surface);

struct ChinchillaOptimal {
  LossSurface surface;
};

// N = cN * C^pN, D = cD * C^pD, with the constants already converted from
// Kaplan's original parameterization so that 6ND is approximately C.
struct KaplanFixed {
  double cN = 3.6e-6;
  double pN = 0.73;
  double cD = 4.6e4;
  double pD = 0.27;
};

void validate(const KaplanFixed &policy);

using AllocationPolicy = std::variant<ChinchillaOptimal, KaplanFixed>;

struct Allocation {
  double params = 0.0;  // N
  double tokens = 0.0;  // D
  double compute = 0.0; // C, FLOPs
};

double surface_loss(const LossSurface &surface, double params, double tokens);

/// G = (alpha A / (beta B))^(1 / (alpha + beta)).
double optimal_g(const LossSurface &surface);

/// Exponent of the optimal envelope: L(C) - E = K (C/6)^(-gamma).
double envelope_exponent(const LossSurface &surface);

/// Amplitude K of the optimal envelope in units of (C/6).
double envelope_amplitude(const LossSurface &surface);

/// Loss reached by the compute-optimal allocation of `compute`.
double envelope_loss(const LossSurface &surface, double compute);

Allocation chinchilla_alloc(const LossSurface &surface, double compute);
Allocation kaplan_alloc(const KaplanFixed &policy, double compute);
Allocation allocate(const AllocationPolicy &policy, double compute);

/// Compute at which the optimal envelope reaches `loss`, closed form.
/// Throws UnreachableError when loss <= E.
double chinchilla_compute_for_loss(const LossSurface &surface, double loss);

/// Same quantity by bisection on the monotone envelope over [1, 1e40] FLOPs,
/// relative tolerance 1e-6 in C. Independent of the closed-form amplitude.
double chinchilla_compute_for_loss_numeric(const LossSurface &surface, double loss);

/// M(C): compute saved by moving a Kaplan-allocated budget C onto the optimal
/// envelope at equal loss.
double rebalance_multiplier_exact(const LossSurface &surface, const KaplanFixed &kaplan,
                                  double compute);

/// Large-compute power-law approximation M(C) ~ 6.13e-12 C^0.508. Only a
/// comparison aid; it disagrees with the exact form by more than 2x at 1e23.
double rebalance_multiplier_approx(double compute);

} // namespace ceglab
