#pragma once

#include <array>
#include <string_view>

namespace ceglab::reference {

// Compute-equivalent multipliers measured by ablation on a 3.6M-parameter
// transformer at a 5.3 nats/token threshold (new component over the older
// one it replaced).
struct AblationMultiplier {
  std::string_view name;
  std::string_view replaces;
  double multiplier;
};

inline constexpr std::array<AblationMultiplier, 5> kAblations{{
    {"swiglu", "gelu", 1.17},
    {"rotary", "sinusoidal", 1.44},
    {"pre_norm", "post_norm", 1.87},
    {"rmsnorm", "layernorm", 1.09},
    {"adamw", "sgd_momentum", 1.87},
}};

// The four components reverted in the "retro" transformer are the first four
// rows; their product is 3.43 but the measured joint gain is only 1.33.
inline constexpr double kRetroJointMeasured = 1.33;
inline constexpr double kRetroProductOfAblations = 3.43;

// Literature estimate for mixture-of-experts at a fixed expert count.
inline constexpr double kMixtureOfExperts = 2.0;
// Aggregate of scale-invariant innovations used in the headline totals.
inline constexpr double kScaleInvariantAggregate = 2.6;

// LSTM -> (Kaplan-allocated) transformer gains extrapolated to frontier budgets.
inline constexpr double kLstmToKaplanAt2023 = 725.0; // at 1.3e22 FLOPs
inline constexpr double kLstmToKaplanAt2025 = 846.0; // at 2e23 FLOPs
inline constexpr double kRebalancingAt2023 = 3.7;
// Exact M(2e23) rounded to two figures.
inline constexpr double kRebalancingAt2025 = 9.4;

inline constexpr double kCompute2023 = 1.3e22;
inline constexpr double kCompute2025 = 2e23;

} // namespace ceglab::reference
