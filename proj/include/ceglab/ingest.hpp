#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ceglab/allocator.hpp"

namespace ceglab {

// Exact first line of every run-CSV file.
inline constexpr std::string_view kRunCsvHeader =
    "algorithm_id,hidden_dim,params,step,tokens_seen,flops,val_loss";

struct RunPoint {
  std::int64_t step = 0;
  double tokens_seen = 0.0;
  double flops = 0.0;
  double val_loss = 0.0; // nats/token

  bool operator==(const RunPoint &) const = default;
};

struct TrainingRun {
  std::string algorithm_id;
  double params = 0.0;
  std::optional<std::int64_t> hidden_dim;
  std::vector<RunPoint> points; // ordered by step

  bool operator==(const TrainingRun &) const = default;
};

// All runs are assumed to share one loss definition (same tokenizer and
// validation data); nothing here can check that.
struct RunSet {
  std::vector<TrainingRun> runs;
  std::string source;

  std::size_t point_count() const;
};

/// Throws ValidationError if any TrainingRun or RunPoint invariant is broken.
void validate(const RunSet &runs);

/// Rows are grouped into runs by (algorithm_id, params) in order of first
/// appearance and sorted by step. Throws ParseError naming the offending line.
RunSet parse_runs(std::istream &in, std::string source = "<stream>");
RunSet parse_runs(std::string_view text, std::string source = "<string>");
RunSet read_runs_file(const std::string &path);

void serialize_runs(const RunSet &runs, std::ostream &out);
std::string serialize_runs(const RunSet &runs);

struct SynthSpec {
  std::string algorithm_id = "synthetic";
  LossSurface surface = LossSurface::chinchilla();
  // Recorded for provenance; the token budget always follows token_param_ratio.
  AllocationPolicy policy = ChinchillaOptimal{};
  std::vector<double> model_sizes;
  double token_param_ratio = 40.0;
  double noise_sigma = 0.0; // lognormal scale on reduced loss
  std::uint64_t seed = 0;
  std::size_t points_per_run = 64;
  // Each run's tokens span [final / token_span, final], log-uniform.
  double token_span = 10.0;

  // Eight sizes log-spaced over [1e6, 1e8], ratio 40, noiseless.
  static SynthSpec defaults();
};

void validate(const SynthSpec &spec);

/// One run per model size N with val_loss = E + (A/N^a + B/D^b) exp(eps),
/// eps ~ Normal(0, noise_sigma^2), final tokens = ratio * N, flops = 6 N D.
RunSet synthesize_runs(const SynthSpec &spec);

} // namespace ceglab
