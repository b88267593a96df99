#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ceglab/errors.hpp"
#include "ceglab/ingest.hpp"

using namespace ceglab;

namespace {

const std::string kHeader(kRunCsvHeader);

RunSet random_runset(std::mt19937_64 &rng, int runs, int rows) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RunSet rs;
  for (int r = 0; r < runs; ++r) {
    TrainingRun run;
    run.algorithm_id = "algo_" + std::to_string(r % 2);
    run.params = std::pow(10.0, 5 + 4 * u(rng));
    if (r % 3 != 0) {
      run.hidden_dim = 64 * (r + 1);
    }
    double tokens = 1e3 * (1 + u(rng)), flops = 6 * run.params * tokens;
    for (int i = 0; i < rows; ++i) {
      tokens *= 1.0 + u(rng);
      flops = 6 * run.params * tokens;
      run.points.push_back({i * 10 + 1, tokens, flops, 2.0 + 5 * u(rng)});
    }
    rs.runs.push_back(std::move(run));
  }
  return rs;
}

} // namespace

TEST_CASE("two-row file gives one run with two points") {
  const std::string text = kHeader + "\nlstm,512,1e6,1,1000,6e9,5.5\nlstm,512,1e6,2,2000,1.2e10,5.2\n";
  const RunSet rs = parse_runs(text);
  REQUIRE(rs.runs.size() == 1);
  CHECK(rs.runs[0].points.size() == 2);
  CHECK(rs.runs[0].algorithm_id == "lstm");
  CHECK(rs.runs[0].hidden_dim == 512);
  CHECK(rs.runs[0].params == 1e6);
  CHECK(rs.runs[0].points[1].val_loss == 5.2);
  CHECK(rs.point_count() == 2);
}

TEST_CASE("rows are grouped by algorithm and size and sorted by step") {
  const std::string text = kHeader +
                           "\nb,,2e6,2,200,2.4e9,4\n"
                           "a,,1e6,1,100,6e8,5\n"
                           "b,,2e6,1,100,1.2e9,4.5\n"
                           "a,,3e6,1,100,1.8e9,4.9\n";
  const RunSet rs = parse_runs(text);
  REQUIRE(rs.runs.size() == 3);
  CHECK(rs.runs[0].algorithm_id == "b");
  CHECK(rs.runs[0].points[0].step == 1);
  CHECK(rs.runs[0].points[1].step == 2);
  CHECK_FALSE(rs.runs[0].hidden_dim.has_value());
}

TEST_CASE("monotonicity violation names the line") {
  const std::string text = kHeader + "\na,,1e6,1,100,6e8,5\na,,1e6,2,200,5e8,4.8\n";
  try {
    parse_runs(text);
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("flops") != std::string::npos);
  }
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(parse_runs(std::string_view("")), ParseError);
  CHECK_THROWS_AS(parse_runs(std::string_view("a,b,c\n")), ParseError);
  const auto bad = [&](const std::string &row) {
    CHECK_THROWS_AS(parse_runs(kHeader + "\n" + row + "\n"), ParseError);
  };
  bad("a,,1e6,1,100,6e8");          // too few fields
  bad("a,,1e6,1,100,6e8,5,9");      // too many
  bad(",,1e6,1,100,6e8,5");         // empty id
  bad("a,,1e6,1,100,-6e8,5");       // negative flops
  bad("a,,1e6,1,0,6e8,5");          // zero tokens
  bad("a,,1e6,1,100,6e8,0");        // zero loss
  bad("a,,0,1,100,6e8,5");          // zero params
  bad("a,,1e6,1.5,100,6e8,5");      // fractional step
  bad("a,x,1e6,1,100,6e8,5");       // bad hidden_dim
  bad("a,,1e6,1,100,abc,5");        // non-numeric
  bad("a,,1e6,1,100,nan,5");        // non-finite
  CHECK_THROWS_AS(parse_runs(kHeader + "\na,,1e6,1,100,6e8,5\na,,1e6,1,200,7e8,4\n"), ParseError);
  CHECK_THROWS_AS(parse_runs(kHeader + "\na,8,1e6,1,100,6e8,5\na,9,1e6,2,200,7e8,4\n"), ParseError);
}

TEST_CASE("BOM, CRLF and blank lines are tolerated") {
  const std::string text = "\xEF\xBB\xBF" + kHeader + "\r\n\r\na,,1e6,1,100,6e8,5\r\n\n";
  const RunSet rs = parse_runs(text);
  REQUIRE(rs.runs.size() == 1);
  CHECK(rs.runs[0].points[0].val_loss == 5.0);
}

TEST_CASE("header-only input is an empty run set") {
  CHECK(parse_runs(kHeader + "\n").runs.empty());
}

TEST_CASE("serialize_runs") {
  CHECK(serialize_runs(RunSet{}) == kHeader + "\n");
  RunSet one;
  one.runs.push_back({"x", 1e6, std::nullopt, {{1, 10.0, 6e7, 3.5}}});
  const std::string text = serialize_runs(one);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == kHeader);
  std::getline(in, line);
  CHECK(std::count(line.begin(), line.end(), ',') == 6);
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("round trip on random run sets") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const RunSet rs = random_runset(rng, 1 + trial % 5, 1 + trial % 17);
    const std::string text = serialize_runs(rs);
    const RunSet back = parse_runs(text);
    CHECK(back.runs == rs.runs);
    CHECK(serialize_runs(back) == text);
  }
  const RunSet big = random_runset(rng, 3, 100);
  CHECK(parse_runs(serialize_runs(big)).runs == big.runs);
}

TEST_CASE("read_runs_file reports missing files as I/O errors") {
  CHECK_THROWS_AS(read_runs_file("/nonexistent/definitely/missing.csv"), IoError);
}

TEST_CASE("synthesize_runs follows the loss surface") {
  SynthSpec spec = SynthSpec::defaults();
  spec.model_sizes = {1e9};
  spec.token_param_ratio = 20.0; // final D = 2e10
  const RunSet rs = synthesize_runs(spec);
  REQUIRE(rs.runs.size() == 1);
  const TrainingRun &run = rs.runs[0];
  CHECK(run.points.size() == 64);
  const RunPoint &last = run.points.back();
  CHECK(last.tokens_seen == doctest::Approx(2e10).epsilon(1e-14));
  const double expected = 1.69 + 406.4 / std::pow(10.0, 9 * 0.34) + 410.7 / std::pow(2e10, 0.28);
  CHECK(last.val_loss == doctest::Approx(expected).epsilon(1e-13));
  CHECK(last.flops == doctest::Approx(6 * 1e9 * 2e10).epsilon(1e-14));
  for (std::size_t i = 1; i < run.points.size(); ++i) {
    CHECK(run.points[i].step > run.points[i - 1].step);
    CHECK(run.points[i].tokens_seen > run.points[i - 1].tokens_seen);
    CHECK(run.points[i].val_loss < run.points[i - 1].val_loss);
  }
  CHECK_NOTHROW(validate(rs));
}

TEST_CASE("default synth spec gives 64 points per size and is deterministic") {
  const SynthSpec spec = SynthSpec::defaults();
  CHECK(spec.model_sizes.size() >= 8);
  const RunSet a = synthesize_runs(spec);
  for (const TrainingRun &run : a.runs) {
    CHECK(run.points.size() == 64);
  }
  SynthSpec noisy = spec;
  noisy.noise_sigma = 0.05;
  noisy.seed = 17;
  CHECK(synthesize_runs(noisy).runs == synthesize_runs(noisy).runs);
  noisy.seed = 18;
  CHECK_FALSE(synthesize_runs(noisy).runs == synthesize_runs(spec).runs);
}

TEST_CASE("lognormal noise on reduced loss is unbiased in log space") {
  SynthSpec spec = SynthSpec::defaults();
  spec.noise_sigma = 0.01;
  spec.seed = 5;
  spec.points_per_run = 1250; // 8 sizes x 1250 = 10000 points
  const RunSet noisy = synthesize_runs(spec);
  SynthSpec clean = spec;
  clean.noise_sigma = 0.0;
  const RunSet exact = synthesize_runs(clean);
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < noisy.runs.size(); ++r) {
    for (std::size_t i = 0; i < noisy.runs[r].points.size(); ++i) {
      const double e = spec.surface.E;
      sum += std::log(noisy.runs[r].points[i].val_loss - e) -
             std::log(exact.runs[r].points[i].val_loss - e);
      ++n;
    }
  }
  CHECK(n == 10000);
  CHECK(std::fabs(sum / n) < 3 * 0.01 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("invalid synth specs are rejected") {
  SynthSpec spec = SynthSpec::defaults();
  spec.model_sizes = {1e7, 1e6};
  CHECK_THROWS_AS(validate(spec), ValidationError);
  spec = SynthSpec::defaults();
  spec.token_param_ratio = 0;
  CHECK_THROWS_AS(validate(spec), ValidationError);
  spec = SynthSpec::defaults();
  spec.noise_sigma = -0.1;
  CHECK_THROWS_AS(validate(spec), ValidationError);
  spec = SynthSpec::defaults();
  spec.model_sizes.clear();
  CHECK_THROWS_AS(synthesize_runs(spec), ValidationError);
}
