#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kmedlp/certificate.hpp"
#include "kmedlp/instance.hpp"
#include "kmedlp/recovery.hpp"

namespace kmedlp {

enum class Layout { pair, simplex, hexagon7, custom };
enum class Method { certificate, lp, witness, auto_method };

struct ExperimentConfig {
  Layout layout = Layout::pair;
  double delta = 3.5;
  int m = 2;
  int k = 2;
  long n = 100;
  MeasureSpec measure = MeasureSpec::uniform_ball(2, 1.0);
  std::vector<double> betas;                          // empty: all 1
  std::vector<std::vector<double>> custom_centers;    // layout == custom
  std::uint64_t seed_begin = 0;
  long seed_count = 20;
  Method method = Method::auto_method;
  double witness_eps = 0.01;
  long lp_size_guard = 250;
  double rate_threshold = 0.9;  // artifact calibration, reported with results
};

std::vector<std::vector<double>> layout_centers(const ExperimentConfig& config);
std::vector<BallConfig> layout_balls(const ExperimentConfig& config);
Instance build_instance(const ExperimentConfig& config, std::uint64_t seed);

struct TrialRecord {
  std::uint64_t seed = 0;
  std::string verdict;
  bool achieved = false;
  double margin = 0.0;
  double wall_ms = 0.0;
};

struct WilsonInterval {
  double lo = 0.0, hi = 1.0;
};
WilsonInterval wilson_interval(long successes, long trials, double z = 1.959963984540054);

struct RateSummary {
  double rate = 0.0;
  WilsonInterval interval;
  double threshold = 0.0;
  std::vector<TrialRecord> trials;  // sorted by seed
};

RateSummary recovery_rate(const ExperimentConfig& config);

struct DeltaScanRow {
  double delta = 0.0;
  RateSummary summary;
};
std::vector<DeltaScanRow> delta_scan(const ExperimentConfig& config,
                                     const std::vector<double>& deltas);

// CSV with columns delta,m,k,n,seed,verdict,margin,wall_ms
void write_trials_csv(std::ostream& os, const ExperimentConfig& config, double delta,
                      const RateSummary& summary);

struct AppendixBResult {
  bool refused = false;
  AssumptionCheck assumption;
  double constant_a = 0.0;  // (6/pi) int_0^{pi/6} (sqrt(5.84-4.4 cos) - 1)
  double constant_b = 0.0;  // the two-arc lower-bound constant
  RateSummary witness;      // impossibility_witness per seed
  std::optional<RateSummary> lp_check;  // decide_recovery at small n (not-achieved rate)
};

// hexagon7 layout at the given delta with the annulus measure; refuses (with
// the margin) when the measure/eps pair fails the assumption check.
AppendixBResult appendix_b_counterexample(long n, std::uint64_t seed_begin, long seeds,
                                          double eps, double interior_mass = 0.001,
                                          double delta = 2.2, long lp_n = 0, long lp_seeds = 0);

struct AppendixARow {
  long n = 0;
  long n2 = 0;
  long alt_better = 0;
  long trials = 0;
  double mean_margin = 0.0;  // ground-truth objective minus alternative
};

struct AppendixAResult {
  std::vector<AppendixARow> rows;
  std::optional<AppendixARow> control;  // n1 = n2 sanity run
};

// k=2 pair layout, n_1 = n, n_2 = ceil(sqrt(n)); the alternative clustering
// places both centers inside ball 1 (nearest samples to c_1 - e_1/2 and c_1).
AppendixAResult appendix_a_order_mismatch(const std::vector<long>& n_grid, long seeds,
                                          double delta = 4.0, bool with_control = true,
                                          std::uint64_t seed_begin = 0);

int worker_count();  // KMR_THREADS or hardware concurrency
void parallel_for(long count, const std::function<void(long)>& body);

}  // namespace kmedlp
