#include "kmedlp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "kmedlp/gfunction.hpp"
#include "kmedlp/numerics.hpp"

namespace kmedlp {

int worker_count() {
  if (const char* env = std::getenv("KMR_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(long count, const std::function<void(long)>& body) {
  int workers = std::min<long>(worker_count(), count);
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto loop = [&] {
    while (true) {
      long i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::vector<double>> layout_centers(const ExperimentConfig& config) {
  std::vector<std::vector<double>> centers;
  switch (config.layout) {
    case Layout::pair: {
      if (config.k != 2) throw std::invalid_argument("pair layout requires k = 2");
      centers.assign(2, std::vector<double>(static_cast<std::size_t>(config.m), 0.0));
      centers[1][0] = config.delta;
      break;
    }
    case Layout::simplex: {
      if (config.m < config.k)
        throw std::invalid_argument("simplex layout requires m >= k");
      // scaled standard-basis vertices: pairwise distance exactly delta
      centers.assign(static_cast<std::size_t>(config.k),
                     std::vector<double>(static_cast<std::size_t>(config.m), 0.0));
      double c = config.delta / std::sqrt(2.0);
      for (int i = 0; i < config.k; ++i) centers[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = c;
      break;
    }
    case Layout::hexagon7: {
      if (config.m != 2 || config.k != 7)
        throw std::invalid_argument("hexagon7 layout requires m = 2, k = 7");
      centers.push_back({0.0, 0.0});
      for (int i = 2; i <= 7; ++i) {
        double ang = -(i - 2) * kPi / 3.0;
        centers.push_back({config.delta * std::cos(ang), config.delta * std::sin(ang)});
      }
      break;
    }
    case Layout::custom: {
      if (static_cast<int>(config.custom_centers.size()) != config.k)
        throw std::invalid_argument("custom layout: need k centers");
      centers = config.custom_centers;
      break;
    }
  }
  return centers;
}

std::vector<BallConfig> layout_balls(const ExperimentConfig& config) {
  auto centers = layout_centers(config);
  if (config.measure.dim() != config.m)
    throw std::invalid_argument("measure dimension != layout dimension");
  std::vector<BallConfig> balls;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    double beta = config.betas.empty() ? 1.0 : config.betas.at(i);
    balls.push_back(make_ball(centers[i], config.measure.radius(), config.measure, beta));
  }
  return balls;
}

Instance build_instance(const ExperimentConfig& config, std::uint64_t seed) {
  return generate(layout_balls(config), config.n, seed);
}

WilsonInterval wilson_interval(long successes, long trials, double z) {
  WilsonInterval w;
  if (trials <= 0) return w;
  double n = double(trials), p = double(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  w.lo = std::max(0.0, center - half);
  w.hi = std::min(1.0, center + half);
  return w;
}

namespace {

TrialRecord run_trial(const ExperimentConfig& config, std::uint64_t seed) {
  TrialRecord rec;
  rec.seed = seed;
  auto t0 = std::chrono::steady_clock::now();
  try {
    Instance inst = build_instance(config, seed);
    switch (config.method) {
      case Method::certificate: {
        CertifyResult res = certify_recovery(inst);
        bool ok = res.applicable &&
                  res.verdict.implies == CertificateVerdict::Implies::unique_optimum;
        rec.achieved = ok;
        rec.verdict = !res.applicable ? "inapplicable" : (ok ? "achieved" : "not_proven");
        if (res.applicable)
          rec.margin = std::min(res.verdict.margin_b, res.verdict.margin_d);
        break;
      }
      case Method::lp: {
        RecoveryOptions ro;
        ro.lp_size_guard = config.lp_size_guard;
        ro.use_certificate_path = false;
        RecoveryVerdict v = decide_recovery(inst, ro);
        rec.achieved = v.status == RecoveryVerdict::Status::achieved;
        rec.verdict = to_string(v.status);
        rec.margin = v.margin;
        break;
      }
      case Method::witness: {
        WitnessReport w = impossibility_witness(inst, config.witness_eps);
        rec.achieved = w.status == WitnessStatus::proves_failure;
        rec.verdict = w.status == WitnessStatus::proves_failure ? "proves_failure"
                                                                : "inconclusive";
        rec.margin = w.margin;
        break;
      }
      case Method::auto_method: {
        RecoveryOptions ro;
        ro.lp_size_guard = config.lp_size_guard;
        RecoveryVerdict v = decide_recovery(inst, ro);
        rec.achieved = v.status == RecoveryVerdict::Status::achieved;
        rec.verdict = to_string(v.status);
        rec.margin = v.margin;
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.verdict = std::string("error: ") + e.what();
    rec.achieved = false;
  }
  auto t1 = std::chrono::steady_clock::now();
  rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rec;
}

}  // namespace

RateSummary recovery_rate(const ExperimentConfig& config) {
  RateSummary out;
  out.threshold = config.rate_threshold;
  out.trials.resize(static_cast<std::size_t>(config.seed_count));
  parallel_for(config.seed_count, [&](long i) {
    out.trials[static_cast<std::size_t>(i)] =
        run_trial(config, config.seed_begin + static_cast<std::uint64_t>(i));
  });
  std::sort(out.trials.begin(), out.trials.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return a.seed < b.seed; });
  long wins = 0;
  for (const auto& t : out.trials) wins += t.achieved ? 1 : 0;
  out.rate = config.seed_count > 0 ? double(wins) / double(config.seed_count) : 0.0;
  out.interval = wilson_interval(wins, config.seed_count);
  return out;
}

std::vector<DeltaScanRow> delta_scan(const ExperimentConfig& config,
                                     const std::vector<double>& deltas) {
  if (!std::is_sorted(deltas.begin(), deltas.end()))
    throw std::invalid_argument("delta_scan: grid must be sorted");
  std::vector<DeltaScanRow> rows;
  for (double d : deltas) {
    ExperimentConfig c = config;
    c.delta = d;
    rows.push_back({d, recovery_rate(c)});
  }
  return rows;
}

void write_trials_csv(std::ostream& os, const ExperimentConfig& config, double delta,
                      const RateSummary& summary) {
  for (const auto& t : summary.trials) {
    os << delta << ',' << config.m << ',' << config.k << ',' << config.n << ',' << t.seed
       << ',' << t.verdict << ',' << t.margin << ',' << t.wall_ms << '\n';
  }
}

AppendixBResult appendix_b_counterexample(long n, std::uint64_t seed_begin, long seeds,
                                          double eps, double interior_mass, double delta,
                                          long lp_n, long lp_seeds) {
  AppendixBResult out;
  MeasureSpec measure = MeasureSpec::annulus_concentrated(2, 1.0, eps, interior_mass);
  out.assumption = check_counterexample_assumption(measure, eps);
  QuadratureSpec spec{1e-12, 1e-12, 60};
  out.constant_a =
      (6.0 / kPi) * integrate(
                        [](double th) { return std::sqrt(5.84 - 4.4 * std::cos(th)) - 1.0; },
                        0.0, kPi / 6.0, spec);
  double theta_prime = std::acos(0.6);
  out.constant_b =
      (1.0 / kPi) * integrate(
                        [](double ps) { return 1.0 - std::sqrt(2.0 - 2.0 * std::cos(ps)); },
                        0.0, kPi / 3.0, spec) +
      (1.0 / kPi) * integrate(
                        [](double ph) { return 1.0 - std::sqrt(2.44 - 2.4 * std::cos(ph)); },
                        0.0, theta_prime, spec);
  if (!out.assumption.satisfied) {
    out.refused = true;
    return out;
  }

  ExperimentConfig config;
  config.layout = Layout::hexagon7;
  config.delta = delta;
  config.m = 2;
  config.k = 7;
  config.n = n;
  config.measure = measure;
  config.seed_begin = seed_begin;
  config.seed_count = seeds;
  config.method = Method::witness;
  config.witness_eps = eps;
  out.witness = recovery_rate(config);

  if (lp_n > 0 && lp_seeds > 0) {
    ExperimentConfig lpc = config;
    lpc.n = lp_n;
    lpc.seed_count = lp_seeds;
    lpc.method = Method::lp;
    RateSummary lp = recovery_rate(lpc);
    // report the NOT-achieved rate for the failure check
    RateSummary flipped = lp;
    long fails = 0;
    for (auto& t : flipped.trials) {
      t.achieved = !t.achieved;
      fails += t.achieved ? 1 : 0;
    }
    flipped.rate = lp_seeds > 0 ? double(fails) / double(lp_seeds) : 0.0;
    flipped.interval = wilson_interval(fails, lp_seeds);
    out.lp_check = flipped;
  }
  return out;
}

AppendixAResult appendix_a_order_mismatch(const std::vector<long>& n_grid, long seeds,
                                          double delta, bool with_control,
                                          std::uint64_t seed_begin) {
  AppendixAResult out;

  auto run = [&](long n1, long n2) {
    AppendixARow row;
    row.n = n1;
    row.n2 = n2;
    row.trials = seeds;
    if (n2 < 1) throw std::invalid_argument("appendix_a: n_2 must be >= 1");
    std::vector<double> margins(static_cast<std::size_t>(seeds), 0.0);
    std::vector<int> wins(static_cast<std::size_t>(seeds), 0);
    parallel_for(seeds, [&](long t) {
      std::uint64_t seed = seed_begin + static_cast<std::uint64_t>(t);
      // ESBM with base count n2 and beta_1 = n1/n2 >= 1
      MeasureSpec measure = MeasureSpec::uniform_ball(2, 1.0);
      std::vector<BallConfig> balls;
      balls.push_back(make_ball({0.0, 0.0}, 1.0, measure, double(n1) / double(n2)));
      balls.push_back(make_ball({delta, 0.0}, 1.0, measure, 1.0));
      Instance inst = generate(balls, n2, seed);
      GroundTruthSolution gt = ground_truth(inst);

      // alternative clustering: nearest samples (in ball 1) to s = -e1/2 and 0
      std::vector<double> s{-0.5, 0.0};
      long near_s = -1, near_c = -1;
      double ds = std::numeric_limits<double>::infinity();
      double dc = std::numeric_limits<double>::infinity();
      for (long q = 0; q < inst.size(); ++q) {
        if (inst.labels[static_cast<std::size_t>(q)] != 0) continue;
        double d1 = dist(inst.points[q], s);
        if (d1 < ds) {
          ds = d1;
          near_s = q;
        }
        double d2 = norm(inst.points[q]);
        if (d2 < dc) {
          dc = d2;
          near_c = q;
        }
      }
      double alt = 0.0;
      for (long q = 0; q < inst.size(); ++q)
        alt += std::min(dist(inst.points[q], inst.points[near_s]),
                        dist(inst.points[q], inst.points[near_c]));
      margins[static_cast<std::size_t>(t)] = gt.objective - alt;
      wins[static_cast<std::size_t>(t)] = alt < gt.objective ? 1 : 0;
    });
    for (long t = 0; t < seeds; ++t) {
      row.alt_better += wins[static_cast<std::size_t>(t)];
      row.mean_margin += margins[static_cast<std::size_t>(t)];
    }
    if (seeds > 0) row.mean_margin /= double(seeds);
    return row;
  };

  for (long n : n_grid) {
    long n2 = static_cast<long>(std::ceil(std::sqrt(double(n))));
    out.rows.push_back(run(n, n2));
  }
  if (with_control && !n_grid.empty()) {
    long n = n_grid.back();
    out.control = run(n, n);
  }
  return out;
}

}  // namespace kmedlp
