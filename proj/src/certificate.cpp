#include "kmedlp/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kmedlp {

namespace {

double max_pairwise_distance(const PointArray& pts) {
  double best = 0.0;
  for (long i = 0; i < pts.size(); ++i)
    for (long j = i + 1; j < pts.size(); ++j) best = std::max(best, dist(pts[i], pts[j]));
  return best;
}

CondStatus grade(double margin, double tau) {
  if (margin > tau) return CondStatus::holds_strict;
  if (margin >= -tau) return CondStatus::holds_weak;
  return CondStatus::fails;
}

}  // namespace

CertificateVerdict verify_certificate(const Instance& instance, const Clustering& clustering,
                                      const Certificate& certificate) {
  long N = instance.size();
  if (static_cast<long>(certificate.alpha.size()) != N)
    throw std::invalid_argument("verify_certificate: alpha must have one entry per point");
  if (static_cast<int>(clustering.centers.size()) != instance.k ||
      static_cast<long>(clustering.assign.size()) != N)
    throw std::invalid_argument("verify_certificate: clustering is infeasible");
  for (std::size_t i = 0; i < clustering.centers.size(); ++i) {
    long c = clustering.centers[i];
    if (c < 0 || c >= N || clustering.assign[static_cast<std::size_t>(c)] != static_cast<int>(i))
      throw std::invalid_argument("verify_certificate: centers must be assigned to themselves");
  }
  for (int a : clustering.assign)
    if (a < 0 || a >= instance.k)
      throw std::invalid_argument("verify_certificate: assignment is not total");

  const auto& alpha = certificate.alpha;
  double tau = 1e-9 * (1.0 + max_pairwise_distance(instance.points));

  // C^alpha at every point
  std::vector<double> C(static_cast<std::size_t>(N), 0.0);
  for (long p = 0; p < N; ++p) {
    double acc = 0.0;
    for (long q = 0; q < N; ++q) {
      double v = alpha[static_cast<std::size_t>(q)] - dist(instance.points[p], instance.points[q]);
      if (v > 0.0) acc += v;
    }
    C[static_cast<std::size_t>(p)] = acc;
  }

  std::vector<bool> is_center(static_cast<std::size_t>(N), false);
  for (long c : clustering.centers) is_center[static_cast<std::size_t>(c)] = true;

  CertificateVerdict v;
  v.strictness_tau = tau;

  double c0 = C[static_cast<std::size_t>(clustering.centers.front())];
  double cmin = c0;
  v.margin_a = 0.0;
  for (long c : clustering.centers) {
    v.margin_a = std::max(v.margin_a, std::fabs(C[static_cast<std::size_t>(c)] - c0));
    cmin = std::min(cmin, C[static_cast<std::size_t>(c)]);
  }
  v.a = v.margin_a <= tau ? CondStatus::holds_weak : CondStatus::fails;

  v.margin_b = std::numeric_limits<double>::infinity();
  bool any_noncenter = false;
  for (long q = 0; q < N; ++q) {
    if (is_center[static_cast<std::size_t>(q)]) continue;
    any_noncenter = true;
    v.margin_b = std::min(v.margin_b, cmin - C[static_cast<std::size_t>(q)]);
  }
  if (!any_noncenter) v.margin_b = 0.0;  // vacuous: graded weak
  v.b = grade(v.margin_b, tau);

  v.margin_c = std::numeric_limits<double>::infinity();
  v.margin_d = std::numeric_limits<double>::infinity();
  for (long q = 0; q < N; ++q) {
    int home = clustering.assign[static_cast<std::size_t>(q)];
    for (std::size_t i = 0; i < clustering.centers.size(); ++i) {
      double dq = dist(instance.points[clustering.centers[i]], instance.points[q]);
      double aq = alpha[static_cast<std::size_t>(q)];
      if (static_cast<int>(i) == home)
        v.margin_c = std::min(v.margin_c, aq - dq);
      else
        v.margin_d = std::min(v.margin_d, dq - aq);
    }
  }
  if (!std::isfinite(v.margin_c)) v.margin_c = 0.0;
  if (!std::isfinite(v.margin_d)) v.margin_d = 0.0;
  v.c = grade(v.margin_c, tau);
  v.d = grade(v.margin_d, tau);

  bool a_holds = v.a != CondStatus::fails;
  bool c_holds = v.c != CondStatus::fails;
  if (a_holds && c_holds && v.b == CondStatus::holds_strict && v.d == CondStatus::holds_strict)
    v.implies = CertificateVerdict::Implies::unique_optimum;
  else if (a_holds && c_holds && v.b != CondStatus::fails && v.d != CondStatus::fails)
    v.implies = CertificateVerdict::Implies::optimum;
  else
    v.implies = CertificateVerdict::Implies::nothing;
  return v;
}

SlacknessReport complementary_slackness(const Instance& instance, const LpSolution& primal,
                                        const DualSolution& dual, double tol) {
  long N = instance.size();
  LpModel model = LpModel::build(instance);
  SlacknessReport rep;

  // primal feasibility
  double pres = 0.0;
  for (long q = 0; q < N; ++q) {
    double s = 0.0;
    for (long p = 0; p < N; ++p) s += primal.zval(p, q, N);
    pres = std::max(pres, std::fabs(s - 1.0));
  }
  double sy = 0.0;
  for (double v : primal.y) {
    sy += v;
    pres = std::max(pres, std::max(0.0, -v));
  }
  pres = std::max(pres, std::fabs(sy - double(instance.k)));
  for (long p = 0; p < N; ++p)
    for (long q = 0; q < N; ++q) {
      double zv = primal.zval(p, q, N);
      pres = std::max(pres, std::max(0.0, -zv));
      pres = std::max(pres, std::max(0.0, zv - primal.y[static_cast<std::size_t>(p)]));
    }
  rep.primal_residual = pres;
  rep.primal_feasible = pres <= tol * (1.0 + model.max_dist);

  // dense beta from the sparse entries
  std::vector<double> beta(static_cast<std::size_t>(N * N), 0.0);
  for (const auto& e : dual.beta) beta[static_cast<std::size_t>(e.p * N + e.q)] = e.value;

  double dres = 0.0;
  for (long p = 0; p < N; ++p) {
    double sb = 0.0;
    for (long q = 0; q < N; ++q) {
      double b = beta[static_cast<std::size_t>(p * N + q)];
      dres = std::max(dres, std::max(0.0, -b));
      dres = std::max(dres, dual.alpha[static_cast<std::size_t>(q)] - b - model.d(p, q));
      sb += b;
    }
    dres = std::max(dres, sb - dual.omega);
  }
  rep.dual_residual = dres;
  rep.dual_feasible = dres <= tol * (1.0 + model.max_dist);

  for (long p = 0; p < N; ++p) {
    double sb = 0.0;
    for (long q = 0; q < N; ++q) {
      double b = beta[static_cast<std::size_t>(p * N + q)];
      double zv = primal.zval(p, q, N);
      rep.cs1 = std::max(rep.cs1, std::fabs(b * (zv - primal.y[static_cast<std::size_t>(p)])));
      rep.cs2 = std::max(rep.cs2,
                         std::fabs(zv * (dual.alpha[static_cast<std::size_t>(q)] - b - model.d(p, q))));
      sb += b;
    }
    rep.cs3 = std::max(rep.cs3, std::fabs(primal.y[static_cast<std::size_t>(p)] * (sb - dual.omega)));
  }
  double cstol = tol * (1.0 + model.max_dist);
  rep.optimal_pair = rep.primal_feasible && rep.dual_feasible && rep.cs1 <= cstol &&
                     rep.cs2 <= cstol && rep.cs3 <= cstol;
  return rep;
}

std::optional<Recipe> build_recipe(const Instance& instance) {
  return build_recipe(instance, std::nullopt);
}

std::optional<Recipe> build_recipe(const Instance& instance, std::optional<double> gamma_override) {
  if (instance.balls.empty()) return std::nullopt;
  for (long c : instance.counts())
    if (c < 3) return std::nullopt;  // the unique-median argument needs n_i >= 3

  GeometrySummary geo = summarize_geometry(instance.balls);
  Recipe r;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < instance.balls.size(); ++i) {
    const auto& b = instance.balls[i];
    double E = b.measure.expected_center_distance();
    r.expected_distance.push_back(E);
    lo = std::max(lo, b.beta * (b.radius - E));
    hi = std::min(hi, b.beta * (geo.D[i] - E));
  }
  if (instance.balls.size() == 1) hi = std::numeric_limits<double>::infinity();
  if (!(lo < hi)) return std::nullopt;
  r.interval_lo = lo;
  r.interval_hi = hi;

  bool symmetric = true;
  for (const auto& b : instance.balls)
    if (std::fabs(b.beta - 1.0) > 1e-12 || std::fabs(b.radius - 1.0) > 1e-12) symmetric = false;
  for (double E : r.expected_distance)
    if (std::fabs(E - r.expected_distance.front()) > 1e-12) symmetric = false;
  r.corollary1 = symmetric && instance.balls.size() >= 2;

  if (gamma_override) {
    if (!(*gamma_override > lo && *gamma_override < hi)) return std::nullopt;
    r.gamma = *gamma_override;
  } else if (r.corollary1) {
    // alpha' interval is (1, min_pair_distance - 1); prefer 1.29 when admissible
    double E = r.expected_distance.front();
    double amid = 0.5 * (1.0 + (geo.min_center_distance - 1.0));
    double aprime = (1.29 > 1.0 && 1.29 < geo.min_center_distance - 1.0) ? std::min(1.29, amid)
                                                                         : amid;
    r.gamma = aprime - E;
  } else if (std::isfinite(hi)) {
    r.gamma = 0.5 * (lo + hi);
  } else {
    r.gamma = lo + 1.0;  // single ball: any gamma > lo works
  }
  for (std::size_t i = 0; i < instance.balls.size(); ++i)
    r.alpha.push_back(r.expected_distance[i] + r.gamma / instance.balls[i].beta);
  return r;
}

CertifyResult certify_recovery(const Instance& instance, std::optional<double> gamma_override) {
  CertifyResult out;
  auto recipe = build_recipe(instance, gamma_override);
  if (!recipe) return out;
  out.applicable = true;
  out.recipe = *recipe;
  out.ground_truth = ground_truth(instance);

  std::vector<long> counts = instance.counts();
  out.recipe.epsilon.resize(instance.balls.size());
  std::vector<double> alpha_cluster(instance.balls.size());
  for (std::size_t i = 0; i < instance.balls.size(); ++i) {
    double eps_i = out.ground_truth.per_cluster_opt[i] / double(counts[i]) -
                   out.recipe.expected_distance[i];
    out.recipe.epsilon[i] = eps_i;
    alpha_cluster[i] = out.recipe.alpha[i] + eps_i;
  }
  out.certificate.alpha.resize(static_cast<std::size_t>(instance.size()));
  for (long q = 0; q < instance.size(); ++q)
    out.certificate.alpha[static_cast<std::size_t>(q)] =
        alpha_cluster[static_cast<std::size_t>(instance.labels[static_cast<std::size_t>(q)])];
  out.verdict = verify_certificate(instance, out.ground_truth.clustering, out.certificate);
  return out;
}

WitnessReport impossibility_witness(const Instance& instance, std::span<const double> s,
                                    double eps) {
  WitnessReport rep;
  rep.probe.assign(s.begin(), s.end());
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("impossibility_witness: eps in (0,1)");

  // which ball does the probe address? the nearest center
  int home = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < instance.k; ++i) {
    double d = dist(s, instance.balls[static_cast<std::size_t>(i)].center);
    if (d < dmin) {
      dmin = d;
      home = i;
    }
  }

  // precondition 1: all per-ball medians within eps of their centers
  GroundTruthSolution gt = ground_truth(instance);
  for (int i = 0; i < instance.k; ++i) {
    long med = gt.clustering.centers[static_cast<std::size_t>(i)];
    double d = dist(instance.points[med], instance.balls[static_cast<std::size_t>(i)].center);
    if (d >= eps) {
      rep.reason = "median of ball " + std::to_string(i) + " is " + std::to_string(d) +
                   " from its center (needs < eps)";
      return rep;
    }
  }
  // precondition 2: a sample point within eps of the probe
  double dbest = std::numeric_limits<double>::infinity();
  for (long q = 0; q < instance.size(); ++q) dbest = std::min(dbest, dist(instance.points[q], s));
  if (!(dbest <= eps)) {
    rep.reason = "no sample point within eps of the probe (closest " + std::to_string(dbest) + ")";
    return rep;
  }

  // upper bound on C(x*_home): sum over the home ball of
  //   min_{j != home} d(c_j, x) + 2 eps - d(c_home, x)
  const auto& cH = instance.balls[static_cast<std::size_t>(home)].center;
  double upper = 0.0;
  long n_home = 0;
  for (long q = 0; q < instance.size(); ++q) {
    if (instance.labels[static_cast<std::size_t>(q)] != home) continue;
    ++n_home;
    double f = std::numeric_limits<double>::infinity();
    for (int j = 0; j < instance.k; ++j) {
      if (j == home) continue;
      f = std::min(f, dist(instance.balls[static_cast<std::size_t>(j)].center, instance.points[q]));
    }
    upper += f + 2.0 * eps - dist(cH, instance.points[q]);
  }

  // lower bound on C(x'): sum over every ball of (d(c_i, x) - 2 eps - d(s, x))_+
  double lower = 0.0;
  for (long q = 0; q < instance.size(); ++q) {
    int i = instance.labels[static_cast<std::size_t>(q)];
    double v = dist(instance.balls[static_cast<std::size_t>(i)].center, instance.points[q]) -
               2.0 * eps - dist(s, instance.points[q]);
    if (v > 0.0) lower += v;
  }

  double scale = double(std::max<long>(n_home, 1));
  rep.upper_bound = upper / scale;
  rep.lower_bound = lower / scale;
  rep.margin = rep.lower_bound - rep.upper_bound;
  if (rep.margin > 0.0) {
    rep.status = WitnessStatus::proves_failure;
    rep.reason = "lower bound on C(x') exceeds upper bound on C(x*)";
  } else {
    rep.reason = "bounds do not separate (margin " + std::to_string(rep.margin) + ")";
  }
  return rep;
}

WitnessReport impossibility_witness(const Instance& instance, double eps) {
  if (instance.k < 2)
    throw std::invalid_argument("impossibility_witness: needs at least two balls");
  const auto& c1 = instance.balls[0].center;
  double dmin = std::numeric_limits<double>::infinity();
  std::size_t jbest = 1;
  for (std::size_t j = 1; j < instance.balls.size(); ++j) {
    double d = dist(instance.balls[j].center, c1);
    if (d < dmin) {
      dmin = d;
      jbest = j;
    }
  }
  std::vector<double> s = c1;
  for (std::size_t c = 0; c < s.size(); ++c)
    s[c] += (1.0 - eps) * instance.balls[0].radius * (instance.balls[jbest].center[c] - c1[c]) / dmin;
  return impossibility_witness(instance, s, eps);
}

}  // namespace kmedlp
