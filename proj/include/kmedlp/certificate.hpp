#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kmedlp/instance.hpp"
#include "kmedlp/lp.hpp"

namespace kmedlp {

struct Certificate {
  std::vector<double> alpha;  // one entry per point
};

enum class CondStatus { holds_strict, holds_weak, fails };

// The four conditions: (a) equal contributions at the centers, (b) no other
// point collects more, (c) every point sees its own center, (d) no point sees
// a foreign center. Margins below -tau fail; margins above tau are strict.
struct CertificateVerdict {
  CondStatus a = CondStatus::fails;
  CondStatus b = CondStatus::fails;
  CondStatus c = CondStatus::fails;
  CondStatus d = CondStatus::fails;
  double margin_a = 0.0;  // max deviation between center contributions
  double margin_b = 0.0;  // min (C(center) - C(q)) over non-centers
  double margin_c = 0.0;  // min (alpha_q - d(a_i, q)) over own clusters
  double margin_d = 0.0;  // min (d(a_i, q) - alpha_q) over foreign clusters
  double strictness_tau = 0.0;

  enum class Implies { unique_optimum, optimum, nothing };
  Implies implies = Implies::nothing;
};

CertificateVerdict verify_certificate(const Instance& instance, const Clustering& clustering,
                                      const Certificate& certificate);

struct SlacknessReport {
  bool primal_feasible = false;
  bool dual_feasible = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double cs1 = 0.0;  // max |beta_pq (z_pq - y_p)|
  double cs2 = 0.0;  // max |z_pq (alpha_q - beta_pq - d(p,q))|
  double cs3 = 0.0;  // max |y_p (sum_q beta_pq - omega)|
  bool optimal_pair = false;
};

SlacknessReport complementary_slackness(const Instance& instance, const LpSolution& primal,
                                        const DualSolution& dual, double tol = 1e-8);

struct Recipe {
  double gamma = 0.0;
  std::vector<double> expected_distance;  // E_i
  std::vector<double> alpha;              // alpha_i = E_i + gamma / beta_i
  std::vector<double> epsilon;            // OPT_i/n_i - E_i (filled by certify)
  double interval_lo = 0.0, interval_hi = 0.0;
  bool corollary1 = false;
};

// gamma interval (max_i beta_i (r_i - E_i), min_i beta_i (D_i - E_i));
// empty interval or any n_i < 3 -> nullopt. In the symmetric unit-radius
// case alpha' = min(1.29, midpoint) when 1.29 is admissible.
std::optional<Recipe> build_recipe(const Instance& instance);
std::optional<Recipe> build_recipe(const Instance& instance, std::optional<double> gamma_override);

struct CertifyResult {
  bool applicable = false;
  Recipe recipe;
  Certificate certificate;
  CertificateVerdict verdict;
  GroundTruthSolution ground_truth;
};

// Theorem-2-style construction: alpha'_i = E_i + gamma/beta_i + eps_i with
// the empirical eps_i correction, verified with verify_certificate. A
// unique_optimum verdict proves exact recovery without any LP solve.
CertifyResult certify_recovery(const Instance& instance,
                               std::optional<double> gamma_override = std::nullopt);

enum class WitnessStatus { proves_failure, inconclusive };

struct WitnessReport {
  WitnessStatus status = WitnessStatus::inconclusive;
  double upper_bound = 0.0;  // on C(median of the probed ball), per unit n
  double lower_bound = 0.0;  // on C(x'), per unit n
  double margin = 0.0;       // lower - upper
  std::string reason;
  std::vector<double> probe;
};

// Empirical impossibility witness: when the lower bound on C(x') exceeds the
// upper bound on C(x*), no alpha satisfying conditions (c)/(d) can satisfy
// (a)/(b), so the ground truth is not LP-optimal. Preconditions (per-ball
// medians within eps of their centers; a sample point within eps of s) are
// checked; a failed check is reported as inconclusive with the reason.
WitnessReport impossibility_witness(const Instance& instance, std::span<const double> s,
                                    double eps);
// default probe: s = c_1 + (1 - eps) * (unit vector toward the nearest other
// center)
WitnessReport impossibility_witness(const Instance& instance, double eps = 0.01);

}  // namespace kmedlp
