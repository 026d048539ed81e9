#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "kmedlp/instance.hpp"

namespace kmedlp {

// The k-median relaxation: variables y_p and z_pq, assignment rows
// sum_p z_pq = 1, linking rows z_pq <= y_p, one cardinality row
// sum_p y_p = k, everything nonnegative, objective sum d(p,q) z_pq.
struct LpModel {
  long N = 0;
  int k = 0;
  std::vector<double> dist;  // N*N row-major, d[p*N+q]
  double max_dist = 0.0;

  static LpModel build(const Instance& instance);
  static LpModel from_points(const PointArray& pts, int k);

  double d(long p, long q) const { return dist[static_cast<std::size_t>(p * N + q)]; }
  long num_variables() const { return N * N + N; }
  long num_constraints() const { return N * N + N + 1; }
};

struct SparseEntry {
  long p = 0, q = 0;
  double value = 0.0;
};

struct LpSolution {
  enum class Status { optimal, failed };
  Status status = Status::failed;
  double objective = 0.0;
  long iterations = 0;
  std::vector<double> y;  // N
  std::vector<double> z;  // N*N dense

  double zval(long p, long q, long N) const { return z[static_cast<std::size_t>(p * N + q)]; }
  std::vector<SparseEntry> sparse_z(long N, double cutoff = 1e-9) const;
};

struct DualSolution {
  std::vector<double> alpha;  // per point
  double omega = 0.0;
  std::vector<SparseEntry> beta;  // (alpha_q - d(p,q))_+ entries
  double objective(long k) const;
};

struct SolveOptions {
  long size_guard = 250;
  double opt_tol = 1e-9;
  long max_iterations = 0;  // 0: automatic
};

// One-shot solve. Throws std::invalid_argument when N exceeds the size guard;
// numerical failure comes back as Status::failed, never as a silent value.
std::pair<LpSolution, DualSolution> solve(const LpModel& model, const SolveOptions& opts = {});

// Reusable solver (keeps the final basis so cost-perturbed re-solves warm
// start from the previous optimum).
class KMedianLpSolver {
public:
  explicit KMedianLpSolver(const LpModel& model, const SolveOptions& opts = {});
  ~KMedianLpSolver();
  KMedianLpSolver(KMedianLpSolver&&) noexcept;
  KMedianLpSolver& operator=(KMedianLpSolver&&) noexcept;

  std::pair<LpSolution, DualSolution> run();
  // Re-solve with modified costs (same dimensions), starting from the
  // current basis.
  std::pair<LpSolution, DualSolution> resolve(const std::vector<double>& costs);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kmedlp
