#include "kmedlp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <cstdio>
#include <cstdlib>

namespace kmedlp {

LpModel LpModel::build(const Instance& instance) {
  if (instance.size() < instance.k || instance.k < 1)
    throw std::invalid_argument("LpModel: need N >= k >= 1");
  return from_points(instance.points, instance.k);
}

LpModel LpModel::from_points(const PointArray& pts, int k) {
  long N = pts.size();
  if (N < k || k < 1) throw std::invalid_argument("LpModel: need N >= k >= 1");
  LpModel m;
  m.N = N;
  m.k = k;
  m.dist.assign(static_cast<std::size_t>(N * N), 0.0);
  for (long p = 0; p < N; ++p)
    for (long q = 0; q < N; ++q) {
      double d = kmedlp::dist(pts[p], pts[q]);
      m.dist[static_cast<std::size_t>(p * N + q)] = d;
      m.max_dist = std::max(m.max_dist, d);
    }
  return m;
}

std::vector<SparseEntry> LpSolution::sparse_z(long N, double cutoff) const {
  std::vector<SparseEntry> out;
  for (long p = 0; p < N; ++p)
    for (long q = 0; q < N; ++q) {
      double v = z[static_cast<std::size_t>(p * N + q)];
      if (v > cutoff) out.push_back({p, q, v});
    }
  return out;
}

double DualSolution::objective(long k) const {
  double s = 0.0;
  for (double a : alpha) s += a;
  return s - double(k) * omega;
}

namespace {

// Primal simplex on the full model
//
//   min  sum d_pq z_pq
//   s.t. sum_p z_pq = 1            (assignment row q)
//        z_pq + s_pq - y_p = 0     (link row pq; s is the slack of z <= y)
//        sum_p y_p = k             (cardinality row)
//        z, s, y >= 0
//
// Every iteration is a genuine pivot on the basic set, so Bland's rule
// applies verbatim and the walk terminates. The structure is exploited only
// in the linear algebra: each link row is a singleton-difference row and is
// eliminated through its own link pivot (the basic s_pq, else the basic
// z_pq, else y_p), which reduces every basis solve to a dense core over the
// N+1 assignment/cardinality rows. The N^2-row basis never materializes.
//
// Row classification given a basic set:
//   S-kind: s_pq basic            (z_pq, if basic, sits in the core as e_q)
//   Z-kind: z basic, s nonbasic   (z is the link pivot, z = y_p; y_p's core
//                                  column folds in e_q and the cost d_pq)
//   Y-kind: neither basic         (y_p must be basic and pivots this row;
//                                  at most one per p, and then y_p = 0)
struct Core {
  long N;
  int k;
  long M;  // core rows: N + 1
  const std::vector<double>* cost;
  double max_dist;
  double opt_tol;

  // var ids: y_p -> p; z_pq -> N + pN + q; s_pq -> N + N^2 + pN + q
  std::vector<unsigned char> basic_flag;
  std::vector<std::vector<long>> fold;  // per p: sorted q's of Z-kind rows
  std::vector<double> fold_cost;        // per p: sum of d_pq over the fold
  std::vector<long> free_row;           // per p: q of the Y-kind row, or -1

  std::vector<long> core_vars;  // N+1 var ids (y's and core z's)
  std::vector<long> core_pos;   // var id -> core row, or -1
  std::vector<double> binv;     // (N+1)^2 inverse of the reduced core
  std::vector<long> binv_mod;   // the same inverse over GF(p): exact rank data
  std::vector<double> xcore;
  std::vector<double> pi;  // N assignment duals + cardinality dual

  // The core matrices are 0/1 integer matrices, so singularity and the zero
  // pattern of B^-1 a are exact integer facts. A mirror of the inverse over
  // a large prime field decides them exactly (up to the negligible chance
  // that the prime divides a subdeterminant), which keeps phantom ratio-test
  // blockers and structurally void pivots out of the walk.
  static constexpr long kPrime = 2147483629;
  static long mod_inv(long a) {  // Fermat
    long r = 1;
    long b = a % kPrime;
    long e = kPrime - 2;
    while (e) {
      if (e & 1) r = long((__int128)r * b % kPrime);
      b = long((__int128)b * b % kPrime);
      e >>= 1;
    }
    return r;
  }

  std::vector<double> bvec;  // N assignment entries + cardinality entry

  long iterations = 0;
  long degenerate_run = 0;
  bool bland = false;
  long pivots_since_refactor = 0;
  bool broken = false;

  long zid(long p, long q) const { return N + p * N + q; }
  long sid(long p, long q) const { return N + N * N + p * N + q; }
  bool is_y(long id) const { return id < N; }
  bool is_z(long id) const { return id >= N && id < N + N * N; }
  long varp(long id) const { return is_y(id) ? id : ((id - N) % (N * N)) / N; }
  long varq(long id) const { return ((id - N) % (N * N)) % N; }
  bool basic(long id) const { return basic_flag[static_cast<std::size_t>(id)] != 0; }
  double d(long p, long q) const { return (*cost)[static_cast<std::size_t>(p * N + q)]; }
  bool in_core(long id) const { return core_pos[static_cast<std::size_t>(id)] >= 0; }

  bool should_be_core(long id) const {
    if (!basic(id)) return false;
    if (!is_y(id) && !is_z(id)) return false;
    if (is_z(id)) return basic(sid(varp(id), varq(id)));
    return free_row[static_cast<std::size_t>(id)] < 0;
  }

  using SparseCol = std::vector<std::pair<long, double>>;

  SparseCol core_column(long id) const {
    SparseCol col;
    if (is_z(id)) {
      col.emplace_back(varq(id), 1.0);
    } else {
      col.emplace_back(N, 1.0);
      for (long q : fold[static_cast<std::size_t>(id)]) col.emplace_back(q, 1.0);
    }
    return col;
  }

  double core_cost(long id) const {
    if (is_z(id)) return d(varp(id), varq(id));
    return fold_cost[static_cast<std::size_t>(id)];
  }

  void reclassify(long p) {
    auto& f = fold[static_cast<std::size_t>(p)];
    f.clear();
    double fc = 0.0;
    long fr = -1;
    for (long q = 0; q < N; ++q) {
      if (basic(sid(p, q))) continue;
      if (basic(zid(p, q))) {
        f.push_back(q);
        fc += d(p, q);
      } else {
        if (fr >= 0) {
          broken = true;  // two uncovered link rows for one y: illegal
          return;
        }
        fr = q;
      }
    }
    fold_cost[static_cast<std::size_t>(p)] = fc;
    free_row[static_cast<std::size_t>(p)] = fr;
    if (fr >= 0 && !basic(p)) broken = true;  // uncovered row without its y
  }

  void refactor() {
    std::vector<double> B(static_cast<std::size_t>(M * M), 0.0);
    std::vector<long> Bm(static_cast<std::size_t>(M * M), 0);
    for (long j = 0; j < M; ++j)
      for (auto [r, v] : core_column(core_vars[static_cast<std::size_t>(j)])) {
        B[static_cast<std::size_t>(r * M + j)] = v;
        Bm[static_cast<std::size_t>(r * M + j)] = (long(v) % kPrime + kPrime) % kPrime;
      }
    std::vector<double> inv(static_cast<std::size_t>(M * M), 0.0);
    std::vector<long> invm(static_cast<std::size_t>(M * M), 0);
    for (long i = 0; i < M; ++i) {
      inv[static_cast<std::size_t>(i * M + i)] = 1.0;
      invm[static_cast<std::size_t>(i * M + i)] = 1;
    }
    // exact GF(p) elimination drives the pivot choice; the double mirror
    // follows the same row operations
    for (long c = 0; c < M; ++c) {
      long piv = -1;
      for (long r = c; r < M; ++r)
        if (Bm[static_cast<std::size_t>(r * M + c)] != 0) {
          piv = r;
          break;
        }
      if (piv < 0) {
        broken = true;
        return;
      }
      if (piv != c)
        for (long j = 0; j < M; ++j) {
          std::swap(B[static_cast<std::size_t>(piv * M + j)], B[static_cast<std::size_t>(c * M + j)]);
          std::swap(inv[static_cast<std::size_t>(piv * M + j)], inv[static_cast<std::size_t>(c * M + j)]);
          std::swap(Bm[static_cast<std::size_t>(piv * M + j)], Bm[static_cast<std::size_t>(c * M + j)]);
          std::swap(invm[static_cast<std::size_t>(piv * M + j)], invm[static_cast<std::size_t>(c * M + j)]);
        }
      double ip = 1.0 / B[static_cast<std::size_t>(c * M + c)];
      long ipm = mod_inv(Bm[static_cast<std::size_t>(c * M + c)]);
      for (long j = 0; j < M; ++j) {
        B[static_cast<std::size_t>(c * M + j)] *= ip;
        inv[static_cast<std::size_t>(c * M + j)] *= ip;
        Bm[static_cast<std::size_t>(c * M + j)] =
            long((__int128)Bm[static_cast<std::size_t>(c * M + j)] * ipm % kPrime);
        invm[static_cast<std::size_t>(c * M + j)] =
            long((__int128)invm[static_cast<std::size_t>(c * M + j)] * ipm % kPrime);
      }
      for (long r = 0; r < M; ++r) {
        if (r == c) continue;
        double f = B[static_cast<std::size_t>(r * M + c)];
        long fm = Bm[static_cast<std::size_t>(r * M + c)];
        if (f != 0.0)
          for (long j = 0; j < M; ++j) {
            B[static_cast<std::size_t>(r * M + j)] -= f * B[static_cast<std::size_t>(c * M + j)];
            inv[static_cast<std::size_t>(r * M + j)] -= f * inv[static_cast<std::size_t>(c * M + j)];
          }
        if (fm != 0)
          for (long j = 0; j < M; ++j) {
            Bm[static_cast<std::size_t>(r * M + j)] =
                long(((__int128)Bm[static_cast<std::size_t>(r * M + j)] -
                      (__int128)fm * Bm[static_cast<std::size_t>(c * M + j)]) % kPrime + kPrime) %
                kPrime;
            invm[static_cast<std::size_t>(r * M + j)] =
                long(((__int128)invm[static_cast<std::size_t>(r * M + j)] -
                      (__int128)fm * invm[static_cast<std::size_t>(c * M + j)]) % kPrime + kPrime) %
                kPrime;
          }
      }
    }
    binv = std::move(inv);
    binv_mod = std::move(invm);
    pivots_since_refactor = 0;
  }

  std::vector<long> multiply_binv_mod(const SparseCol& a) const {
    std::vector<long> u(static_cast<std::size_t>(M), 0);
    for (auto [i, v] : a) {
      long vm = (long(v) % kPrime + kPrime) % kPrime;
      if (vm == 0) continue;
      for (long r = 0; r < M; ++r)
        u[static_cast<std::size_t>(r)] =
            long(((__int128)u[static_cast<std::size_t>(r)] +
                  (__int128)binv_mod[static_cast<std::size_t>(r * M + i)] * vm) %
                 kPrime);
    }
    return u;
  }

  std::vector<double> multiply_binv(const SparseCol& a) const {
    std::vector<double> u(static_cast<std::size_t>(M), 0.0);
    for (auto [i, v] : a)
      for (long r = 0; r < M; ++r)
        u[static_cast<std::size_t>(r)] += binv[static_cast<std::size_t>(r * M + i)] * v;
    return u;
  }

  bool replace_core_column(long j, const SparseCol& a) {
    std::vector<double> u = multiply_binv(a);
    std::vector<long> um = multiply_binv_mod(a);
    double piv = u[static_cast<std::size_t>(j)];
    long pivm = um[static_cast<std::size_t>(j)];
    if (pivm == 0 || std::fabs(piv) < 1e-9) return false;
    double ip = 1.0 / piv;
    long ipm = mod_inv(pivm);
    double* rowj = binv.data() + static_cast<std::size_t>(j * M);
    long* mrowj = binv_mod.data() + static_cast<std::size_t>(j * M);
    for (long c = 0; c < M; ++c) {
      rowj[c] *= ip;
      mrowj[c] = long((__int128)mrowj[c] * ipm % kPrime);
    }
    for (long r = 0; r < M; ++r) {
      if (r == j) continue;
      double f = u[static_cast<std::size_t>(r)];
      long fm = um[static_cast<std::size_t>(r)];
      double* rowr = binv.data() + static_cast<std::size_t>(r * M);
      long* mrowr = binv_mod.data() + static_cast<std::size_t>(r * M);
      if (f != 0.0)
        for (long c = 0; c < M; ++c) rowr[c] -= f * rowj[c];
      if (fm != 0)
        for (long c = 0; c < M; ++c)
          mrowr[c] = long(((__int128)mrowr[c] - (__int128)fm * mrowj[c]) % kPrime + kPrime) % kPrime;
    }
    ++pivots_since_refactor;
    return true;
  }

  void compute_xcore() {
    for (long r = 0; r < M; ++r) {
      const double* row = binv.data() + static_cast<std::size_t>(r * M);
      double s = 0.0;
      for (long i = 0; i < M; ++i) s += row[i] * bvec[static_cast<std::size_t>(i)];
      xcore[static_cast<std::size_t>(r)] = s;
    }
  }

  void compute_pi() {
    std::fill(pi.begin(), pi.end(), 0.0);
    for (long j = 0; j < M; ++j) {
      double cj = core_cost(core_vars[static_cast<std::size_t>(j)]);
      if (cj == 0.0) continue;
      const double* row = binv.data() + static_cast<std::size_t>(j * M);
      for (long r = 0; r < M; ++r) pi[static_cast<std::size_t>(r)] += cj * row[r];
    }
  }

  double core_value(long id) const {
    long j = core_pos[static_cast<std::size_t>(id)];
    return j >= 0 ? xcore[static_cast<std::size_t>(j)] : 0.0;
  }

  double value_of(long id) const {
    if (is_y(id)) {
      if (!basic(id)) return 0.0;
      return free_row[static_cast<std::size_t>(id)] >= 0 ? 0.0 : core_value(id);
    }
    long p = varp(id), q = varq(id);
    if (is_z(id)) {
      if (!basic(id)) return 0.0;
      if (basic(sid(p, q))) return core_value(id);  // core z
      return value_of(p);                           // Z-kind link pivot: z = y_p
    }
    if (!basic(id)) return 0.0;
    double zv = basic(zid(p, q)) ? core_value(zid(p, q)) : 0.0;
    return value_of(p) - zv;  // S-kind link pivot: s = y_p - z_pq
  }

  // dual of link row (p,q)
  double link_dual(long p, long q) const {
    if (basic(sid(p, q))) return 0.0;
    if (basic(zid(p, q))) return d(p, q) - pi[static_cast<std::size_t>(q)];
    // Y-kind: y_p's zero reduced cost pins the free row's dual
    double s = pi[static_cast<std::size_t>(N)];
    for (long qq : fold[static_cast<std::size_t>(p)])
      s -= d(p, qq) - pi[static_cast<std::size_t>(qq)];
    return s;
  }

  double solve_residual() const {
    std::vector<double> lhs(static_cast<std::size_t>(M), 0.0);
    for (long j = 0; j < M; ++j)
      for (auto [r, v] : core_column(core_vars[static_cast<std::size_t>(j)]))
        lhs[static_cast<std::size_t>(r)] += v * xcore[static_cast<std::size_t>(j)];
    double worst = 0.0;
    for (long r = 0; r < M; ++r)
      worst = std::max(worst, std::fabs(lhs[static_cast<std::size_t>(r)] - bvec[static_cast<std::size_t>(r)]));
    return worst;
  }
};


struct Candidate {
  double rc = 0.0;
  long id = -1;
};

struct Leaving {
  double lam = std::numeric_limits<double>::infinity();
  double rate = 0.0;
  double slack = 0.0;
  long id = -1;
};

}  // namespace

struct KMedianLpSolver::Impl {
  LpModel model;
  SolveOptions opts;
  std::vector<double> active_cost;
  Core core;
  bool crashed = false;

  Impl(const LpModel& m, const SolveOptions& o) : model(m), opts(o) {
    if (model.N > opts.size_guard)
      throw std::invalid_argument("lp solve: instance exceeds the size guard");
    long N = model.N;
    active_cost = model.dist;
    core.N = N;
    core.k = model.k;
    core.M = N + 1;
    core.cost = &active_cost;
    core.max_dist = model.max_dist;
    core.opt_tol = opts.opt_tol;
    core.basic_flag.assign(static_cast<std::size_t>(N + 2 * N * N), 0);
    core.fold.assign(static_cast<std::size_t>(N), {});
    core.fold_cost.assign(static_cast<std::size_t>(N), 0.0);
    core.free_row.assign(static_cast<std::size_t>(N), -1L);
    core.core_pos.assign(static_cast<std::size_t>(N + 2 * N * N), -1L);
    core.xcore.assign(static_cast<std::size_t>(core.M), 0.0);
    core.pi.assign(static_cast<std::size_t>(core.M), 0.0);
    core.bvec.assign(static_cast<std::size_t>(core.M), 1.0);
    core.bvec[static_cast<std::size_t>(N)] = double(model.k);
  }

  void set_costs(const std::vector<double>& costs) {
    active_cost = costs;
    core.max_dist = *std::max_element(costs.begin(), costs.end());
    for (long p = 0; p < core.N; ++p) {
      double s = 0.0;
      for (long q : core.fold[static_cast<std::size_t>(p)]) s += core.d(p, q);
      core.fold_cost[static_cast<std::size_t>(p)] = s;
    }
  }

  void rebuild_core_set() {
    Core& c = core;
    c.core_vars.clear();
    std::fill(c.core_pos.begin(), c.core_pos.end(), -1L);
    for (long p = 0; p < c.N; ++p) {
      if (c.should_be_core(p)) c.core_vars.push_back(p);
      for (long q = 0; q < c.N; ++q)
        if (c.should_be_core(c.zid(p, q))) c.core_vars.push_back(c.zid(p, q));
    }
    if (static_cast<long>(c.core_vars.size()) != c.M) {
      c.broken = true;
      return;
    }
    for (long j = 0; j < c.M; ++j)
      c.core_pos[static_cast<std::size_t>(c.core_vars[static_cast<std::size_t>(j)])] = j;
  }

  void crash() {
    Core& c = core;
    long N = c.N;
    std::fill(c.basic_flag.begin(), c.basic_flag.end(), 0);
    if (N == 1) {
      c.basic_flag[0] = 1;
      c.basic_flag[static_cast<std::size_t>(c.zid(0, 0))] = 1;
      c.basic_flag[static_cast<std::size_t>(c.sid(0, 0))] = 1;
    } else {
      // y_0 = 1 serving everyone (its z's are Z-kind pivots), y_1 = k-1 with
      // core z's kept at zero, every remaining link row covered by its slack
      c.basic_flag[0] = 1;
      c.basic_flag[1] = 1;
      for (long q = 0; q < N; ++q) c.basic_flag[static_cast<std::size_t>(c.zid(0, q))] = 1;
      for (long q = 0; q + 1 < N; ++q) {
        c.basic_flag[static_cast<std::size_t>(c.zid(1, q))] = 1;
        c.basic_flag[static_cast<std::size_t>(c.sid(1, q))] = 1;
      }
      for (long p = 1; p < N; ++p)
        for (long q = 0; q < N; ++q) {
          if (p == 1 && q + 1 < N) continue;
          c.basic_flag[static_cast<std::size_t>(c.sid(p, q))] = 1;
        }
    }
    for (long p = 0; p < N; ++p) {
      c.reclassify(p);
      if (c.broken) return;
    }
    rebuild_core_set();
    if (c.broken) return;
    c.refactor();
    if (c.broken) return;
    c.compute_xcore();
    crashed = true;
  }

  Candidate price(const std::vector<long>& banned) const {
    const Core& c = core;
    long N = c.N;
    double tol = c.opt_tol * (1.0 + c.max_dist);
    auto is_banned = [&](long id) {
      return std::find(banned.begin(), banned.end(), id) != banned.end();
    };
    Candidate best;
    best.rc = -tol;
    // ascending var id: y, then z, then s (the scan doubles as Bland order)
    for (long p = 0; p < N; ++p) {
      if (c.basic(p) || is_banned(p)) continue;
      double rc = -c.pi[static_cast<std::size_t>(N)] + c.fold_cost[static_cast<std::size_t>(p)];
      for (long q : c.fold[static_cast<std::size_t>(p)]) rc -= c.pi[static_cast<std::size_t>(q)];
      if (rc < best.rc) {
        best = {rc, p};
        if (c.bland) return best;
      }
    }
    for (long p = 0; p < N; ++p) {
      const double* drow = c.cost->data() + static_cast<std::size_t>(p * N);
      long fr = c.free_row[static_cast<std::size_t>(p)];
      double ylink = fr >= 0 ? c.link_dual(p, fr) : 0.0;
      for (long q = 0; q < N; ++q) {
        long id = c.zid(p, q);
        if (c.basic(id) || is_banned(id)) continue;
        double rc = drow[q] - c.pi[static_cast<std::size_t>(q)];
        if (!c.basic(c.sid(p, q))) rc -= ylink;  // Y-kind row (q == fr)
        if (rc < best.rc) {
          best = {rc, id};
          if (c.bland) return best;
        }
      }
    }
    for (long p = 0; p < N; ++p) {
      const double* drow = c.cost->data() + static_cast<std::size_t>(p * N);
      long fr = c.free_row[static_cast<std::size_t>(p)];
      double ylink = fr >= 0 ? c.link_dual(p, fr) : 0.0;
      for (long q = 0; q < N; ++q) {
        long id = c.sid(p, q);
        if (c.basic(id) || is_banned(id)) continue;
        double rc = c.basic(c.zid(p, q)) ? c.pi[static_cast<std::size_t>(q)] - drow[q]  // Z-kind
                                         : -ylink;                                      // Y-kind
        if (rc < best.rc) {
          best = {rc, id};
          if (c.bland) return best;
        }
      }
    }
    return best;
  }

  // entering column reduced onto the core rows
  Core::SparseCol reduced_column(long id) const {
    const Core& c = core;
    Core::SparseCol col;
    auto add_ycol = [&](long p) {
      col.emplace_back(c.N, 1.0);
      for (long q : c.fold[static_cast<std::size_t>(p)]) col.emplace_back(q, 1.0);
    };
    if (c.is_y(id)) {
      add_ycol(id);
    } else {
      long p = c.varp(id), q = c.varq(id);
      bool s_basic = c.basic(c.sid(p, q));
      if (c.is_z(id)) {
        col.emplace_back(q, 1.0);
        if (!s_basic) add_ycol(p);  // Y-kind row: raising z drags y_p up
      } else {
        if (c.basic(c.zid(p, q)))
          col.emplace_back(q, -1.0);  // Z-kind row: raising s lowers z
        else
          add_ycol(p);  // Y-kind row: raising s drags y_p up
      }
    }
    std::sort(col.begin(), col.end());
    Core::SparseCol merged;
    for (auto [r, v] : col) {
      if (!merged.empty() && merged.back().first == r)
        merged.back().second += v;
      else
        merged.emplace_back(r, v);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const auto& e) { return e.second == 0.0; }),
                 merged.end());
    return merged;
  }

  // drop rates of basic variables when the entering variable grows by 1
  struct Rates {
    const Core* c;
    const std::vector<double>* w;
    long entering;

    double y_rate(long p) const {
      if (p == entering) return -1.0;
      if (!c->basic(p)) return 0.0;
      long fr = c->free_row[static_cast<std::size_t>(p)];
      if (fr < 0) return (*w)[static_cast<std::size_t>(c->core_pos[static_cast<std::size_t>(p)])];
      // Y-kind pivot: y = z_pf + s_pf with both nonbasic (possibly entering)
      double r = 0.0;
      if (c->zid(p, fr) == entering || c->sid(p, fr) == entering) r = -1.0;
      return r;
    }
    double z_rate(long p, long q) const {
      long id = c->zid(p, q);
      if (id == entering) return -1.0;
      if (!c->basic(id)) return 0.0;
      if (c->basic(c->sid(p, q)))
        return (*w)[static_cast<std::size_t>(c->core_pos[static_cast<std::size_t>(id)])];
      return y_rate(p);  // Z-kind pivot rides y_p
    }
    double s_rate(long p, long q) const {
      long id = c->sid(p, q);
      if (id == entering) return -1.0;
      if (!c->basic(id)) return 0.0;
      return y_rate(p) - z_rate(p, q);
    }
  };

  Leaving ratio_test(long entering, const std::vector<double>& w, const std::vector<long>& wm,
                     const std::vector<long>& banned) const {
    const Core& c = core;
    const double eps = 1e-11;
    const double feastol = 1e-9;
    Rates rates{&c, &w, entering};
    // exact-zero test for the drop rate of a basic variable: the rate is a
    // signed combination of w entries, mirrored over GF(p)
    auto exact_zero = [&](long id) {
      long p = c.varp(id);
      auto wy = [&]() -> long {
        if (p == entering) return Core::kPrime - 1;  // rate -1 in the field
        if (!c.basic(p)) return 0L;
        long fr = c.free_row[static_cast<std::size_t>(p)];
        if (fr < 0) return wm[static_cast<std::size_t>(c.core_pos[static_cast<std::size_t>(p)])];
        return (c.zid(p, fr) == entering || c.sid(p, fr) == entering) ? Core::kPrime - 1 : 0L;
      };
      if (c.is_y(id)) return wy() == 0;
      long q = c.varq(id);
      auto wz = [&]() -> long {
        long zi = c.zid(p, q);
        if (zi == entering) return Core::kPrime - 1;
        if (!c.basic(zi)) return 0L;
        if (c.basic(c.sid(p, q)))
          return wm[static_cast<std::size_t>(c.core_pos[static_cast<std::size_t>(zi)])];
        return wy();
      };
      if (c.is_z(id)) return wz() == 0;
      long diff = (wy() - wz()) % Core::kPrime;
      return diff == 0;
    };
    std::vector<Leaving> events;
    auto consider = [&](long id, double rate) {
      if (rate <= eps) return;
      if (exact_zero(id)) return;  // the rate is noise around an exact zero
      if (std::find(banned.begin(), banned.end(), id) != banned.end()) return;
      Leaving l;
      l.id = id;
      l.rate = rate;
      l.slack = std::max(0.0, c.value_of(id));
      l.lam = l.slack / rate;
      events.push_back(l);
    };
    for (long p = 0; p < c.N; ++p) {
      if (c.basic(p)) consider(p, rates.y_rate(p));
      for (long q = 0; q < c.N; ++q) {
        if (c.basic(c.zid(p, q))) consider(c.zid(p, q), rates.z_rate(p, q));
        if (c.basic(c.sid(p, q))) consider(c.sid(p, q), rates.s_rate(p, q));
      }
    }
    if (std::getenv("KMEDLP_DEBUG2")) {
      double mx = 0; std::size_t cnt = events.size();
      for (auto& l : events) mx = std::max(mx, l.rate);
      std::fprintf(stderr, "DBGR it=%ld e=%ld events=%zu maxrate=%.3e\n", c.iterations, entering, cnt, mx);
    }
    if (events.empty()) return Leaving{};
    if (c.bland) {
      // exact minimal step; ties resolved by the lowest leaving id
      Leaving best = events.front();
      for (const auto& l : events)
        if (l.lam < best.lam - 1e-15 || (l.lam <= best.lam + 1e-15 && l.id < best.id)) best = l;
      best.lam = std::max(0.0, best.lam);
      return best;
    }
    // two-pass Harris: tightest bound with a small relaxation, then the
    // largest pivot inside the window (keeps the core well conditioned)
    double relaxed = std::numeric_limits<double>::infinity();
    for (const auto& l : events) relaxed = std::min(relaxed, (l.slack + feastol) / l.rate);
    Leaving best;
    bool have = false;
    for (const auto& l : events) {
      if (l.lam > relaxed) continue;
      if (!have || l.rate > best.rate || (l.rate == best.rate && l.id < best.id)) {
        best = l;
        have = true;
      }
    }
    if (std::getenv("KMEDLP_DEBUG2") && best.rate < 1e-8) {
      std::fprintf(stderr, "DBGW it=%ld relaxed=%.3e chosen id=%ld rate=%.3e lam=%.3e\n",
                   c.iterations, relaxed, best.id, best.rate, best.lam);
      int shown = 0;
      for (const auto& l : events) {
        if (l.rate > 1.0 && shown < 4) {
          std::fprintf(stderr, "  big-rate ev id=%ld rate=%.3e slack=%.3e lam=%.3e inwin=%d\n",
                       l.id, l.rate, l.slack, l.lam, (int)(l.lam <= relaxed));
          ++shown;
        }
      }
    }
    best.lam = std::max(0.0, best.lam);
    return best;
  }

  bool pivot(long entering, long leaving) {
    Core& c = core;
    std::vector<long> affected;
    auto note = [&](long id) {
      long p = c.varp(id);
      if (std::find(affected.begin(), affected.end(), p) == affected.end()) affected.push_back(p);
    };
    note(entering);
    note(leaving);

    std::vector<long> old_core;
    std::vector<std::vector<long>> old_fold;
    for (long p : affected) {
      if (c.in_core(p)) old_core.push_back(p);
      for (long q = 0; q < c.N; ++q)
        if (c.in_core(c.zid(p, q))) old_core.push_back(c.zid(p, q));
      old_fold.push_back(c.fold[static_cast<std::size_t>(p)]);
    }

    c.basic_flag[static_cast<std::size_t>(entering)] = 1;
    c.basic_flag[static_cast<std::size_t>(leaving)] = 0;
    for (long p : affected) {
      c.reclassify(p);
      if (c.broken) { if (std::getenv("KMEDLP_DEBUG")) std::fprintf(stderr, "DBG reclassify broken p=%ld\n", p); return false; }
    }

    std::vector<long> new_core;
    for (long p : affected) {
      if (c.should_be_core(p)) new_core.push_back(p);
      for (long q = 0; q < c.N; ++q)
        if (c.should_be_core(c.zid(p, q))) new_core.push_back(c.zid(p, q));
    }
    std::sort(old_core.begin(), old_core.end());
    std::sort(new_core.begin(), new_core.end());
    std::vector<long> removed, added;
    std::set_difference(old_core.begin(), old_core.end(), new_core.begin(), new_core.end(),
                        std::back_inserter(removed));
    std::set_difference(new_core.begin(), new_core.end(), old_core.begin(), old_core.end(),
                        std::back_inserter(added));
    if (removed.size() != added.size()) {
      if (std::getenv("KMEDLP_DEBUG"))
        std::fprintf(stderr, "DBG core delta mismatch: -%zu +%zu (e=%ld l=%ld)\n", removed.size(), added.size(), entering, leaving);
      c.broken = true;
      return false;
    }

    bool ok = true;
    for (std::size_t i = 0; i < removed.size() && ok; ++i) {
      long out = removed[i], in = added[i];
      long j = c.core_pos[static_cast<std::size_t>(out)];
      c.core_pos[static_cast<std::size_t>(out)] = -1;
      c.core_vars[static_cast<std::size_t>(j)] = in;
      c.core_pos[static_cast<std::size_t>(in)] = j;
      ok = c.replace_core_column(j, c.core_column(in));
    }
    for (std::size_t a = 0; a < affected.size() && ok; ++a) {
      long p = affected[a];
      if (!c.in_core(p)) continue;
      if (c.fold[static_cast<std::size_t>(p)] == old_fold[a]) continue;
      long j = c.core_pos[static_cast<std::size_t>(p)];
      ok = c.replace_core_column(j, c.core_column(p));
    }
    if (!ok) {
      c.refactor();
      if (c.broken) {
        // distinguish stale incremental bookkeeping from true singularity
        c.broken = false;
        rebuild_core_set();
        if (!c.broken) c.refactor();
        if (!c.broken) {
          if (std::getenv("KMEDLP_DEBUG")) std::fprintf(stderr, "DBG recovered by rebuild\n");
          return true;
        }
        if (std::getenv("KMEDLP_DEBUG")) {
          auto vtype = [&](long id) { return c.is_y(id) ? "y" : (c.is_z(id) ? "z" : "s"); };
          std::fprintf(stderr, "DBG pivot singular: e=%s%ld(p=%ld,q=%ld) l=%s%ld(p=%ld,q=%ld) removed=%zu added=%zu\n",
                       vtype(entering), entering, c.varp(entering), c.is_y(entering) ? -1 : c.varq(entering),
                       vtype(leaving), leaving, c.varp(leaving), c.is_y(leaving) ? -1 : c.varq(leaving),
                       removed.size(), added.size());
          for (long r : removed) std::fprintf(stderr, "   removed %s%ld (p=%ld q=%ld)\n", vtype(r), r, c.varp(r), c.is_y(r) ? -1 : c.varq(r));
          for (long r : added) std::fprintf(stderr, "   added   %s%ld (p=%ld q=%ld)\n", vtype(r), r, c.varp(r), c.is_y(r) ? -1 : c.varq(r));
        }
        return false;
      }
    }
    return true;
  }

  // roll a failed pivot back to the previous basis
  bool undo_pivot(long entering, long leaving) {
    Core& c = core;
    c.broken = false;
    c.basic_flag[static_cast<std::size_t>(entering)] = 0;
    c.basic_flag[static_cast<std::size_t>(leaving)] = 1;
    for (long p : {c.varp(entering), c.varp(leaving)}) {
      c.reclassify(p);
      if (c.broken) return false;
    }
    rebuild_core_set();
    if (c.broken) return false;
    c.refactor();
    if (c.broken) return false;
    c.compute_xcore();
    return true;
  }

  double xcore_min() const {
    double worst = 0.0;
    for (double v : core.xcore) worst = std::min(worst, v);
    return worst;
  }

  long auto_max_iters() const { return std::max<long>(200000, 400 * (model.N + 1)); }

  bool optimize(long cap) {
    Core& c = core;
    c.bland = false;
    c.degenerate_run = 0;
    std::vector<long> banned_enter, banned_leave;
    long fail_streak = 0;
    while (true) {
      if (c.pivots_since_refactor >= 64 && !c.broken) c.refactor();
      if (!c.broken && c.solve_residual() > 1e-7 * (1.0 + double(c.k))) {
        c.refactor();
        c.compute_xcore();
        if (!c.broken && c.solve_residual() > 1e-7 * (1.0 + double(c.k))) c.broken = true;
      }
      if (c.broken) return false;
      c.compute_pi();
      Candidate e = price(banned_enter);
      if (e.id < 0) {
        if (banned_enter.empty()) return true;  // genuine optimality
        return false;  // only numerically unusable candidates remain
      }
      Core::SparseCol ecol = reduced_column(e.id);
      std::vector<double> w = c.multiply_binv(ecol);
      std::vector<long> wm = c.multiply_binv_mod(ecol);
      Leaving l = ratio_test(e.id, w, wm, banned_leave);
      if (!std::isfinite(l.lam) || l.id < 0) {
        // no usable blocker: either the direction is numerical junk or the
        // leaving bans exhausted the candidates; retire this entering var
        banned_enter.push_back(e.id);
        banned_leave.clear();
        if (++fail_streak > 40) return false;
        continue;
      }
      if (!pivot(e.id, l.id)) {
        // structurally void pivot (noise-rate blocker): roll back, refresh
        // the factorization, and try the next blocker
        if (!undo_pivot(e.id, l.id)) return false;
        c.compute_pi();
        banned_leave.push_back(l.id);
        if (++fail_streak > 40) return false;
        continue;
      }
      banned_enter.clear();
      banned_leave.clear();
      fail_streak = 0;
      c.compute_xcore();
      ++c.iterations;
      if (l.lam <= 1e-12) {
        if (++c.degenerate_run > 10 * c.M) c.bland = true;
      } else if (l.lam > 1e-7) {
        c.degenerate_run = 0;
        c.bland = false;
      }
      if (c.iterations > cap) return false;
    }
  }

  std::pair<LpSolution, DualSolution> extract() {
    Core& c = core;
    long N = c.N;
    LpSolution sol;
    sol.y.assign(static_cast<std::size_t>(N), 0.0);
    sol.z.assign(static_cast<std::size_t>(N * N), 0.0);
    sol.iterations = c.iterations;
    for (long p = 0; p < N; ++p) sol.y[static_cast<std::size_t>(p)] = std::max(0.0, c.value_of(p));
    for (long p = 0; p < N; ++p)
      for (long q = 0; q < N; ++q)
        sol.z[static_cast<std::size_t>(p * N + q)] = std::max(0.0, c.value_of(c.zid(p, q)));
    sol.objective = 0.0;
    for (std::size_t i = 0; i < sol.z.size(); ++i) sol.objective += active_cost[i] * sol.z[i];

    c.compute_pi();
    DualSolution dual;
    dual.alpha.assign(c.pi.begin(), c.pi.begin() + N);
    dual.omega = -c.pi[static_cast<std::size_t>(N)];
    for (long p = 0; p < N; ++p)
      for (long q = 0; q < N; ++q) {
        double v = dual.alpha[static_cast<std::size_t>(q)] - c.d(p, q);
        if (v > 1e-12) dual.beta.push_back({p, q, v});
      }

    bool ok = !c.broken;
    double ftol = 1e-8 * (1.0 + double(c.k));
    for (long q = 0; q < N && ok; ++q) {
      double s = 0.0;
      for (long p = 0; p < N; ++p) s += sol.z[static_cast<std::size_t>(p * N + q)];
      if (std::fabs(s - 1.0) > ftol) ok = false;
    }
    double sy = 0.0;
    for (double v : sol.y) sy += v;
    if (std::fabs(sy - double(c.k)) > ftol) ok = false;
    for (long p = 0; p < N && ok; ++p)
      for (long q = 0; q < N; ++q)
        if (sol.z[static_cast<std::size_t>(p * N + q)] >
            sol.y[static_cast<std::size_t>(p)] + 1e-7 * (1.0 + c.max_dist)) {
          ok = false;
          break;
        }
    double gap = std::fabs(sol.objective - dual.objective(c.k));
    if (gap > 1e-7 * (1.0 + std::fabs(sol.objective))) ok = false;
    sol.status = ok ? LpSolution::Status::optimal : LpSolution::Status::failed;
    return {std::move(sol), std::move(dual)};
  }

  std::pair<LpSolution, DualSolution> failed_result() const {
    LpSolution sol;
    sol.status = LpSolution::Status::failed;
    sol.y.assign(static_cast<std::size_t>(model.N), 0.0);
    sol.z.assign(static_cast<std::size_t>(model.N * model.N), 0.0);
    sol.iterations = core.iterations;
    DualSolution dual;
    dual.alpha.assign(static_cast<std::size_t>(model.N), 0.0);
    return {std::move(sol), std::move(dual)};
  }

  // splitmix64 hash onto (0, 1]; a fixed function of the pair index, so the
  // perturbed phase is bit-reproducible
  static double pair_hash(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return double((x >> 11) + 1) * 0x1.0p-53;
  }

  void set_true_b() {
    core.bvec.assign(static_cast<std::size_t>(core.M), 1.0);
    core.bvec[static_cast<std::size_t>(core.N)] = double(core.k);
  }

  std::pair<LpSolution, DualSolution> run() {
    if (!crashed) crash();
    if (core.broken) return failed_result();
    long cap = opts.max_iterations > 0 ? opts.max_iterations : auto_max_iters();
    // Degeneracy is endemic to this model (both cost ties and massive primal
    // ties at b = 1). Walk a deterministically perturbed copy in both c and
    // b: the perturbed polytope has simple vertices, which keeps the walk
    // short and the core factorizations well conditioned. Dual feasibility
    // is independent of b, so after a clean-cost re-optimization the final
    // basis stays optimal for the true rhs as long as it is still feasible;
    // that is validated (and extract() re-checks everything).
    double eta = 1e-7 * (1.0 + model.max_dist);
    std::vector<double> perturbed = model.dist;
    for (std::size_t i = 0; i < perturbed.size(); ++i)
      perturbed[i] += eta * pair_hash(static_cast<std::uint64_t>(i));
    set_costs(perturbed);
    for (long r = 0; r < core.M; ++r)
      core.bvec[static_cast<std::size_t>(r)] +=
          1e-6 * pair_hash(0x5eedULL + static_cast<std::uint64_t>(r));
    bool ok = optimize(cap);
    if (std::getenv("KMEDLP_DEBUG")) std::fprintf(stderr, "PH1 ok=%d iters=%ld\n", (int)ok, core.iterations);
    if (ok) {
      set_costs(model.dist);
      ok = optimize(cap);
      if (std::getenv("KMEDLP_DEBUG")) std::fprintf(stderr, "PH2 ok=%d iters=%ld\n", (int)ok, core.iterations);
    }
    if (ok) {
      set_true_b();
      core.compute_xcore();
      double worst = 0.0;
      for (double v : core.xcore) worst = std::min(worst, v);
      bool ph3 = worst >= -1e-8 && optimize(cap);
      if (std::getenv("KMEDLP_DEBUG")) std::fprintf(stderr, "PH3 worst=%.2e ok=%d iters=%ld\n", worst, (int)ph3, core.iterations);
      if (ph3) return extract();
    }
    // fallback: plain walk on the unperturbed problem
    set_costs(model.dist);
    set_true_b();
    crash();
    if (core.broken) return failed_result();
    if (!optimize(cap)) return failed_result();
    return extract();
  }

  std::pair<LpSolution, DualSolution> resolve(const std::vector<double>& costs) {
    if (costs.size() != active_cost.size())
      throw std::invalid_argument("resolve: cost vector has the wrong size");
    set_costs(costs);
    if (!crashed) crash();
    if (core.broken) return failed_result();
    long cap = opts.max_iterations > 0 ? opts.max_iterations : auto_max_iters();
    if (!optimize(cap)) return failed_result();
    return extract();
  }
};

KMedianLpSolver::KMedianLpSolver(const LpModel& model, const SolveOptions& opts)
    : impl_(std::make_unique<Impl>(model, opts)) {}
KMedianLpSolver::~KMedianLpSolver() = default;
KMedianLpSolver::KMedianLpSolver(KMedianLpSolver&&) noexcept = default;
KMedianLpSolver& KMedianLpSolver::operator=(KMedianLpSolver&&) noexcept = default;

std::pair<LpSolution, DualSolution> KMedianLpSolver::run() { return impl_->run(); }

std::pair<LpSolution, DualSolution> KMedianLpSolver::resolve(const std::vector<double>& costs) {
  return impl_->resolve(costs);
}

std::pair<LpSolution, DualSolution> solve(const LpModel& model, const SolveOptions& opts) {
  KMedianLpSolver solver(model, opts);
  return solver.run();
}

}  // namespace kmedlp
