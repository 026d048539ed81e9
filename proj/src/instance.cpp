#include "kmedlp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kmedlp {

std::vector<long> Instance::counts() const {
  std::vector<long> c(static_cast<std::size_t>(k), 0);
  for (int lbl : labels) ++c[static_cast<std::size_t>(lbl)];
  return c;
}

std::vector<long> Instance::cluster_indices(int ball) const {
  std::vector<long> idx;
  for (long i = 0; i < size(); ++i)
    if (labels[static_cast<std::size_t>(i)] == ball) idx.push_back(i);
  return idx;
}

Instance generate(const std::vector<BallConfig>& balls, long n, std::uint64_t seed) {
  if (balls.empty() || n < 1) throw std::invalid_argument("generate: need balls and n >= 1");
  int m = balls.front().measure.dim();
  for (const auto& b : balls) {
    if (b.measure.dim() != m || static_cast<int>(b.center.size()) != m)
      throw std::invalid_argument("generate: inconsistent dimensions");
    if (b.measure.radius() != b.radius)
      throw std::invalid_argument("generate: measure radius != ball radius");
    if (!(b.beta >= 1.0)) throw std::invalid_argument("generate: beta_i >= 1 required");
  }
  Instance inst;
  inst.m = m;
  inst.k = static_cast<int>(balls.size());
  inst.n = n;
  inst.seed = seed;
  inst.balls = balls;
  inst.points = PointArray(m);
  RngStream root(seed);
  for (int i = 0; i < inst.k; ++i) {
    long ni = std::llround(std::floor(balls[i].beta * double(n) + 0.5));  // half-up
    if (ni < 1) throw std::invalid_argument("generate: realized count n_i < 1");
    RngStream stream = root.substream(0x62616c6cULL, static_cast<std::uint64_t>(i));
    for (long j = 0; j < ni; ++j) {
      std::vector<double> v = balls[i].measure.sample(stream);
      for (int d = 0; d < m; ++d) v[static_cast<std::size_t>(d)] += balls[i].center[static_cast<std::size_t>(d)];
      if (dist(v, balls[i].center) > balls[i].radius + 1e-12)
        throw std::runtime_error("generate: sampled point escaped its ball");
      inst.points.push(v);
      inst.labels.push_back(i);
    }
  }
  return inst;
}

MedianResult median_of(const PointArray& pts) {
  std::vector<long> all(static_cast<std::size_t>(pts.size()));
  std::iota(all.begin(), all.end(), 0L);
  return median_of(pts, all);
}

MedianResult median_of(const PointArray& pts, std::span<const long> subset) {
  if (subset.empty()) throw std::invalid_argument("median_of: empty point set");
  MedianResult out;
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < subset.size(); ++i) {
    auto pi = pts[subset[i]];
    double s = 0.0;
    for (std::size_t j = 0; j < subset.size(); ++j) s += dist(pi, pts[subset[j]]);
    if (s < best) {
      second = best;
      best = s;
      out.index = static_cast<long>(i);
    } else if (s < second) {
      second = s;
    }
  }
  out.total = best;
  out.runner_up_gap = subset.size() > 1 ? second - best : std::numeric_limits<double>::infinity();
  return out;
}

GroundTruthSolution ground_truth(const Instance& instance) {
  GroundTruthSolution gt;
  gt.clustering.assign.assign(static_cast<std::size_t>(instance.size()), -1);
  for (int i = 0; i < instance.k; ++i) {
    std::vector<long> idx = instance.cluster_indices(i);
    MedianResult med = median_of(instance.points, idx);
    gt.clustering.centers.push_back(idx[static_cast<std::size_t>(med.index)]);
    gt.per_cluster_opt.push_back(med.total);
    gt.objective += med.total;
    for (long q : idx) gt.clustering.assign[static_cast<std::size_t>(q)] = i;
  }
  return gt;
}

double clustering_objective(const PointArray& pts, const Clustering& c) {
  double obj = 0.0;
  for (long q = 0; q < pts.size(); ++q)
    obj += dist(pts[q], pts[c.centers[static_cast<std::size_t>(c.assign[static_cast<std::size_t>(q)])]]);
  return obj;
}

BruteForceResult brute_force_ip(const PointArray& pts, int k) {
  long n = pts.size();
  if (k < 1 || k > n) throw std::invalid_argument("brute_force_ip: need 1 <= k <= n");
  // C(n,k) guard
  double combos = 1.0;
  for (int i = 0; i < k; ++i) combos *= double(n - i) / double(i + 1);
  if (combos * double(n) * double(k) > 1e7)
    throw std::invalid_argument("brute_force_ip: instance exceeds the size guard");

  std::vector<long> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), 0L);
  BruteForceResult best;
  best.objective = std::numeric_limits<double>::infinity();
  bool more = true;
  while (more) {
    double obj = 0.0;
    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    for (long q = 0; q < n; ++q) {
      double dmin = std::numeric_limits<double>::infinity();
      int amin = 0;
      for (int c = 0; c < k; ++c) {
        double d = dist(pts[q], pts[pick[static_cast<std::size_t>(c)]]);
        if (d < dmin) {
          dmin = d;
          amin = c;
        }
      }
      assign[static_cast<std::size_t>(q)] = amin;
      obj += dmin;
    }
    if (obj < best.objective - 1e-9) {
      best.objective = obj;
      best.clustering.centers = pick;
      best.clustering.assign = assign;
      best.unique_center_set = true;
    } else if (obj <= best.objective + 1e-9) {
      best.unique_center_set = false;
    }
    // next lexicographic combination
    int i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) {
      more = false;
    } else {
      ++pick[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return best;
}

}  // namespace kmedlp
