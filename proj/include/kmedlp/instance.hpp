#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kmedlp/measures.hpp"

namespace kmedlp {

// Flat row-major point storage.
class PointArray {
public:
  PointArray() = default;
  explicit PointArray(int m) : m_(m) {}

  int dim() const { return m_; }
  long size() const { return m_ == 0 ? 0 : static_cast<long>(x_.size()) / m_; }
  std::span<const double> operator[](long i) const {
    return {x_.data() + static_cast<std::size_t>(i) * m_, static_cast<std::size_t>(m_)};
  }
  void push(std::span<const double> p) { x_.insert(x_.end(), p.begin(), p.end()); }
  const std::vector<double>& raw() const { return x_; }
  std::vector<double>& raw() { return x_; }

private:
  int m_ = 0;
  std::vector<double> x_;
};

struct Instance {
  int m = 0;
  int k = 0;
  long n = 0;  // base count; realized n_i = round(beta_i * n)
  std::uint64_t seed = 0;
  std::vector<BallConfig> balls;
  PointArray points;
  std::vector<int> labels;

  long size() const { return points.size(); }
  std::vector<long> counts() const;
  std::vector<long> cluster_indices(int ball) const;
};

// Draw round(beta_i * n) points from each ball (half-up rounding, recorded in
// the instance via the labels). Per-ball substreams keep generation
// reproducible and order-independent across balls.
Instance generate(const std::vector<BallConfig>& balls, long n, std::uint64_t seed);

struct Clustering {
  std::vector<long> centers;  // point indices, one per cluster
  std::vector<int> assign;    // point -> position in `centers`
};

struct MedianResult {
  long index = -1;        // index into the subset handed in
  double total = 0.0;     // minimal sum of distances
  double runner_up_gap = 0.0;
};

MedianResult median_of(const PointArray& pts);
MedianResult median_of(const PointArray& pts, std::span<const long> subset);

struct GroundTruthSolution {
  Clustering clustering;
  double objective = 0.0;
  std::vector<double> per_cluster_opt;  // OPT_i
};

GroundTruthSolution ground_truth(const Instance& instance);

struct BruteForceResult {
  Clustering clustering;
  double objective = 0.0;
  bool unique_center_set = true;
};

// Exhaustive (pr IP) oracle over all C(n,k) center sets; guarded by
// C(n,k) * n * k <= 1e7.
BruteForceResult brute_force_ip(const PointArray& pts, int k);

double clustering_objective(const PointArray& pts, const Clustering& c);

}  // namespace kmedlp
