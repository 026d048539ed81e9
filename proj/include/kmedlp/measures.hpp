#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kmedlp/numerics.hpp"
#include "kmedlp/rng.hpp"

namespace kmedlp {

enum class RadialKind { uniform_ball, uniform_sphere, point_mass_origin, radial_density, annulus };

// A rotation-invariant probability measure on the closed ball of the given
// radius in R^m, described by the law of ||x||. Directions are always uniform
// on S^{m-1}, which is what rotation invariance plus a radial law means.
class MeasureSpec {
public:
  static MeasureSpec uniform_ball(int m, double radius);
  static MeasureSpec uniform_sphere(int m, double radius, double s);
  static MeasureSpec point_mass_origin(int m, double radius);
  // Spatial density proportional to f(||x||); f must be nonnegative on
  // [0, radius]. With require_decreasing, f is checked on a grid to be
  // strictly decreasing (the density profile used by the d(c_i,c_j) > 2
  // recovery theorem).
  static MeasureSpec radial_density(int m, double radius, std::function<double(double)> f,
                                    bool require_decreasing = false);
  // Continuous piecewise-linear spatial density placing exactly
  // interior_mass on [0, radius*(1-eps)): ramp A*t up to radius*(1-eps),
  // steep linear connector, constant plateau on the outer half-shell.
  static MeasureSpec annulus_concentrated(int m, double radius, double eps, double interior_mass);

  int dim() const { return m_; }
  double radius() const { return radius_; }
  RadialKind kind() const { return kind_; }
  double annulus_eps() const { return eps_; }
  double annulus_interior_mass() const { return interior_mass_; }
  double sphere_radius() const { return sphere_radius_; }

  // true when the law is absolutely continuous (assumption (a3))
  bool is_continuous() const {
    return kind_ == RadialKind::uniform_ball || kind_ == RadialKind::radial_density ||
           kind_ == RadialKind::annulus;
  }

  struct Atom {
    double t;
    double mass;
  };
  // atoms of the law of ||x|| (empty for continuous laws)
  std::vector<Atom> atoms() const;
  // density of ||x|| at t, for continuous laws
  double norm_density(double t) const;
  // interior points where the norm density is not smooth
  std::vector<double> density_kinks() const;

  // P(||x|| <= t); domain error outside [0, radius]
  double radial_cdf(double t) const;
  // E d(x, center) = E ||x||, via quadrature over the radial law
  double expected_center_distance() const;

  double sample_norm(RngStream& rng) const;
  std::vector<double> sample(RngStream& rng) const;

  bool operator==(const MeasureSpec& other) const;

private:
  MeasureSpec() = default;

  int m_ = 0;
  double radius_ = 0.0;
  RadialKind kind_ = RadialKind::uniform_ball;
  double sphere_radius_ = 0.0;                  // uniform_sphere
  double eps_ = 0.0, interior_mass_ = 0.0;      // annulus
  double ramp_ = 0.0, plateau_ = 0.0;           // annulus spatial density coefficients
  std::function<double(double)> spatial_f_;     // radial_density
  double density_norm_ = 1.0;                   // radial_density normalizer
  std::vector<double> cdf_grid_, cdf_vals_;     // radial_density sampling table

  double annulus_spatial(double u) const;  // u = t/radius in [0,1]
};

double sphere_surface_area(int m);  // |S^{m-1}| in R^m

struct BallConfig {
  std::vector<double> center;
  double radius = 1.0;
  MeasureSpec measure;
  double beta = 1.0;  // sampling weight, n_i = beta * n, beta >= 1
};

BallConfig make_ball(std::vector<double> center, double radius, MeasureSpec measure,
                     double beta = 1.0);

struct GeometrySummary {
  std::vector<double> D;                       // D_i = min_{j!=i} d(c_i,c_j) - r_i
  double min_center_distance = 0.0;            // Delta
  std::vector<std::vector<double>> pairwise;   // center distances
};

GeometrySummary summarize_geometry(const std::vector<BallConfig>& balls);

struct AssumptionCheck {
  bool satisfied = false;
  double margin = 0.0;  // LHS - RHS
  double lhs = 0.0, rhs = 0.0;
};

// (0.292 - 8e) P(||x|| >= 1-e) > 0.279 + 6e + (3+2e) P(||x|| < 1-e),
// for a measure on the unit ball.
AssumptionCheck check_counterexample_assumption(const MeasureSpec& measure, double eps);

inline double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double norm(std::span<const double> a) {
  double s = 0.0;
  for (double c : a) s += c * c;
  return std::sqrt(s);
}

}  // namespace kmedlp
