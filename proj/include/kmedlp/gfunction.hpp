#pragma once

#include <span>
#include <vector>

#include "kmedlp/instance.hpp"
#include "kmedlp/measures.hpp"
#include "kmedlp/numerics.hpp"

namespace kmedlp {

struct AlphaVector {
  std::vector<double> values;  // one entry per cluster
};

struct TfnParams {
  double r = 1.0;
  double alpha = 0.0;  // must exceed r
  int m = 2;
};

// C^alpha(z) = sum_i sum_l (alpha_i - d(z, x^(i)_l))_+, the finite sum.
double contribution(const Instance& instance, const AlphaVector& alpha,
                    std::span<const double> z);

// int over the sphere of radius s (centered at the origin) of
// (alpha - d(z, x))_+ d mu^s(x), where t = ||z||.
double sphere_shell_contribution(double alpha, double s, double t, int m,
                                 const QuadratureSpec& spec);

// G^alpha(z) = sum_i beta_i int (alpha_i - d(z,x))_+ d mu_i(x)
double g_value(const std::vector<BallConfig>& balls, const AlphaVector& alpha,
               std::span<const double> z, const QuadratureSpec& spec = QuadratureSpec{});

// T^{(alpha,m)} at distance t from the center, 0 <= t <= r.
double t_fn(const TfnParams& params, double t,
            const QuadratureSpec& spec = QuadratureSpec{1e-10, 1e-10, 60});

// H^{(alpha,mu,m)} at distance t from the center, 0 <= t <= radius.
double h_fn(const MeasureSpec& measure, double alpha, double t,
            const QuadratureSpec& spec = QuadratureSpec{2.5e-9, 0.0, 60});
double h_fn(const MeasureSpec& measure, double alpha, std::span<const double> z);

// R^{(alpha,mu,m)} at distance t > radius from the center.
double r_fn(const MeasureSpec& measure, double alpha, double t,
            const QuadratureSpec& spec = QuadratureSpec{2.5e-10, 0.0, 60});
double r_fn(const MeasureSpec& measure, double alpha, std::span<const double> z);

// r*eps^2/8 - r*sqrt(pi m/2)*(1 - eps^2/16)^((m-2)/2), valid for
// alpha = r(1+eps), ||z|| >= eps r.
double t_lower_bound(double r, double eps, int m);

// (alpha + r - ||z||) * (sqrt(pi)/2) * sqrt(m/2) * (alpha/||z||)^(m-2),
// valid for ||z|| in (alpha, alpha + r).
double r_upper_bound(double alpha, double r, int m, double z_norm);

enum class BoundQuantity { T_lower, R_upper, angle_tail };

struct BoundReport {
  BoundQuantity quantity;
  double bound_value = 0.0;
  double actual_value = 0.0;
  double slack = 0.0;  // actual-bound for lower bounds, bound-actual for upper
};

BoundReport check_t_lower_bound(double r, double eps, int m, double t,
                                const QuadratureSpec& spec = QuadratureSpec{1e-10, 1e-10, 60});
BoundReport check_r_upper_bound(const MeasureSpec& measure, double alpha, double t);

enum class MaximizerStatus { center_is_unique_max, counterexample_point, inconclusive };

struct MaximizerSearch {
  int grid_points = 64;
  int random_directions = 8;
  double refine_tol = 1e-6;
  std::uint64_t seed = 0;
  QuadratureSpec quadrature{1e-9, 0.0, 60};
};

struct MaximizerReport {
  MaximizerStatus status = MaximizerStatus::inconclusive;
  double margin = 0.0;       // G(c_i) - best off-center value found
  double g_center = 0.0;
  double g_best = 0.0;
  std::vector<double> best_point;
};

// Searches for arg max of G^alpha over ball i: radial grids toward each other
// center plus random directions, golden-section refinement on the best cell.
MaximizerReport g_maximizer_check(const std::vector<BallConfig>& balls,
                                  const AlphaVector& alpha, int ball,
                                  const MaximizerSearch& settings = MaximizerSearch{});

}  // namespace kmedlp
