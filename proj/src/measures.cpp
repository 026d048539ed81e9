#include "kmedlp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kmedlp {

namespace {

// int_a^b u^(j) du
double power_moment(int j, double a, double b) {
  return (std::pow(b, j + 1) - std::pow(a, j + 1)) / (j + 1);
}

}  // namespace

double sphere_surface_area(int m) {
  if (m < 1) throw std::domain_error("sphere_surface_area: m >= 1");
  if (m == 1) return 2.0;  // S^0 = {-1, +1}
  return 2.0 * std::pow(kPi, 0.5 * m) / std::exp(std::lgamma(0.5 * m));
}

MeasureSpec MeasureSpec::uniform_ball(int m, double radius) {
  if (m < 1 || radius <= 0.0) throw std::invalid_argument("uniform_ball: bad parameters");
  MeasureSpec s;
  s.m_ = m;
  s.radius_ = radius;
  s.kind_ = RadialKind::uniform_ball;
  return s;
}

MeasureSpec MeasureSpec::uniform_sphere(int m, double radius, double sr) {
  if (m < 1 || radius <= 0.0 || sr < 0.0 || sr > radius)
    throw std::invalid_argument("uniform_sphere: bad parameters");
  MeasureSpec s;
  s.m_ = m;
  s.radius_ = radius;
  s.kind_ = sr == 0.0 ? RadialKind::point_mass_origin : RadialKind::uniform_sphere;
  s.sphere_radius_ = sr;
  return s;
}

MeasureSpec MeasureSpec::point_mass_origin(int m, double radius) {
  return uniform_sphere(m, radius, 0.0);
}

MeasureSpec MeasureSpec::radial_density(int m, double radius, std::function<double(double)> f,
                                        bool require_decreasing) {
  if (m < 1 || radius <= 0.0 || !f) throw std::invalid_argument("radial_density: bad parameters");
  MeasureSpec s;
  s.m_ = m;
  s.radius_ = radius;
  s.kind_ = RadialKind::radial_density;
  s.spatial_f_ = std::move(f);

  constexpr int kGrid = 257;
  double prev = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    double t = radius * i / (kGrid - 1);
    double v = s.spatial_f_(t);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("radial_density: f must be finite and nonnegative");
    if (require_decreasing && i > 0 && !(v < prev))
      throw std::invalid_argument("radial_density: f is not strictly decreasing");
    prev = v;
  }

  auto unnormalized = [&s](double t) {
    return s.spatial_f_(t) * std::pow(t, s.m_ - 1);
  };
  s.density_norm_ = integrate(unnormalized, 0.0, radius, QuadratureSpec{1e-12, 1e-12, 60});
  if (!(s.density_norm_ > 0.0))
    throw std::invalid_argument("radial_density: f integrates to zero");

  // cumulative table for sampling (composite Simpson per cell)
  constexpr int kCells = 4096;
  s.cdf_grid_.resize(kCells + 1);
  s.cdf_vals_.resize(kCells + 1);
  double acc = 0.0;
  s.cdf_grid_[0] = 0.0;
  s.cdf_vals_[0] = 0.0;
  for (int i = 1; i <= kCells; ++i) {
    double a = radius * (i - 1) / kCells, b = radius * i / kCells;
    acc += (b - a) / 6.0 *
           (unnormalized(a) + 4.0 * unnormalized(0.5 * (a + b)) + unnormalized(b));
    s.cdf_grid_[i] = b;
    s.cdf_vals_[i] = acc;
  }
  for (auto& v : s.cdf_vals_) v /= acc;
  return s;
}

MeasureSpec MeasureSpec::annulus_concentrated(int m, double radius, double eps,
                                              double interior_mass) {
  if (m < 1 || radius <= 0.0 || !(eps > 0.0 && eps < 1.0) ||
      !(interior_mass > 0.0 && interior_mass < 1.0))
    throw std::invalid_argument("annulus_concentrated: bad parameters");
  MeasureSpec s;
  s.m_ = m;
  s.radius_ = radius;
  s.kind_ = RadialKind::annulus;
  s.eps_ = eps;
  s.interior_mass_ = interior_mass;

  // Work on the unit ball (u = t/radius); the norm law is scale-free.
  double Sm = sphere_surface_area(m);
  double a2 = 1.0 - eps, b2 = 1.0 - 0.5 * eps;
  // ramp A*u on [0, a2] carries exactly interior_mass:
  //   Sm * A * int_0^{a2} u^m du = q
  double A = interior_mass * (m + 1) / (Sm * std::pow(a2, m + 1));
  double fa = A * a2;
  // connector from fa at a2 to plateau B at b2, then constant B to 1
  double h = 0.5 * eps;
  double M0 = power_moment(m - 1, a2, b2);                       // int u^(m-1)
  double M1 = power_moment(m, a2, b2) - a2 * M0;                 // int u^(m-1)(u-a2)
  double coefB = Sm * (M1 / h + power_moment(m - 1, b2, 1.0));
  double constant = Sm * fa * (M0 - M1 / h);
  double B = (1.0 - interior_mass - constant) / coefB;
  if (!(B > 0.0))
    throw std::invalid_argument("annulus_concentrated: infeasible (eps, interior_mass)");
  s.ramp_ = A;
  s.plateau_ = B;
  return s;
}

double MeasureSpec::annulus_spatial(double u) const {
  double a2 = 1.0 - eps_, b2 = 1.0 - 0.5 * eps_;
  double fa = ramp_ * a2;
  if (u <= a2) return ramp_ * u;
  if (u <= b2) return fa + (plateau_ - fa) * (u - a2) / (0.5 * eps_);
  return plateau_;
}

std::vector<MeasureSpec::Atom> MeasureSpec::atoms() const {
  switch (kind_) {
    case RadialKind::uniform_sphere: return {{sphere_radius_, 1.0}};
    case RadialKind::point_mass_origin: return {{0.0, 1.0}};
    default: return {};
  }
}

double MeasureSpec::norm_density(double t) const {
  if (t < 0.0 || t > radius_) return 0.0;
  switch (kind_) {
    case RadialKind::uniform_ball:
      return m_ * std::pow(t / radius_, m_ - 1) / radius_;
    case RadialKind::radial_density:
      return spatial_f_(t) * std::pow(t, m_ - 1) / density_norm_;
    case RadialKind::annulus: {
      double u = t / radius_;
      return sphere_surface_area(m_) * annulus_spatial(u) * std::pow(u, m_ - 1) / radius_;
    }
    default:
      throw std::domain_error("norm_density: law has atoms");
  }
}

std::vector<double> MeasureSpec::density_kinks() const {
  if (kind_ == RadialKind::annulus)
    return {radius_ * (1.0 - eps_), radius_ * (1.0 - 0.5 * eps_)};
  return {};
}

double MeasureSpec::radial_cdf(double t) const {
  if (t < 0.0 || t > radius_ * (1.0 + 1e-12))
    throw std::domain_error("radial_cdf: t outside [0, radius]");
  t = std::min(t, radius_);
  switch (kind_) {
    case RadialKind::uniform_ball:
      return std::pow(t / radius_, m_);
    case RadialKind::uniform_sphere:
      return t >= sphere_radius_ ? 1.0 : 0.0;
    case RadialKind::point_mass_origin:
      return 1.0;
    case RadialKind::radial_density: {
      if (t == 0.0) return 0.0;
      auto f = [this](double u) { return norm_density(u); };
      return integrate(f, 0.0, t, QuadratureSpec{1e-11, 1e-11, 60});
    }
    case RadialKind::annulus: {
      // closed-form piecewise polynomial
      double u = t / radius_;
      double Sm = sphere_surface_area(m_);
      double a2 = 1.0 - eps_, b2 = 1.0 - 0.5 * eps_;
      double fa = ramp_ * a2;
      double acc = 0.0;
      double lo = 0.0, hi = std::min(u, a2);
      if (hi > lo) acc += Sm * ramp_ * power_moment(m_, lo, hi);
      if (u > a2) {
        hi = std::min(u, b2);
        double slope = (plateau_ - fa) / (0.5 * eps_);
        acc += Sm * (fa * power_moment(m_ - 1, a2, hi) +
                     slope * (power_moment(m_, a2, hi) - a2 * power_moment(m_ - 1, a2, hi)));
      }
      if (u > b2) acc += Sm * plateau_ * power_moment(m_ - 1, b2, u);
      return std::min(acc, 1.0);
    }
  }
  return 0.0;
}

double MeasureSpec::expected_center_distance() const {
  double total = 0.0;
  for (const auto& atom : atoms()) total += atom.t * atom.mass;
  if (!is_continuous()) return total;
  auto f = [this](double t) { return t * norm_density(t); };
  QuadratureSpec spec{1e-11, 1e-11, 60};
  std::vector<double> cuts = density_kinks();
  cuts.push_back(0.0);
  cuts.push_back(radius_);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate(f, cuts[i], cuts[i + 1], spec);
  return total;
}

double MeasureSpec::sample_norm(RngStream& rng) const {
  switch (kind_) {
    case RadialKind::uniform_ball:
      return radius_ * std::pow(rng.uniform(), 1.0 / m_);
    case RadialKind::uniform_sphere:
      return sphere_radius_;
    case RadialKind::point_mass_origin:
      return 0.0;
    case RadialKind::radial_density: {
      double u = rng.uniform();
      auto it = std::lower_bound(cdf_vals_.begin(), cdf_vals_.end(), u);
      if (it == cdf_vals_.begin()) return 0.0;
      if (it == cdf_vals_.end()) return radius_;
      std::size_t j = static_cast<std::size_t>(it - cdf_vals_.begin());
      double c0 = cdf_vals_[j - 1], c1 = cdf_vals_[j];
      double w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
      return cdf_grid_[j - 1] + w * (cdf_grid_[j] - cdf_grid_[j - 1]);
    }
    case RadialKind::annulus: {
      double u = rng.uniform();
      double lo = 0.0, hi = radius_;
      for (int it = 0; it < 64; ++it) {
        double mid = 0.5 * (lo + hi);
        (radial_cdf(mid) < u ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

std::vector<double> MeasureSpec::sample(RngStream& rng) const {
  double t = sample_norm(rng);
  std::vector<double> dir = rng.unit_vector(m_);
  for (auto& c : dir) c *= t;
  return dir;
}

bool MeasureSpec::operator==(const MeasureSpec& other) const {
  if (m_ != other.m_ || radius_ != other.radius_ || kind_ != other.kind_) return false;
  switch (kind_) {
    case RadialKind::uniform_sphere: return sphere_radius_ == other.sphere_radius_;
    case RadialKind::annulus:
      return eps_ == other.eps_ && interior_mass_ == other.interior_mass_;
    case RadialKind::radial_density: return false;  // opaque callables
    default: return true;
  }
}

BallConfig make_ball(std::vector<double> center, double radius, MeasureSpec measure,
                     double beta) {
  if (static_cast<int>(center.size()) != measure.dim())
    throw std::invalid_argument("make_ball: measure dimension != ambient dimension");
  if (measure.radius() != radius)
    throw std::invalid_argument("make_ball: measure radius != ball radius");
  if (!(beta >= 1.0)) throw std::invalid_argument("make_ball: requires beta >= 1");
  return BallConfig{std::move(center), radius, std::move(measure), beta};
}

GeometrySummary summarize_geometry(const std::vector<BallConfig>& balls) {
  std::size_t k = balls.size();
  GeometrySummary g;
  g.pairwise.assign(k, std::vector<double>(k, 0.0));
  g.D.assign(k, std::numeric_limits<double>::infinity());
  g.min_center_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      double d = dist(balls[i].center, balls[j].center);
      g.pairwise[i][j] = d;
      g.D[i] = std::min(g.D[i], d - balls[i].radius);
      g.min_center_distance = std::min(g.min_center_distance, d);
    }
  return g;
}

AssumptionCheck check_counterexample_assumption(const MeasureSpec& measure, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("check_counterexample_assumption: eps in (0,1)");
  if (std::fabs(measure.radius() - 1.0) > 1e-12)
    throw std::domain_error("check_counterexample_assumption: measure must live on the unit ball");
  double t = 1.0 - eps;
  double below = measure.radial_cdf(t);
  for (const auto& atom : measure.atoms())
    if (atom.t == t) below -= atom.mass;  // P(||x|| < t), not <=
  below = std::max(0.0, below);
  double above = 1.0 - below;
  AssumptionCheck out;
  out.lhs = (0.292 - 8.0 * eps) * above;
  out.rhs = 0.279 + 6.0 * eps + (3.0 + 2.0 * eps) * below;
  out.margin = out.lhs - out.rhs;
  out.satisfied = out.margin > 0.0;
  return out;
}

}  // namespace kmedlp
