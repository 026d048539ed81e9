#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace kmedlp {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 60;  // bisection depth
};

class QuadratureError : public std::runtime_error {
public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

template <class F>
double simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm))
    throw QuadratureError("non-finite integrand value");
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0)
    throw QuadratureError("adaptive Simpson did not converge within the subdivision budget");
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b]. Throws QuadratureError instead of returning a
// value it cannot vouch for. Kinked integrands must be split at the kink by
// the caller.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  if (!(spec.abs_tol > 0.0) || spec.rel_tol < 0.0 || spec.max_subdivisions < 1)
    throw std::domain_error("invalid QuadratureSpec");
  if (!(a <= b)) throw std::domain_error("integrate: requires a <= b");
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
    throw QuadratureError("non-finite integrand value at initial nodes");
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(whole));
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, spec.max_subdivisions);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec);

// Gamma(m/2) / Gamma((m-1)/2), evaluated through log-gamma.
double gamma_ratio(int m);

// Density p^(m) of the angle between a uniform point of S^{m-1} and a fixed
// direction: p^(m)(theta) = gamma_ratio(m)/sqrt(pi) * sin^{m-2}(theta).
double angle_density(int m, double theta);

struct AngleDensity {
  int m;
  double normalizer;  // gamma_ratio(m)/sqrt(pi)
  explicit AngleDensity(int m_);
  double operator()(double theta) const;
};

// s_m, the sin(theta) threshold where p^(m) and p^(m+1) cross.
double crossing_threshold(int m);

inline constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace kmedlp
