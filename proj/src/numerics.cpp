#include "kmedlp/numerics.hpp"

#include <cmath>

namespace kmedlp {

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  return integrate<const std::function<double(double)>&>(f, a, b, spec);
}

double gamma_ratio(int m) {
  if (m < 2) throw std::domain_error("gamma_ratio: requires m >= 2");
  return std::exp(std::lgamma(0.5 * m) - std::lgamma(0.5 * (m - 1)));
}

AngleDensity::AngleDensity(int m_) : m(m_), normalizer(gamma_ratio(m_) / std::sqrt(kPi)) {}

double AngleDensity::operator()(double theta) const {
  if (theta < 0.0 || theta > kPi)
    throw std::domain_error("angle_density: theta outside [0, pi]");
  if (m == 2) return normalizer;
  double s = std::sin(theta);
  if (m == 3) return normalizer * s;
  return normalizer * std::pow(s, m - 2);
}

double angle_density(int m, double theta) { return AngleDensity(m)(theta); }

double crossing_threshold(int m) {
  if (m < 2) throw std::domain_error("crossing_threshold: requires m >= 2");
  return std::exp(2.0 * std::lgamma(0.5 * m) - std::lgamma(0.5 * (m - 1)) -
                  std::lgamma(0.5 * (m + 1)));
}

}  // namespace kmedlp
