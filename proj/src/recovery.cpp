#include "kmedlp/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "kmedlp/rng.hpp"

namespace kmedlp {

const char* to_string(RecoveryVerdict::Status s) {
  switch (s) {
    case RecoveryVerdict::Status::achieved: return "achieved";
    case RecoveryVerdict::Status::failed_fractional: return "failed_fractional";
    case RecoveryVerdict::Status::failed_wrong_partition: return "failed_wrong_partition";
    case RecoveryVerdict::Status::failed_nonunique: return "failed_nonunique";
    case RecoveryVerdict::Status::undecided: return "undecided";
  }
  return "?";
}

namespace {

// partition match up to cluster relabeling
bool partitions_equal(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> fwd, bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [itf, insf] = fwd.emplace(a[i], b[i]);
    if (!insf && itf->second != b[i]) return false;
    auto [itb, insb] = bwd.emplace(b[i], a[i]);
    if (!insb && itb->second != a[i]) return false;
  }
  return true;
}

}  // namespace

RecoveryVerdict decide_recovery(const Instance& instance, const RecoveryOptions& opts) {
  RecoveryVerdict out;

  if (opts.use_certificate_path) {
    CertifyResult cert = certify_recovery(instance, opts.gamma_override);
    if (cert.applicable) {
      out.certificate = cert.verdict;
      if (cert.verdict.implies == CertificateVerdict::Implies::unique_optimum) {
        out.status = RecoveryVerdict::Status::achieved;
        out.path = RecoveryVerdict::Path::certificate;
        out.margin = std::min(cert.verdict.margin_b, cert.verdict.margin_d);
        out.note = "proven via recipe certificate";
        return out;
      }
    }
  }

  long N = instance.size();
  if (!opts.use_lp_path || N > opts.lp_size_guard) {
    out.status = RecoveryVerdict::Status::undecided;
    out.note = "certificate inconclusive and instance exceeds the LP size guard";
    return out;
  }

  LpModel model = LpModel::build(instance);
  SolveOptions sopt;
  sopt.size_guard = opts.lp_size_guard;
  KMedianLpSolver solver(model, sopt);
  auto [sol, dual] = solver.run();
  if (sol.status != LpSolution::Status::optimal) {
    out.status = RecoveryVerdict::Status::undecided;
    out.note = "LP solve failed";
    return out;
  }

  // integrality
  double worst = 0.0;
  for (double v : sol.y) worst = std::max(worst, std::fabs(v - std::round(v)));
  for (double v : sol.z) worst = std::max(worst, std::fabs(v - std::round(v)));
  if (worst > opts.integrality_tol) {
    out.status = RecoveryVerdict::Status::failed_fractional;
    out.margin = worst;
    out.note = "fractional LP optimum";
    return out;
  }

  // partition from z: per-point argmax, ties are a uniqueness failure
  std::vector<long> centers;
  for (long p = 0; p < N; ++p)
    if (sol.y[static_cast<std::size_t>(p)] > 0.5) centers.push_back(p);
  if (static_cast<int>(centers.size()) != instance.k) {
    out.status = RecoveryVerdict::Status::failed_fractional;
    out.note = "rounded y does not select k centers";
    return out;
  }
  std::vector<int> assign(static_cast<std::size_t>(N), -1);
  for (long q = 0; q < N; ++q) {
    double best = -1.0;
    int arg = -1;
    bool tie = false;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      double v = sol.zval(centers[i], q, N);
      if (v > best + 1e-9) {
        best = v;
        arg = static_cast<int>(i);
        tie = false;
      } else if (std::fabs(v - best) <= 1e-9) {
        tie = true;
      }
    }
    if (tie && best > 0.5) {
      out.status = RecoveryVerdict::Status::failed_nonunique;
      out.note = "tied assignment in the LP optimum";
      return out;
    }
    assign[static_cast<std::size_t>(q)] = arg;
  }
  if (!partitions_equal(assign, instance.labels)) {
    out.status = RecoveryVerdict::Status::failed_wrong_partition;
    out.note = "integral LP optimum induces a different partition";
    return out;
  }

  // uniqueness, path (i): strict certificate from the dual
  Clustering clustering;
  clustering.centers = centers;
  clustering.assign = assign;
  Certificate alpha_cert{dual.alpha};
  CertificateVerdict cv = verify_certificate(instance, clustering, alpha_cert);
  out.certificate = cv;
  if (cv.implies == CertificateVerdict::Implies::unique_optimum) {
    out.status = RecoveryVerdict::Status::achieved;
    out.path = RecoveryVerdict::Path::lp_strict_certificate;
    out.margin = std::min(cv.margin_b, cv.margin_d);
    out.note = "uniqueness proven by a strict dual certificate";
    return out;
  }

  // path (ii): perturbation probe (uniqueness accepted, never proven)
  RngStream probe_rng = RngStream(instance.seed).substream(0x70726f62ULL);
  double scale = 1e-9 * std::max(model.max_dist, 1.0);
  for (int t = 0; t < opts.perturbation_probes; ++t) {
    RngStream rng = probe_rng.substream(static_cast<std::uint64_t>(t));
    std::vector<double> costs = model.dist;
    for (auto& c : costs) c += scale * rng.uniform();
    auto [psol, pdual] = solver.resolve(costs);
    (void)pdual;
    if (psol.status != LpSolution::Status::optimal) {
      out.status = RecoveryVerdict::Status::undecided;
      out.note = "perturbed LP solve failed";
      return out;
    }
    double dev = 0.0;
    for (long p = 0; p < N; ++p)
      dev = std::max(dev, std::fabs(psol.y[static_cast<std::size_t>(p)] - sol.y[static_cast<std::size_t>(p)]));
    for (std::size_t i = 0; i < psol.z.size(); ++i)
      dev = std::max(dev, std::fabs(psol.z[i] - sol.z[i]));
    if (dev > opts.integrality_tol) {
      out.status = RecoveryVerdict::Status::failed_nonunique;
      out.margin = dev;
      out.note = "perturbation probe reached a different vertex";
      return out;
    }
  }
  out.status = RecoveryVerdict::Status::achieved;
  out.path = RecoveryVerdict::Path::lp_perturbation_probe;
  out.note = "uniqueness accepted after identical perturbation probes";
  return out;
}

}  // namespace kmedlp
