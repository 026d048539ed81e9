#pragma once

#include <optional>
#include <string>

#include "kmedlp/certificate.hpp"
#include "kmedlp/instance.hpp"
#include "kmedlp/lp.hpp"

namespace kmedlp {

struct RecoveryVerdict {
  enum class Status {
    achieved,
    failed_fractional,
    failed_wrong_partition,
    failed_nonunique,
    undecided
  };
  Status status = Status::undecided;
  // how the verdict was reached
  enum class Path { certificate, lp_strict_certificate, lp_perturbation_probe, none };
  Path path = Path::none;
  std::optional<CertificateVerdict> certificate;
  double margin = 0.0;  // smallest strict margin supporting the verdict
  std::string note;
};

struct RecoveryOptions {
  long lp_size_guard = 250;
  int perturbation_probes = 5;
  double integrality_tol = 1e-6;
  std::optional<double> gamma_override;
  bool use_certificate_path = true;
  bool use_lp_path = true;
};

// Certificate path first (any N, no LP); on anything short of a proven
// unique optimum, the LP path: integrality, partition match against the
// generating labels, then uniqueness via a strict certificate rebuilt from
// the dual or, failing that, seeded infinitesimal cost perturbations
// (uniqueness "accepted", never "proven").
RecoveryVerdict decide_recovery(const Instance& instance, const RecoveryOptions& opts = {});

const char* to_string(RecoveryVerdict::Status s);

}  // namespace kmedlp
