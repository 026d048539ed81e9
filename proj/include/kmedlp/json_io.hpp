#pragma once

#include <string>

#include "kmedlp/certificate.hpp"
#include "kmedlp/instance.hpp"
#include "kmedlp/lp.hpp"
#include "kmedlp/recovery.hpp"

namespace kmedlp {

// All files carry a "format": 1 field; see docs/FORMATS.md.

std::string measure_to_json(const MeasureSpec& measure);
MeasureSpec measure_from_json(const std::string& text);

std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

void save_instance(const Instance& instance, const std::string& path);
Instance load_instance(const std::string& path);

std::string solution_to_json(const LpModel& model, const LpSolution& solution,
                             const DualSolution& dual, const RecoveryVerdict* verdict);
void save_solution(const LpModel& model, const LpSolution& solution, const DualSolution& dual,
                   const RecoveryVerdict* verdict, const std::string& path);

std::string verdict_to_json(const CertificateVerdict& verdict);
std::string recovery_to_json(const RecoveryVerdict& verdict);

}  // namespace kmedlp
