#include "kmedlp/json_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace kmedlp {

using nlohmann::json;

namespace {

json measure_to_obj(const MeasureSpec& m) {
  json law;
  switch (m.kind()) {
    case RadialKind::uniform_ball:
      law = {{"kind", "uniform_ball"}};
      break;
    case RadialKind::uniform_sphere:
      law = {{"kind", "uniform_sphere"}, {"s", m.sphere_radius()}};
      break;
    case RadialKind::point_mass_origin:
      law = {{"kind", "point_mass"}};
      break;
    case RadialKind::annulus:
      law = {{"kind", "annulus"}, {"eps", m.annulus_eps()},
             {"interior_mass", m.annulus_interior_mass()}};
      break;
    case RadialKind::radial_density:
      throw std::invalid_argument("radial_density measures (opaque callables) do not serialize");
  }
  return json{{"m", m.dim()}, {"radius", m.radius()}, {"law", law}};
}

MeasureSpec measure_from_obj(const json& j) {
  int m = j.at("m").get<int>();
  double radius = j.at("radius").get<double>();
  const json& law = j.at("law");
  std::string kind = law.at("kind").get<std::string>();
  if (kind == "uniform_ball") return MeasureSpec::uniform_ball(m, radius);
  if (kind == "uniform_sphere")
    return MeasureSpec::uniform_sphere(m, radius, law.at("s").get<double>());
  if (kind == "point_mass") return MeasureSpec::point_mass_origin(m, radius);
  if (kind == "annulus")
    return MeasureSpec::annulus_concentrated(m, radius, law.at("eps").get<double>(),
                                             law.at("interior_mass").get<double>());
  throw std::invalid_argument("unknown measure law kind: " + kind);
}

json ball_to_obj(const BallConfig& b) {
  return json{{"center", b.center},
              {"radius", b.radius},
              {"beta", b.beta},
              {"measure", measure_to_obj(b.measure)}};
}

BallConfig ball_from_obj(const json& j) {
  return make_ball(j.at("center").get<std::vector<double>>(), j.at("radius").get<double>(),
                   measure_from_obj(j.at("measure")), j.at("beta").get<double>());
}

void require_format(const json& j) {
  if (!j.contains("format") || j.at("format").get<int>() != 1)
    throw std::invalid_argument("unsupported file format (expected \"format\": 1)");
}

}  // namespace

std::string measure_to_json(const MeasureSpec& measure) {
  return measure_to_obj(measure).dump();
}

MeasureSpec measure_from_json(const std::string& text) {
  return measure_from_obj(json::parse(text));
}

std::string instance_to_json(const Instance& instance) {
  json j;
  j["format"] = 1;
  j["m"] = instance.m;
  j["k"] = instance.k;
  j["n"] = instance.n;
  j["seed"] = instance.seed;
  json balls = json::array();
  for (const auto& b : instance.balls) balls.push_back(ball_to_obj(b));
  j["balls"] = std::move(balls);
  json pts = json::array();
  for (long i = 0; i < instance.size(); ++i) {
    auto p = instance.points[i];
    pts.push_back(std::vector<double>(p.begin(), p.end()));
  }
  j["points"] = std::move(pts);
  j["labels"] = instance.labels;
  return j.dump();
}

Instance instance_from_json(const std::string& text) {
  json j = json::parse(text);
  require_format(j);
  Instance inst;
  inst.m = j.at("m").get<int>();
  inst.k = j.at("k").get<int>();
  inst.n = j.at("n").get<long>();
  inst.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& b : j.at("balls")) inst.balls.push_back(ball_from_obj(b));
  inst.points = PointArray(inst.m);
  for (const auto& p : j.at("points")) {
    std::vector<double> v = p.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != inst.m)
      throw std::invalid_argument("instance file: point dimension mismatch");
    inst.points.push(v);
  }
  inst.labels = j.at("labels").get<std::vector<int>>();
  if (static_cast<long>(inst.labels.size()) != inst.points.size())
    throw std::invalid_argument("instance file: labels/points mismatch");
  if (static_cast<int>(inst.balls.size()) != inst.k)
    throw std::invalid_argument("instance file: k/balls mismatch");
  return inst;
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_json(instance) << '\n';
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return instance_from_json(text);
}

namespace {

const char* cond_name(CondStatus s) {
  switch (s) {
    case CondStatus::holds_strict: return "holds_strict";
    case CondStatus::holds_weak: return "holds_weak";
    case CondStatus::fails: return "fails";
  }
  return "?";
}

const char* implies_name(CertificateVerdict::Implies i) {
  switch (i) {
    case CertificateVerdict::Implies::unique_optimum: return "unique_optimum";
    case CertificateVerdict::Implies::optimum: return "optimum";
    case CertificateVerdict::Implies::nothing: return "nothing";
  }
  return "?";
}

}  // namespace

std::string verdict_to_json(const CertificateVerdict& v) {
  json j;
  j["format"] = 1;
  j["cond_a"] = {{"status", v.a == CondStatus::fails ? "fails" : "holds"}, {"margin", v.margin_a}};
  j["cond_b"] = {{"status", cond_name(v.b)}, {"margin", v.margin_b}};
  j["cond_c"] = {{"status", v.c == CondStatus::fails ? "fails" : "holds"}, {"margin", v.margin_c}};
  j["cond_d"] = {{"status", cond_name(v.d)}, {"margin", v.margin_d}};
  j["strictness_tau"] = v.strictness_tau;
  j["implies"] = implies_name(v.implies);
  return j.dump(2);
}

std::string recovery_to_json(const RecoveryVerdict& v) {
  json j;
  j["format"] = 1;
  j["status"] = to_string(v.status);
  j["margin"] = v.margin;
  j["note"] = v.note;
  if (v.certificate) j["certificate"] = json::parse(verdict_to_json(*v.certificate));
  return j.dump(2);
}

std::string solution_to_json(const LpModel& model, const LpSolution& solution,
                             const DualSolution& dual, const RecoveryVerdict* verdict) {
  json j;
  j["format"] = 1;
  j["status"] = solution.status == LpSolution::Status::optimal ? "optimal" : "failed";
  j["objective"] = solution.objective;
  j["iterations"] = solution.iterations;
  j["y"] = solution.y;
  json z = json::array();
  for (const auto& e : solution.sparse_z(model.N))
    z.push_back({{"p", e.p}, {"q", e.q}, {"v", e.value}});
  j["z"] = std::move(z);
  json beta = json::array();
  for (const auto& e : dual.beta) beta.push_back({{"p", e.p}, {"q", e.q}, {"v", e.value}});
  j["dual"] = {{"alpha", dual.alpha}, {"omega", dual.omega}, {"beta", std::move(beta)}};
  if (verdict) j["verdict"] = json::parse(recovery_to_json(*verdict));
  return j.dump(2);
}

void save_solution(const LpModel& model, const LpSolution& solution, const DualSolution& dual,
                   const RecoveryVerdict* verdict, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << solution_to_json(model, solution, dual, verdict) << '\n';
}

}  // namespace kmedlp
