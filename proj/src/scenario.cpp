#include "sttcbf/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sttcbf/parser.hpp"

namespace sttcbf {

using nlohmann::json;

namespace {

template <class T>
T req(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T opt(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return req<T>(j, key);
}

template <class T>
std::optional<T> maybe(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return req<T>(j, key);
}

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

json predicate_to_json(const Predicate& p) {
  switch (p.kind) {
    case Predicate::Kind::AffineHalfspace:
      return {{"kind", "halfspace"}, {"w", p.w}, {"b", p.b}};
    case Predicate::Kind::BoxInfNorm:
      return {{"kind", "box"}, {"center", p.center}, {"halfwidth", p.halfwidth}};
    case Predicate::Kind::BallNorm2:
      return {{"kind", "ball"}, {"center", p.center}, {"radius", p.radius}};
  }
  return {};
}

Predicate predicate_from_json(const std::string& name, const json& j) {
  try {
    const auto kind = req<std::string>(j, "kind");
    if (kind == "box") {
      if (j.contains("lo")) {
        const auto lo = req<std::vector<double>>(j, "lo");
        const auto hi = req<std::vector<double>>(j, "hi");
        return Predicate::box_bounds(lo, hi);
      }
      auto c = req<std::vector<double>>(j, "center");
      const auto& hw = j.at("halfwidth");
      if (hw.is_number()) return Predicate::box(std::move(c), hw.get<double>());
      return Predicate::box(std::move(c), req<std::vector<double>>(j, "halfwidth"));
    }
    if (kind == "ball")
      return Predicate::ball(req<std::vector<double>>(j, "center"), req<double>(j, "radius"));
    if (kind == "halfspace")
      return Predicate::affine(req<std::vector<double>>(j, "w"), req<double>(j, "b"));
    throw ConfigError("unknown predicate kind '" + kind + "'");
  } catch (const std::invalid_argument& e) {
    throw ConfigError("predicate '" + name + "': " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError("predicate '" + name + "': " + e.what());
  }
}

std::string mode_name(CertificateMode m) {
  switch (m) {
    case CertificateMode::Adaptive: return "adaptive";
    case CertificateMode::Fixed: return "fixed";
    case CertificateMode::Optimization: return "optimization";
  }
  return "adaptive";
}

CertificateMode mode_from(const std::string& s) {
  if (s == "adaptive") return CertificateMode::Adaptive;
  if (s == "fixed") return CertificateMode::Fixed;
  if (s == "optimization") return CertificateMode::Optimization;
  throw ConfigError("unknown certificate mode '" + s + "'");
}

BasisKind basis_from(const std::string& s) {
  try {
    return basis_kind_from_string(s);
  } catch (const std::exception&) {
    throw ConfigError("unknown basis '" + s + "'");
  }
}

}  // namespace

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  if (!cfg.description.empty()) j["description"] = cfg.description;
  j["canonical"] = cfg.canonical;
  j["dimension"] = cfg.dimension;
  j["t_f"] = cfg.tf;
  j["state_bounds"] = json::array();
  for (auto [lo, hi] : cfg.state_bounds) j["state_bounds"].push_back({lo, hi});
  j["predicates"] = json::object();
  for (const auto& [name, p] : cfg.predicates) j["predicates"][name] = predicate_to_json(p);
  j["formula"] = cfg.formula;
  j["until_convention"] = cfg.until == UntilConvention::Paper ? "paper" : "standard";
  j["r_d"] = cfg.r_d;

  json& t = j["tube"];
  t["basis"] = to_string(cfg.tube.center_basis);
  t["radius_basis"] = to_string(cfg.tube.radius_basis);
  t["center_terms"] = cfg.tube.center_terms;
  t["radius_terms"] = cfg.tube.radius_terms;
  t["radius_max"] = cfg.tube.radius_max;
  put_opt(t, "start", cfg.tube.start);
  put_opt(t, "coeff_lo", cfg.tube.coeff_lo);
  put_opt(t, "coeff_hi", cfg.tube.coeff_hi);

  json& c = j["cover"];
  if (cfg.cover.explicit_counts()) {
    c["theta_counts"] = cfg.cover.theta_counts;
    c["lambda_count"] = cfg.cover.lambda_count;
    c["tau_count"] = cfg.cover.tau_count;
  } else {
    c["epsilon"] = cfg.cover.epsilon;
  }
  c["lambda_boundary"] = cfg.cover.lambda_boundary;
  c["max_samples"] = cfg.cover.max_samples;

  j["certificate"] = {{"mode", mode_name(cfg.certificate.mode)},
                      {"margin", cfg.certificate.margin},
                      {"epsilon", cfg.certificate.epsilon},
                      {"max_samples", cfg.certificate.max_samples}};

  json& s = j["solver"];
  s["seed"] = cfg.solver.seed;
  s["bisection"] = {cfg.solver.bisection_lo, cfg.solver.bisection_hi};
  s["tolerance"] = cfg.solver.tolerance;
  s["max_evaluations"] = cfg.solver.max_evaluations;
  s["restarts"] = cfg.solver.restarts;
  s["waypoints"] = json::array();
  for (const auto& w : cfg.solver.waypoints) s["waypoints"].push_back({{"t", w.t}, {"point", w.point}});
  put_opt(s, "initial_q", cfg.solver.initial_q);

  j["dynamics"] = {{"model", cfg.dynamics.model}, {"lookahead", cfg.dynamics.lookahead}};

  json& m = j["simulation"];
  m["dt"] = cfg.simulation.dt;
  m["kappa"] = cfg.simulation.kappa;
  m["K_diag"] = cfg.simulation.k_diag;
  put_opt(m, "x0", cfg.simulation.x0);
  put_opt(m, "y0", cfg.simulation.y0);
  m["seed"] = cfg.simulation.seed;
  put_opt(m, "heading", cfg.simulation.heading);
  put_opt(m, "tracking_gain", cfg.simulation.tracking_gain);
  put_opt(m, "u_lo", cfg.simulation.u_lo);
  put_opt(m, "u_hi", cfg.simulation.u_hi);

  j["output_dir"] = cfg.output_dir;
  return j;
}

ScenarioConfig scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  ScenarioConfig cfg;
  cfg.name = opt<std::string>(j, "name", "");
  cfg.description = opt<std::string>(j, "description", "");
  cfg.canonical = opt<bool>(j, "canonical", true);
  cfg.dimension = req<std::size_t>(j, "dimension");
  cfg.tf = req<double>(j, "t_f");
  for (const auto& b : req<std::vector<std::vector<double>>>(j, "state_bounds")) {
    if (b.size() != 2) throw ConfigError("state_bounds entries must be [lo, hi]");
    cfg.state_bounds.emplace_back(b[0], b[1]);
  }
  if (!j.contains("predicates") || !j["predicates"].is_object())
    throw ConfigError("missing key 'predicates'");
  for (const auto& [name, p] : j["predicates"].items()) cfg.predicates[name] = predicate_from_json(name, p);
  cfg.formula = req<std::string>(j, "formula");
  const auto conv = opt<std::string>(j, "until_convention", "paper");
  if (conv != "paper" && conv != "standard") throw ConfigError("until_convention must be paper or standard");
  cfg.until = conv == "paper" ? UntilConvention::Paper : UntilConvention::Standard;
  cfg.r_d = opt<double>(j, "r_d", 0.25);

  const json t = opt<json>(j, "tube", json::object());
  cfg.tube.center_basis = basis_from(opt<std::string>(t, "basis", "bernstein"));
  cfg.tube.radius_basis = basis_from(opt<std::string>(t, "radius_basis", to_string(cfg.tube.center_basis)));
  cfg.tube.center_terms = opt<int>(t, "center_terms", 5);
  cfg.tube.radius_terms = opt<int>(t, "radius_terms", 4);
  cfg.tube.radius_max = opt<double>(t, "radius_max", 3.0);
  cfg.tube.start = maybe<std::vector<double>>(t, "start");
  cfg.tube.coeff_lo = maybe<std::vector<double>>(t, "coeff_lo");
  cfg.tube.coeff_hi = maybe<std::vector<double>>(t, "coeff_hi");

  const json c = opt<json>(j, "cover", json::object());
  cfg.cover.n = cfg.dimension;
  cfg.cover.tf = cfg.tf;
  if (c.contains("theta_counts")) {
    cfg.cover.theta_counts = req<std::vector<int>>(c, "theta_counts");
    cfg.cover.lambda_count = req<int>(c, "lambda_count");
    cfg.cover.tau_count = req<int>(c, "tau_count");
  } else {
    cfg.cover.epsilon = req<double>(c, "epsilon");
  }
  cfg.cover.lambda_boundary = opt<bool>(c, "lambda_boundary", false);
  cfg.cover.max_samples = opt<std::size_t>(c, "max_samples", cfg.cover.max_samples);

  const json ce = opt<json>(j, "certificate", json::object());
  cfg.certificate.mode = mode_from(opt<std::string>(ce, "mode", "adaptive"));
  cfg.certificate.margin = opt<double>(ce, "margin", cfg.certificate.margin);
  cfg.certificate.epsilon = opt<double>(ce, "epsilon", 0.0);
  cfg.certificate.max_samples = opt<std::size_t>(ce, "max_samples", cfg.certificate.max_samples);

  const json s = opt<json>(j, "solver", json::object());
  cfg.solver.seed = opt<std::uint64_t>(s, "seed", 1);
  const auto bis = opt<std::vector<double>>(s, "bisection", {-2.0, 2.0});
  if (bis.size() != 2) throw ConfigError("solver.bisection must be [lo, hi]");
  cfg.solver.bisection_lo = bis[0];
  cfg.solver.bisection_hi = bis[1];
  cfg.solver.tolerance = opt<double>(s, "tolerance", 1e-3);
  cfg.solver.max_evaluations = opt<std::size_t>(s, "max_evaluations", cfg.solver.max_evaluations);
  cfg.solver.restarts = opt<int>(s, "restarts", 3);
  for (const auto& w : opt<json>(s, "waypoints", json::array()))
    cfg.solver.waypoints.push_back({req<double>(w, "t"), req<std::vector<double>>(w, "point")});
  cfg.solver.initial_q = maybe<std::vector<double>>(s, "initial_q");

  const json d = opt<json>(j, "dynamics", json::object());
  cfg.dynamics.model = opt<std::string>(d, "model", "omni");
  cfg.dynamics.lookahead = opt<double>(d, "lookahead", 0.1);

  const json m = opt<json>(j, "simulation", json::object());
  cfg.simulation.dt = opt<double>(m, "dt", 0.05);
  cfg.simulation.kappa = opt<double>(m, "kappa", 5.0);
  cfg.simulation.k_diag = opt<std::vector<double>>(m, "K_diag", {});
  cfg.simulation.x0 = maybe<std::vector<double>>(m, "x0");
  cfg.simulation.y0 = maybe<std::vector<double>>(m, "y0");
  cfg.simulation.seed = opt<std::uint64_t>(m, "seed", 1);
  cfg.simulation.heading = maybe<double>(m, "heading");
  cfg.simulation.tracking_gain = maybe<double>(m, "tracking_gain");
  cfg.simulation.u_lo = maybe<std::vector<double>>(m, "u_lo");
  cfg.simulation.u_hi = maybe<std::vector<double>>(m, "u_hi");

  cfg.output_dir = opt<std::string>(j, "output_dir", "out");
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return scenario_from_json(j);
}

FormulaPtr scenario_formula(const ScenarioConfig& cfg) {
  return bind_predicates(parse(cfg.formula), cfg.predicates);
}

void validate(const ScenarioConfig& cfg) {
  const std::size_t n = cfg.dimension;
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (n < 2) fail("dimension must be at least 2");
  if (!(cfg.tf > 0.0)) fail("t_f must be positive");
  if (!(cfg.r_d > 0.0)) fail("r_d must be positive");
  if (cfg.state_bounds.size() != n) fail("state_bounds must have one [lo, hi] per dimension");
  for (auto [lo, hi] : cfg.state_bounds)
    if (!(lo < hi)) fail("state_bounds entries need lo < hi");
  for (const auto& [name, p] : cfg.predicates)
    if (p.dimension() != n)
      fail("predicate '" + name + "' has dimension " + std::to_string(p.dimension()) +
           ", expected " + std::to_string(n));

  const auto f = scenario_formula(cfg);
  if (horizon(f) > cfg.tf + 1e-9) {
    std::ostringstream os;
    os << "formula horizon " << horizon(f) << " exceeds t_f = " << cfg.tf;
    fail(os.str());
  }

  if (cfg.tube.center_terms < 1 || cfg.tube.radius_terms < 1) fail("tube term counts must be >= 1");
  if (!(cfg.tube.radius_max > cfg.r_d)) fail("tube.radius_max must exceed r_d");
  if (cfg.tube.start && cfg.tube.start->size() != n) fail("tube.start has the wrong dimension");
  const std::size_t q = n * static_cast<std::size_t>(cfg.tube.center_terms) +
                        static_cast<std::size_t>(cfg.tube.radius_terms);
  if ((cfg.tube.coeff_lo && cfg.tube.coeff_lo->size() != q) ||
      (cfg.tube.coeff_hi && cfg.tube.coeff_hi->size() != q))
    fail("tube coefficient bounds must have " + std::to_string(q) + " entries");
  if (cfg.solver.initial_q && cfg.solver.initial_q->size() != q)
    fail("solver.initial_q must have " + std::to_string(q) + " entries");
  for (const auto& w : cfg.solver.waypoints)
    if (w.point.size() != n) fail("waypoint has the wrong dimension");
  if (!(cfg.solver.bisection_lo < cfg.solver.bisection_hi)) fail("solver.bisection needs lo < hi");
  if (!(cfg.solver.tolerance > 0.0)) fail("solver.tolerance must be positive");

  if (cfg.cover.explicit_counts()) {
    if (cfg.cover.theta_counts.size() != n - 1) fail("cover.theta_counts needs n - 1 entries");
    for (int k : cfg.cover.theta_counts)
      if (k < 1) fail("cover counts must be >= 1");
    if (cfg.cover.lambda_count < 1 || cfg.cover.tau_count < 1) fail("cover counts must be >= 1");
  } else if (!(cfg.cover.epsilon > 0.0)) {
    fail("cover.epsilon must be positive");
  }
  if (cfg.certificate.mode == CertificateMode::Fixed && !(cfg.certificate.epsilon > 0.0))
    fail("certificate.epsilon must be positive in fixed mode");
  if (!(cfg.certificate.margin > 0.0)) fail("certificate.margin must be positive");

  std::unique_ptr<Dynamics> dyn;
  try {
    dyn = make_dynamics(cfg);
  } catch (const std::invalid_argument& e) {
    fail(std::string("dynamics: ") + e.what());
  }
  if (dyn->output_dim() != n)
    fail("dynamics '" + cfg.dynamics.model + "' has output dimension " +
         std::to_string(dyn->output_dim()) + ", expected " + std::to_string(n));
  const auto& sim = cfg.simulation;
  if (!(sim.dt > 0.0)) fail("simulation.dt must be positive");
  if (!(sim.kappa > 0.0)) fail("simulation.kappa must be positive");
  if (!sim.k_diag.empty()) {
    if (sim.k_diag.size() != dyn->input_dim()) fail("simulation.K_diag has the wrong size");
    for (double k : sim.k_diag)
      if (!(k > 0.0)) fail("simulation.K_diag entries must be positive");
  }
  if (sim.x0 && sim.x0->size() != dyn->state_dim()) fail("simulation.x0 has the wrong dimension");
  if (sim.y0 && sim.y0->size() != n) fail("simulation.y0 has the wrong dimension");
  if (sim.x0 && sim.y0) fail("simulation.x0 and simulation.y0 are exclusive");
  if ((sim.u_lo && sim.u_lo->size() != dyn->input_dim()) ||
      (sim.u_hi && sim.u_hi->size() != dyn->input_dim()))
    fail("simulation input bounds have the wrong size");
}

SopInstance make_instance(const ScenarioConfig& cfg) {
  SopInstance inst;
  inst.formula = scenario_formula(cfg);
  inst.robustness.until = cfg.until;
  inst.n = cfg.dimension;
  inst.tf = cfg.tf;
  inst.center_basis = BasisSet(cfg.tube.center_basis, cfg.tube.center_terms, cfg.tf);
  inst.radius_basis = BasisSet(cfg.tube.radius_basis, cfg.tube.radius_terms, cfg.tf);
  inst.r_d = cfg.r_d;
  inst.state_bounds = cfg.state_bounds;
  set_default_boxes(inst, cfg.tube.radius_max);
  if (cfg.tube.coeff_lo) inst.coeff_lo = *cfg.tube.coeff_lo;
  if (cfg.tube.coeff_hi) inst.coeff_hi = *cfg.tube.coeff_hi;
  if (cfg.tube.start) pin_start(inst, *cfg.tube.start);
  return inst;
}

SolverOptions make_solver_options(const ScenarioConfig& cfg) {
  SolverOptions o;
  o.seed = cfg.solver.seed;
  o.bisection_lo = cfg.solver.bisection_lo;
  o.bisection_hi = cfg.solver.bisection_hi;
  o.tolerance = cfg.solver.tolerance;
  o.max_evaluations = cfg.solver.max_evaluations;
  o.restarts = cfg.solver.restarts;
  o.initial_q = cfg.solver.initial_q;
  o.waypoints = cfg.solver.waypoints;
  o.start = cfg.tube.start;
  o.certificate = cfg.certificate.mode;
  o.certificate_epsilon = cfg.certificate.epsilon;
  o.certificate_margin = cfg.certificate.margin;
  o.certificate_max_samples = cfg.certificate.max_samples;
  return o;
}

std::unique_ptr<Dynamics> make_dynamics(const ScenarioConfig& cfg) {
  return make_dynamics(cfg.dynamics.model, cfg.dimension, cfg.dynamics.lookahead);
}

SimOptions make_sim_options(const ScenarioConfig& cfg) {
  SimOptions o;
  o.dt = cfg.simulation.dt;
  if (!cfg.simulation.k_diag.empty())
    o.K = Eigen::Map<const Eigen::VectorXd>(cfg.simulation.k_diag.data(),
                                            static_cast<Eigen::Index>(cfg.simulation.k_diag.size()))
              .asDiagonal();
  if (cfg.simulation.u_lo)
    o.qp.u_lo = Eigen::Map<const Eigen::VectorXd>(cfg.simulation.u_lo->data(),
                                                  static_cast<Eigen::Index>(cfg.simulation.u_lo->size()));
  if (cfg.simulation.u_hi)
    o.qp.u_hi = Eigen::Map<const Eigen::VectorXd>(cfg.simulation.u_hi->data(),
                                                  static_cast<Eigen::Index>(cfg.simulation.u_hi->size()));
  o.robustness.until = cfg.until;
  o.tracking_gain = cfg.simulation.tracking_gain;
  return o;
}

Eigen::VectorXd initial_state(const ScenarioConfig& cfg, const Dynamics& dyn, const Tube& tube) {
  if (cfg.simulation.x0)
    return Eigen::Map<const Eigen::VectorXd>(cfg.simulation.x0->data(),
                                             static_cast<Eigen::Index>(cfg.simulation.x0->size()));
  double phi = 0.0;
  if (cfg.simulation.heading) {
    phi = *cfg.simulation.heading;
  } else {
    const Eigen::VectorXd v = eval_center_dot(tube, 0.0);
    if (v.size() >= 2 && v.head(2).norm() > 0.0) phi = std::atan2(v[1], v[0]);
  }
  if (cfg.simulation.y0) {
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
        cfg.simulation.y0->data(), static_cast<Eigen::Index>(cfg.simulation.y0->size()));
    if (const auto* dd = dynamic_cast<const DiffDrive*>(&dyn)) return dd->state_for_output(y, phi);
    return y;
  }
  return sample_initial_state(dyn, tube, cfg.simulation.seed, phi);
}

json result_to_json(const SynthesisResult& r) {
  json j;
  j["tube"] = tube_to_json(r.tube);
  j["eta_star"] = r.eta_star;
  j["epsilon"] = r.epsilon;
  j["certificate_ok"] = r.certificate_ok;
  j["margin"] = r.margin();
  const auto& L = r.lipschitz;
  j["lipschitz"] = {{"rho", L.rho},       {"center", L.center}, {"radius", L.radius},
                    {"radius_max", L.radius_max}, {"sphere", L.sphere}, {"mu", L.mu},
                    {"combined", L.combined}};
  const auto& d = r.diagnostics;
  j["diagnostics"] = {
      {"evaluations", d.evaluations},
      {"bisection_steps", d.bisection_steps},
      {"worst", {{"kind", d.worst.kind == ConstraintId::Kind::Radius ? "radius" : "robustness"},
                 {"index", d.worst.index}}},
      {"eta_optimization", d.eta_optimization},
      {"epsilon_optimization", d.epsilon_optimization},
      {"optimization_samples", d.optimization_samples},
      {"certificate_samples", d.certificate_samples},
      {"certificate_budget_limited", d.certificate_budget_limited}};
  j["q"] = r.q;
  return j;
}

SynthesisResult result_from_json(const json& j) {
  try {
    SynthesisResult r;
    r.tube = tube_from_json(j.at("tube"));
    r.eta_star = j.at("eta_star").get<double>();
    r.epsilon = j.at("epsilon").get<double>();
    r.certificate_ok = j.at("certificate_ok").get<bool>();
    const auto& L = j.at("lipschitz");
    r.lipschitz.rho = L.at("rho").get<double>();
    r.lipschitz.center = L.at("center").get<double>();
    r.lipschitz.radius = L.at("radius").get<double>();
    r.lipschitz.radius_max = L.at("radius_max").get<double>();
    r.lipschitz.sphere = L.at("sphere").get<double>();
    r.lipschitz.mu = L.at("mu").get<double>();
    r.lipschitz.combined = L.at("combined").get<double>();
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      r.diagnostics.evaluations = d.value("evaluations", std::size_t{0});
      r.diagnostics.bisection_steps = d.value("bisection_steps", std::size_t{0});
      r.diagnostics.eta_optimization = d.value("eta_optimization", 0.0);
      r.diagnostics.epsilon_optimization = d.value("epsilon_optimization", 0.0);
      r.diagnostics.optimization_samples = d.value("optimization_samples", std::size_t{0});
      r.diagnostics.certificate_samples = d.value("certificate_samples", std::size_t{0});
      r.diagnostics.certificate_budget_limited = d.value("certificate_budget_limited", false);
      if (d.contains("worst")) {
        r.diagnostics.worst.kind = d["worst"].value("kind", "radius") == "radius"
                                       ? ConstraintId::Kind::Radius
                                       : ConstraintId::Kind::Robustness;
        r.diagnostics.worst.index = d["worst"].value("index", std::size_t{0});
      }
    }
    r.q = j.value("q", std::vector<double>{});
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed result file: ") + e.what());
  }
}

}  // namespace sttcbf
