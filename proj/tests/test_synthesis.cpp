#include <numbers>
#include <random>

#include "doctest.h"
#include "sttcbf/certificate.hpp"
#include "sttcbf/parser.hpp"
#include "sttcbf/solver.hpp"

using namespace sttcbf;

namespace {

SopInstance instance(const std::string& text, PredicateTable preds, double tf, int zc = 5,
                     int zr = 4, BasisKind kind = BasisKind::Bernstein) {
  SopInstance inst;
  inst.formula = bind_predicates(parse(text), preds);
  inst.n = 2;
  inst.tf = tf;
  inst.center_basis = BasisSet(kind, zc, tf);
  inst.radius_basis = BasisSet(kind, zr, tf);
  inst.state_bounds = {{0.0, 10.0}, {0.0, 10.0}};
  set_default_boxes(inst, 3.0);
  return inst;
}

ScenarioCover small_cover(double tf, int dirs = 8, int lams = 2, int taus = 20) {
  CoverSpec s;
  s.n = 2;
  s.tf = tf;
  s.theta_counts = {dirs};
  s.lambda_count = lams;
  s.tau_count = taus;
  s.lambda_boundary = true;
  return build_cover(s);
}

// Static tube at `c` with radius `r` on a one-term monomial basis.
std::vector<double> static_q(double cx, double cy, double r) { return {cx, cy, r}; }

SopInstance static_instance(const std::string& text, PredicateTable preds, double tf) {
  return instance(text, std::move(preds), tf, 1, 1, BasisKind::Monomial);
}

double grid_distance(const std::vector<std::vector<double>>& samples,
                     const std::vector<double>& w) {
  double best = 1e300;
  for (const auto& s : samples) {
    double d = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) d += (w[i] - s[i]) * (w[i] - s[i]);
    best = std::min(best, d);
  }
  return std::sqrt(best);
}

}  // namespace

TEST_CASE("cover examples") {
  auto g = build_grid_cover({{0.0, 1.0}}, 0.25);
  auto pts = g.samples();
  REQUIRE(pts.size() == 2);
  CHECK(pts[0][0] == 0.25);
  CHECK(pts[1][0] == 0.75);
  CHECK_THROWS_AS(build_grid_cover({{0.0, 1.0}}, 0.0), std::invalid_argument);

  CoverSpec s;
  s.n = 2;
  s.tf = 1.0;
  s.epsilon = 0.0;
  CHECK_THROWS_AS(build_cover(s), std::invalid_argument);
  s.epsilon = 1e-4;
  s.max_samples = 1000;
  CHECK_THROWS_AS(build_cover(s), CoverBudgetError);
}

TEST_CASE("property: every point of W lies within eps of a cover sample") {
  CoverSpec s;
  s.n = 2;
  s.tf = 1.0;
  s.epsilon = 0.5;
  const auto cover = build_cover(s);
  CHECK(cover.epsilon() <= 0.5);
  std::vector<std::vector<double>> pts;
  for (const auto& c : cover.samples()) pts.push_back({c.theta[0], c.lambda, c.tau});
  CHECK(pts.size() == cover.size());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const std::vector<double> w{2 * std::numbers::pi * u(rng), u(rng), u(rng)};
    worst = std::max(worst, grid_distance(pts, w));
  }
  CHECK(worst <= 0.5);

  // 3-D state: two angles
  s.n = 3;
  s.epsilon = 0.6;
  const auto c3 = build_cover(s);
  pts.clear();
  for (const auto& c : c3.samples()) pts.push_back({c.theta[0], c.theta[1], c.lambda, c.tau});
  for (int k = 0; k < 20000; ++k) {
    const std::vector<double> w{std::numbers::pi * u(rng), 2 * std::numbers::pi * u(rng), u(rng),
                                u(rng)};
    CHECK(grid_distance(pts, w) <= 0.6);
  }
}

TEST_CASE("combined Lipschitz examples") {
  auto a = combined_lipschitz(1.0, 0.0, 0.0, 2.0, 2);
  CHECK(a.sphere == doctest::Approx(std::sqrt(2.0)));
  CHECK(a.mu == doctest::Approx(2.0 * std::sqrt(3.0)));
  CHECK(a.mu == doctest::Approx(3.4641).epsilon(1e-4));

  auto s = combined_lipschitz(1.0, 0.0, 0.0, 1.0, 2);
  CHECK(s.combined == doctest::Approx(std::sqrt(3.0)));

  auto full = combined_lipschitz(1.5, 2.0, 0.5, 1.0, 3);
  const double mu = 1.5 * 1.0 * std::sqrt(6.0 + 1.0);
  CHECK(full.combined == doctest::Approx(std::max(0.5, std::sqrt(mu * mu + 2.25 * 6.25))));

  double prev = 0.0;
  for (double rbar = 0.1; rbar < 10.0; rbar += 0.3) {
    const double L = combined_lipschitz(1.2, 0.7, 0.4, rbar, 2).combined;
    CHECK(L >= prev);
    prev = L;
  }
}

TEST_CASE("verify_certificate examples") {
  CHECK(verify_certificate(-0.5, 2.0, 0.1));
  CHECK_FALSE(verify_certificate(-0.1, 2.0, 0.1));
  CHECK(verify_certificate(-0.2, 2.0, 0.1));
}

TEST_CASE("sop objective: radius constraint active at equality") {
  auto inst = static_instance("G[0,1] Big", {{"Big", Predicate::ball({5.0, 5.0}, 100.0)}}, 1.0);
  auto v = sop_objective(inst, small_cover(1.0), static_q(5.0, 5.0, inst.r_d));
  CHECK(v.eta == 0.0);
  CHECK(v.worst.kind == ConstraintId::Kind::Radius);
  CHECK(v.worst.index == 0);  // lowest index wins ties
}

TEST_CASE("sop objective: planted obstacle violation") {
  const auto obstacle = Predicate::ball({6.0, 5.0}, 1.0);
  auto inst = static_instance("G[0,1] !O", {{"O", obstacle}}, 1.0);
  const auto cover = small_cover(1.0);
  const auto q = static_q(5.0, 5.0, 1.5);
  const Tube tube = inst.make_tube(q);
  // independent value: the deepest sampled boundary point inside O
  double want = inst.r_d - 1.5;
  for (const auto& s : cover.samples()) {
    const Eigen::VectorXd x = boundary_point(tube, s.theta, s.lambda, s.tau);
    want = std::max(want, obstacle(std::span<const double>(x.data(), 2)));
  }
  auto v = sop_objective(inst, cover, q);
  CHECK(want > 0.4);
  CHECK(v.eta == doctest::Approx(want).epsilon(1e-12));
  CHECK(v.worst.kind == ConstraintId::Kind::Robustness);
}

TEST_CASE("sop objective: affine in r_d") {
  auto inst = static_instance("G[0,1] Big", {{"Big", Predicate::ball({5.0, 5.0}, 100.0)}}, 1.0);
  const auto cover = small_cover(1.0);
  const auto q = static_q(5.0, 5.0, 1.0);
  const double a = sop_objective(inst, cover, q).eta;
  inst.r_d += 0.125;
  const double b = sop_objective(inst, cover, q).eta;
  CHECK(b - a == 0.125);
}

TEST_CASE("sop: OpenMP evaluation equals the serial reference") {
  auto inst = instance("F[0,6] T & G[0,6] !O",
                       {{"T", Predicate::box_bounds(std::vector{7.0, 7.0}, std::vector{10.0, 10.0})},
                        {"O", Predicate::box_bounds(std::vector{4.0, 1.0}, std::vector{6.0, 3.0})}},
                       6.0);
  SopProblem p(inst, small_cover(6.0, 12, 3, 40));
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> q(inst.coefficient_count());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = std::uniform_real_distribution<double>(inst.coeff_lo[i], inst.coeff_hi[i])(rng);
    const auto ref = p.evaluate_serial(q);
    for (int w : {1, 2, 3, 8}) {
      p.set_workers(w);
      const auto v = p.evaluate(q);
      CHECK(v.eta == ref.eta);
      CHECK(v.worst == ref.worst);
    }
  }
}

TEST_CASE("solver: reach task is feasible and validated on a finer grid") {
  auto inst = instance("F[0,6] T", {{"T", Predicate::box({7.0, 7.0}, 2.5)}}, 6.0);
  pin_start(inst, std::vector{2.0, 2.0});
  CoverSpec cs;
  cs.n = 2;
  cs.tf = 6.0;
  cs.theta_counts = {8};
  cs.lambda_count = 2;
  cs.tau_count = 30;
  cs.lambda_boundary = true;
  SolverOptions o;
  o.max_evaluations = 1500;
  const auto res = solve_sop(inst, cs, o);
  CHECK(res.eta_star <= 0.0);
  CHECK(res.certificate_ok == verify_certificate(res.eta_star, res.lipschitz.combined, res.epsilon));
  if (res.certificate_ok) {
    const auto fine = build_cover(cs).refined(10);
    CHECK(sop_objective(inst, fine, res.q).eta <= 0.0);
  }
}

TEST_CASE("solver: contradictory task stays infeasible") {
  auto inst = instance("F[0,1] T & G[0,1] !T", {{"T", Predicate::box({5.0, 5.0}, 2.0)}}, 1.0);
  CoverSpec cs;
  cs.n = 2;
  cs.tf = 1.0;
  cs.theta_counts = {6};
  cs.lambda_count = 2;
  cs.tau_count = 10;
  SolverOptions o;
  o.max_evaluations = 600;
  o.certificate = CertificateMode::Optimization;
  const auto res = solve_sop(inst, cs, o);
  CHECK(res.eta_star > 0.0);
  CHECK_FALSE(res.certificate_ok);
}

TEST_CASE("solver: fixed seed is reproducible") {
  auto inst = instance("F[0,4] T & G[0,4] !O",
                       {{"T", Predicate::box({8.0, 8.0}, 1.5)}, {"O", Predicate::box({5.0, 5.0}, 1.0)}},
                       4.0);
  pin_start(inst, std::vector{1.0, 1.0});
  CoverSpec cs;
  cs.n = 2;
  cs.tf = 4.0;
  cs.theta_counts = {8};
  cs.lambda_count = 2;
  cs.tau_count = 20;
  SolverOptions o;
  o.max_evaluations = 800;
  o.certificate = CertificateMode::Optimization;
  o.seed = 42;
  const auto a = solve_sop(inst, cs, o);
  o.workers = 3;
  const auto b = solve_sop(inst, cs, o);
  CHECK(a.q == b.q);
  CHECK(a.eta_star == b.eta_star);
  CHECK(a.diagnostics.evaluations == b.diagnostics.evaluations);
}

TEST_CASE("solver: enlarging the box with a warm start never raises eta") {
  auto inst = instance("F[0,4] T & G[0,4] !O",
                       {{"T", Predicate::box({8.0, 8.0}, 1.5)}, {"O", Predicate::box({5.0, 5.0}, 1.0)}},
                       4.0);
  pin_start(inst, std::vector{1.0, 1.0});
  // a tight box first
  auto tight = inst;
  for (std::size_t i = 0; i < tight.coeff_lo.size(); ++i) {
    const double mid = 0.5 * (tight.coeff_lo[i] + tight.coeff_hi[i]);
    tight.coeff_lo[i] = std::max(tight.coeff_lo[i], mid - 2.0);
    tight.coeff_hi[i] = std::min(tight.coeff_hi[i], mid + 2.0);
  }
  CoverSpec cs;
  cs.n = 2;
  cs.tf = 4.0;
  cs.theta_counts = {8};
  cs.lambda_count = 2;
  cs.tau_count = 20;
  SolverOptions o;
  o.max_evaluations = 600;
  o.certificate = CertificateMode::Optimization;
  const auto first = solve_sop(tight, cs, o);
  o.initial_q = first.q;
  const auto second = solve_sop(inst, cs, o);
  CHECK(second.eta_star <= first.eta_star);
}

TEST_CASE("finer cover at fixed coefficients") {
  auto inst = instance("F[0,6] T & G[0,6] !O",
                       {{"T", Predicate::box({8.5, 8.5}, 1.5)}, {"O", Predicate::box({5.0, 2.0}, 1.0)}},
                       6.0);
  const auto coarse = small_cover(6.0, 6, 2, 15);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> q(inst.coefficient_count());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = std::uniform_real_distribution<double>(inst.coeff_lo[i], inst.coeff_hi[i])(rng);
    for (std::size_t i = 2 * 5; i < q.size(); ++i) q[i] = std::max(q[i], 0.3);
    const auto tube = inst.make_tube(q);
    const double L = combined_lipschitz(tube, inst.formula).combined;
    const auto fine = coarse.refined(4);
    const double ec = sop_objective(inst, coarse, q).eta;
    const double ef = sop_objective(inst, fine, q).eta;
    CHECK(ef >= ec - L * (coarse.epsilon() - fine.epsilon()));
  }
}

TEST_CASE("waypoint extraction") {
  PredicateTable t{{"S", Predicate::box({1.0, 1.0}, 0.5)},
                   {"A", Predicate::box({5.0, 5.0}, 1.0)},
                   {"B", Predicate::box({8.0, 2.0}, 1.0)}};
  auto f = bind_predicates(parse("S => F[2,4] A & F[6,8] B"), t);
  auto w = extract_waypoints(f);
  REQUIRE(w.size() == 2);
  CHECK(w[0].t == 3.0);
  CHECK(w[0].point == std::vector{5.0, 5.0});
  CHECK(w[1].t == 7.0);
  CHECK(extract_start(f) == std::vector{1.0, 1.0});
}
