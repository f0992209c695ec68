#include <catch2/catch.hpp>

#include <array>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "lnum/oracle.hpp"
#include "lnum/scenario.hpp"

using namespace lnum;
using namespace testutil;

namespace {

StaticProblem make_shared_link_problem(int K, double capacity, std::vector<UtilityFn> fns,
                                       double B) {
  Bundle b = build_database(K, capacity, std::move(fns), B);
  return StaticProblem(b.net, b.util);
}

// random enumerated-action problem over one or two parallel links
StaticProblem random_small_problem(Rng& rng, int K) {
  NetworkSpec spec;
  spec.num_nodes = 2;
  spec.links.push_back(Link{0, 1, LinkMode::PerClass});
  bool with_shared = rng.next_double() < 0.5;
  if (with_shared) spec.links.push_back(Link{0, 1, LinkMode::SharedFifo});
  for (int k = 0; k < K; ++k) spec.classes.push_back(TrafficClass{0, 1});

  int n_states = 1 + static_cast<int>(rng.next_double() * 2.0);
  StateComponent sc;
  double left = 1.0;
  for (int w = 0; w < n_states; ++w) {
    double p = (w + 1 == n_states) ? left : left * rng.uniform(0.2, 0.8);
    sc.probs.push_back(p);
    left -= p;
  }
  sc.values.assign(sc.probs.size(), 0.0);
  spec.states.push_back(sc);

  ActionComponent comp;
  int n_actions = 2 + static_cast<int>(rng.next_double() * 3.0);
  for (int a = 0; a < n_actions; ++a) {
    ActionChoice ch;
    for (int k = 0; k < K; ++k) {
      RateTerm t;
      t.link = 0;
      t.cls = k;
      t.state_comp = 0;
      for (int w = 0; w < n_states; ++w) t.per_level.push_back(rng.uniform(0.0, 1.2));
      ch.terms.push_back(std::move(t));
    }
    comp.choices.push_back(std::move(ch));
  }
  spec.actions.push_back(std::move(comp));
  if (with_shared) {
    RateTerm t;
    t.link = 1;
    t.cls = RateTerm::kShared;
    t.base = rng.uniform(0.1, 0.6);
    spec.background.push_back(t);
  }
  spec.rate_bound = 8.0;
  spec.size_bound = 1.0;
  spec.validate();

  UtilitySpec util(draw_utilities(K, 1.0, rng), 1.0);
  return StaticProblem(spec, util);
}

}  // namespace

TEST_CASE("simplex handles the basic outcome classes") {
  // bounded optimum: max x0 + x1 s.t. x0 + x1 <= 1, x0 <= 0.25
  LinProg lp;
  lp.add_var(1.0);
  lp.add_var(1.0);
  lp.add_row({{0, 1.0}, {1, 1.0}}, '<', 1.0);
  lp.add_row({{0, 1.0}}, '<', 0.25);
  LpResult r = lp_solve(lp);
  REQUIRE(r.status == LpResult::Status::Optimal);
  CHECK(r.objective == Approx(1.0));

  // infeasible: x0 >= 2 with x0 <= 1
  LinProg bad;
  bad.add_var(1.0);
  bad.add_row({{0, 1.0}}, '<', 1.0);
  bad.add_row({{0, 1.0}}, '>', 2.0);
  CHECK(lp_solve(bad).status == LpResult::Status::Infeasible);

  // unbounded: max x0 with only a lower bound
  LinProg open;
  open.add_var(1.0);
  open.add_row({{0, 1.0}}, '>', 1.0);
  CHECK(lp_solve(open).status == LpResult::Status::Unbounded);

  // equality + negative rhs normalization: -x0 = -0.4
  LinProg eq;
  eq.add_var(-1.0);
  eq.add_row({{0, -1.0}}, '=', -0.4);
  LpResult re = lp_solve(eq);
  REQUIRE(re.status == LpResult::Status::Optimal);
  CHECK(re.x[0] == Approx(0.4));
}

TEST_CASE("simplex agrees with vertex enumeration on random 2d polytopes") {
  Rng rng(777);
  for (int trial = 0; trial < 30; ++trial) {
    // max c.x over {x >= 0, a_i . x <= b_i} with a_i >= 0, b_i > 0
    const int m = 4;
    std::vector<std::array<double, 2>> rows(m);
    std::vector<double> rhs(m);
    LinProg lp;
    lp.add_var(rng.uniform(0.1, 2.0));
    lp.add_var(rng.uniform(0.1, 2.0));
    for (int i = 0; i < m; ++i) {
      rows[i] = {rng.uniform(0.1, 1.5), rng.uniform(0.1, 1.5)};
      rhs[i] = rng.uniform(0.2, 2.0);
      lp.add_row({{0, rows[i][0]}, {1, rows[i][1]}}, '<', rhs[i]);
    }
    LpResult r = lp_solve(lp);
    REQUIRE(r.status == LpResult::Status::Optimal);
    // enumerate candidate vertices: axis intercepts and row intersections
    auto feasible = [&](double x, double y) {
      if (x < -1e-9 || y < -1e-9) return false;
      for (int i = 0; i < m; ++i)
        if (rows[i][0] * x + rows[i][1] * y > rhs[i] + 1e-9) return false;
      return true;
    };
    double best = 0.0;  // origin
    auto consider = [&](double x, double y) {
      if (feasible(x, y)) best = std::max(best, lp.objective[0] * x + lp.objective[1] * y);
    };
    for (int i = 0; i < m; ++i) {
      consider(rhs[i] / rows[i][0], 0.0);
      consider(0.0, rhs[i] / rows[i][1]);
      for (int j = i + 1; j < m; ++j) {
        double det = rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0];
        if (std::abs(det) < 1e-12) continue;
        double x = (rhs[i] * rows[j][1] - rhs[j] * rows[i][1]) / det;
        double y = (rows[i][0] * rhs[j] - rows[j][0] * rhs[i]) / det;
        consider(x, y);
      }
    }
    CHECK(r.objective == Approx(best).margin(1e-7));
  }
}

TEST_CASE("closed-form optima reproduce") {
  // single class, capacity 1, f = sqrt(r), B = 2 -> r* = 1, OPT = 1
  auto p1 = make_shared_link_problem(1, 1.0, {UtilityFn{UtilityFamily::Sqrt, 1.0, 0.0}}, 2.0);
  OracleSolution s1 = p1.solve_opt();
  CHECK(s1.opt == Approx(1.0).margin(1e-5));
  CHECK(s1.r_star[0] == Approx(1.0).margin(1e-5));

  // linear corner: f1 = r, f2 = 2r sharing capacity 1 -> (0, 1), OPT = 2
  auto p2 = make_shared_link_problem(2, 1.0,
                                     {UtilityFn{UtilityFamily::Linear, 1.0, 0.0},
                                      UtilityFn{UtilityFamily::Linear, 2.0, 0.0}},
                                     1.0);
  OracleSolution s2 = p2.solve_opt();
  CHECK(s2.opt == Approx(2.0).margin(1e-5));
  CHECK(s2.r_star[0] == Approx(0.0).margin(1e-5));
  CHECK(s2.r_star[1] == Approx(1.0).margin(1e-5));

  // symmetric sqrt pair -> (1/2, 1/2), OPT = sqrt(2)
  auto p3 = make_shared_link_problem(2, 1.0,
                                     {UtilityFn{UtilityFamily::Sqrt, 1.0, 0.0},
                                      UtilityFn{UtilityFamily::Sqrt, 1.0, 0.0}},
                                     1.0);
  OracleSolution s3 = p3.solve_opt();
  CHECK(s3.opt == Approx(std::sqrt(2.0)).margin(1e-5));
  CHECK(s3.r_star[0] == Approx(0.5).margin(1e-4));
}

TEST_CASE("grid oracle agrees with the solver on the closed forms") {
  const double step = 0.01;
  auto check = [&](StaticProblem&& p) {
    OracleSolution sol = p.solve_opt();
    auto [r, v] = p.brute_force_opt(step);
    double slack = p.utility().lipschitz() * p.num_classes() * step + 1e-6;
    CHECK(sol.opt >= v - 1e-6);
    CHECK(sol.opt <= v + slack);
  };
  check(make_shared_link_problem(1, 1.0, {UtilityFn{UtilityFamily::Sqrt, 1.0, 0.0}}, 2.0));
  check(make_shared_link_problem(2, 1.0,
                                 {UtilityFn{UtilityFamily::Linear, 1.0, 0.0},
                                  UtilityFn{UtilityFamily::Linear, 2.0, 0.0}},
                                 1.0));
  check(make_shared_link_problem(2, 1.0,
                                 {UtilityFn{UtilityFamily::Sqrt, 1.0, 0.0},
                                  UtilityFn{UtilityFamily::Sqrt, 1.0, 0.0}},
                                 1.0));
}

TEST_CASE("grid oracle with a step larger than B returns the origin") {
  auto p = make_shared_link_problem(2, 1.0,
                                    {UtilityFn{UtilityFamily::Linear, 1.0, 0.0},
                                     UtilityFn{UtilityFamily::Linear, 2.0, 0.0}},
                                    1.0);
  auto [r, v] = p.brute_force_opt(1.5);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 0.0);
  CHECK(v == Approx(0.0));
  CHECK(v <= p.solve_opt().opt);
}

TEST_CASE("grid oracle rejects oversized grids") {
  auto p = make_shared_link_problem(2, 1.0,
                                    {UtilityFn{UtilityFamily::Linear, 1.0, 0.0},
                                     UtilityFn{UtilityFamily::Linear, 2.0, 0.0}},
                                    1.0);
  CHECK_THROWS_AS(p.brute_force_opt(1e-6), ResourceError);
}

TEST_CASE("slater slack closed forms") {
  auto p1 = make_shared_link_problem(1, 1.0, {UtilityFn{UtilityFamily::Linear, 1.0, 0.0}}, 2.0);
  CHECK(p1.slater_slack() == Approx(1.0).margin(2e-6));
  auto p2 = make_shared_link_problem(2, 1.0,
                                     {UtilityFn{UtilityFamily::Linear, 1.0, 0.0},
                                      UtilityFn{UtilityFamily::Linear, 1.0, 0.0}},
                                     1.0);
  CHECK(p2.slater_slack() == Approx(0.5).margin(2e-6));
  auto p4 = make_shared_link_problem(4, 2.0,
                                     std::vector<UtilityFn>(4, UtilityFn{UtilityFamily::Linear, 1.0, 0.0}),
                                     1.0);
  CHECK(p4.slater_slack() == Approx(0.5).margin(2e-6));
}

TEST_CASE("empty-interior problems are rejected at construction") {
  CHECK_THROWS_AS(
      make_shared_link_problem(1, 1e-9, {UtilityFn{UtilityFamily::Linear, 1.0, 0.0}}, 1.0),
      NonInteriorError);
}

TEST_CASE("capacity membership basics and the shared-link cut") {
  auto p = make_shared_link_problem(2, 1.0,
                                    {UtilityFn{UtilityFamily::Sqrt, 1.0, 0.0},
                                     UtilityFn{UtilityFamily::Sqrt, 1.0, 0.0}},
                                    1.0);
  CHECK(p.capacity_member({0.0, 0.0}));
  double eta = p.slater_slack();
  CHECK(p.capacity_member({eta, eta}));
  CHECK_FALSE(p.capacity_member({0.6, 0.6}));  // violates r1 + r2 <= 1
  CHECK(p.capacity_member({0.6, 0.39}));
}

TEST_CASE("membership is downward closed") {
  Rng rng(2718);
  StaticProblem p = random_small_problem(rng, 2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> r{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    if (!p.capacity_member(r)) continue;
    std::vector<double> smaller{r[0] * rng.next_double(), r[1] * rng.next_double()};
    CHECK(p.capacity_member(smaller));
  }
}

TEST_CASE("membership certificate returns valid mixture weights") {
  Rng rng(31415);
  StaticProblem p = random_small_problem(rng, 2);
  double eta = p.slater_slack();
  std::vector<double> cert;
  REQUIRE(p.capacity_member({eta / 2, eta / 2}, &cert));
  REQUIRE_FALSE(cert.empty());
  double sum = 0.0;
  for (double w : cert) {
    CHECK(w >= -1e-9);
    sum += w;
  }
  CHECK(sum == Approx(1.0).margin(1e-6));  // per-state groups sum to the state probs
}

TEST_CASE("frank-wolfe objective is nondecreasing with exact line search") {
  auto p = make_shared_link_problem(3, 1.2,
                                    {UtilityFn{UtilityFamily::Sqrt, 2.0, 0.5},
                                     UtilityFn{UtilityFamily::Log, 2.0, 1.0},
                                     UtilityFn{UtilityFamily::Linear, 1.5, 0.0}},
                                    1.0);
  std::vector<double> hist;
  p.solve_opt(1e-6, 100000, &hist);
  REQUIRE(hist.size() >= 2);
  for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] >= hist[i - 1] - 1e-9);
}

TEST_CASE("solver matches the grid oracle on random small instances") {
  Rng rng(90210);
  const double step = 0.02;
  for (int trial = 0; trial < 3; ++trial) {
    int K = 1 + static_cast<int>(rng.next_double() * 3.0);
    StaticProblem p = random_small_problem(rng, K);
    OracleSolution sol = p.solve_opt();
    auto [r, v] = p.brute_force_opt(step);
    double slack = p.utility().lipschitz() * K * step + 1e-6;
    CHECK(sol.opt >= v - 1e-6);
    CHECK(sol.opt <= v + slack);
  }
}

TEST_CASE("database greedy subproblem agrees with the LP path") {
  // same region expressed twice: once as the single shared link (greedy
  // path), once with an extra no-op action component that disables the
  // shortcut and routes through the LP
  std::vector<UtilityFn> fns{UtilityFn{UtilityFamily::Sqrt, 1.3, 0.4},
                             UtilityFn{UtilityFamily::Linear, 0.9, 0.0},
                             UtilityFn{UtilityFamily::Log, 1.1, 0.8}};
  Bundle fast = build_database(3, 1.0, fns, 1.0);
  Bundle slow = build_database(3, 1.0, fns, 1.0);
  ActionComponent noop;
  noop.choices.push_back(ActionChoice{});
  noop.choices.push_back(ActionChoice{});
  slow.net.actions.push_back(noop);
  slow.net.validate();
  StaticProblem pf(fast.net, fast.util);
  StaticProblem ps(slow.net, slow.util);
  Rng rng(64);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<double> g{rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
    auto [rf, vf] = pf.linear_max(g);
    auto [rs, vs] = ps.linear_max(g);
    CHECK(vf == Approx(vs).margin(1e-7));
  }
  CHECK(pf.solve_opt().opt == Approx(ps.solve_opt().opt).margin(1e-5));
}

TEST_CASE("bipartite greedy: exact on complete connectivity, lower bound otherwise") {
  Rng rng(1001);
  // complete bipartite: greedy equals the LP
  Bundle complete = build_job_scheduling(3, 3, 3.0, 1.0, 1.0, 5, 1.0, 0.0, 1);
  StaticProblem pc(complete.net, complete.util);
  std::vector<std::vector<int>> conn{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
  std::vector<double> caps{1.0, 1.0, 1.0};
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> g{rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
    double greedy = greedy_bipartite_linear_max(g, conn, caps, 1.0);
    auto [r, lp] = pc.linear_max(g);
    CHECK(greedy == Approx(lp).margin(1e-7));
  }
  // partial connectivity: greedy never exceeds the LP
  Bundle partial = build_job_scheduling(3, 4, 2.0, 0.5, 1.5, 11, 1.0, 0.0, 5);
  StaticProblem pp(partial.net, partial.util);
  std::vector<std::vector<int>> conn2;
  std::vector<double> caps2(4, 1.0);
  for (int k = 0; k < 3; ++k) {
    std::vector<int> row;
    for (int l = 0; l < partial.net.num_links(); ++l) {
      const Link& ln = partial.net.links[static_cast<std::size_t>(l)];
      if (ln.mode == LinkMode::PerClass && ln.from == k) row.push_back(ln.to - 3);
    }
    conn2.push_back(row);
  }
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> g{rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
    double greedy = greedy_bipartite_linear_max(g, conn2, caps2, 1.0);
    auto [r, lp] = pp.linear_max(g);
    CHECK(greedy <= lp + 1e-7);
  }
}
