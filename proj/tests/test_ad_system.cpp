#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "abelgas/ad_system.hpp"
#include "abelgas/integrator.hpp"
#include "abelgas/model.hpp"
#include "oracles.hpp"

using namespace abelgas;

namespace {
std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}
}  // namespace

TEST_CASE("trivial equilibrium kills every balance except carbon") {
    const ModelParams p = default_params();
    const AdState eq = trivial_equilibrium(p);
    CHECK(eq.X1 == 0.0);
    CHECK(eq.S1 == p.S1in);
    const AdState d = rhs_full(eq, p);
    CHECK(d.X1 == 0.0);
    CHECK(d.X2 == 0.0);
    CHECK(d.S1 == 0.0);
    CHECK(d.S2 == 0.0);
    CHECK(d.A == 0.0);
    CHECK(d.F_M == 0.0);
    // the carbon balance keeps a residual unless the inflows cancel
    CHECK(d.C == doctest::Approx(trivial_equilibrium_carbon_residual(p))
                     .epsilon(1e-14));
    CHECK(trivial_equilibrium_carbon_residual(p) ==
          doctest::Approx(-p.K_La * (p.C_in + p.S2in - p.A_in - p.B))
              .epsilon(1e-14));

    ModelParams balanced = p;
    balanced.B = balanced.C_in + balanced.S2in - balanced.A_in;  // = 5
    CHECK(rhs_full(trivial_equilibrium(balanced), balanced).C ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("methane production vanishes without methanogens") {
    const ModelParams p = default_params();
    AdState s;
    s.S1 = 3.0;
    s.S2 = 7.0;
    s.A = 11.0;
    s.C = 13.0;
    CHECK(rhs_full(s, p).F_M == 0.0);
}

TEST_CASE("frozen derivative values at the calibrated parameters") {
    const ModelParams p = default_params();
    AdState s;
    s.X1 = 1.0;
    s.S1 = 10.0;
    s.A = p.A_in;
    s.C = p.C_in;
    // mu1(10) - alpha D = m
    CHECK(rhs_full(s, p).X1 ==
          doctest::Approx(0.34548642533936651584).epsilon(1e-14));

    double dX1 = 0, dS1 = 0;
    rhs_subsystem(0.1, 10.0, p, dX1, dS1);
    CHECK(dX1 == doctest::Approx(0.034548642533936652).epsilon(1e-13));
    rhs_subsystem(0.0, 5.0, p, dX1, dS1);
    CHECK(dX1 == 0.0);
    CHECK(dS1 == doctest::Approx(0.395 * 5.0).epsilon(1e-15));
    rhs_subsystem(0.0, p.S1in, p, dX1, dS1);
    CHECK(dX1 == 0.0);
    CHECK(dS1 == 0.0);  // fixed point
}

TEST_CASE("subsystem and full system agree bit-for-bit on X1 and S1") {
    const ModelParams p = default_params();
    oracles::Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        AdState s;
        s.X1 = rng.uniform(0, 3);
        s.X2 = 0.0;
        s.S1 = rng.uniform(0, 30);
        s.S2 = rng.uniform(0, 10);
        s.A = rng.uniform(0, 80);
        s.C = rng.uniform(0, 80);
        const AdState d = rhs_full(s, p);
        double dX1 = 0, dS1 = 0;
        rhs_subsystem(s.X1, s.S1, p, dX1, dS1);
        CHECK(d.X1 == dX1);  // exact: the same expressions evaluate both
        CHECK(d.S1 == dS1);
    }
}

TEST_CASE("washout exponent") {
    const ModelParams p = default_params();
    CHECK(washout_exponent(p) ==
          doctest::Approx(0.34548642533936651584).epsilon(1e-14));
    ModelParams q = p;
    q.alpha = 0.0;
    CHECK(washout_exponent(q) ==
          doctest::Approx(0.54298642533936651584).epsilon(1e-14));
    // balance point mu1(S1in) = alpha D
    ModelParams r = p;
    r.alpha = 1.0;
    r.D = 0.54298642533936651584;
    CHECK(washout_exponent(r) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("explicit X1 solution") {
    CHECK(explicit_X1(0.0, 0.37, 1.1) == 0.37);
    CHECK(explicit_X1(5.0, 0.0, 0.7) == 0.0);
    CHECK(explicit_X1(1.0, 0.1, 0.34548642) ==
          doctest::Approx(0.14126769068729966777).epsilon(1e-14));

    // satisfies dX/dt = m X: O(h^2) central differences against m X
    const double m = 0.34548642533936651584;
    for (double t : linspace(0.0, 8.0, 17)) {
        const double h = 1e-5;
        const double d =
            (explicit_X1(t + h, 0.1, m) - explicit_X1(t - h, 0.1, m)) / (2 * h);
        CHECK(d == doctest::Approx(m * explicit_X1(t, 0.1, m)).epsilon(1e-9));
    }
}

TEST_CASE("envelopes are 2 gamma apart and reject gamma <= 0") {
    const ModelParams p = default_params();
    const EnvelopePair env = make_envelopes(0.1, 1.0, p);
    for (double t : linspace(0, 10, 11)) {
        CHECK(env.upper_X1(t) - env.lower_X1(t) ==
              doctest::Approx(2.0).epsilon(1e-14));
    }
    CHECK(env.lower_X1(0.0) == doctest::Approx(-0.9).epsilon(1e-14));
    CHECK(env.upper_X1(0.0) == doctest::Approx(1.1).epsilon(1e-14));
    CHECK_THROWS_AS(make_envelopes(0.1, 0.0, p), std::invalid_argument);
    CHECK_THROWS_AS(make_envelopes(0.1, -1.0, p), std::invalid_argument);
}

TEST_CASE("upper substrate envelope ODE frozen values") {
    const ModelParams p = default_params();
    const EnvelopePair env = make_envelopes(0.0, 1.0, p);
    // at zero substrate only dilution remains
    CHECK(rhs_upper_S1(0.0, 0.0, env, p) ==
          doctest::Approx(p.D * p.S1in).epsilon(1e-14));
    // washout start: -(k1 mu1max 10/22.1) * (0 - 1)
    CHECK(rhs_upper_S1(0.0, 10.0, env, p) ==
          doctest::Approx(12.597285067873303167).epsilon(1e-13));

    // bracket cancellation when the lower envelope crosses zero
    const EnvelopePair env2 = make_envelopes(1.0, 1.0, p);  // X1(0) = gamma
    CHECK(rhs_upper_S1(0.0, 4.0, env2, p) ==
          doctest::Approx(p.D * (p.S1in - 4.0)).epsilon(1e-13));

    CHECK_THROWS_AS(rhs_upper_S1(0.0, -p.K_S1, env, p), std::domain_error);
}

TEST_CASE("alkalinity follows its linear closed form") {
    const ModelParams p = default_params();
    IvpProblem prob;
    prob.dimension = 7;
    prob.x0 = 0;
    prob.x_end = 20;
    const double A0 = 40.0;
    prob.y0 = {0.1, 0.1, 10.0, 5.0, A0, 50.0, 0.0};
    prob.rhs = [&p](double, std::span<const double> y, std::span<double> dy) {
        AdState s{y[0], y[1], y[2], y[3], y[4], y[5], y[6]};
        const AdState d = rhs_full(s, p);
        dy[0] = d.X1; dy[1] = d.X2; dy[2] = d.S1; dy[3] = d.S2;
        dy[4] = d.A; dy[5] = d.C; dy[6] = d.F_M;
    };
    const auto grid = linspace(0, 20, 101);
    const auto sol = solve_ivp(prob, grid);
    REQUIRE(sol.status == SolveStatus::complete);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double expected = p.A_in + (A0 - p.A_in) * std::exp(-p.D * grid[i]);
        CHECK(sol.values[i][4] == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("states stay essentially nonnegative over 20 days") {
    const ModelParams p = default_params();
    IvpProblem prob;
    prob.dimension = 7;
    prob.x0 = 0;
    prob.x_end = 20;
    prob.y0 = {0.1, 0.1, 10.0, 5.0, 40.0, 50.0, 0.0};
    prob.rhs = [&p](double, std::span<const double> y, std::span<double> dy) {
        AdState s{y[0], y[1], y[2], y[3], y[4], y[5], y[6]};
        const AdState d = rhs_full(s, p);
        dy[0] = d.X1; dy[1] = d.X2; dy[2] = d.S1; dy[3] = d.S2;
        dy[4] = d.A; dy[5] = d.C; dy[6] = d.F_M;
    };
    const auto grid = linspace(0, 20, 401);
    const auto sol = solve_ivp(prob, grid);
    REQUIRE(sol.status == SolveStatus::complete);
    for (const auto& row : sol.values) {
        CHECK(row[0] >= -1e-9);  // X1
        CHECK(row[1] >= -1e-9);  // X2
        CHECK(row[2] >= -1e-9);  // S1
        CHECK(row[3] >= -1e-9);  // S2
        CHECK(row[6] >= -1e-9);  // F_M
    }
}

namespace {

// The window where the inequality checks genuinely hold: washout envelopes
// with a substrate band kept below the growth/dilution balance point.
CandidateEnvelopes build_window_candidates(const ModelParams& p, double gamma,
                                           double s_up0, double s_lo0,
                                           double t_end, int n) {
    const EnvelopePair env = make_envelopes(0.0, gamma, p);
    CandidateEnvelopes cand;
    cand.c1 = 0.0;
    cand.c2 = 1.0;
    for (int i = 0; i < n; ++i) cand.t.push_back(t_end * i / (n - 1));
    for (double t : cand.t) {
        cand.x1_lower.push_back(env.lower_X1(t));
        cand.x1_upper.push_back(env.upper_X1(t));
    }
    IvpProblem up;
    up.dimension = 1;
    up.x0 = 0;
    up.x_end = t_end;
    up.y0 = {s_up0};
    up.rhs = [&p, env](double t, std::span<const double> y, std::span<double> dy) {
        dy[0] = rhs_upper_S1(t, y[0], env, p);
    };
    const auto su = solve_ivp(up, cand.t);
    IvpProblem lo = up;
    lo.y0 = {s_lo0};
    lo.rhs = [&p, env](double t, std::span<const double> y, std::span<double> dy) {
        dy[0] = rhs_lower_S1(t, y[0], env, p);
    };
    const auto sl = solve_ivp(lo, cand.t);
    for (std::size_t i = 0; i < cand.t.size(); ++i) {
        cand.s1_upper.push_back(su.values[i][0]);
        cand.s1_lower.push_back(sl.values[i][0]);
    }
    return cand;
}

}  // namespace

TEST_CASE("constructed envelopes pass the lower/upper check on the window") {
    const ModelParams p = default_params();
    const auto cand = build_window_candidates(p, 1.0, 0.3, 2.3, 0.25, 251);
    const Def2Report rep = check_lower_upper(cand, p, 1e-6);
    CHECK(rep.points_checked == 251);
    CHECK_FALSE(rep.boundary_case);
    CHECK(rep.violations.empty());
}

TEST_CASE("swapped envelopes violate the ordering everywhere") {
    const ModelParams p = default_params();
    auto cand = build_window_candidates(p, 1.0, 0.3, 2.3, 0.25, 101);
    std::swap(cand.x1_lower, cand.x1_upper);
    const Def2Report rep = check_lower_upper(cand, p, 1e-6);
    std::size_t ordering_violations = 0;
    for (const auto& v : rep.violations)
        if (v.condition.find("ordering X1") != std::string::npos)
            ++ordering_violations;
    CHECK(ordering_violations == cand.t.size());
}

TEST_CASE("zero-margin envelopes are reported as the boundary case") {
    const ModelParams p = default_params();
    CandidateEnvelopes cand;
    cand.c1 = 0.1;
    cand.c2 = p.S1in;
    const double m = washout_exponent(p);
    for (int i = 0; i < 51; ++i) {
        const double t = 0.01 * i;
        cand.t.push_back(t);
        const double x = explicit_X1(t, 0.1, m);
        cand.x1_lower.push_back(x);
        cand.x1_upper.push_back(x);  // gamma = 0: envelopes coincide
        cand.s1_upper.push_back(p.S1in);
        cand.s1_lower.push_back(p.S1in);
    }
    const Def2Report rep = check_lower_upper(cand, p, 1e-6);
    CHECK(rep.boundary_case);
    CHECK(rep.violations.empty());  // ordering holds with equality
}

TEST_CASE("check_lower_upper needs at least three points") {
    const ModelParams p = default_params();
    CandidateEnvelopes cand;
    cand.t = {0.0, 1.0};
    cand.x1_lower = {0, 0};
    cand.x1_upper = {1, 1};
    cand.s1_upper = {1, 1};
    cand.s1_lower = {2, 2};
    CHECK_THROWS_AS(check_lower_upper(cand, p), std::invalid_argument);
}
