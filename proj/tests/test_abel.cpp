#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "abelgas/abel.hpp"
#include "abelgas/ad_system.hpp"
#include "abelgas/integrator.hpp"
#include "abelgas/model.hpp"
#include "oracles.hpp"

using namespace abelgas;

namespace {
AbelConstants table1_constants(double X1_0, double gamma) {
    return derive_constants(default_params(), X1_0, gamma,
                            IntegrationConstants{});
}
}  // namespace

TEST_CASE("derived constant block at the calibrated values") {
    const AbelConstants k = table1_constants(0.0, 1.0);
    CHECK(k.a1 == doctest::Approx(-8.7295).epsilon(1e-14));
    CHECK(k.a2 == 0.0);
    CHECK(k.a3 == doctest::Approx(-27.84).epsilon(1e-14));
    CHECK(k.a4 == 0.0);
    CHECK(k.a5 == doctest::Approx(-36.5695).epsilon(1e-14));
    CHECK(k.a5 == k.a1 + k.a3);  // exact arithmetic identity
    CHECK(k.m == doctest::Approx(0.34548642533936651584).epsilon(1e-14));
    // legacy closed-form exponent D/m - a5^2/(3 m a3)
    CHECK(k.b1 == doctest::Approx(47.489775911002934188).epsilon(1e-12));
    // audited exponent D/m + a5^2/(3 m K_S1 a3)
    CHECK(k.b1_audited ==
          doctest::Approx(-2.6869704377828384957).epsilon(1e-12));

    const AbelConstants kn = table1_constants(0.1, 1.0);
    CHECK(kn.a2 == doctest::Approx(2.784).epsilon(1e-14));
    CHECK(kn.a4 == doctest::Approx(-12.1 * 2.784).epsilon(1e-14));
    CHECK(kn.a4 == -kn.params.K_S1 * kn.a2);
    CHECK(kn.a3 < 0.0);
    CHECK(kn.a2 >= 0.0);
    CHECK(kn.a4 <= 0.0);
}

TEST_CASE("b2 follows the printed formula and flags b1 = 0") {
    IntegrationConstants ic;
    ic.C0 = 0.5;
    ic.C1 = 2.0;
    const AbelConstants k = derive_constants(default_params(), 0.0, 1.0, ic);
    REQUIRE(k.b2_defined);
    CHECK(k.b2 ==
          doctest::Approx(0.5 * k.a3 * 4.0 / (k.b1 * k.m)).epsilon(1e-13));
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(
        derive_constants(default_params(), 0.0, 0.0, IntegrationConstants{}),
        std::invalid_argument);
    ModelParams p = default_params();
    p.alpha = 1.0;
    p.D = 0.54298642533936651584;  // makes m = 0
    CHECK_THROWS_AS(derive_constants(p, 0.0, 1.0, IntegrationConstants{}),
                    std::domain_error);
}

TEST_CASE("variable change V = 1/(S1 + K_S1) and its inverse") {
    CHECK(substrate_to_V(10.0, 12.1) ==
          doctest::Approx(0.045248868778280542986).epsilon(1e-14));
    CHECK_THROWS_AS(substrate_to_V(-12.1, 12.1), std::domain_error);
    CHECK_THROWS_AS(V_to_substrate(0.0, 12.1), std::domain_error);

    oracles::Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const double S = rng.uniform(0, 60);
        const double K = rng.uniform(0.5, 30);
        CHECK(V_to_substrate(substrate_to_V(S, K), K) ==
              doctest::Approx(S).epsilon(1e-12));
    }
}

TEST_CASE("transform identity: the cubic matches the envelope ODE") {
    // d/dt [1/(S+K)] along the substrate envelope ODE equals the cubic at
    // V = 1/(S+K). This is the keystone identity of the module.
    const ModelParams p = default_params();
    const AbelConstants k = table1_constants(0.1, 1.0);
    const EnvelopePair env = make_envelopes(0.1, 1.0, p);
    oracles::Rng rng(101);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double t = rng.uniform(0, 10);
        const double S = rng.uniform(0.1, 30);
        const double V = substrate_to_V(S, p.K_S1);
        const double lhs = abel_rhs_time(t, V, k);
        const double rhs = -V * V * rhs_upper_S1(t, S, env, p);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("the literal convention matches its printed coefficients") {
    // spot value D V + (a1+a3) V^2 + (-a3) V^3 in the washout case
    const AbelConstants k = table1_constants(0.0, 1.0);
    const double V = 0.0452488;
    const double expected = 0.395 * V + (k.a1 + k.a3) * V * V +
                            (-k.a3) * V * V * V;
    CHECK(abel_rhs_time(3.7, V, k, SignConvention::paper_literal) ==
          doctest::Approx(expected).epsilon(1e-14));
    // and differs from the audited convention by (K_S1 - 1)(-a3) V^3
    const double gap = (k.params.K_S1 - 1.0) * (-k.a3) * V * V * V;
    CHECK(abel_rhs_time(3.7, V, k) - abel_rhs_time(3.7, V, k, SignConvention::paper_literal) ==
          doctest::Approx(gap).epsilon(1e-12));
}

TEST_CASE("V = 0 is an equilibrium of the cubic") {
    const AbelConstants k = table1_constants(0.1, 1.0);
    for (double t : {0.0, 1.5, 9.0}) {
        CHECK(abel_rhs_time(t, 0.0, k) == 0.0);
        CHECK(abel_rhs_w(std::exp(k.m * t), 0.0, k) == 0.0);
    }
}

TEST_CASE("algebrization identity d/dt = m w d/dw") {
    const AbelConstants k = table1_constants(0.1, 1.0);
    oracles::Rng rng(313);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double w = rng.uniform(0.05, 40.0);
        const double V = rng.uniform(-0.2, 0.2);
        const double lhs = k.m * w * abel_rhs_w(w, V, k);
        const double rhs = abel_rhs_time(std::log(w) / k.m, V, k);
        worst = std::max(worst,
                         std::abs(lhs - rhs) / std::max(1e-30, std::abs(rhs)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("w = 1 corresponds to t = 0 and w <= 0 is rejected") {
    const AbelConstants k = table1_constants(0.1, 1.0);
    CHECK(abel_rhs_w(1.0, 0.04, k) * k.m * 1.0 ==
          doctest::Approx(abel_rhs_time(0.0, 0.04, k)).epsilon(1e-14));
    CHECK_THROWS_AS(abel_rhs_w(0.0, 0.04, k), std::domain_error);
    CHECK_THROWS_AS(abel_rhs_w(-1.0, 0.04, k), std::domain_error);
}

TEST_CASE("integrating in t and in w gives the same trajectory") {
    const ModelParams p = default_params();
    const AbelConstants k = table1_constants(0.0, 1.0);
    const double V0 = substrate_to_V(10.0, p.K_S1);
    const double T = 10.0;

    std::vector<double> tgrid(101), wgrid(101);
    for (int i = 0; i <= 100; ++i) {
        tgrid[i] = T * i / 100.0;
        wgrid[i] = std::exp(k.m * tgrid[i]);
    }

    IvpProblem pt;
    pt.dimension = 1;
    pt.x0 = 0;
    pt.x_end = T;
    pt.y0 = {V0};
    pt.rel_tol = 1e-9;
    pt.abs_tol = 1e-12;
    pt.rhs = [&k](double t, std::span<const double> y, std::span<double> dy) {
        dy[0] = abel_rhs_time(t, y[0], k);
    };
    const auto st = solve_ivp(pt, tgrid);
    REQUIRE(st.status == SolveStatus::complete);

    IvpProblem pw = pt;
    pw.x0 = 1.0;
    pw.x_end = std::exp(k.m * T);
    pw.rhs = [&k](double w, std::span<const double> y, std::span<double> dy) {
        dy[0] = abel_rhs_w(w, y[0], k);
    };
    const auto sw = solve_ivp(pw, wgrid);
    REQUIRE(sw.status == SolveStatus::complete);

    double worst = 0;
    for (int i = 0; i <= 100; ++i)
        worst = std::max(worst, std::abs(st.values[i][0] - sw.values[i][0]));
    CHECK(worst <= 1e-6);
}

TEST_CASE("decaying washout (m < 0) integrates leftward in w") {
    ModelParams p = default_params();
    p.alpha = 1.0;  // CSTR at a high dilution rate: alpha D > mu1(S1in)
    p.D = 0.7;
    const AbelConstants k = derive_constants(p, 0.0, 1.0, IntegrationConstants{});
    REQUIRE(k.m < 0);
    const double V0 = substrate_to_V(10.0, p.K_S1);
    const double T = 5.0;

    std::vector<double> tgrid(51), wgrid(51);
    for (int i = 0; i <= 50; ++i) {
        tgrid[i] = T * i / 50.0;
        wgrid[i] = std::exp(k.m * tgrid[i]);  // decreasing: w in (e^{mT}, 1]
    }
    REQUIRE(wgrid.back() < 1.0);

    IvpProblem pt;
    pt.dimension = 1;
    pt.x0 = 0;
    pt.x_end = T;
    pt.y0 = {V0};
    pt.rhs = [&k](double t, std::span<const double> y, std::span<double> dy) {
        dy[0] = abel_rhs_time(t, y[0], k);
    };
    const auto st = solve_ivp(pt, tgrid);
    REQUIRE(st.status == SolveStatus::complete);

    IvpProblem pw = pt;
    pw.x0 = 1.0;
    pw.x_end = wgrid.back();
    pw.rhs = [&k](double w, std::span<const double> y, std::span<double> dy) {
        dy[0] = abel_rhs_w(w, y[0], k);
    };
    const auto sw = solve_ivp(pw, wgrid);
    REQUIRE(sw.status == SolveStatus::complete);

    for (int i = 0; i <= 50; ++i)
        CHECK(st.values[i][0] ==
              doctest::Approx(sw.values[i][0]).epsilon(1e-7));
}

TEST_CASE("hamiltonian change of variable facts") {
    std::vector<double> grid(1000);
    for (int i = 0; i < 1000; ++i) grid[i] = 10.0 * i / 999.0;

    const auto hc = hamiltonian_check(0.3455, grid);
    CHECK(hc.max_alpha_deviation <= 1e-12 * hc.scale);
    CHECK(hc.max_H_drift <= 1e-12 * hc.scale);

    // m = 0 degenerates to w == 1, alpha == 0, constant H
    const auto hc0 = hamiltonian_check(0.0, grid);
    CHECK(hc0.max_alpha_deviation == 0.0);
    CHECK(hc0.max_H_drift == 0.0);

    CHECK_THROWS_AS(hamiltonian_check(0.3, std::span<const double>{}),
                    std::invalid_argument);
}

TEST_CASE("coefficient functions expose both domains") {
    const AbelConstants k = table1_constants(0.1, 1.0);
    const auto ct = abel_coefficients(k, AbelCoefficients::Domain::time);
    const auto cw = abel_coefficients(k, AbelCoefficients::Domain::w);
    CHECK(ct.f0(2.0) == 0.0);
    CHECK(ct.f1(2.0) == k.params.D);
    const double t = 1.7, w = std::exp(k.m * t), V = 0.05;
    const double via_ct = ct.f1(t) * V + ct.f2(t) * V * V + ct.f3(t) * V * V * V;
    CHECK(via_ct == doctest::Approx(abel_rhs_time(t, V, k)).epsilon(1e-14));
    const double via_cw = cw.f1(w) * V + cw.f2(w) * V * V + cw.f3(w) * V * V * V;
    CHECK(via_cw == doctest::Approx(abel_rhs_w(w, V, k)).epsilon(1e-14));
}
