#include "abelgas/ad_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "abelgas/kinetics.hpp"

namespace abelgas {

double EnvelopePair::lower_X1(double t) const {
    return explicit_X1(t, X1_0, growth_exponent) - gamma;
}

double EnvelopePair::upper_X1(double t) const {
    return explicit_X1(t, X1_0, growth_exponent) + gamma;
}

namespace {

// Shared by rhs_full and rhs_subsystem so the two agree bit-for-bit.
inline double dX1_of(double mu1_val, double X1, const ModelParams& p) {
    return (mu1_val - p.alpha * p.D) * X1;
}
inline double dS1_of(double mu1_val, double X1, double S1, const ModelParams& p) {
    return p.D * (p.S1in - S1) - p.k1 * mu1_val * X1;
}

// Monod fraction without the nonnegativity gate, for envelope trajectories
// that may wander outside the state cone. Guards only the pole.
inline double monod_fraction(double S1, double K_S1) {
    const double den = S1 + K_S1;
    if (std::abs(den) < 1e-12)
        throw std::domain_error("substrate envelope hit the S1 = -K_S1 pole");
    return S1 / den;
}

}  // namespace

AdState rhs_full(const AdState& s, const ModelParams& p) {
    const double mu1_val = monod(s.S1, p.mu1max, p.K_S1);
    const double mu2_val = haldane(s.S2, p.mu2max, p.K_S2, p.K_I2);
    AdState d;
    d.X1 = dX1_of(mu1_val, s.X1, p);
    d.X2 = (mu2_val - p.alpha * p.D) * s.X2;
    d.S1 = dS1_of(mu1_val, s.X1, s.S1, p);
    d.S2 = p.D * (p.S2in - s.S2) + p.k2 * mu1_val * s.X1 - p.k3 * mu2_val * s.X2;
    d.A = p.D * (p.A_in - s.A);
    d.C = p.D * (p.C_in - s.C) + p.k4 * mu1_val * s.X1 + p.k5 * mu2_val * s.X2 -
          p.K_La * (s.C + s.S2 - s.A - p.B);
    d.F_M = p.k6 * mu2_val * s.X2;
    return d;
}

void rhs_subsystem(double X1, double S1, const ModelParams& p, double& dX1,
                   double& dS1) {
    const double mu1_val = monod(S1, p.mu1max, p.K_S1);
    dX1 = dX1_of(mu1_val, X1, p);
    dS1 = dS1_of(mu1_val, X1, S1, p);
}

AdState trivial_equilibrium(const ModelParams& p) {
    AdState s;
    s.X1 = 0;
    s.X2 = 0;
    s.S1 = p.S1in;
    s.S2 = p.S2in;
    s.A = p.A_in;
    s.C = p.C_in;
    s.F_M = 0;
    return s;
}

double trivial_equilibrium_carbon_residual(const ModelParams& p) {
    return -p.K_La * (p.C_in + p.S2in - p.A_in - p.B);
}

double washout_exponent(const ModelParams& p) {
    return p.mu1max * p.S1in / (p.S1in + p.K_S1) - p.alpha * p.D;
}

double explicit_X1(double t, double X1_0, double m) {
    return X1_0 * std::exp(m * t);
}

EnvelopePair make_envelopes(double X1_0, double gamma, const ModelParams& p) {
    if (!(gamma > 0))
        throw std::invalid_argument("make_envelopes: gamma must be > 0");
    EnvelopePair env;
    env.X1_0 = X1_0;
    env.gamma = gamma;
    env.growth_exponent = washout_exponent(p);
    return env;
}

double rhs_upper_S1(double t, double S1_up, const EnvelopePair& env,
                    const ModelParams& p) {
    const double frac = monod_fraction(S1_up, p.K_S1);
    return p.D * (p.S1in - S1_up) -
           p.k1 * p.mu1max * frac * env.lower_X1(t);
}

double rhs_lower_S1(double t, double S1_lo, const EnvelopePair& env,
                    const ModelParams& p) {
    const double frac = monod_fraction(S1_lo, p.K_S1);
    return p.D * (p.S1in - S1_lo) -
           p.k1 * p.mu1max * frac * env.upper_X1(t);
}

namespace {

// Growth rate net of dilution, tolerant of any finite S1 (band endpoints are
// trajectory values, not states).
inline double beta_of(double S1, const ModelParams& p) {
    const double den = S1 + p.K_S1;
    return p.mu1max * S1 / den - p.alpha * p.D;
}

inline double G_of(double t, double X1, double S1, const ModelParams& p) {
    (void)t;
    const double den = S1 + p.K_S1;
    return p.D * (p.S1in - S1) - p.k1 * p.mu1max * (S1 / den) * X1;
}

}  // namespace

Def2Report check_lower_upper(const CandidateEnvelopes& cand,
                             const ModelParams& p, double tol) {
    const std::size_t n = cand.t.size();
    if (n < 3)
        throw std::invalid_argument(
            "check_lower_upper: need at least 3 grid points for differencing");
    if (cand.x1_lower.size() != n || cand.x1_upper.size() != n ||
        cand.s1_upper.size() != n || cand.s1_lower.size() != n)
        throw std::invalid_argument(
            "check_lower_upper: trajectory lengths do not match the grid");

    Def2Report rep;
    rep.points_checked = n;

    // Degenerate zero-margin envelopes: ordering holds with equality and the
    // differential inequalities carry no information.
    double max_gap = 0;
    for (std::size_t i = 0; i < n; ++i)
        max_gap = std::max(max_gap,
                           std::abs(cand.x1_upper[i] - cand.x1_lower[i]));
    if (max_gap <= tol) rep.boundary_case = true;

    auto deriv = [&](const std::vector<double>& y, std::size_t i) {
        const double hl = cand.t[i] - cand.t[i - 1];
        const double hr = cand.t[i + 1] - cand.t[i];
        // three-point formula, exact for quadratics on nonuniform grids
        return (y[i + 1] * hl * hl - y[i - 1] * hr * hr +
                y[i] * (hr * hr - hl * hl)) /
               (hl * hr * (hl + hr));
    };

    auto report = [&](std::size_t i, const char* cond, double mag) {
        rep.violations.push_back({i, cond, mag});
    };

    for (std::size_t i = 0; i < n; ++i) {
        const double t = cand.t[i];
        const double xl = cand.x1_lower[i], xu = cand.x1_upper[i];
        const double su = cand.s1_upper[i], sl = cand.s1_lower[i];

        if (xl > xu + tol) report(i, "ordering X1_lower <= X1_upper", xl - xu);
        if (su > sl + tol)
            report(i, "ordering S1_upper <= S1_lower (reverse order)", su - sl);

        // differential inequalities need a central difference; the grid
        // endpoints only carry the ordering and sandwich checks
        if (i == 0 || i == n - 1) continue;

        const double s_min = std::min(su, sl), s_max = std::max(su, sl);
        const double dxl = deriv(cand.x1_lower, i);
        const double dxu = deriv(cand.x1_upper, i);
        const double dsu = deriv(cand.s1_upper, i);
        const double dsl = deriv(cand.s1_lower, i);

        if (!rep.boundary_case) {
            // F(t, X, S) = (mu1(S) - alpha D) X is monotone in S through
            // beta; extremes sit at the band endpoints.
            double worst_low = -1e300, worst_up = 1e300;
            for (double S : {s_min, s_max}) {
                const double F_low = beta_of(S, p) * xl;
                const double F_up = beta_of(S, p) * xu;
                worst_low = std::max(worst_low, dxl - F_low);
                worst_up = std::min(worst_up, dxu - F_up);
            }
            if (worst_low > tol) report(i, "lower X1 inequality", worst_low);
            if (worst_up < -tol) report(i, "upper X1 inequality", -worst_up);

            // G is monotone in X1; the reverse-order pair takes the opposite
            // biomass extreme in each inequality.
            double worst_slo = -1e300, worst_sup = 1e300;
            for (double X : {xl, xu}) {
                worst_slo = std::max(worst_slo, dsl - G_of(t, X, sl, p));
                worst_sup = std::min(worst_sup, dsu - G_of(t, X, su, p));
            }
            if (worst_slo > tol)
                report(i, "lower S1 inequality (reverse order)", worst_slo);
            if (worst_sup < -tol)
                report(i, "upper S1 inequality (reverse order)", -worst_sup);
        }
    }

    // Initial-condition sandwiches.
    if (cand.x1_lower.front() > cand.c1 + tol ||
        cand.c1 > cand.x1_upper.front() + tol)
        report(0, "initial sandwich X1_lower(0) <= c1 <= X1_upper(0)",
               std::max(cand.x1_lower.front() - cand.c1,
                        cand.c1 - cand.x1_upper.front()));
    if (cand.s1_upper.front() > cand.c2 + tol ||
        cand.c2 > cand.s1_lower.front() + tol)
        report(0, "initial sandwich S1_upper(0) <= c2 <= S1_lower(0)",
               std::max(cand.s1_upper.front() - cand.c2,
                        cand.c2 - cand.s1_lower.front()));

    return rep;
}

}  // namespace abelgas
