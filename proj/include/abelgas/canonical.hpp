#ifndef ABELGAS_CANONICAL_HPP
#define ABELGAS_CANONICAL_HPP

#include <functional>
#include <span>
#include <vector>

#include "abelgas/abel.hpp"
#include "abelgas/model.hpp"

namespace abelgas {

// Reduction of y' = f0 + f1 y + f2 y^2 + f3 y^3 to z' = z^3 + Phi(xi) via
// y = u z + v:
//   v  = -f2/(3 f3)
//   u  = exp( int (f1 - f2^2/(3 f3)) dx ),            u(anchor) = 1
//   xi = int f3 u^2 dx,                               xi(anchor) = 0
//   Phi = [f0 - f1 f2/(3 f3) + 2 f2^3/(27 f3^2) + (1/3) d/dx(f2/f3)] / (f3 u^3)
// With this normalization the residual z'(xi) - z^3 - Phi(xi) vanishes
// identically along any exact solution of the cubic.
struct CanonicalReduction {
    std::function<double(double)> u;          // of the original variable
    std::function<double(double)> v;
    std::function<double(double)> xi;
    std::function<double(double)> phi_at_x;   // Phi as a function of x
    std::function<double(double)> phi;        // Phi as a function of xi
    std::function<double(double)> varphi;     // the chosen forcing ansatz
    bool closed_form = false;                 // elementary washout fast path
    double exponent = 0;  // washout only: u = w^exponent
    double shift = 0;     // washout only: the constant v
    double interval_lo = 0, interval_hi = 0;
};

// Builds the reduction on [interval_lo, interval_hi] (anchored at the left
// endpoint). Integrals are evaluated by adaptive quadrature at tolerance
// 1e-10, except in the washout case (f2, f3 both const/x) where the closed
// forms are substituted. A root of f3 inside the interval makes the
// reduction singular; the error message carries its bracketed location.
CanonicalReduction reduce_to_canonical(const AbelCoefficients& coeffs,
                                       std::function<double(double)> varphi,
                                       double interval_lo, double interval_hi);

enum class ClosedFormCase { case1, case2 };

// A closed-form solution family member: V(t) and S1(t) = 1/V - K_S1 with its
// maximal validity interval around t = 0 and a sample of Abel-equation
// residuals. The residual sample is attached at construction so a formula
// that fails to solve the cubic is surfaced, never silently accepted.
struct ClosedFormSolution {
    ClosedFormCase case_tag = ClosedFormCase::case1;
    SignConvention convention = SignConvention::audited;
    AbelConstants constants;
    IntegrationConstants ic;

    std::function<double(double)> V_of_t;
    std::function<double(double)> S1_of_t;

    double domain_lo = 0, domain_hi = 0;  // radicand > 0 on (lo, hi), 0 inside
    std::vector<double> excluded_points;  // isolated zeros of V (S1 poles)

    std::vector<double> residual_sample_t;
    std::vector<double> residual_sample;  // relative Abel-equation residuals
    double max_sampled_residual = 0;
};

// Case 1 (varphi == 0). Requires washout constants (X1(0) = 0); the family
// only exists in that regime. audited: V = v + C1 e^{L t} /
// sqrt(C - 2 xi(t)) with L = b1_audited * m and xi(t) the rescaled variable
// including C2. paper_literal: the legacy logarithmic-radicand form with
// exponent b1 (requires C1 > 0).
ClosedFormSolution case1_solution(const AbelConstants& k,
                                  const IntegrationConstants& ic,
                                  SignConvention conv = SignConvention::audited);

// Case 2 (varphi == C0). audited: V = v + C1 e^{L t} e^{C0 xi} /
// sqrt(C - 2 W(xi)), W = expm1(2 C0 xi)/(2 C0); continuous in C0 and equal
// to Case 1 at C0 = 0. paper_literal: the legacy incomplete-gamma form;
// requires b1 != 0 and -b2 >= 0 (real branch).
ClosedFormSolution case2_solution(const AbelConstants& k,
                                  const IntegrationConstants& ic,
                                  SignConvention conv = SignConvention::audited);

// Max over the grid of |dV/dt - abel_rhs_time(t, V)| / (1 + |abel_rhs_time|),
// with dV/dt from Richardson-extrapolated central differences. All grid
// points must lie inside the solution's domain. The defect is measured
// against the audited cubic (the one consistent with the substrate ODE);
// the second overload lets the caller pick the right-hand side convention.
double verify_residual(const ClosedFormSolution& sol, const AbelConstants& k,
                       std::span<const double> grid);
double verify_residual(const ClosedFormSolution& sol, const AbelConstants& k,
                       std::span<const double> grid,
                       SignConvention rhs_convention);

// Solves for the radicand constant C such that V(0) = V0, holding the other
// integration constants fixed (bisection bracket plus Newton polish, absolute
// tolerance 1e-12 on V). Throws if V0 is outside the family's reachable range.
IntegrationConstants fit_radicand_constant(ClosedFormCase which,
                                           const AbelConstants& k,
                                           IntegrationConstants ic, double V0,
                                           SignConvention conv = SignConvention::audited);

}  // namespace abelgas

#endif
