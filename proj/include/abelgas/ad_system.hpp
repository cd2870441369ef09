#ifndef ABELGAS_AD_SYSTEM_HPP
#define ABELGAS_AD_SYSTEM_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "abelgas/model.hpp"

namespace abelgas {

// Exponential biomass envelope pair built around X1(t) = X1(0) e^{m t}:
// upper = X1 + gamma, lower = X1 - gamma. The lower branch may go negative;
// it is only ever used inside the substrate envelope ODEs.
struct EnvelopePair {
    double X1_0 = 0;
    double gamma = 0;
    double growth_exponent = 0;  // m = mu1max S1in/(S1in+K_S1) - alpha D

    double lower_X1(double t) const;
    double upper_X1(double t) const;
};

// Right-hand side of the full seven-state model.
AdState rhs_full(const AdState& state, const ModelParams& p);

// Acidogenesis subsystem (X1, S1). Bit-identical to the matching components
// of rhs_full.
void rhs_subsystem(double X1, double S1, const ModelParams& p, double& dX1,
                   double& dS1);

// Washout fixed point: zero biomass, inflow concentrations everywhere.
AdState trivial_equilibrium(const ModelParams& p);

// Residual of the carbon balance at the trivial equilibrium,
// -K_La (C_in + S2in - A_in - B). Zero only when the inflows balance; the
// run report prints it rather than forcing it to zero.
double trivial_equilibrium_carbon_residual(const ModelParams& p);

double washout_exponent(const ModelParams& p);

// X1(0) e^{m t}: the subsystem solution with S1 frozen at S1in.
double explicit_X1(double t, double X1_0, double m);

EnvelopePair make_envelopes(double X1_0, double gamma, const ModelParams& p);

// Substrate envelope ODEs. The upper equation is driven by the lower
// biomass envelope and vice versa (the coupling is order reversing).
double rhs_upper_S1(double t, double S1_up, const EnvelopePair& env,
                    const ModelParams& p);
double rhs_lower_S1(double t, double S1_lo, const EnvelopePair& env,
                    const ModelParams& p);

// Candidate lower/upper trajectories sampled on a common grid, plus the
// initial values (c1 = X1(0), c2 = S1(0)) they are meant to bracket.
struct CandidateEnvelopes {
    std::vector<double> t;
    std::vector<double> x1_lower, x1_upper;
    std::vector<double> s1_upper, s1_lower;
    double c1 = 0;
    double c2 = 0;
};

struct Def2Violation {
    std::size_t index;
    std::string condition;
    double magnitude;
};

struct Def2Report {
    std::vector<Def2Violation> violations;
    bool boundary_case = false;  // degenerate zero-margin envelopes
    std::size_t points_checked = 0;
};

// Checks the four differential inequalities of the lower/upper solution
// definition (by central differencing of the candidates), the ordering
// conditions x1_lower <= x1_upper and s1_upper <= s1_lower, and the initial
// sandwiches. Quantified substrate/biomass arguments are evaluated at both
// band endpoints (the couplings are monotone). Requires >= 3 grid points.
Def2Report check_lower_upper(const CandidateEnvelopes& cand,
                             const ModelParams& p, double tol = 1e-6);

}  // namespace abelgas

#endif
