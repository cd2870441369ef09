#ifndef ABELGAS_INTEGRATOR_HPP
#define ABELGAS_INTEGRATOR_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace abelgas {

/** An explicit initial value problem y' = f(x, y). */
struct IvpProblem {
    /** Number of components in the state vector. */
    int dimension = 1;
    /** Derivative function; writes f(x, y) into the last argument. */
    std::function<void(double x, std::span<const double> y,
                       std::span<double> dydx)>
        rhs;
    /** Initial point. */
    double x0 = 0;
    std::vector<double> y0;
    /** End of the integration interval; may be smaller than x0. */
    double x_end = 1;
    /** Local error tolerances, both strictly positive. */
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    /** Step budget before giving up. */
    long max_steps = 1000000;
};

enum class SolveStatus {
    complete,
    step_size_underflow,   // expected near a finite-time blow-up or domain edge
    max_steps_exceeded,
    non_finite_derivative,
};

const char* to_string(SolveStatus s);

struct Diagnostics {
    long n_steps = 0;
    long n_accepted = 0;
    long n_rejected = 0;
    long n_rhs_evals = 0;
    /** Largest accepted scaled local error estimate (<= 1 by construction). */
    double max_est_error = 0;
};

/** A time-indexed series of state vectors with provenance metadata. */
struct SolutionSeries {
    /** What the values are (column name in CSV output). */
    std::string name;
    /** Which solution route produced the series: one of full-system,
     * subsystem, upper-ode, abel-time, abel-w, case1, case2. */
    std::string route;
    /** Strictly monotone grid of independent-variable values. */
    std::vector<double> grid;
    /** One state vector per grid point. */
    std::vector<std::vector<double>> values;
    Diagnostics diagnostics;
    SolveStatus status = SolveStatus::complete;
    /** Last x the integrator reached (== x_end when status is complete). */
    double last_x = 0;
    /** Human-readable detail for non-complete outcomes. */
    std::string message;
};

/** Integrates the problem with an embedded Dormand-Prince 4(5) pair under
 * PI step-size control, filling the requested grid points from the built-in
 * fourth-order dense interpolant. The grid must lie within [x0, x_end]
 * (in the direction of integration) and be monotone. Identical inputs give
 * bit-identical output. */
SolutionSeries solve_ivp(const IvpProblem& p, std::span<const double> grid_request);

}  // namespace abelgas

#endif
