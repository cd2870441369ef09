#include "abelgas/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace abelgas {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0;
constexpr double c3 = 3.0 / 10.0;
constexpr double c4 = 4.0 / 5.0;
constexpr double c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
// Fifth-order weights (also the last row of the matrix: FSAL).
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Difference to the embedded fourth-order solution.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output weights for the fourth-order interpolant.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

// PI controller settings (stabilized step control).
constexpr double safe = 0.9;
constexpr double fac_min = 0.2;  // max shrink per step
constexpr double fac_max = 6.0;  // max growth per step
constexpr double beta = 0.08;
constexpr double expo1 = 0.2 - beta * 0.75;

constexpr double uround = std::numeric_limits<double>::epsilon();

struct Dense {
    // contd5 coefficients per component
    std::vector<double> r1, r2, r3, r4, r5;
    double x_old = 0, h = 0;

    double eval(int i, double x) const {
        const double theta = (x - x_old) / h;
        const double theta1 = 1.0 - theta;
        return r1[i] +
               theta * (r2[i] +
                        theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
    }
};

bool finite_all(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::complete: return "complete";
        case SolveStatus::step_size_underflow: return "step-size-underflow";
        case SolveStatus::max_steps_exceeded: return "max-steps-exceeded";
        case SolveStatus::non_finite_derivative: return "non-finite-derivative";
    }
    return "unknown";
}

SolutionSeries solve_ivp(const IvpProblem& p, std::span<const double> grid_request) {
    if (p.dimension <= 0 || static_cast<int>(p.y0.size()) != p.dimension)
        throw std::invalid_argument("solve_ivp: dimension/y0 mismatch");
    if (!(p.rel_tol > 0) || !(p.abs_tol > 0))
        throw std::invalid_argument("solve_ivp: tolerances must be positive");
    if (p.x_end == p.x0)
        throw std::invalid_argument("solve_ivp: empty integration interval");

    const int n = p.dimension;
    const double posneg = p.x_end > p.x0 ? 1.0 : -1.0;

    for (std::size_t i = 0; i < grid_request.size(); ++i) {
        const double g = grid_request[i];
        if ((g - p.x0) * posneg < -1e-12 || (g - p.x_end) * posneg > 1e-12)
            throw std::invalid_argument(
                "solve_ivp: grid request outside the integration interval");
        if (i > 0 && (g - grid_request[i - 1]) * posneg <= 0)
            throw std::invalid_argument("solve_ivp: grid request not monotone");
    }

    SolutionSeries out;
    out.grid.reserve(grid_request.size());
    out.values.reserve(grid_request.size());

    std::vector<double> y = p.y0, y1(n), ysti(n), ee(n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    Dense dense;
    dense.r1.resize(n);
    dense.r2.resize(n);
    dense.r3.resize(n);
    dense.r4.resize(n);
    dense.r5.resize(n);

    double x = p.x0;
    std::size_t next_grid = 0;

    auto eval = [&](double xx, std::span<const double> yy, std::span<double> ff) {
        p.rhs(xx, yy, ff);
        ++out.diagnostics.n_rhs_evals;
    };

    auto fail = [&](SolveStatus st, const std::string& msg) {
        out.status = st;
        out.last_x = x;
        out.message = msg;
        return out;
    };

    eval(x, y, k1);
    if (!finite_all(k1))
        throw std::invalid_argument(
            "solve_ivp: derivative not finite at the initial point");

    // Initial step size (standard two-derivative heuristic).
    double h;
    {
        double dnf = 0, dny = 0;
        for (int i = 0; i < n; ++i) {
            const double sk = p.abs_tol + p.rel_tol * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        double h0 = (dnf <= 1e-10 || dny <= 1e-10)
                        ? 1e-6
                        : std::sqrt(dny / dnf) * 0.01;
        h0 = std::min(h0, std::abs(p.x_end - p.x0));
        // explicit Euler probe
        for (int i = 0; i < n; ++i) ysti[i] = y[i] + h0 * posneg * k1[i];
        eval(x + h0 * posneg, ysti, k2);
        double der2 = 0;
        for (int i = 0; i < n; ++i) {
            const double sk = p.abs_tol + p.rel_tol * std::abs(y[i]);
            der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
        }
        der2 = std::sqrt(der2) / h0;
        const double der12 = std::max(std::sqrt(dnf), der2);
        const double h1 = (der12 <= 1e-15)
                              ? std::max(1e-6, h0 * 1e-3)
                              : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h0, h1, std::abs(p.x_end - p.x0)});
    }
    h *= posneg;

    double facold = 1e-4;
    bool last = false;
    bool reject = false;

    auto emit_from_dense = [&](double x_new) {
        while (next_grid < grid_request.size() &&
               (grid_request[next_grid] - x_new) * posneg <= 1e-14 * std::abs(x_new)) {
            const double g = grid_request[next_grid];
            std::vector<double> row(n);
            for (int i = 0; i < n; ++i) row[i] = dense.eval(i, g);
            out.grid.push_back(g);
            out.values.push_back(std::move(row));
            ++next_grid;
        }
    };

    // Exact initial point: emit without interpolation.
    while (next_grid < grid_request.size() &&
           std::abs(grid_request[next_grid] - p.x0) <= 1e-14 * std::max(1.0, std::abs(p.x0))) {
        out.grid.push_back(grid_request[next_grid]);
        out.values.push_back(y);
        ++next_grid;
    }

    while (true) {
        if (out.diagnostics.n_steps >= p.max_steps)
            return fail(SolveStatus::max_steps_exceeded,
                        "step budget exhausted at x = " + std::to_string(x));
        if (0.1 * std::abs(h) <= std::abs(x) * uround)
            return fail(SolveStatus::step_size_underflow,
                        "step size underflow at x = " + std::to_string(x));
        if ((x + 1.01 * h - p.x_end) * posneg > 0) {
            h = p.x_end - x;
            last = true;
        }
        ++out.diagnostics.n_steps;

        // the six stages
        for (int i = 0; i < n; ++i) ysti[i] = y[i] + h * a21 * k1[i];
        eval(x + c2 * h, ysti, k2);
        for (int i = 0; i < n; ++i)
            ysti[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(x + c3 * h, ysti, k3);
        for (int i = 0; i < n; ++i)
            ysti[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval(x + c4 * h, ysti, k4);
        for (int i = 0; i < n; ++i)
            ysti[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                  a54 * k4[i]);
        eval(x + c5 * h, ysti, k5);
        for (int i = 0; i < n; ++i)
            ysti[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        eval(x + h, ysti, k6);
        for (int i = 0; i < n; ++i)
            y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                b5 * k5[i] + b6 * k6[i]);
        eval(x + h, y1, k7);

        if (!finite_all(y1) || !finite_all(k7))
            return fail(SolveStatus::non_finite_derivative,
                        "non-finite value near x = " + std::to_string(x));

        double err = 0;
        for (int i = 0; i < n; ++i) {
            ee[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                         e6 * k6[i] + e7 * k7[i]);
            const double sk =
                p.abs_tol + p.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (ee[i] / sk) * (ee[i] / sk);
        }
        err = std::sqrt(err / n);

        const double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            // accepted
            out.diagnostics.max_est_error =
                std::max(out.diagnostics.max_est_error, err);
            ++out.diagnostics.n_accepted;

            dense.x_old = x;
            dense.h = h;
            for (int i = 0; i < n; ++i) {
                const double ydiff = y1[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                dense.r1[i] = y[i];
                dense.r2[i] = ydiff;
                dense.r3[i] = bspl;
                dense.r4[i] = ydiff - h * k7[i] - bspl;
                dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                   d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }

            const double x_new = x + h;
            emit_from_dense(x_new);

            k1.swap(k7);  // FSAL
            y.swap(y1);
            x = x_new;

            if (last) break;

            // stabilized PI control: the previous step's error enters
            // through facold
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(1.0 / fac_max, std::min(1.0 / fac_min, fac / safe));
            facold = std::max(err, 1e-4);
            double hnew = h / fac;
            if (reject) hnew = posneg * std::min(std::abs(hnew), std::abs(h));
            reject = false;
            h = hnew;
        } else {
            // rejected
            ++out.diagnostics.n_rejected;
            reject = true;
            last = false;
            h /= std::min(1.0 / fac_min, fac11 / safe);
        }
    }

    // Flush any grid point that rounds onto the endpoint.
    while (next_grid < grid_request.size()) {
        out.grid.push_back(grid_request[next_grid]);
        out.values.push_back(y);
        ++next_grid;
    }

    out.status = SolveStatus::complete;
    out.last_x = x;
    return out;
}

}  // namespace abelgas
