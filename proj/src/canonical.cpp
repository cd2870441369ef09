#include "abelgas/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "abelgas/quadrature.hpp"
#include "abelgas/special_functions.hpp"

namespace abelgas {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double safe_exp(double x) {
    if (x > 709.0) return inf;
    return std::exp(x);
}

// ---------------------------------------------------------------------------
// Canonical reduction
// ---------------------------------------------------------------------------

// True when g(x) * x is the same constant at every probe point (coefficients
// of the algebrized washout cubic are const / x).
bool proportional_to_inverse(const std::function<double(double)>& g, double lo,
                             double hi, double& c_out) {
    const int n = 7;
    double ref = 0;
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * (i + 0.31) / n;
        if (x == 0) return false;
        const double c = g(x) * x;
        if (!std::isfinite(c)) return false;
        if (i == 0)
            ref = c;
        else if (std::abs(c - ref) > 1e-11 * std::max(1.0, std::abs(ref)))
            return false;
    }
    c_out = ref;
    return true;
}

bool is_constant(const std::function<double(double)>& g, double lo, double hi,
                 double& c_out) {
    const int n = 7;
    double ref = 0;
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * (i + 0.31) / n;
        const double c = g(x);
        if (!std::isfinite(c)) return false;
        if (i == 0)
            ref = c;
        else if (std::abs(c - ref) > 1e-11 * std::max(1.0, std::abs(ref)))
            return false;
    }
    c_out = ref;
    return true;
}

void scan_f3_roots(const std::function<double(double)>& f3, double lo,
                   double hi) {
    const int n = 1024;
    double prev = f3(lo);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double cur = f3(x);
        if (prev == 0 || (prev < 0) != (cur < 0)) {
            const double a = lo + (hi - lo) * (i - 1) / n;
            throw std::domain_error(
                "reduce_to_canonical: f3 vanishes inside the working interval "
                "near x in [" +
                std::to_string(a) + ", " + std::to_string(x) +
                "]; the reduction is singular there");
        }
        prev = cur;
    }
}

// Monotone inversion of xi(x) on [lo, hi] by bisection.
double invert_monotone(const std::function<double(double)>& f, double target,
                       double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    const bool increasing = fhi > flo;
    if ((increasing && (target < flo || target > fhi)) ||
        (!increasing && (target > flo || target < fhi)))
        throw std::domain_error(
            "canonical reduction: xi value outside the working interval");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < target) == increasing)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * std::max(1.0, std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

CanonicalReduction reduce_to_canonical(const AbelCoefficients& coeffs,
                                       std::function<double(double)> varphi,
                                       double interval_lo, double interval_hi) {
    if (!(interval_hi > interval_lo))
        throw std::invalid_argument("reduce_to_canonical: empty interval");
    scan_f3_roots(coeffs.f3, interval_lo, interval_hi);

    CanonicalReduction red;
    red.varphi = std::move(varphi);
    red.interval_lo = interval_lo;
    red.interval_hi = interval_hi;
    const double x0 = interval_lo;

    const auto f0 = coeffs.f0, f1 = coeffs.f1, f2 = coeffs.f2, f3 = coeffs.f3;

    auto integrand_u = [f1, f2, f3](double x) {
        const double F3 = f3(x);
        return f1(x) - f2(x) * f2(x) / (3.0 * F3);
    };

    // Washout fast paths: the u- and xi-integrals are elementary when the
    // coefficients are const/x (algebrized variable) or plain constants
    // (time variable).
    double P = 0, Q = 0, R = 0;
    const bool inv_form = proportional_to_inverse(f1, interval_lo, interval_hi, P) &&
                          proportional_to_inverse(f2, interval_lo, interval_hi, Q) &&
                          proportional_to_inverse(f3, interval_lo, interval_hi, R);
    double cP = 0, cQ = 0, cR = 0;
    const bool const_form = !inv_form &&
                            is_constant(f1, interval_lo, interval_hi, cP) &&
                            is_constant(f2, interval_lo, interval_hi, cQ) &&
                            is_constant(f3, interval_lo, interval_hi, cR);

    if (inv_form) {
        // f_i = coef / x: u = (x/x0)^b, xi = R((x/x0)^{2b} - 1)/(2b) * x0^0
        const double b = P - Q * Q / (3.0 * R);
        const double v = -Q / (3.0 * R);
        red.closed_form = true;
        red.exponent = b;
        red.shift = v;
        red.u = [b, x0](double x) { return std::pow(x / x0, b); };
        red.v = [v](double) { return v; };
        if (b != 0) {
            red.xi = [R, b, x0](double x) {
                return R * (std::pow(x / x0, 2.0 * b) - 1.0) / (2.0 * b);
            };
        } else {
            red.xi = [R, x0](double x) { return R * std::log(x / x0); };
        }
        // Phi = N / (R u^3 x^0) with N = -P Q/(3R) + 2 Q^3/(27 R^2); the 1/x
        // of the numerator cancels against f3 u^3 = (R/x) u^3.
        const double N = -P * Q / (3.0 * R) + 2.0 * Q * Q * Q / (27.0 * R * R);
        red.phi_at_x = [N, R, b, x0](double x) {
            return N / (R * std::pow(x / x0, 3.0 * b));
        };
    } else if (const_form) {
        const double lam = cP - cQ * cQ / (3.0 * cR);
        const double v = -cQ / (3.0 * cR);
        red.closed_form = true;
        red.exponent = lam;
        red.shift = v;
        red.u = [lam, x0](double x) { return std::exp(lam * (x - x0)); };
        red.v = [v](double) { return v; };
        if (lam != 0) {
            red.xi = [cR, lam, x0](double x) {
                return cR * std::expm1(2.0 * lam * (x - x0)) / (2.0 * lam);
            };
        } else {
            red.xi = [cR, x0](double x) { return cR * (x - x0); };
        }
        const double N =
            -cP * cQ / (3.0 * cR) + 2.0 * cQ * cQ * cQ / (27.0 * cR * cR);
        red.phi_at_x = [N, cR, lam, x0](double x) {
            return N / (cR * std::exp(3.0 * lam * (x - x0)));
        };
    } else {
        // General path: adaptive quadrature per evaluation.
        auto u_fn = [integrand_u, x0](double x) {
            return std::exp(integrate_adaptive(integrand_u, x0, x, 1e-10));
        };
        red.u = u_fn;
        red.v = [f2, f3](double x) { return -f2(x) / (3.0 * f3(x)); };
        red.xi = [f3, u_fn, x0](double x) {
            auto integrand = [&](double s) {
                const double us = u_fn(s);
                return f3(s) * us * us;
            };
            return integrate_adaptive(integrand, x0, x, 1e-10);
        };
        red.phi_at_x = [f0, f1, f2, f3, u_fn](double x) {
            const double F1 = f1(x), F2 = f2(x), F3 = f3(x);
            const double h = 1e-6 * std::max(1.0, std::abs(x));
            const double dr =
                (f2(x + h) / f3(x + h) - f2(x - h) / f3(x - h)) / (2.0 * h);
            const double u3 = std::pow(u_fn(x), 3);
            return (f0(x) - F1 * F2 / (3.0 * F3) +
                    2.0 * F2 * F2 * F2 / (27.0 * F3 * F3) + dr / 3.0) /
                   (F3 * u3);
        };
    }

    auto xi_fn = red.xi;
    auto phi_x = red.phi_at_x;
    const double lo = interval_lo, hi = interval_hi;
    red.phi = [xi_fn, phi_x, lo, hi](double xi_val) {
        const double x = invert_monotone(xi_fn, xi_val, lo, hi);
        return phi_x(x);
    };
    return red;
}

// ---------------------------------------------------------------------------
// Closed-form families
// ---------------------------------------------------------------------------

namespace {

// Internal evaluator shared by construction, constant fitting and residual
// sampling. V(t) = shift + numerator(t) / sqrt(radicand(t)).
struct FamilyEval {
    double shift = 0;
    std::function<double(double)> numerator;
    std::function<double(double)> radicand;

    double V(double t) const {
        const double rad = radicand(t);
        if (!(rad > 0)) return std::numeric_limits<double>::quiet_NaN();
        return shift + numerator(t) / std::sqrt(rad);
    }
};

FamilyEval make_family(ClosedFormCase which, const AbelConstants& k,
                       const IntegrationConstants& ic, SignConvention conv) {
    if (k.a2 != 0)
        throw std::invalid_argument(
            "closed-form solutions are derived in the washout regime; "
            "X1(0) must be 0");
    if (ic.C1 == 0)
        throw std::invalid_argument("closed-form solutions: C1 must be nonzero");

    FamilyEval fam;
    const double m = k.m;
    const double C = ic.C, C0 = ic.C0, C1 = ic.C1, C2 = ic.C2, C3 = ic.C3;

    if (conv == SignConvention::audited) {
        const double rho = -k.params.K_S1 * k.a3;  // audited cubic coefficient
        const double q = k.a5;
        const double lam = k.b1_audited * m;  // = D - q^2/(3 rho)
        if (lam == 0)
            throw std::domain_error(
                "closed-form solutions: degenerate exponent b1_audited = 0");
        const double vhat = -q / (3.0 * rho);
        fam.shift = vhat;
        auto xi = [rho, C1, C2, lam](double t) {
            return rho * C1 * C1 / (2.0 * lam) * safe_exp(2.0 * lam * t) + C2;
        };
        if (which == ClosedFormCase::case1) {
            fam.numerator = [C1, lam](double t) { return C1 * safe_exp(lam * t); };
            fam.radicand = [C, xi](double t) { return C - 2.0 * xi(t); };
        } else {
            fam.numerator = [C1, lam, C0, xi](double t) {
                return C1 * safe_exp(lam * t) * safe_exp(C0 * xi(t));
            };
            fam.radicand = [C, C0, xi](double t) {
                const double x = xi(t);
                // int e^{2 C0 xi} d xi, continuous in C0 at 0
                const double W =
                    (C0 != 0) ? std::expm1(2.0 * C0 * x) / (2.0 * C0) : x;
                return C - 2.0 * W;
            };
        }
        return fam;
    }

    // Literal convention: the legacy printed forms with exponent b1.
    const double b1 = k.b1;
    const double a3 = k.a3, a5 = k.a5;
    fam.shift = -a5 / (3.0 * a3);
    if (which == ClosedFormCase::case1) {
        if (!(C1 > 0))
            throw std::invalid_argument(
                "case1 (paper-literal): C1 must be positive, ln(C1) is "
                "evaluated");
        fam.numerator = [C1, b1, m](double t) {
            return C1 * safe_exp(b1 * m * t);
        };
        fam.radicand = [C, C1, b1, m](double t) {
            return C - 2.0 * (std::log(C1) + b1 * m * t);
        };
    } else {
        if (b1 == 0)
            throw std::domain_error("case2 (paper-literal): degenerate b1 = 0");
        if (C0 == 0)
            throw std::domain_error(
                "case2 (paper-literal): degenerate at C0 = 0; use the audited "
                "construction for the C0 -> 0 limit");
        const double b2 = C0 * a3 * C1 * C1 / (b1 * m);
        if (!(-b2 >= 0))
            throw std::domain_error(
                "case2 (paper-literal): -b2 < 0, the gamma-function argument "
                "-b2 w^{2 b1} leaves the real branch");
        const double gcoef =
            safe_exp(2.0 * C0 * C2) /
            (2.0 * b1 * std::pow(-b2, 1.0 / (2.0 * b1)));
        const double s_gamma = 1.0 / (2.0 * b1);
        fam.numerator = [C1, b1, m, C0, a3, C2](double t) {
            const double e2 = safe_exp(2.0 * b1 * m * t);
            return C1 * safe_exp(b1 * m * t) *
                   (C0 * a3 * C1 * C1 / (2.0 * b1 * m) * e2 + C2);
        };
        fam.radicand = [C, C3, gcoef, s_gamma, b1, m, b2](double t) {
            const double e2 = safe_exp(2.0 * b1 * m * t);
            if (!std::isfinite(e2)) return -inf;
            const double x = -b2 * e2;
            const double g = upper_incomplete_gamma(s_gamma, x);
            return C - C3 + gcoef * g;
        };
    }
    return fam;
}

// Maximal open interval around t = 0 where the radicand stays positive
// (and finite).
void find_domain(const FamilyEval& fam, double& lo, double& hi) {
    auto ok = [&](double t) {
        const double r = fam.radicand(t);
        return std::isfinite(r) && r > 0;
    };
    if (!ok(0.0))
        throw std::domain_error(
            "closed-form solution: empty validity domain (radicand not "
            "positive at t = 0)");
    const double T = 64.0;
    const int n = 4096;
    hi = inf;
    for (int i = 1; i <= n; ++i) {
        const double t = T * i / n;
        if (!ok(t)) {
            double a = T * (i - 1) / n, b = t;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                (ok(mid) ? a : b) = mid;
            }
            hi = a;
            break;
        }
    }
    lo = -inf;
    for (int i = 1; i <= n; ++i) {
        const double t = -T * i / n;
        if (!ok(t)) {
            double a = -T * (i - 1) / n, b = t;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                (ok(mid) ? a : b) = mid;
            }
            lo = a;
            break;
        }
    }
}

std::vector<double> find_v_zeros(const FamilyEval& fam, double lo, double hi) {
    std::vector<double> zeros;
    const double a = std::max(lo, -5.0), b = std::min(hi, 20.0);
    if (!(b > a)) return zeros;
    const int n = 2048;
    double tp = a + (b - a) * 1e-6;
    double vp = fam.V(tp);
    for (int i = 1; i <= n; ++i) {
        const double t = a + (b - a) * (i - 1e-6 * (i == n)) / n;
        const double v = fam.V(t);
        if (std::isfinite(vp) && std::isfinite(v) && (vp < 0) != (v < 0)) {
            double x0 = tp, x1 = t;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (x0 + x1);
                ((fam.V(mid) < 0) == (fam.V(x0) < 0) ? x0 : x1) = mid;
            }
            zeros.push_back(0.5 * (x0 + x1));
        }
        tp = t;
        vp = v;
    }
    return zeros;
}

double richardson_derivative(const std::function<double(double)>& f, double t,
                             double h0) {
    auto d4 = [&](double h) {
        return (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) -
                f(t + 2.0 * h)) /
               (12.0 * h);
    };
    double h = h0;
    double prev = d4(h);
    double best = prev;
    for (int i = 0; i < 12; ++i) {
        h *= 0.5;
        const double cur = d4(h);
        const double rich = (16.0 * cur - prev) / 15.0;
        if (std::abs(rich - best) <= 1e-12 * std::max(1.0, std::abs(rich)))
            return rich;
        best = rich;
        prev = cur;
        if (h < 1e-8) break;
    }
    return best;
}

}  // namespace

namespace {

ClosedFormSolution build_solution(ClosedFormCase which, const AbelConstants& k,
                                  const IntegrationConstants& ic,
                                  SignConvention conv) {
    const FamilyEval fam = make_family(which, k, ic, conv);

    ClosedFormSolution sol;
    sol.case_tag = which;
    sol.convention = conv;
    sol.constants = k;
    sol.ic = ic;
    find_domain(fam, sol.domain_lo, sol.domain_hi);

    const double K_S1 = k.params.K_S1;
    sol.V_of_t = [fam](double t) { return fam.V(t); };
    if (conv == SignConvention::paper_literal) {
        // The displayed substrate expressions, used verbatim; both agree
        // with 1/V - K_S1 algebraically (asserted in the tests).
        const double a3 = k.a3, a5 = k.a5;
        const FamilyEval f = fam;
        sol.S1_of_t = [f, a3, a5, K_S1](double t) {
            const double rad = f.radicand(t);
            if (!(rad > 0)) return std::numeric_limits<double>::quiet_NaN();
            const double sq = std::sqrt(rad);
            return 3.0 * a3 * sq / (3.0 * a3 * f.numerator(t) - a5 * sq) - K_S1;
        };
    } else {
        sol.S1_of_t = [fam, K_S1](double t) {
            const double v = fam.V(t);
            return 1.0 / v - K_S1;
        };
    }

    sol.excluded_points = find_v_zeros(fam, sol.domain_lo, sol.domain_hi);

    // Residual sample over the working window; surfaced so a formula that
    // fails to solve the cubic is visible immediately.
    {
        const double lo = std::max(sol.domain_lo, -2.0);
        const double hi = std::min(sol.domain_hi, 10.0);
        const double span = hi - lo;
        const int ns = 33;
        for (int i = 0; i < ns; ++i) {
            const double t = lo + span * (0.02 + 0.96 * i / (ns - 1));
            const double clearance =
                std::min(t - sol.domain_lo, sol.domain_hi - t);
            const double h0 = std::min(1e-3, 0.2 * clearance);
            if (!(h0 > 0)) continue;
            const double Vt = fam.V(t);
            if (!std::isfinite(Vt)) continue;
            const double dV = richardson_derivative(sol.V_of_t, t, h0);
            const double rhs = abel_rhs_time(t, Vt, k, SignConvention::audited);
            const double res = std::abs(dV - rhs) / (1.0 + std::abs(rhs));
            sol.residual_sample_t.push_back(t);
            sol.residual_sample.push_back(res);
            sol.max_sampled_residual = std::max(sol.max_sampled_residual, res);
        }
    }
    return sol;
}

}  // namespace

ClosedFormSolution case1_solution(const AbelConstants& k,
                                  const IntegrationConstants& ic,
                                  SignConvention conv) {
    return build_solution(ClosedFormCase::case1, k, ic, conv);
}

ClosedFormSolution case2_solution(const AbelConstants& k,
                                  const IntegrationConstants& ic,
                                  SignConvention conv) {
    return build_solution(ClosedFormCase::case2, k, ic, conv);
}

double verify_residual(const ClosedFormSolution& sol, const AbelConstants& k,
                       std::span<const double> grid,
                       SignConvention rhs_convention) {
    double worst = 0;
    for (double t : grid) {
        if (!(t > sol.domain_lo && t < sol.domain_hi))
            throw std::invalid_argument(
                "verify_residual: grid point outside the validity domain");
        const double clearance = std::min(t - sol.domain_lo, sol.domain_hi - t);
        const double h0 = std::min(1e-3, 0.2 * clearance);
        const double Vt = sol.V_of_t(t);
        const double dV = richardson_derivative(sol.V_of_t, t, h0);
        const double rhs = abel_rhs_time(t, Vt, k, rhs_convention);
        worst = std::max(worst, std::abs(dV - rhs) / (1.0 + std::abs(rhs)));
    }
    return worst;
}

double verify_residual(const ClosedFormSolution& sol, const AbelConstants& k,
                       std::span<const double> grid) {
    return verify_residual(sol, k, grid, SignConvention::audited);
}

IntegrationConstants fit_radicand_constant(ClosedFormCase which,
                                           const AbelConstants& k,
                                           IntegrationConstants ic, double V0,
                                           SignConvention conv) {
    auto V0_of = [&](double C) {
        IntegrationConstants trial = ic;
        trial.C = C;
        const FamilyEval fam = make_family(which, k, trial, conv);
        return fam.V(0.0);
    };

    // Lower edge of admissible C: radicand(0) = 0 there. Obtain it from the
    // C-independence of the rest of the radicand.
    IntegrationConstants probe = ic;
    probe.C = 0.0;
    const double C_min = -make_family(which, k, probe, conv).radicand(0.0);

    auto g = [&](double C) { return V0_of(C) - V0; };

    double delta = std::max(1.0, std::abs(C_min)) * 1e-8;
    double a = C_min + delta;
    double b = C_min + std::max(1.0, std::abs(C_min));
    double ga = g(a), gb = g(b);
    int expand = 0;
    while ((ga < 0) == (gb < 0) && expand < 80) {
        b = C_min + (b - C_min) * 4.0;
        gb = g(b);
        ++expand;
        if (!std::isfinite(gb)) break;
    }
    if (!std::isfinite(ga) || !std::isfinite(gb) || (ga < 0) == (gb < 0))
        throw std::domain_error(
            "fit_radicand_constant: V(0) target is not reachable within this "
            "solution family");

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = g(mid);
        if ((gm < 0) == (ga < 0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    double C = 0.5 * (a + b);

    // Newton polish on the bisection result.
    for (int it = 0; it < 8; ++it) {
        const double gc = g(C);
        if (std::abs(gc) <= 1e-12 * std::max(1.0, std::abs(V0))) break;
        const double h = 1e-7 * std::max(1.0, std::abs(C));
        const double d = (g(C + h) - g(C - h)) / (2.0 * h);
        if (d == 0 || !std::isfinite(d)) break;
        const double next = C - gc / d;
        if (!(next > C_min)) break;
        C = next;
    }
    ic.C = C;
    return ic;
}

}  // namespace abelgas
