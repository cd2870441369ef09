#include "abelgas/abel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "abelgas/ad_system.hpp"

namespace abelgas {

AbelConstants derive_constants(const ModelParams& p, double X1_0, double gamma,
                               const IntegrationConstants& ic) {
    if (!(gamma > 0))
        throw std::invalid_argument("derive_constants: gamma must be > 0");
    const double m = washout_exponent(p);
    if (m == 0 || std::abs(m) < 1e-14)
        throw std::domain_error(
            "derive_constants: washout exponent m = 0, the w = e^{mt} change "
            "of variable collapses");

    AbelConstants k;
    k.m = m;
    k.params = p;
    k.gamma = gamma;
    k.X1_0 = X1_0;
    k.C0 = ic.C0;
    k.C1 = ic.C1;

    k.a1 = -p.D * (p.S1in + p.K_S1);
    k.a2 = p.k1 * p.mu1max * X1_0;
    k.a3 = -p.k1 * p.mu1max * gamma;
    k.a4 = -p.K_S1 * k.a2;
    k.a5 = k.a1 + k.a3;

    k.b1 = p.D / m - k.a5 * k.a5 / (3.0 * m * k.a3);
    k.b1_audited = p.D / m + k.a5 * k.a5 / (3.0 * m * p.K_S1 * k.a3);

    if (k.b1 != 0) {
        k.b2 = ic.C0 * k.a3 * ic.C1 * ic.C1 / (k.b1 * m);
        k.b2_defined = true;
    } else {
        k.b2 = std::numeric_limits<double>::quiet_NaN();
        k.b2_defined = false;
    }
    return k;
}

double substrate_to_V(double S1_up, double K_S1) {
    const double den = S1_up + K_S1;
    if (den == 0 || std::abs(den) < 1e-300)
        throw std::domain_error("substrate_to_V: S1 + K_S1 = 0 pole");
    return 1.0 / den;
}

double V_to_substrate(double V, double K_S1) {
    if (V == 0)
        throw std::domain_error("V_to_substrate: V = 0 pole");
    return 1.0 / V - K_S1;
}

namespace {

// f2 numerator a1 + a2 w + a3 and f3 numerator; the audited f3 carries K_S1
// on the gamma term (chain rule), the literal one does not.
inline double f2_num(const AbelConstants& k, double w) {
    return k.a1 + k.a2 * w + k.a3;
}
inline double f3_num(const AbelConstants& k, double w, SignConvention conv) {
    const double gamma_term = (conv == SignConvention::audited)
                                  ? -k.params.K_S1 * k.a3
                                  : -k.a3;
    return k.a4 * w + gamma_term;
}

}  // namespace

double abel_rhs_time(double t, double V, const AbelConstants& k,
                     SignConvention conv) {
    const double w = std::exp(k.m * t);
    const double f2 = f2_num(k, w);
    const double f3 = f3_num(k, w, conv);
    return k.params.D * V + f2 * V * V + f3 * V * V * V;
}

double abel_rhs_w(double w, double V, const AbelConstants& k,
                  SignConvention conv) {
    if (!(w > 0))
        throw std::domain_error(
            "abel_rhs_w: w must be positive (w = e^{mt}); coefficient pole at "
            "w = 0");
    const double mw = k.m * w;
    const double f1 = k.params.D / mw;
    const double f2 = f2_num(k, w) / mw;
    const double f3 = f3_num(k, w, conv) / mw;
    return f1 * V + f2 * V * V + f3 * V * V * V;
}

AbelCoefficients abel_coefficients(const AbelConstants& k,
                                   AbelCoefficients::Domain domain,
                                   SignConvention conv) {
    AbelCoefficients c;
    c.domain = domain;
    c.f0 = [](double) { return 0.0; };
    if (domain == AbelCoefficients::Domain::time) {
        c.f1 = [k](double) { return k.params.D; };
        c.f2 = [k](double t) { return f2_num(k, std::exp(k.m * t)); };
        c.f3 = [k, conv](double t) {
            return f3_num(k, std::exp(k.m * t), conv);
        };
    } else {
        c.f1 = [k](double w) { return k.params.D / (k.m * w); };
        c.f2 = [k](double w) { return f2_num(k, w) / (k.m * w); };
        c.f3 = [k, conv](double w) { return f3_num(k, w, conv) / (k.m * w); };
    }
    return c;
}

HamiltonianCheck hamiltonian_check(double m, std::span<const double> t_grid) {
    if (t_grid.empty())
        throw std::invalid_argument("hamiltonian_check: empty grid");
    HamiltonianCheck out;
    double H0 = 0;
    bool first = true;
    for (double t : t_grid) {
        const double w = std::exp(m * t);
        const double p = m * w;  // analytic dw/dt
        const double alpha_dev = std::abs(p * p - m * m * w * w);
        const double H = 0.5 * p * p - 0.5 * m * m * w * w;
        if (first) {
            H0 = H;
            first = false;
        }
        out.max_alpha_deviation = std::max(out.max_alpha_deviation, alpha_dev);
        out.max_H_drift = std::max(out.max_H_drift, std::abs(H - H0));
        out.scale = std::max(out.scale, std::max(0.5 * p * p, 1.0));
    }
    return out;
}

}  // namespace abelgas
