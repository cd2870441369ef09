// Test-side oracles, independent of the library implementations they check.
#ifndef ABELGAS_TESTS_ORACLES_HPP
#define ABELGAS_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracles {

// Deterministic uniform deviates (identical across platforms and standard
// libraries, unlike std::uniform_real_distribution).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    double uniform() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::uint64_t state_;
};

// Plain recursive Simpson quadrature (distinct from the library rule).
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fb, double fm,
                          double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, fm, flm, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, fb, frm, 0.5 * tol, depth - 1);
}

inline double quad(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-12) {
    return simpson_rec(f, a, b, f(a), f(b), f(0.5 * (a + b)), tol, 50);
}

// Golden-section maximizer on [a, b] for a unimodal function.
inline double golden_max(const std::function<double(double)>& f, double a,
                         double b, double tol = 1e-10) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    while (b - a > tol) {
        if (f(c) > f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

// Classic fixed-step RK4, used as an integration-order reference.
inline std::vector<double> rk4_fixed(
    const std::function<void(double, const std::vector<double>&,
                             std::vector<double>&)>& f,
    double x0, std::vector<double> y, double x1, int nsteps) {
    const int n = static_cast<int>(y.size());
    const double h = (x1 - x0) / nsteps;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    double x = x0;
    for (int s = 0; s < nsteps; ++s) {
        f(x, y, k1);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        f(x + 0.5 * h, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        f(x + 0.5 * h, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        f(x + h, tmp, k4);
        for (int i = 0; i < n; ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        x += h;
    }
    return y;
}

}  // namespace oracles

#endif
