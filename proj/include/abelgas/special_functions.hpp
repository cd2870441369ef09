#ifndef ABELGAS_SPECIAL_FUNCTIONS_HPP
#define ABELGAS_SPECIAL_FUNCTIONS_HPP

namespace abelgas {

struct GammaResult {
    double value = 0;
    /** Set when x > 700 and the tail underflows; value is then 0. */
    bool underflowed = false;
};

/** Upper incomplete gamma Gamma(s, x) = integral_x^inf t^{s-1} e^{-t} dt.
 *
 * Real s, x >= 0 (x > 0 required when s <= 0). Evaluated by the Legendre
 * continued fraction for x > s + 1 and by the lower-gamma power series plus
 * the complete gamma otherwise; near nonpositive integer s at small x the
 * continued fraction is used throughout to avoid the reflection pole.
 * Relative accuracy target 1e-12 for s in [-10, 50], x in [0, 700]. */
GammaResult upper_incomplete_gamma_ex(double s, double x);

/** Convenience wrapper returning only the value. */
double upper_incomplete_gamma(double s, double x);

}  // namespace abelgas

#endif
