#include "abelgas/kinetics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace abelgas {

double monod(double S1, double mu1max, double K_S1) {
    if (S1 < 0)
        throw std::domain_error("monod: negative substrate S1 = " +
                                std::to_string(S1));
    const double den = S1 + K_S1;
    if (den == 0)
        throw std::domain_error("monod: S1 + K_S1 vanished");
    return mu1max * S1 / den;
}

double haldane(double S2, double mu2max, double K_S2, double K_I2) {
    if (S2 < 0)
        throw std::domain_error("haldane: negative substrate S2 = " +
                                std::to_string(S2));
    return mu2max * S2 / (S2 * S2 / K_I2 + S2 + K_S2);
}

}  // namespace abelgas
