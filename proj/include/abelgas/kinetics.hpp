#ifndef ABELGAS_KINETICS_HPP
#define ABELGAS_KINETICS_HPP

namespace abelgas {

// Monod growth law mu1max * S1 / (S1 + K_S1).
// Negative substrate is a hard error: the envelope machinery must surface
// trajectories that leave the physical domain, not mask them.
double monod(double S1, double mu1max, double K_S1);

// Haldane growth law mu2max * S2 / (S2^2/K_I2 + S2 + K_S2).
// Zero at S2 = 0, unimodal with maximum at sqrt(K_S2 * K_I2).
double haldane(double S2, double mu2max, double K_S2, double K_I2);

}  // namespace abelgas

#endif
