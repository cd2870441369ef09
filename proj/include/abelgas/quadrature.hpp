#ifndef ABELGAS_QUADRATURE_HPP
#define ABELGAS_QUADRATURE_HPP

#include <functional>

namespace abelgas {

// Adaptive Simpson quadrature with Richardson acceptance. Handles a > b by
// sign flip. Throws std::runtime_error if the recursion cannot reach the
// requested absolute-or-relative tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-10);

}  // namespace abelgas

#endif
