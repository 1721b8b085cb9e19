#pragma once

#include <vector>

namespace dimv {

// Real roots of c3*x^3 + c2*x^2 + c1*x + c0 = 0, ascending, deduplicated.
// Solved via eigenvalues of the companion matrix of the monic polynomial;
// eigenvalues with |imag| < 1e-9 * (1 + |real|) count as real and are
// polished with a few Newton steps on the original coefficients.
// Degenerate leading coefficients fall back to the quadratic/linear case.
std::vector<double> cubic_real_roots(double c3, double c2, double c1,
                                     double c0);

}  // namespace dimv
