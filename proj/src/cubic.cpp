#include "dimv/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace dimv {

namespace {

double polish(double x, double c3, double c2, double c1, double c0) {
  for (int it = 0; it < 3; ++it) {
    const double f = ((c3 * x + c2) * x + c1) * x + c0;
    const double df = (3.0 * c3 * x + 2.0 * c2) * x + c1;
    if (df == 0.0) break;
    const double step = f / df;
    if (!std::isfinite(step)) break;
    x -= step;
  }
  return x;
}

void push_unique(std::vector<double>& roots, double x) {
  for (double r : roots) {
    if (std::abs(r - x) <= 1e-12 * (1.0 + std::abs(x))) return;
  }
  roots.push_back(x);
}

std::vector<double> quadratic_real_roots(double a, double b, double c) {
  std::vector<double> roots;
  if (a == 0.0) {
    if (b != 0.0) roots.push_back(-c / b);
    return roots;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return roots;
  const double s = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? s : -s));
  if (q != 0.0) {
    push_unique(roots, q / a);
    push_unique(roots, c / q);
  } else {
    push_unique(roots, 0.0);
    if (a != 0.0) push_unique(roots, -b / a);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

std::vector<double> cubic_real_roots(double c3, double c2, double c1,
                                     double c0) {
  if (c3 == 0.0) return quadratic_real_roots(c2, c1, c0);

  const double a = c2 / c3;
  const double b = c1 / c3;
  const double c = c0 / c3;

  Eigen::Matrix3d companion;
  companion << 0.0, 0.0, -c,  //
      1.0, 0.0, -b,           //
      0.0, 1.0, -a;
  Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, false);

  std::vector<double> roots;
  for (Eigen::Index i = 0; i < 3; ++i) {
    const std::complex<double> lambda = solver.eigenvalues()[i];
    if (std::abs(lambda.imag()) < 1e-9 * (1.0 + std::abs(lambda.real()))) {
      push_unique(roots, polish(lambda.real(), c3, c2, c1, c0));
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace dimv
