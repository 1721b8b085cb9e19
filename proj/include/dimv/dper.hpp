#pragma once

#include <utility>

#include <Eigen/Dense>

#include "dimv/masked_matrix.hpp"

namespace dimv {

// Sufficient statistics for one feature pair (i, j) of a centered matrix.
// The s-terms sum over rows where both features are observed; n and l_other
// count rows where feature i (resp. j) alone is observed.
struct PairStats {
  double s11 = 0.0;  // sum of x_i^2 over co-observed rows
  double s12 = 0.0;  // sum of x_i * x_j over co-observed rows
  double s22 = 0.0;  // sum of x_j^2 over co-observed rows
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  Eigen::Index l_other = 0;
};

struct MeanVector {
  Eigen::VectorXd mu;
};

// Symmetric covariance estimate. Off-diagonal entries are written through
// set_pair so sigma(i, j) and sigma(j, i) are always the same double.
// Pairwise estimation does not guarantee positive semidefiniteness; every
// entry does satisfy |sigma_ij| <= sqrt(sigma_ii * sigma_jj).
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;
  explicit CovarianceMatrix(Eigen::Index p)
      : sigma_(Eigen::MatrixXd::Zero(p, p)) {}
  // Adopts a matrix that is already exactly symmetric (validated).
  explicit CovarianceMatrix(Eigen::MatrixXd sigma);

  Eigen::Index size() const { return sigma_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const {
    return sigma_(i, j);
  }
  const Eigen::MatrixXd& matrix() const { return sigma_; }

  void set_diagonal(Eigen::Index i, double value) { sigma_(i, i) = value; }
  void set_pair(Eigen::Index i, Eigen::Index j, double value) {
    sigma_(i, j) = value;
    sigma_(j, i) = value;
  }

 private:
  Eigen::MatrixXd sigma_;
};

PairStats pair_stats(const MaskedMatrix& centered, Eigen::Index i,
                     Eigen::Index j);

// Profiled log-likelihood in sigma12 (additive constant fixed to 0).
// Requires sigma11 > 0, sigma22 > 0 and sigma22 - sigma12^2/sigma11 > 0.
double eta(double sigma12, const PairStats& stats, double sigma11,
           double sigma22);

// Maximum-likelihood off-diagonal estimate: the real root of
//   m*s^3 - s12*s^2 + (s22*sigma11 + s11*sigma22 - m*sigma11*sigma22)*s
//     - s12*sigma11*sigma22 = 0
// inside the band s^2 < sigma11*sigma22 that maximizes eta. Near-ties in
// eta (relative 1e-9) resolve to the root closest to `fallback`, the
// case-deletion estimate for the pair. Returns 0 when m = 0 and the
// clipped fallback when no root lands inside the band.
double solve_sigma12(const PairStats& stats, double sigma11, double sigma22,
                     double fallback);

// Uncorrected covariance over co-observed rows, recentered on the
// co-observed subsample means; 0 when fewer than two co-observed rows.
double case_deletion_cov(const MaskedMatrix& centered, Eigen::Index i,
                         Eigen::Index j);

// Direct parameter estimation for randomly missing data: available-entry
// means and variances plus pairwise maximum-likelihood covariances.
// Every feature needs at least one observed entry.
std::pair<MeanVector, CovarianceMatrix> dper_fit(const MaskedMatrix& x);

}  // namespace dimv
