#include "dppmm/projection.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace dppmm {

Direction::Direction(Vector v)
  : v_(std::move(v))
{
  const double n = v_.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw InvalidInput("direction must be a finite nonzero vector");
  v_ /= n;
}

Direction
Direction::from_unit(Vector v)
{
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > 1e-12)
    throw InvalidInput("stored direction is not a finite unit vector");
  Direction d(Vector::Unit(v.size(), 0));
  d.v_ = std::move(v);
  return d;
}

Vector
canonical_sign(Vector v)
{
  const double tol = 1e-12 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > tol) {
      if (v(k) < 0.0)
        v = -v;
      break;
    }
  }
  return v;
}

namespace {

// 1/n-normalised covariance around the column mean
Matrix
covariance(const Matrix& a, const Vector& mean)
{
  const Matrix c = a.rowwise() - mean.transpose();
  return (c.transpose() * c) / static_cast<double>(a.rows());
}

std::string
condition_report(const Matrix& m)
{
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  std::ostringstream os;
  os << "condition number " << s(0) / s(s.size() - 1);
  return os.str();
}

} // namespace

SaveResult
save_direction(const Matrix& x, const Matrix& y, double ridge)
{
  if (x.rows() < 2 || y.rows() < 2)
    throw InvalidInput("SAVE needs at least two samples in each set");
  if (x.cols() != y.cols() || x.cols() < 1)
    throw InvalidInput("SAVE inputs must share a positive dimension");
  if (!(ridge >= 0.0))
    throw InvalidInput("SAVE ridge must be nonnegative");
  if (!x.allFinite() || !y.allFinite())
    throw InvalidInput("SAVE inputs contain non-finite entries");

  const auto d = x.cols();
  const double n1 = static_cast<double>(x.rows());
  const double n2 = static_cast<double>(y.rows());

  const Vector mean_x = x.colwise().mean().transpose();
  const Vector mean_y = y.colwise().mean().transpose();
  const Vector mean = (n1 * mean_x + n2 * mean_y) / (n1 + n2);

  const Matrix cov_x = covariance(x, mean_x);
  const Matrix cov_y = covariance(y, mean_y);
  const Vector dx = mean_x - mean;
  const Vector dy = mean_y - mean;
  // pooled covariance of the stacked rows, decomposed into within/between
  const Matrix pooled = (n1 * (cov_x + dx * dx.transpose()) +
                         n2 * (cov_y + dy * dy.transpose())) /
                        (n1 + n2);

  Eigen::SelfAdjointEigenSolver<Matrix> pooled_eig(
    pooled + ridge * Matrix::Identity(d, d));
  if (pooled_eig.info() != Eigen::Success)
    throw NumericError("SAVE: eigen-decomposition of pooled covariance "
                       "failed (" +
                       condition_report(pooled) + ")");
  const Vector lambda = pooled_eig.eigenvalues().cwiseMax(0.0);
  Vector inv_sqrt(d);
  for (Eigen::Index k = 0; k < d; ++k)
    inv_sqrt(k) = lambda(k) > 0.0 ? 1.0 / std::sqrt(lambda(k)) : 0.0;
  const Matrix& basis = pooled_eig.eigenvectors();
  const Matrix whiten = basis * inv_sqrt.asDiagonal() * basis.transpose();

  const Matrix gap_x = whiten * (pooled - cov_x) * whiten;
  const Matrix gap_y = whiten * (pooled - cov_y) * whiten;
  Matrix m = 0.5 * (gap_x * gap_x + gap_y * gap_y);
  m = 0.5 * (m + m.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success)
    throw NumericError("SAVE: eigen-decomposition of discrepancy matrix "
                       "failed (" +
                       condition_report(m) + ")");

  const auto& ev = eig.eigenvalues();
  const double top = ev(d - 1);
  Eigen::Index pick = d - 1;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (ev(k) >= top - 1e-12) {
      pick = k;
      break;
    }
  }

  Vector back = whiten * eig.eigenvectors().col(pick);
  if (!(back.norm() > 0.0))
    back = eig.eigenvectors().col(pick);
  back = canonical_sign(back / back.norm());

  SaveDiagnostics diag;
  diag.top_eigenvalue = std::max(top, 0.0);
  diag.informative = top >= kInformativeThreshold;
  return { Direction(std::move(back)), diag };
}

} // namespace dppmm
