#include "dppmm/ot1d.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>

namespace dppmm {

namespace {

void
check_grid(const Vector& z)
{
  if (z.size() < 8)
    throw InvalidInput("KDE grid needs at least 8 points");
  const double dz = z(1) - z(0);
  if (!(dz > 0.0))
    throw InvalidInput("KDE grid must be ascending");
  const double tol = 1e-9 * dz;
  for (Eigen::Index i = 1; i < z.size(); ++i)
    if (std::abs((z(i) - z(i - 1)) - dz) > tol)
      throw InvalidInput("KDE grid must be equispaced");
}

} // namespace

Vector
linear_bin(std::span<const double> samples, const Vector& z)
{
  const auto B = z.size();
  const double lo = z(0);
  const double dz = (z(B - 1) - z(0)) / static_cast<double>(B - 1);
  Vector w = Vector::Zero(B);
  for (double s : samples) {
    if (!(s >= lo && s <= z(B - 1)))
      throw InvalidInput("KDE sample " + std::to_string(s) +
                         " lies outside the grid range");
    const double u = (s - lo) / dz;
    auto i = static_cast<Eigen::Index>(std::floor(u));
    if (i >= B - 1)
      i = B - 2;
    const double frac = u - static_cast<double>(i);
    w(i) += 1.0 - frac;
    w(i + 1) += frac;
  }
  return w;
}

Vector
fft_kde(std::span<const double> samples, double h, const Vector& z)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw InvalidInput("KDE bandwidth must be positive");
  if (samples.empty())
    throw InvalidInput("KDE needs at least one sample");
  check_grid(z);

  const auto B = static_cast<std::size_t>(z.size());
  const double dz = (z(z.size() - 1) - z(0)) / static_cast<double>(B - 1);
  const Vector weights = linear_bin(samples, z);

  std::size_t P = 1;
  while (P < 2 * B)
    P <<= 1;

  // circularly stored kernel covering every lag in (-(B-1), B-1)
  const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> kernel(P, 0.0);
  for (std::size_t k = 0; k < B; ++k) {
    const double u = static_cast<double>(k) * dz / h;
    const double v = norm * std::exp(-0.5 * u * u);
    kernel[k] = v;
    if (k > 0)
      kernel[P - k] = v;
  }
  std::vector<double> padded(P, 0.0);
  for (std::size_t i = 0; i < B; ++i)
    padded[i] = weights(static_cast<Eigen::Index>(i));

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fk, fw;
  fft.fwd(fk, kernel);
  fft.fwd(fw, padded);
  for (std::size_t i = 0; i < P; ++i)
    fw[i] *= fk[i];
  std::vector<double> conv;
  fft.inv(conv, fw);

  Vector density(static_cast<Eigen::Index>(B));
  for (std::size_t i = 0; i < B; ++i)
    density(static_cast<Eigen::Index>(i)) = std::max(conv[i], 0.0);
  const double total = dz * density.sum();
  if (!(total > 0.0))
    throw NumericError("KDE produced an all-zero density");
  return density / total;
}

} // namespace dppmm
