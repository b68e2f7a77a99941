#pragma once

// Brute-force reference implementations used as test oracles. They share no
// code with the library beyond the Matrix/Vector typedefs.

#include "dppmm/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using dppmm::Matrix;
using dppmm::Vector;

inline Matrix
normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
              double mean = 0.0, double sd = 1.0)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(mean, sd);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = n(rng);
  return m;
}

inline std::vector<double>
normal_vector(std::size_t n, std::uint64_t seed, double mean = 0.0,
              double sd = 1.0)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mean, sd);
  std::vector<double> v(n);
  for (auto& x : v)
    x = d(rng);
  return v;
}

inline std::vector<double>
column(const Matrix& m, Eigen::Index j)
{
  return std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows());
}

// Linear binning followed by an O(N B) direct Gaussian sum, clamped and
// normalised so that dz * sum = 1.
inline std::vector<double>
direct_binned_kde(const std::vector<double>& samples, double h,
                  const std::vector<double>& z)
{
  const std::size_t B = z.size();
  const double dz = z[1] - z[0];
  std::vector<double> w(B, 0.0);
  for (double s : samples) {
    double u = (s - z[0]) / dz;
    auto i = static_cast<std::size_t>(std::floor(u));
    if (i >= B - 1)
      i = B - 2;
    const double f = u - static_cast<double>(i);
    w[i] += 1.0 - f;
    w[i + 1] += f;
  }
  std::vector<double> out(B, 0.0);
  const double c = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * h);
  for (std::size_t i = 0; i < B; ++i)
    for (std::size_t k = 0; k < B; ++k) {
      const double r = (z[i] - z[k]) / h;
      out[i] += w[k] * c * std::exp(-0.5 * r * r);
    }
  double total = 0.0;
  for (auto& v : out) {
    v = std::max(0.0, v);
    total += v;
  }
  for (auto& v : out)
    v /= total * dz;
  return out;
}

// Direct O(N B) KDE on raw samples (no binning).
inline std::vector<double>
direct_kde(const std::vector<double>& samples, double h,
           const std::vector<double>& z)
{
  std::vector<double> out(z.size(), 0.0);
  const double c = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * h *
                          static_cast<double>(samples.size()));
  for (std::size_t i = 0; i < z.size(); ++i)
    for (double s : samples) {
      const double r = (z[i] - s) / h;
      out[i] += c * std::exp(-0.5 * r * r);
    }
  return out;
}

inline double
variance(const Vector& v)
{
  const double m = v.mean();
  return (v.array() - m).square().mean();
}

// Maximiser of |Var(X p) - Var(Y p)| over `count` unit directions
// p = (cos a, sin a), a in [0, pi).
inline Vector
scan_direction_2d(const Matrix& x, const Matrix& y, int count)
{
  double best = -1.0;
  Vector arg(2);
  for (int k = 0; k < count; ++k) {
    const double a = std::numbers::pi * k / count;
    Vector p(2);
    p << std::cos(a), std::sin(a);
    const double v = std::abs(variance(x * p) - variance(y * p));
    if (v > best) {
      best = v;
      arg = p;
    }
  }
  return arg;
}

// Angle in degrees between two lines (sign ignored).
inline double
line_angle_deg(const Vector& a, const Vector& b)
{
  const double c =
    std::min(1.0, std::abs(a.dot(b)) / (a.norm() * b.norm()));
  return std::acos(c) * 180.0 / std::numbers::pi;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double
ks_distance(std::vector<double> a, std::vector<double> b)
{
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t)
      ++i;
    while (j < b.size() && b[j] <= t)
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

// Naive unbiased MMD^2 with kernel exp(-|x-y|^2 / (2 s^2)).
inline double
naive_mmd2(const Matrix& x, const Matrix& y, double s)
{
  auto k = [s](const auto& a, const auto& b) {
    return std::exp(-(a - b).squaredNorm() / (2.0 * s * s));
  };
  const auto n1 = x.rows(), n2 = y.rows();
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n1; ++j)
      if (i != j)
        xx += k(x.row(i), x.row(j));
  for (Eigen::Index i = 0; i < n2; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      if (i != j)
        yy += k(y.row(i), y.row(j));
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      xy += k(x.row(i), y.row(j));
  const double a = static_cast<double>(n1), b = static_cast<double>(n2);
  return xx / (a * (a - 1)) + yy / (b * (b - 1)) - 2.0 * xy / (a * b);
}

inline double
median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double
mean(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x;
  return s / static_cast<double>(v.size());
}

inline double
std_error(const std::vector<double>& v)
{
  const double m = mean(v);
  double s = 0.0;
  for (double x : v)
    s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

inline std::vector<double>
concat(const std::vector<double>& a, const std::vector<double>& b)
{
  std::vector<double> out(a.size() + b.size());
  std::copy(a.begin(), a.end(), out.begin());
  std::copy(b.begin(), b.end(), out.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return out;
}

} // namespace oracle
