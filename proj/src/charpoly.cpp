#include "cal/charpoly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "cal/errors.hpp"

namespace cal {

namespace {

constexpr double kRealityRelTol = 1e-9;
constexpr int kNewtonIterations = 8;

std::complex<double> derivative(const QuarticCoefficients& p, std::complex<double> x) {
  return ((4.0 * x + 3.0 * p.b) * x + 2.0 * p.c) * x + p.d;
}

std::complex<double> polish(const QuarticCoefficients& p, std::complex<double> z) {
  double residual = std::abs(p.evaluate(z));
  for (int it = 0; it < kNewtonIterations && residual > 0.0; ++it) {
    const auto slope = derivative(p, z);
    if (slope == std::complex<double>(0.0, 0.0)) break;
    const auto next = z - p.evaluate(z) / slope;
    const double next_residual = std::abs(p.evaluate(next));
    if (!(next_residual < residual)) break;
    z = next;
    residual = next_residual;
  }
  return z;
}

}  // namespace

double QuarticCoefficients::max_abs() const {
  return std::max({std::abs(b), std::abs(c), std::abs(d), std::abs(e)});
}

std::complex<double> QuarticCoefficients::evaluate(std::complex<double> x) const {
  return (((x + b) * x + c) * x + d) * x + e;
}

double DepressedQuartic::max_abs() const {
  return std::max({std::abs(q), std::abs(r), std::abs(s)});
}

std::complex<double> DepressedQuartic::evaluate(std::complex<double> z) const {
  const auto z2 = z * z;
  return (z2 + q) * z2 + r * z + s;
}

double RootSet::max_real() const {
  double m = -INFINITY;
  for (const auto& z : roots) m = std::max(m, z.real());
  return m;
}

double RootSet::max_abs_imag() const {
  double m = 0.0;
  for (const auto& z : roots) m = std::max(m, std::abs(z.imag()));
  return m;
}

std::string_view to_string(RealityClass c) {
  switch (c) {
    case RealityClass::FourDistinctReal: return "FourDistinctReal";
    case RealityClass::RealTwoEqual: return "RealTwoEqual";
    case RealityClass::TwoPairsEqualReal: return "TwoPairsEqualReal";
    case RealityClass::RealThreeEqual: return "RealThreeEqual";
    case RealityClass::AllZeroLike: return "AllZeroLike";
    case RealityClass::HasComplex: return "HasComplex";
  }
  return "Unknown";
}

double reality_tolerance(const DepressedQuartic& d) {
  return kRealityRelTol * (1.0 + d.max_abs());
}

QuarticCoefficients cal_to_charpoly(const CALParameters& p) {
  if (p.mu == 0.0) throw DegenerateMass();
  const double th = p.theta;
  return QuarticCoefficients{
      2.0 * th,
      (th * th * p.mu + th * p.gamma - p.nu) / p.mu,
      (th * th * p.gamma - th * p.nu) / p.mu,
      p.k / p.mu,
  };
}

bool routh_hurwitz_stable(const QuarticCoefficients& p) {
  const auto [b, c, d, e] = p;
  if (!(b > 0.0 && c > 0.0)) return false;
  if (!(0.0 < d && d < b * c)) return false;
  return 0.0 < e && e < (b * c * d - d * d) / (b * b);
}

double discriminant(double q, double r, double s) {
  const double q2 = q * q;
  const double r2 = r * r;
  return 256.0 * s * s * s - 128.0 * q2 * s * s + 144.0 * q * r2 * s - 27.0 * r2 * r2 +
         16.0 * q2 * q2 * s - 4.0 * q2 * q * r2;
}

DepressedQuartic depress(const QuarticCoefficients& p) {
  const auto [b, c, d, e] = p;
  const double b2 = b * b;
  DepressedQuartic out;
  out.q = c - 3.0 * b2 / 8.0;
  out.r = b2 * b / 8.0 - b * c / 2.0 + d;
  out.s = b2 * c / 16.0 - 3.0 * b2 * b2 / 256.0 - b * d / 4.0 + e;
  out.delta = discriminant(out.q, out.r, out.s);
  return out;
}

RealityClass classify_reality(const DepressedQuartic& dq) {
  const double tol = reality_tolerance(dq);
  auto lt = [tol](double a, double b) { return a < b - tol; };
  auto gt = [tol](double a, double b) { return a > b + tol; };
  auto eq = [tol](double a, double b) { return std::abs(a - b) <= tol; };

  const double q = dq.q;
  const double s = dq.s;
  const double q2 = q * q;
  const bool delta_zero = eq(dq.delta, 0.0);

  if (lt(q, 0.0) && lt(4.0 * s - q2, 0.0) && gt(dq.delta, 0.0))
    return RealityClass::FourDistinctReal;
  if (gt(s, -q2 / 12.0) && lt(s, q2 / 4.0) && delta_zero) return RealityClass::RealTwoEqual;
  if (lt(q, 0.0) && eq(s, q2 / 4.0) && delta_zero) return RealityClass::TwoPairsEqualReal;
  if (lt(q, 0.0) && eq(s, -q2 / 12.0) && delta_zero) return RealityClass::RealThreeEqual;
  if (eq(q, 0.0) && eq(s, 0.0) && delta_zero) return RealityClass::AllZeroLike;
  return RealityClass::HasComplex;
}

RootSet roots(const QuarticCoefficients& p) {
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion.row(0) << -p.b, -p.c, -p.d, -p.e;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(3, 2) = 1.0;

  Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, /*computeEigenvectors=*/false);
  const auto& eig = solver.eigenvalues();

  RootSet out;
  for (int i = 0; i < 4; ++i) out.roots[static_cast<std::size_t>(i)] = polish(p, eig(i));
  std::sort(out.roots.begin(), out.roots.end(), [](const auto& x, const auto& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

}  // namespace cal
