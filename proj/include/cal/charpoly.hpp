#pragma once

// Analysis of the monic quartic  x^4 + b x^3 + c x^2 + d x + e  that governs
// the free (null input) dynamics.

#include <array>
#include <complex>
#include <string_view>

#include "cal/params.hpp"

namespace cal {

struct QuarticCoefficients {
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;

  /// max(|b|, |c|, |d|, |e|)
  double max_abs() const;
  std::complex<double> evaluate(std::complex<double> x) const;

  bool operator==(const QuarticCoefficients&) const = default;
};

/// z^4 + q z^2 + r z + s, with its discriminant.
struct DepressedQuartic {
  double q = 0.0;
  double r = 0.0;
  double s = 0.0;
  double delta = 0.0;

  double max_abs() const;
  std::complex<double> evaluate(std::complex<double> z) const;
};

/// Four roots sorted by (real, imaginary) ascending.
struct RootSet {
  std::array<std::complex<double>, 4> roots{};

  double max_real() const;
  double max_abs_imag() const;
};

enum class RealityClass {
  FourDistinctReal,
  RealTwoEqual,
  TwoPairsEqualReal,
  RealThreeEqual,
  AllZeroLike,
  HasComplex,
};

std::string_view to_string(RealityClass c);

/// Equality tolerance for the measure-zero reality cases: 1e-9 (1 + max|coeff|).
double reality_tolerance(const DepressedQuartic& d);

/// (2θ, (θ²μ+θγ−ν)/μ, (θ²γ−θν)/μ, k/μ). Throws DegenerateMass if μ == 0.
QuarticCoefficients cal_to_charpoly(const CALParameters& params);

/// Routh–Hurwitz for the quartic:
/// b > 0, c > 0, 0 < d < bc, 0 < e < (bcd − d²)/b².
bool routh_hurwitz_stable(const QuarticCoefficients& p);

/// Substitutes x = z − b/4.
DepressedQuartic depress(const QuarticCoefficients& p);

/// 256s³ − 128q²s² + 144qr²s − 27r⁴ + 16q⁴s − 4q³r²
double discriminant(double q, double r, double s);

/// First matching case, in order, of the real-root conditions on the depressed
/// quartic; HasComplex if none applies.
RealityClass classify_reality(const DepressedQuartic& d);

/// Companion-matrix eigenvalues polished by Newton steps on the quartic.
RootSet roots(const QuarticCoefficients& p);

}  // namespace cal
