#pragma once

// Coefficient model of the learning dynamics and its admissibility predicates.

namespace cal {

/// Coefficients of the kinetic term as they appear in the action before
/// aggregation. xi is +1 for the minimization setting, -1 for mechanics.
struct RawParameters {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double k = 0.0;
  double theta = 1.0;
  int xi = 1;

  bool operator==(const RawParameters&) const = default;
};

/// Aggregated coefficients (theta, mu, nu, gamma, k) of the fourth-order law
///   mu q'''' + 2 theta mu q''' + (theta^2 mu + theta gamma - nu) q''
///     + (theta^2 gamma - theta nu) q' + k q + grad U = 0.
struct CALParameters {
  double theta = 1.0;
  double mu = 1.0;
  double nu = 0.0;
  double gamma = 0.0;
  double k = 0.0;

  bool operator==(const CALParameters&) const = default;
};

/// Second-order reduced law  inertia * q'' + damping * q' = -stiffness * q - grad U,
/// with inertia = 1/theta. Obtained either from the CAL law with mu = nu = 0,
/// gamma = 1/theta^2 (xi = +1) or from dissipative mechanics with
/// mu = gamma = 0, nu = 1/theta (xi = -1); both reduce to the same equation.
struct GradientFlowMode {
  double theta = 1.0;
  double inertia = 1.0;
  double damping = 1.0;
  double stiffness = 0.0;
  int xi = 1;

  bool operator==(const GradientFlowMode&) const = default;
};

/// mu = alpha + gamma2^2, nu = beta + gamma1^2, gamma = gamma1 gamma2.
/// Throws InvalidTheta if theta <= 0.
CALParameters derive(const RawParameters& raw);

/// mu > gamma2^2, nu > gamma1^2 and k > 0. `p` is expected to come from `raw`.
bool coercivity_ok(const CALParameters& p, const RawParameters& raw);

/// The stability/aperiodicity sufficient conditions, evaluated literally:
///   mu < gamma2^2, nu < gamma1^2, nu < theta gamma1 gamma2,
///   0 < k < (nu - theta gamma1 gamma2)^2 / (4 mu),
///   (gamma1 < 0 and gamma2 < gamma1/theta) or (gamma1 > 0 and gamma2 > gamma1/theta).
/// Throws InvalidTheta if theta <= 0 and DivisionByZero if mu == 0.
bool proposition_ok(double theta, double mu, double nu, double gamma1, double gamma2, double k);

/// Throws InvalidTheta if theta <= 0.
GradientFlowMode gradient_flow_params(double theta, double k, int xi = 1);

/// CAL coefficients that realize the reduced law for xi = +1: mu = nu = 0,
/// gamma = 1/theta^2. Useful for reporting; integrating them requires the
/// second-order path since mu = 0.
CALParameters gradient_flow_cal_coefficients(double theta, double k);

}  // namespace cal
