#include "cal/params.hpp"

#include "cal/errors.hpp"

namespace cal {

CALParameters derive(const RawParameters& raw) {
  if (!(raw.theta > 0.0)) throw InvalidTheta(raw.theta);
  CALParameters p;
  p.theta = raw.theta;
  p.mu = raw.alpha + raw.gamma2 * raw.gamma2;
  p.nu = raw.beta + raw.gamma1 * raw.gamma1;
  p.gamma = raw.gamma1 * raw.gamma2;
  p.k = raw.k;
  return p;
}

bool coercivity_ok(const CALParameters& p, const RawParameters& raw) {
  return p.mu > raw.gamma2 * raw.gamma2 && p.nu > raw.gamma1 * raw.gamma1 && p.k > 0.0;
}

bool proposition_ok(double theta, double mu, double nu, double gamma1, double gamma2,
                    double k) {
  if (!(theta > 0.0)) throw InvalidTheta(theta);
  if (mu == 0.0) throw DivisionByZero("proposition_ok: mu == 0 in the k upper bound");

  const double coupling = theta * gamma1 * gamma2;
  const double k_max = (nu - coupling) * (nu - coupling) / (4.0 * mu);
  const bool signs = (gamma1 < 0.0 && gamma2 < gamma1 / theta) ||
                     (gamma1 > 0.0 && gamma2 > gamma1 / theta);
  return mu < gamma2 * gamma2 && nu < gamma1 * gamma1 && nu < coupling && 0.0 < k &&
         k < k_max && signs;
}

GradientFlowMode gradient_flow_params(double theta, double k, int xi) {
  if (!(theta > 0.0)) throw InvalidTheta(theta);
  if (xi != 1 && xi != -1) throw InvalidArgument("xi must be +1 or -1");
  return GradientFlowMode{theta, 1.0 / theta, 1.0, k, xi};
}

CALParameters gradient_flow_cal_coefficients(double theta, double k) {
  if (!(theta > 0.0)) throw InvalidTheta(theta);
  return CALParameters{theta, 0.0, 0.0, 1.0 / (theta * theta), k};
}

}  // namespace cal
