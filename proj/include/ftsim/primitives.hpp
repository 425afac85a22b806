#pragma once

// Scalar/vector primitives shared by the estimators and controllers:
// the fractional-power odd map sig^theta, the signum (exact or smoothed
// through a boundary layer), and the Nussbaum gain function.

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace ftsim {

enum class SignumMode { exact, boundary_layer };

// Policy for evaluating discontinuous signum terms under discrete
// integration. exact: -1/0/+1 with sgn(0) = 0. boundary_layer:
// x / (|x| + epsilon), a smooth surrogate that suppresses chattering.
struct SignumPolicy {
  SignumMode mode = SignumMode::exact;
  double epsilon = 1e-3;

  static SignumPolicy exact_mode() { return {SignumMode::exact, 0.0}; }
  static SignumPolicy boundary_layer_mode(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("SignumPolicy: epsilon must be > 0");
    return {SignumMode::boundary_layer, eps};
  }
};

template <typename Scalar>
inline Scalar sgn(Scalar v) {
  return v > Scalar(0) ? Scalar(1) : (v < Scalar(0) ? Scalar(-1) : Scalar(0));
}

template <typename Scalar>
inline Scalar sig_pow_scalar(Scalar v, Scalar theta) {
  if (v == Scalar(0)) return Scalar(0);
  return sgn(v) * std::pow(std::abs(v), theta);
}

// Componentwise sgn(x_k)|x_k|^theta for theta in (0,1].
template <typename Derived>
auto sig_pow(const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar theta) {
  using Scalar = typename Derived::Scalar;
  if (!(theta > Scalar(0)) || theta > Scalar(1))
    throw std::invalid_argument("sig_pow: exponent must lie in (0, 1]");
  return x.unaryExpr([theta](Scalar v) { return sig_pow_scalar(v, theta); });
}

template <typename Scalar>
inline Scalar signum_scalar(Scalar v, const SignumPolicy& policy) {
  if (policy.mode == SignumMode::exact) return sgn(v);
  return v / (std::abs(v) + Scalar(policy.epsilon));
}

template <typename Derived>
auto signum(const Eigen::MatrixBase<Derived>& x, const SignumPolicy& policy) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([policy](Scalar v) { return signum_scalar(v, policy); });
}

// N(kappa) = exp(kappa^2) cos((pi/2) kappa) + 1. Its running mean
// (1/k) int_0^k N(s) ds oscillates to both +inf and -inf, which is what
// lets the control law cope with unknown control-direction signs.
// Overflows to +-inf for |kappa| beyond ~26; callers guard well before that.
inline double nussbaum(double kappa) {
  return std::exp(kappa * kappa) * std::cos((M_PI / 2.0) * kappa) + 1.0;
}

}  // namespace ftsim
