#pragma once

#include <optional>
#include <string>

#include "stiffsense/tangent.hpp"

// The flame-propagation right-hand side f(x; alpha, beta) = alpha*x^2 - beta*x^3,
// its analytic partial derivatives, and its tangent-mode evaluation.

namespace stiffsense {

struct ModelParams {
  double alpha = 1.0;  // surface-area coefficient, > 0
  double beta = 1.0;   // volume coefficient, > 0
  double sigma = 1e-4; // initial radius, in (0, alpha/beta)
};

// Returns a description of the first violated constraint, or nullopt if valid.
std::optional<std::string> check_params(const ModelParams& p);

struct RhsPartials {
  double df_dx;
  double df_dalpha;
  double df_dbeta;
};

// Shared evaluation order for the primal and tangent paths:
// (alpha * (x*x)) - (beta * ((x*x)*x)). The tangent instantiation produces a
// value stream bit-identical to the double instantiation.
template <class Scalar>
constexpr Scalar flame_rhs(Scalar x, Scalar alpha, Scalar beta) {
  const Scalar x2 = x * x;
  return alpha * x2 - beta * (x2 * x);
}

inline double rhs(double x, const ModelParams& p) {
  return flame_rhs(x, p.alpha, p.beta);
}

inline TangentScalar rhs_tangent(TangentScalar x, const ModelParams& p) {
  return flame_rhs(x, seed_alpha(p.alpha), seed_beta(p.beta));
}

// (2*alpha*x - 3*beta*x^2, x^2, -x^3); the analytic oracle for the AD path.
inline RhsPartials rhs_partials(double x, const ModelParams& p) {
  const double x2 = x * x;
  return {2.0 * p.alpha * x - 3.0 * p.beta * x2, x2, -(x2 * x)};
}

}  // namespace stiffsense
