#pragma once

// Forward-mode scalar with two fixed derivative directions (alpha, beta).
//
// The value component evolves through exactly the same floating-point
// operations, in the same order, as a plain double would; this makes the
// primal stream of a tangent-mode run bit-identical to a primal-only run.
// Non-finite results propagate; overflow detection lives in the integrator.

namespace stiffsense {

struct TangentScalar {
  double value = 0.0;
  double d_alpha = 0.0;
  double d_beta = 0.0;
};

// Constants carry zero derivative.
constexpr TangentScalar const_scalar(double v) { return {v, 0.0, 0.0}; }

// Seeds: exactly one derivative component equal to 1.
constexpr TangentScalar seed_alpha(double v) { return {v, 1.0, 0.0}; }
constexpr TangentScalar seed_beta(double v) { return {v, 0.0, 1.0}; }

constexpr TangentScalar operator+(TangentScalar a, TangentScalar b) {
  return {a.value + b.value, a.d_alpha + b.d_alpha, a.d_beta + b.d_beta};
}

constexpr TangentScalar operator-(TangentScalar a, TangentScalar b) {
  return {a.value - b.value, a.d_alpha - b.d_alpha, a.d_beta - b.d_beta};
}

// Product rule, fixed expression order: a.value*b.d + b.value*a.d.
constexpr TangentScalar operator*(TangentScalar a, TangentScalar b) {
  return {a.value * b.value,
          a.value * b.d_alpha + b.value * a.d_alpha,
          a.value * b.d_beta + b.value * a.d_beta};
}

// Scaling by a plain constant.
constexpr TangentScalar operator*(double k, TangentScalar a) {
  return {k * a.value, k * a.d_alpha, k * a.d_beta};
}

}  // namespace stiffsense
