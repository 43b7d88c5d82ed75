#include "stiffsense/model.hpp"

#include <cmath>

namespace stiffsense {

std::optional<std::string> check_params(const ModelParams& p) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) return "alpha must be finite and > 0";
  if (!(p.beta > 0.0) || !std::isfinite(p.beta)) return "beta must be finite and > 0";
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) return "sigma must be finite and > 0";
  if (!(p.sigma < p.alpha / p.beta)) return "sigma must be below the steady state alpha/beta";
  return std::nullopt;
}

}  // namespace stiffsense
