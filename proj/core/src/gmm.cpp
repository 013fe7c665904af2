#include "hohmm/gmm.hpp"

#include <cmath>
#include <stdexcept>

#include "hohmm/logsumexp.hpp"

namespace hohmm {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
}

void validate_emission(const GmmEmission& e, double variance_floor) {
  if (e.dim <= 0) throw std::invalid_argument("emission: dim must be >= 1");
  const std::size_t m = e.weights.size();
  if (m == 0) throw std::invalid_argument("emission: needs at least one component");
  const std::size_t md = m * static_cast<std::size_t>(e.dim);
  if (e.means.size() != md || e.variances.size() != md)
    throw std::invalid_argument("emission: means/variances shape mismatch");
  double sum = 0.0;
  for (double w : e.weights) {
    if (!(w >= 0.0) || w > 1.0) throw std::invalid_argument("emission: weight out of [0,1]");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("emission: weights must sum to 1 within 1e-9");
  for (double v : e.variances)
    if (!(v >= variance_floor) || !std::isfinite(v))
      throw std::invalid_argument("emission: variance below floor");
  for (double mu : e.means)
    if (!std::isfinite(mu)) throw std::invalid_argument("emission: non-finite mean");
}

static double log_diag_normal(std::span<const double> x, std::span<const double> mu,
                              std::span<const double> var) {
  double log_det = 0.0;
  double quad = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = x[d] - mu[d];
    log_det += std::log(var[d]);
    quad += diff * diff / var[d];
  }
  return -0.5 * (static_cast<double>(x.size()) * kLog2Pi + log_det + quad);
}

double log_gmm_density(const GmmEmission& e, std::span<const double> x) {
  if (static_cast<int>(x.size()) != e.dim)
    throw std::invalid_argument("log_gmm_density: dimension mismatch");
  double acc = kLogZero;
  for (int m = 0; m < e.mixtures(); ++m) {
    if (e.weights[m] <= 0.0) continue;
    acc = log_add(acc, std::log(e.weights[m]) + log_diag_normal(x, e.mean(m), e.variance(m)));
  }
  return acc;
}

void log_gmm_component_densities(const GmmEmission& e, std::span<const double> x,
                                 std::span<double> out) {
  if (static_cast<int>(x.size()) != e.dim || out.size() != e.weights.size())
    throw std::invalid_argument("log_gmm_component_densities: shape mismatch");
  for (int m = 0; m < e.mixtures(); ++m) {
    out[m] = e.weights[m] > 0.0
                 ? std::log(e.weights[m]) + log_diag_normal(x, e.mean(m), e.variance(m))
                 : kLogZero;
  }
}

}  // namespace hohmm
