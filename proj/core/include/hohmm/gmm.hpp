#ifndef HOHMM_GMM_HPP
#define HOHMM_GMM_HPP

#include <span>
#include <vector>

namespace hohmm {

// Diagonal-covariance Gaussian mixture for one HMM state.
struct GmmEmission {
  int dim = 0;
  std::vector<double> weights;    // M
  std::vector<double> means;      // M * dim, row-major
  std::vector<double> variances;  // M * dim

  int mixtures() const { return static_cast<int>(weights.size()); }
  std::span<const double> mean(int m) const {
    return {means.data() + static_cast<std::size_t>(m) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> variance(int m) const {
    return {variances.data() + static_cast<std::size_t>(m) * dim, static_cast<std::size_t>(dim)};
  }
};

// Checks weight normalization (1e-9), non-negative weights, and positive
// variances at or above `variance_floor`.
void validate_emission(const GmmEmission& e, double variance_floor);

// log sum_m w_m N(x; mu_m, diag sigma2_m), via log-sum-exp.
double log_gmm_density(const GmmEmission& e, std::span<const double> x);

// Per-component log(w_m) + log N(x; mu_m, diag sigma2_m), used by training.
void log_gmm_component_densities(const GmmEmission& e, std::span<const double> x,
                                 std::span<double> out);

}  // namespace hohmm

#endif
