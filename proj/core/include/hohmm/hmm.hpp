#ifndef HOHMM_HMM_HPP
#define HOHMM_HMM_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hohmm/features.hpp"
#include "hohmm/gmm.hpp"

namespace hohmm {

// Hidden Markov model whose state transitions condition on the previous
// `order` states (order 1, 2, or 3). Stochastic tensors are stored as flat
// linear-domain probabilities, last index fastest:
//
//   initial[i]                          P(q_1 = i)
//   initial_pair[i*N + j]               P(q_2 = j | q_1 = i), order >= 2
//   initial_triple[(i*N + j)*N + k]     P(q_3 = k | q_1 = i, q_2 = j), order 3
//   transition[h*N + w]                 P(next = w | history tuple h)
//
// where a history tuple h encodes the previous `order` states in base N,
// oldest state in the highest digit.
//
// A model produced by order_reduce() is an order-1 model over composite
// tuple states; composite_span/composite_base record that its initial
// distribution jointly covers the first composite_span observations (one
// per tuple component). Plain models keep composite_span == 1.
struct HmmModel {
  int order = 1;
  int num_states = 0;
  std::vector<double> initial;
  std::vector<double> initial_pair;
  std::vector<double> initial_triple;
  std::vector<double> transition;
  std::vector<GmmEmission> emissions;
  int composite_span = 1;
  int composite_base = 0;

  int dim() const { return emissions.empty() ? 0 : emissions.front().dim; }
  int mixtures() const { return emissions.empty() ? 0 : emissions.front().mixtures(); }
  // Observations a forward/viterbi evaluation consumes before the first
  // transition factor applies.
  int initial_span() const { return composite_span > 1 ? composite_span : order; }
};

std::size_t ipow(int base, int exp);

// Throws std::invalid_argument when any structural or stochasticity
// invariant fails (tensor shapes, rows summing to 1 within 1e-9, weights,
// positive variances).
void validate_model(const HmmModel& model);

// log P(q) for a full state sequence (0-based state indices, length >= order).
double state_sequence_log_prob(const HmmModel& model, std::span<const int> states);

// log P(q, O). For plain models |q| must equal the frame count; for
// composite models |q| = frames - span + 1 (the first tuple emits the
// first `span` observations through its components).
double joint_log_prob(const HmmModel& model, std::span<const int> states,
                      const FeatureSequence& obs);

// log P(O | model), summed over all state sequences; forward recursion over
// history tuples, entirely in the log domain.
double forward_log_likelihood(const HmmModel& model, const FeatureSequence& obs);

struct ViterbiResult {
  std::vector<int> states;
  double log_prob = 0.0;
};

// Most probable state sequence and its joint log probability.
ViterbiResult viterbi(const HmmModel& model, const FeatureSequence& obs);

// Equivalent order-1 realization over N^order composite tuple states.
// Forward likelihood is preserved exactly; order-1 input is returned
// unchanged.
HmmModel order_reduce(const HmmModel& model);

// HOHM model file: magic "HOHM", u32 version = 1, u8 order, u32 N, u32 M,
// u32 D, then initial, initial_pair (order >= 2), initial_triple (order 3),
// transition, and per-state emissions (weights, means, variances), all
// float64 little-endian, last index fastest. Composite realizations are
// in-memory objects and are rejected.
HmmModel read_hohm(const std::filesystem::path& path);
void write_hohm(const HmmModel& model, const std::filesystem::path& path);

}  // namespace hohmm

#endif
