#include "hohmm/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "hohmm/logsumexp.hpp"

namespace hohmm {

namespace {

constexpr double kWeightFloor = 1e-6;
constexpr double kAbsoluteVarianceFloor = 1e-10;

struct DataStats {
  std::size_t total_frames = 0;
  std::vector<double> mean;
  std::vector<double> variance;  // ML (1/n) per dimension
};

DataStats data_stats(const std::vector<FeatureSequence>& train, int dim) {
  DataStats stats;
  stats.mean.assign(dim, 0.0);
  stats.variance.assign(dim, 0.0);
  for (const FeatureSequence& fs : train) {
    for (std::size_t t = 0; t < fs.frames(); ++t) {
      const auto x = fs.frame(t);
      for (int d = 0; d < dim; ++d) {
        stats.mean[d] += x[d];
        stats.variance[d] += x[d] * x[d];
      }
    }
    stats.total_frames += fs.frames();
  }
  if (stats.total_frames == 0) throw std::invalid_argument("training set has no frames");
  for (int d = 0; d < dim; ++d) {
    stats.mean[d] /= static_cast<double>(stats.total_frames);
    stats.variance[d] =
        stats.variance[d] / static_cast<double>(stats.total_frames) - stats.mean[d] * stats.mean[d];
    if (stats.variance[d] < 0.0) stats.variance[d] = 0.0;
  }
  return stats;
}

std::vector<double> variance_floors(const DataStats& stats, double relative_floor) {
  std::vector<double> floors(stats.variance.size());
  for (std::size_t d = 0; d < floors.size(); ++d)
    floors[d] = std::max(relative_floor * stats.variance[d], kAbsoluteVarianceFloor);
  return floors;
}

int check_common_dim(const std::vector<FeatureSequence>& train) {
  if (train.empty()) throw std::invalid_argument("training set is empty");
  const int dim = train.front().dim;
  for (const FeatureSequence& fs : train) {
    if (fs.dim != dim) throw std::invalid_argument("training utterances disagree on dim");
    if (fs.frames() == 0) throw std::invalid_argument("empty training utterance");
  }
  return dim;
}

// Lloyd's algorithm with deterministic seeding; ties go to the lowest
// center index, empty clusters keep their previous center.
struct KmeansResult {
  std::vector<double> centers;      // k * dim
  std::vector<int> assignment;      // per point
  std::vector<std::size_t> counts;  // per center
};

KmeansResult kmeans(const std::vector<const double*>& points, int dim, int k, uint64_t seed) {
  const std::size_t n = points.size();
  KmeansResult result;
  result.centers.assign(static_cast<std::size_t>(k) * dim, 0.0);
  result.assignment.assign(n, 0);
  result.counts.assign(k, 0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  for (int c = 0; c < k; ++c)
    for (int d = 0; d < dim; ++d)
      result.centers[static_cast<std::size_t>(c) * dim + d] = points[order[c]][d];

  for (int iteration = 0; iteration < 25; ++iteration) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double dist = 0.0;
        for (int d = 0; d < dim; ++d) {
          const double diff = points[i][d] - result.centers[static_cast<std::size_t>(c) * dim + d];
          dist += diff * diff;
        }
        if (dist < best_dist) {
          best_dist = dist;
          best = c;
        }
      }
      if (result.assignment[i] != best) {
        result.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed && iteration > 0) break;

    std::vector<double> sums(static_cast<std::size_t>(k) * dim, 0.0);
    std::fill(result.counts.begin(), result.counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int c = result.assignment[i];
      ++result.counts[c];
      for (int d = 0; d < dim; ++d) sums[static_cast<std::size_t>(c) * dim + d] += points[i][d];
    }
    for (int c = 0; c < k; ++c) {
      if (result.counts[c] == 0) continue;
      for (int d = 0; d < dim; ++d)
        result.centers[static_cast<std::size_t>(c) * dim + d] =
            sums[static_cast<std::size_t>(c) * dim + d] / static_cast<double>(result.counts[c]);
    }
  }
  return result;
}

void floor_weights(std::vector<double>& weights) {
  double sum = 0.0;
  for (double& w : weights) {
    w = std::max(w, kWeightFloor);
    sum += w;
  }
  for (double& w : weights) w /= sum;
}

void floor_variances(std::vector<double>& variances, const std::vector<double>& floors, int dim) {
  for (std::size_t i = 0; i < variances.size(); ++i)
    variances[i] = std::max(variances[i], floors[i % static_cast<std::size_t>(dim)]);
}

uint64_t derive_seed(uint64_t seed, uint64_t salt) {
  // splitmix64 step over seed ^ salt
  uint64_t z = seed ^ (salt * 0x9e3779b97f4a7c15ull);
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

void validate_train_config(const TrainConfig& config) {
  if (config.n_states < 1) throw std::invalid_argument("train config: n_states must be >= 1");
  if (config.n_mixtures < 1) throw std::invalid_argument("train config: n_mixtures must be >= 1");
  if (config.order < 1 || config.order > 3)
    throw std::invalid_argument("train config: order must be 1, 2, or 3");
  if (config.max_iterations < 1)
    throw std::invalid_argument("train config: max_iterations must be >= 1");
  if (!(config.log_likelihood_tolerance > 0.0))
    throw std::invalid_argument("train config: tolerance must be > 0");
  if (!(config.variance_floor > 0.0))
    throw std::invalid_argument("train config: variance_floor must be > 0");
}

HmmModel init_model(const std::vector<FeatureSequence>& train, const TrainConfig& config) {
  validate_train_config(config);
  const int dim = check_common_dim(train);
  const int n = config.n_states;
  const int mixtures = config.n_mixtures;

  const DataStats stats = data_stats(train, dim);
  if (stats.total_frames < static_cast<std::size_t>(n) * static_cast<std::size_t>(mixtures))
    throw std::invalid_argument("insufficient data: need at least n_states * n_mixtures frames");
  const std::vector<double> floors = variance_floors(stats, config.variance_floor);

  // Pool frames per state by uniform-duration segmentation of each utterance.
  std::vector<std::vector<const double*>> pools(n);
  for (const FeatureSequence& fs : train) {
    const std::size_t frames = fs.frames();
    for (int s = 0; s < n; ++s) {
      const std::size_t begin = frames * static_cast<std::size_t>(s) / n;
      const std::size_t end = frames * (static_cast<std::size_t>(s) + 1) / n;
      for (std::size_t t = begin; t < end; ++t) pools[s].push_back(fs.frame(t).data());
    }
  }

  HmmModel model;
  model.order = config.order;
  model.num_states = n;
  model.initial.assign(n, 1.0 / n);
  if (config.order >= 2) model.initial_pair.assign(static_cast<std::size_t>(n) * n, 1.0 / n);
  if (config.order >= 3)
    model.initial_triple.assign(static_cast<std::size_t>(n) * n * n, 1.0 / n);
  model.transition.assign(ipow(n, config.order + 1), 1.0 / n);

  model.emissions.resize(n);
  for (int s = 0; s < n; ++s) {
    const auto& pool = pools[s];
    if (pool.size() < static_cast<std::size_t>(mixtures))
      throw std::invalid_argument("insufficient data for state " + std::to_string(s) + ": " +
                                  std::to_string(pool.size()) + " frames for " +
                                  std::to_string(mixtures) + " mixtures");
    const KmeansResult km =
        kmeans(pool, dim, mixtures, derive_seed(config.rng_seed, static_cast<uint64_t>(s)));

    GmmEmission& e = model.emissions[s];
    e.dim = dim;
    e.weights.assign(mixtures, 0.0);
    e.means = km.centers;
    e.variances.assign(static_cast<std::size_t>(mixtures) * dim, 0.0);

    for (int c = 0; c < mixtures; ++c)
      e.weights[c] = static_cast<double>(km.counts[c]) / static_cast<double>(pool.size());
    floor_weights(e.weights);

    for (std::size_t i = 0; i < pool.size(); ++i) {
      const int c = km.assignment[i];
      for (int d = 0; d < dim; ++d) {
        const double diff = pool[i][d] - e.means[static_cast<std::size_t>(c) * dim + d];
        e.variances[static_cast<std::size_t>(c) * dim + d] += diff * diff;
      }
    }
    for (int c = 0; c < mixtures; ++c) {
      if (km.counts[c] == 0) {
        // Empty cluster: fall back to the global spread around its center.
        for (int d = 0; d < dim; ++d)
          e.variances[static_cast<std::size_t>(c) * dim + d] = stats.variance[d];
        continue;
      }
      for (int d = 0; d < dim; ++d)
        e.variances[static_cast<std::size_t>(c) * dim + d] /= static_cast<double>(km.counts[c]);
    }
    floor_variances(e.variances, floors, dim);
  }

  validate_model(model);
  return model;
}

namespace {

// One utterance's forward/backward pass over history tuples. Rows cover
// times span-1 .. T-1 of the observation.
struct Lattice {
  std::size_t rows = 0;
  std::size_t tuples = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
  double log_likelihood = kLogZero;

  double* alpha_row(std::size_t r) { return alpha.data() + r * tuples; }
  double* beta_row(std::size_t r) { return beta.data() + r * tuples; }
};

struct Accumulators {
  std::vector<double> initial, initial_pair, initial_triple, transition;
  std::vector<double> mix_weight;          // N * M
  std::vector<double> mix_mean, mix_sq;    // N * M * D
};

}  // namespace

TrainResult baum_welch(const std::vector<FeatureSequence>& train, const HmmModel& init,
                       const TrainConfig& config) {
  validate_train_config(config);
  validate_model(init);
  if (init.composite_span > 1)
    throw std::invalid_argument("baum_welch: train the native-order model, not a composite");
  const int dim = check_common_dim(train);
  if (dim != init.dim()) throw std::invalid_argument("baum_welch: model/data dim mismatch");
  const int n = init.num_states;
  const int order = init.order;
  const int mixtures = init.mixtures();
  for (const FeatureSequence& fs : train)
    if (fs.frames() < static_cast<std::size_t>(order))
      throw std::invalid_argument("baum_welch: utterance shorter than model order");

  const DataStats stats = data_stats(train, dim);
  const std::vector<double> floors = variance_floors(stats, config.variance_floor);

  const std::size_t tuples = ipow(n, order);
  const std::size_t tail = tuples / static_cast<std::size_t>(n);
  const std::size_t nd = static_cast<std::size_t>(n);

  TrainResult result;
  result.model = init;

  std::vector<double> log_a(result.model.transition.size());

  for (int iteration = 0; iteration <= config.max_iterations; ++iteration) {
    HmmModel& model = result.model;
    for (std::size_t i = 0; i < log_a.size(); ++i) log_a[i] = safe_log(model.transition[i]);

    Accumulators acc;
    acc.initial.assign(nd, 0.0);
    acc.initial_pair.assign(order >= 2 ? nd * nd : 0, 0.0);
    acc.initial_triple.assign(order >= 3 ? nd * nd * nd : 0, 0.0);
    acc.transition.assign(model.transition.size(), 0.0);
    acc.mix_weight.assign(nd * mixtures, 0.0);
    acc.mix_mean.assign(nd * mixtures * dim, 0.0);
    acc.mix_sq.assign(nd * mixtures * dim, 0.0);

    double total_ll = 0.0;
    std::vector<double> lcomp(mixtures);
    std::vector<int> digits(order);

    for (const FeatureSequence& fs : train) {
      const std::size_t frames = fs.frames();
      const std::size_t rows = frames - static_cast<std::size_t>(order) + 1;

      // Emission log densities per state and frame.
      std::vector<double> logb(nd * frames);
      for (int s = 0; s < n; ++s)
        for (std::size_t t = 0; t < frames; ++t)
          logb[static_cast<std::size_t>(s) * frames + t] =
              log_gmm_density(model.emissions[s], fs.frame(t));
      const auto lb = [&](std::size_t state, std::size_t t) { return logb[state * frames + t]; };

      Lattice lat;
      lat.rows = rows;
      lat.tuples = tuples;
      lat.alpha.assign(rows * tuples, kLogZero);
      lat.beta.assign(rows * tuples, kLogZero);

      // Forward.
      {
        double* a0 = lat.alpha_row(0);
        for (std::size_t s = 0; s < tuples; ++s) {
          std::size_t rest = s;
          for (int u = order - 1; u >= 0; --u) {
            digits[u] = static_cast<int>(rest % nd);
            rest /= nd;
          }
          double v = safe_log(model.initial[digits[0]]);
          if (order >= 2) v += safe_log(model.initial_pair[static_cast<std::size_t>(digits[0]) * nd + digits[1]]);
          if (order >= 3)
            v += safe_log(model.initial_triple[(static_cast<std::size_t>(digits[0]) * nd + digits[1]) * nd + digits[2]]);
          for (int u = 0; u < order; ++u) v += lb(digits[u], static_cast<std::size_t>(u));
          a0[s] = v;
        }
      }
      for (std::size_t row = 1; row < rows; ++row) {
        const std::size_t t = static_cast<std::size_t>(order) - 1 + row;
        const double* prev = lat.alpha_row(row - 1);
        double* cur = lat.alpha_row(row);
        for (std::size_t s = 0; s < tuples; ++s) {
          if (prev[s] == kLogZero) continue;
          const std::size_t shifted = (s % tail) * nd;
          for (std::size_t w = 0; w < nd; ++w) {
            const double la = log_a[s * nd + w];
            if (la == kLogZero) continue;
            double& slot = cur[shifted + w];
            slot = log_add(slot, prev[s] + la);
          }
        }
        for (std::size_t s = 0; s < tuples; ++s)
          if (cur[s] != kLogZero) cur[s] += lb(s % nd, t);
      }

      lat.log_likelihood = log_sum({lat.alpha_row(rows - 1), tuples});
      if (!std::isfinite(lat.log_likelihood))
        throw std::runtime_error("baum_welch: non-finite likelihood at iteration " +
                                 std::to_string(iteration) +
                                 (fs.source_id.empty() ? std::string() : " on " + fs.source_id));
      total_ll += lat.log_likelihood;

      // Backward.
      std::fill(lat.beta_row(rows - 1), lat.beta_row(rows - 1) + tuples, 0.0);
      for (std::size_t row = rows - 1; row > 0; --row) {
        const std::size_t t = static_cast<std::size_t>(order) - 1 + row;  // frame of `cur`
        const double* next = lat.beta_row(row);
        double* prev = lat.beta_row(row - 1);
        for (std::size_t s = 0; s < tuples; ++s) {
          const std::size_t shifted = (s % tail) * nd;
          double v = kLogZero;
          for (std::size_t w = 0; w < nd; ++w) {
            const double la = log_a[s * nd + w];
            if (la == kLogZero) continue;
            v = log_add(v, la + lb(w, t) + next[shifted + w]);
          }
          prev[s] = v;
        }
      }

      // Initial-tuple posteriors feed the initial tensors and the
      // occupancy of the first `order` frames.
      std::vector<double> occupancy(nd);
      {
        const double* a0 = lat.alpha_row(0);
        const double* b0 = lat.beta_row(0);
        std::vector<double> tuple_gamma(tuples);
        for (std::size_t s = 0; s < tuples; ++s) {
          const double lg = a0[s] + b0[s] - lat.log_likelihood;
          tuple_gamma[s] = lg == kLogZero ? 0.0 : std::exp(lg);
        }
        for (std::size_t s = 0; s < tuples; ++s) {
          const double g = tuple_gamma[s];
          if (g == 0.0) continue;
          std::size_t rest = s;
          for (int u = order - 1; u >= 0; --u) {
            digits[u] = static_cast<int>(rest % nd);
            rest /= nd;
          }
          acc.initial[digits[0]] += g;
          if (order >= 2) acc.initial_pair[static_cast<std::size_t>(digits[0]) * nd + digits[1]] += g;
          if (order >= 3)
            acc.initial_triple[(static_cast<std::size_t>(digits[0]) * nd + digits[1]) * nd + digits[2]] += g;
        }
        // Mixture statistics for frames 0 .. order-2 come from marginals of
        // the initial tuple posterior; frames order-1 .. T-1 are handled in
        // the main loop below.
        for (int u = 0; u + 1 < order; ++u) {
          std::fill(occupancy.begin(), occupancy.end(), 0.0);
          for (std::size_t s = 0; s < tuples; ++s) {
            if (tuple_gamma[s] == 0.0) continue;
            const std::size_t digit =
                (s / ipow(n, order - 1 - u)) % nd;
            occupancy[digit] += tuple_gamma[s];
          }
          for (std::size_t x = 0; x < nd; ++x) {
            if (occupancy[x] <= 0.0) continue;
            const auto frame = fs.frame(static_cast<std::size_t>(u));
            log_gmm_component_densities(model.emissions[x], frame, lcomp);
            const double denom = lb(x, static_cast<std::size_t>(u));
            for (int c = 0; c < mixtures; ++c) {
              if (lcomp[c] == kLogZero) continue;
              const double resp = occupancy[x] * std::exp(lcomp[c] - denom);
              acc.mix_weight[x * mixtures + c] += resp;
              for (int d = 0; d < dim; ++d) {
                acc.mix_mean[(x * mixtures + c) * dim + d] += resp * frame[d];
                acc.mix_sq[(x * mixtures + c) * dim + d] += resp * frame[d] * frame[d];
              }
            }
          }
        }
      }

      // Per-frame state occupancy and transition statistics.
      for (std::size_t row = 0; row < rows; ++row) {
        const std::size_t t = static_cast<std::size_t>(order) - 1 + row;
        const double* a = lat.alpha_row(row);
        const double* b = lat.beta_row(row);
        std::fill(occupancy.begin(), occupancy.end(), 0.0);
        for (std::size_t s = 0; s < tuples; ++s) {
          const double lg = a[s] + b[s] - lat.log_likelihood;
          if (lg == kLogZero) continue;
          occupancy[s % nd] += std::exp(lg);
        }
        for (std::size_t x = 0; x < nd; ++x) {
          if (occupancy[x] <= 0.0) continue;
          const auto frame = fs.frame(t);
          log_gmm_component_densities(model.emissions[x], frame, lcomp);
          const double denom = lb(x, t);
          for (int c = 0; c < mixtures; ++c) {
            if (lcomp[c] == kLogZero) continue;
            const double resp = occupancy[x] * std::exp(lcomp[c] - denom);
            acc.mix_weight[x * mixtures + c] += resp;
            for (int d = 0; d < dim; ++d) {
              acc.mix_mean[(x * mixtures + c) * dim + d] += resp * frame[d];
              acc.mix_sq[(x * mixtures + c) * dim + d] += resp * frame[d] * frame[d];
            }
          }
        }

        if (row + 1 < rows) {
          const double* bn = lat.beta_row(row + 1);
          for (std::size_t s = 0; s < tuples; ++s) {
            if (a[s] == kLogZero) continue;
            const std::size_t shifted = (s % tail) * nd;
            for (std::size_t w = 0; w < nd; ++w) {
              const double la = log_a[s * nd + w];
              if (la == kLogZero) continue;
              const double lxi = a[s] + la + lb(w, t + 1) + bn[shifted + w] - lat.log_likelihood;
              if (lxi != kLogZero) acc.transition[s * nd + w] += std::exp(lxi);
            }
          }
        }
      }
    }

    if (!std::isfinite(total_ll))
      throw std::runtime_error("baum_welch: non-finite total log-likelihood at iteration " +
                               std::to_string(iteration));
    result.log_likelihoods.push_back(total_ll);

    const std::size_t count = result.log_likelihoods.size();
    if (count >= 2 &&
        total_ll - result.log_likelihoods[count - 2] < config.log_likelihood_tolerance)
      break;
    if (iteration == config.max_iterations) break;

    // M-step. Rows with no mass keep their previous values.
    HmmModel& model_out = result.model;
    const auto normalize_rows = [](std::vector<double>& dst, const std::vector<double>& acc_block,
                                   std::size_t row_len) {
      for (std::size_t base = 0; base < acc_block.size(); base += row_len) {
        double sum = 0.0;
        for (std::size_t i = 0; i < row_len; ++i) sum += acc_block[base + i];
        if (sum <= 0.0) continue;
        for (std::size_t i = 0; i < row_len; ++i) dst[base + i] = acc_block[base + i] / sum;
      }
    };
    normalize_rows(model_out.initial, acc.initial, nd);
    if (order >= 2) normalize_rows(model_out.initial_pair, acc.initial_pair, nd);
    if (order >= 3) normalize_rows(model_out.initial_triple, acc.initial_triple, nd);
    normalize_rows(model_out.transition, acc.transition, nd);

    for (std::size_t x = 0; x < nd; ++x) {
      GmmEmission& e = model_out.emissions[x];
      double total_weight = 0.0;
      for (int c = 0; c < mixtures; ++c) total_weight += acc.mix_weight[x * mixtures + c];
      if (total_weight <= 0.0) continue;  // state unseen, keep old emission
      for (int c = 0; c < mixtures; ++c) {
        const double cw = acc.mix_weight[x * mixtures + c];
        e.weights[c] = cw / total_weight;
        if (cw <= 0.0) continue;  // component collapsed, keep old mean/variance
        for (int d = 0; d < dim; ++d) {
          const double mean = acc.mix_mean[(x * mixtures + c) * dim + d] / cw;
          const double sq = acc.mix_sq[(x * mixtures + c) * dim + d] / cw;
          e.means[static_cast<std::size_t>(c) * dim + d] = mean;
          e.variances[static_cast<std::size_t>(c) * dim + d] = sq - mean * mean;
        }
      }
      floor_weights(e.weights);
      floor_variances(e.variances, floors, dim);
    }
  }

  validate_model(result.model);
  return result;
}

}  // namespace hohmm
