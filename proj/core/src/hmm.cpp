#include "hohmm/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hohmm/io_util.hpp"
#include "hohmm/logsumexp.hpp"

namespace hohmm {

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

namespace {

void check_stochastic(std::span<const double> probs, std::size_t row_len, const std::string& what) {
  if (row_len == 0 || probs.size() % row_len != 0)
    throw std::invalid_argument(what + ": bad shape");
  for (std::size_t base = 0; base < probs.size(); base += row_len) {
    double sum = 0.0;
    for (std::size_t i = 0; i < row_len; ++i) {
      const double p = probs[base + i];
      if (!(p >= 0.0) || p > 1.0 + 1e-12)
        throw std::invalid_argument(what + ": probability out of [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument(what + ": row does not sum to 1 within 1e-9");
  }
}

// Digits of `tuple` in base N, oldest first.
void decode_tuple(std::size_t tuple, int base, int digits, std::span<int> out) {
  for (int u = digits - 1; u >= 0; --u) {
    out[u] = static_cast<int>(tuple % static_cast<std::size_t>(base));
    tuple /= static_cast<std::size_t>(base);
  }
}

double initial_tuple_log_prob(const HmmModel& m, std::span<const int> q) {
  const int n = m.num_states;
  double lp = safe_log(m.initial[q[0]]);
  if (m.order >= 2) lp += safe_log(m.initial_pair[static_cast<std::size_t>(q[0]) * n + q[1]]);
  if (m.order >= 3)
    lp += safe_log(
        m.initial_triple[(static_cast<std::size_t>(q[0]) * n + q[1]) * n + q[2]]);
  return lp;
}

// Emission log densities for every model state at every frame.
std::vector<double> emission_table(const HmmModel& m, const FeatureSequence& obs) {
  const std::size_t frames = obs.frames();
  std::vector<double> logb(static_cast<std::size_t>(m.num_states) * frames);
  for (int s = 0; s < m.num_states; ++s)
    for (std::size_t t = 0; t < frames; ++t)
      logb[static_cast<std::size_t>(s) * frames + t] = log_gmm_density(m.emissions[s], obs.frame(t));
  return logb;
}

// The base used to decode the components of an initial tuple: model states
// for plain models, original states for composite realizations.
int initial_digit_base(const HmmModel& m) {
  return m.composite_span > 1 ? m.composite_base : m.num_states;
}

void check_eval_preconditions(const HmmModel& m, const FeatureSequence& obs) {
  if (obs.dim != m.dim())
    throw std::invalid_argument("observation dim " + std::to_string(obs.dim) +
                                " does not match model dim " + std::to_string(m.dim()));
  if (obs.frames() < static_cast<std::size_t>(m.initial_span()))
    throw std::invalid_argument("observation too short: " + std::to_string(obs.frames()) +
                                " frames for initial span " + std::to_string(m.initial_span()));
}

}  // namespace

void validate_model(const HmmModel& m) {
  if (m.order < 1 || m.order > 3)
    throw std::invalid_argument("model: order must be 1, 2, or 3");
  if (m.num_states < 1) throw std::invalid_argument("model: needs at least one state");
  const std::size_t n = static_cast<std::size_t>(m.num_states);
  if (m.initial.size() != n) throw std::invalid_argument("model: initial size mismatch");
  if (m.initial_pair.size() != (m.order >= 2 ? n * n : 0))
    throw std::invalid_argument("model: initial_pair size mismatch");
  if (m.initial_triple.size() != (m.order >= 3 ? n * n * n : 0))
    throw std::invalid_argument("model: initial_triple size mismatch");
  if (m.transition.size() != ipow(m.num_states, m.order + 1))
    throw std::invalid_argument("model: transition tensor size mismatch");
  if (m.emissions.size() != n) throw std::invalid_argument("model: emission count mismatch");

  check_stochastic(m.initial, n, "initial");
  if (m.order >= 2) check_stochastic(m.initial_pair, n, "initial_pair");
  if (m.order >= 3) check_stochastic(m.initial_triple, n, "initial_triple");
  check_stochastic(m.transition, n, "transition");

  const int dim = m.emissions.front().dim;
  const int mixtures = m.emissions.front().mixtures();
  for (const GmmEmission& e : m.emissions) {
    if (e.dim != dim || e.mixtures() != mixtures)
      throw std::invalid_argument("model: emissions must share M and D");
    validate_emission(e, 0.0);
    for (double v : e.variances)
      if (!(v > 0.0)) throw std::invalid_argument("model: variance must be positive");
  }

  if (m.composite_span > 1) {
    if (m.order != 1)
      throw std::invalid_argument("model: composite realization must have order 1");
    if (m.composite_base < 1 || ipow(m.composite_base, m.composite_span) != n)
      throw std::invalid_argument("model: composite_base^span != num_states");
  } else if (m.composite_span != 1) {
    throw std::invalid_argument("model: composite_span must be >= 1");
  }
}

double state_sequence_log_prob(const HmmModel& m, std::span<const int> q) {
  if (q.size() < static_cast<std::size_t>(m.order))
    throw std::invalid_argument("state sequence shorter than model order");
  const int n = m.num_states;
  for (int s : q)
    if (s < 0 || s >= n) throw std::invalid_argument("state index out of range");

  double lp = initial_tuple_log_prob(m, q);
  for (std::size_t t = static_cast<std::size_t>(m.order); t < q.size(); ++t) {
    std::size_t h = 0;
    for (int u = m.order; u >= 1; --u) h = h * n + static_cast<std::size_t>(q[t - u]);
    lp += safe_log(m.transition[h * n + static_cast<std::size_t>(q[t])]);
  }
  return lp;
}

double joint_log_prob(const HmmModel& m, std::span<const int> q, const FeatureSequence& obs) {
  check_eval_preconditions(m, obs);
  const std::size_t frames = obs.frames();
  const int span = m.initial_span();
  const std::size_t want = frames - static_cast<std::size_t>(span) + 1 +
                           static_cast<std::size_t>(m.order) - 1;
  if (q.size() != want)
    throw std::invalid_argument("state sequence length " + std::to_string(q.size()) +
                                " does not match " + std::to_string(want));

  double lp = state_sequence_log_prob(m, q);
  if (m.composite_span > 1) {
    // First tuple emits the first span observations through its components.
    std::vector<int> digits(span);
    decode_tuple(static_cast<std::size_t>(q[0]), m.composite_base, span, digits);
    for (int u = 0; u < span; ++u)
      lp += log_gmm_density(m.emissions[digits[u]], obs.frame(static_cast<std::size_t>(u)));
    for (std::size_t i = 1; i < q.size(); ++i)
      lp += log_gmm_density(m.emissions[q[i]], obs.frame(static_cast<std::size_t>(span) - 1 + i));
  } else {
    for (std::size_t t = 0; t < frames; ++t)
      lp += log_gmm_density(m.emissions[q[t]], obs.frame(t));
  }
  return lp;
}

double forward_log_likelihood(const HmmModel& m, const FeatureSequence& obs) {
  check_eval_preconditions(m, obs);
  const std::size_t frames = obs.frames();
  const int n = m.num_states;
  const int span = m.initial_span();
  const std::size_t tuples = ipow(n, m.order);
  const std::size_t tail = tuples / static_cast<std::size_t>(n);

  const std::vector<double> logb = emission_table(m, obs);
  const auto lb = [&](int state, std::size_t t) {
    return logb[static_cast<std::size_t>(state) * frames + t];
  };

  std::vector<double> alpha(tuples);
  {
    const int digit_base = initial_digit_base(m);
    std::vector<int> digits(std::max(span, m.order));
    for (std::size_t s = 0; s < tuples; ++s) {
      decode_tuple(s, n, m.order, std::span<int>(digits.data(), m.order));
      double v = initial_tuple_log_prob(m, std::span<const int>(digits.data(), m.order));
      if (m.composite_span > 1)
        decode_tuple(s, digit_base, span, std::span<int>(digits.data(), span));
      for (int u = 0; u < span; ++u)
        v += lb(digits[u], static_cast<std::size_t>(u));
      alpha[s] = v;
    }
  }

  std::vector<double> log_a(m.transition.size());
  for (std::size_t i = 0; i < log_a.size(); ++i) log_a[i] = safe_log(m.transition[i]);

  std::vector<double> next(tuples);
  for (std::size_t t = static_cast<std::size_t>(span); t < frames; ++t) {
    std::fill(next.begin(), next.end(), kLogZero);
    for (std::size_t s = 0; s < tuples; ++s) {
      if (alpha[s] == kLogZero) continue;
      const std::size_t shifted = (s % tail) * static_cast<std::size_t>(n);
      for (int w = 0; w < n; ++w) {
        const double la = log_a[s * n + static_cast<std::size_t>(w)];
        if (la == kLogZero) continue;
        double& slot = next[shifted + static_cast<std::size_t>(w)];
        slot = log_add(slot, alpha[s] + la);
      }
    }
    for (std::size_t s = 0; s < tuples; ++s)
      if (next[s] != kLogZero) next[s] += lb(static_cast<int>(s % n), t);
    alpha.swap(next);
  }
  return log_sum(alpha);
}

ViterbiResult viterbi(const HmmModel& m, const FeatureSequence& obs) {
  check_eval_preconditions(m, obs);
  const std::size_t frames = obs.frames();
  const int n = m.num_states;
  const int span = m.initial_span();
  const std::size_t tuples = ipow(n, m.order);
  const std::size_t tail = tuples / static_cast<std::size_t>(n);

  const std::vector<double> logb = emission_table(m, obs);
  const auto lb = [&](int state, std::size_t t) {
    return logb[static_cast<std::size_t>(state) * frames + t];
  };

  std::vector<double> best(tuples);
  {
    const int digit_base = initial_digit_base(m);
    std::vector<int> digits(std::max(span, m.order));
    for (std::size_t s = 0; s < tuples; ++s) {
      decode_tuple(s, n, m.order, std::span<int>(digits.data(), m.order));
      double v = initial_tuple_log_prob(m, std::span<const int>(digits.data(), m.order));
      if (m.composite_span > 1)
        decode_tuple(s, digit_base, span, std::span<int>(digits.data(), span));
      for (int u = 0; u < span; ++u)
        v += lb(digits[u], static_cast<std::size_t>(u));
      best[s] = v;
    }
  }

  std::vector<double> log_a(m.transition.size());
  for (std::size_t i = 0; i < log_a.size(); ++i) log_a[i] = safe_log(m.transition[i]);

  const std::size_t steps = frames - static_cast<std::size_t>(span);
  // back[t][tuple] = predecessor tuple chosen entering step t.
  std::vector<std::vector<std::size_t>> back(steps, std::vector<std::size_t>(tuples));
  std::vector<double> next(tuples);
  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t t = static_cast<std::size_t>(span) + step;
    std::fill(next.begin(), next.end(), kLogZero);
    for (std::size_t s = 0; s < tuples; ++s) {
      if (best[s] == kLogZero) continue;
      const std::size_t shifted = (s % tail) * static_cast<std::size_t>(n);
      for (int w = 0; w < n; ++w) {
        const double la = log_a[s * n + static_cast<std::size_t>(w)];
        if (la == kLogZero) continue;
        const double cand = best[s] + la;
        const std::size_t s2 = shifted + static_cast<std::size_t>(w);
        if (cand > next[s2]) {
          next[s2] = cand;
          back[step][s2] = s;
        }
      }
    }
    for (std::size_t s2 = 0; s2 < tuples; ++s2)
      if (next[s2] != kLogZero) next[s2] += lb(static_cast<int>(s2 % n), t);
    best.swap(next);
  }

  std::size_t arg = 0;
  for (std::size_t s = 1; s < tuples; ++s)
    if (best[s] > best[arg]) arg = s;

  ViterbiResult result;
  result.log_prob = best[arg];

  std::vector<std::size_t> tuple_path(steps + 1);
  tuple_path[steps] = arg;
  for (std::size_t step = steps; step > 0; --step)
    tuple_path[step - 1] = back[step - 1][tuple_path[step]];

  // Expand tuples to one state per time step (plain models) or keep the
  // tuple-state path (composite realizations).
  if (m.composite_span > 1) {
    result.states.assign(tuple_path.begin(), tuple_path.end());
  } else {
    std::vector<int> digits(m.order);
    decode_tuple(tuple_path[0], n, m.order, digits);
    result.states.assign(digits.begin(), digits.end());
    for (std::size_t step = 1; step <= steps; ++step)
      result.states.push_back(static_cast<int>(tuple_path[step] % static_cast<std::size_t>(n)));
  }
  return result;
}

HmmModel order_reduce(const HmmModel& m) {
  validate_model(m);
  if (m.order == 1) return m;

  const int n = m.num_states;
  const std::size_t tuples = ipow(n, m.order);
  const std::size_t tail = tuples / static_cast<std::size_t>(n);

  HmmModel out;
  out.order = 1;
  out.num_states = static_cast<int>(tuples);
  out.composite_span = m.order;
  out.composite_base = n;

  out.initial.resize(tuples);
  std::vector<int> digits(m.order);
  for (std::size_t s = 0; s < tuples; ++s) {
    decode_tuple(s, n, m.order, digits);
    double p = m.initial[digits[0]];
    if (m.order >= 2) p *= m.initial_pair[static_cast<std::size_t>(digits[0]) * n + digits[1]];
    if (m.order >= 3)
      p *= m.initial_triple[(static_cast<std::size_t>(digits[0]) * n + digits[1]) * n + digits[2]];
    out.initial[s] = p;
  }

  out.transition.assign(tuples * tuples, 0.0);
  for (std::size_t s = 0; s < tuples; ++s) {
    const std::size_t shifted = (s % tail) * static_cast<std::size_t>(n);
    for (int w = 0; w < n; ++w)
      out.transition[s * tuples + shifted + static_cast<std::size_t>(w)] =
          m.transition[s * n + static_cast<std::size_t>(w)];
  }

  out.emissions.reserve(tuples);
  for (std::size_t s = 0; s < tuples; ++s)
    out.emissions.push_back(m.emissions[s % static_cast<std::size_t>(n)]);

  validate_model(out);
  return out;
}

namespace {
constexpr char kMagic[4] = {'H', 'O', 'H', 'M'};
constexpr uint32_t kVersion = 1;
}  // namespace

HmmModel read_hohm(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  ByteReader r(bytes, "HOHM " + path.string());
  r.expect_magic(kMagic);
  const uint32_t version = r.u32_le();
  if (version != kVersion)
    throw std::runtime_error("HOHM " + path.string() + ": unsupported version " + std::to_string(version));
  HmmModel m;
  m.order = r.u8();
  const uint32_t n = r.u32_le();
  const uint32_t mixtures = r.u32_le();
  const uint32_t dim = r.u32_le();
  if (m.order < 1 || m.order > 3 || n == 0 || mixtures == 0 || dim == 0)
    throw std::runtime_error("HOHM " + path.string() + ": bad header");
  m.num_states = static_cast<int>(n);

  const auto read_block = [&r](std::vector<double>& dst, std::size_t count) {
    dst.resize(count);
    for (double& v : dst) v = r.f64_le();
  };
  read_block(m.initial, n);
  if (m.order >= 2) read_block(m.initial_pair, static_cast<std::size_t>(n) * n);
  if (m.order >= 3) read_block(m.initial_triple, static_cast<std::size_t>(n) * n * n);
  read_block(m.transition, ipow(m.num_states, m.order + 1));
  m.emissions.resize(n);
  for (GmmEmission& e : m.emissions) {
    e.dim = static_cast<int>(dim);
    read_block(e.weights, mixtures);
    read_block(e.means, static_cast<std::size_t>(mixtures) * dim);
    read_block(e.variances, static_cast<std::size_t>(mixtures) * dim);
  }
  r.require_exhausted();
  validate_model(m);
  return m;
}

void write_hohm(const HmmModel& m, const std::filesystem::path& path) {
  validate_model(m);
  if (m.composite_span > 1)
    throw std::invalid_argument("HOHM: composite realizations are not serializable");
  std::string bytes;
  bytes.append(kMagic, 4);
  put_u32_le(bytes, kVersion);
  put_u8(bytes, static_cast<uint8_t>(m.order));
  put_u32_le(bytes, static_cast<uint32_t>(m.num_states));
  put_u32_le(bytes, static_cast<uint32_t>(m.mixtures()));
  put_u32_le(bytes, static_cast<uint32_t>(m.dim()));
  const auto write_block = [&bytes](const std::vector<double>& src) {
    for (double v : src) put_f64_le(bytes, v);
  };
  write_block(m.initial);
  write_block(m.initial_pair);
  write_block(m.initial_triple);
  write_block(m.transition);
  for (const GmmEmission& e : m.emissions) {
    write_block(e.weights);
    write_block(e.means);
    write_block(e.variances);
  }
  atomic_write_file(path, bytes);
}

}  // namespace hohmm
