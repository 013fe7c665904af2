#include "hohmm/mfcc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hohmm {

namespace {

constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

// Triangular mel filterbank over power-spectrum bins 0..fft/2, unit peaks.
std::vector<double> mel_filterbank(int n_filters, int fft_size, double sample_rate) {
  const int bins = fft_size / 2 + 1;
  std::vector<double> bank(static_cast<std::size_t>(n_filters) * bins, 0.0);

  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(n_filters + 2);
  for (int i = 0; i < n_filters + 2; ++i)
    edges[i] = mel_to_hz(mel_max * i / (n_filters + 1));

  for (int f = 0; f < n_filters; ++f) {
    const double lo = edges[f], center = edges[f + 1], hi = edges[f + 2];
    for (int b = 0; b < bins; ++b) {
      const double hz = sample_rate * b / fft_size;
      double w = 0.0;
      if (hz > lo && hz < center)
        w = (hz - lo) / (center - lo);
      else if (hz >= center && hz < hi)
        w = (hi - hz) / (hi - center);
      bank[static_cast<std::size_t>(f) * bins + b] = w;
    }
  }
  return bank;
}

}  // namespace

namespace detail {

void fft(std::vector<std::complex<double>>& data) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: size must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<double> delta_coefficients(const std::vector<double>& values, std::size_t frames,
                                       int dim, int window) {
  if (window < 1) throw std::invalid_argument("delta window must be >= 1");
  double denom = 0.0;
  for (int w = 1; w <= window; ++w) denom += 2.0 * w * w;

  std::vector<double> deltas(values.size());
  const auto at = [&](std::ptrdiff_t t, int d) {
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(frames) - 1;
    const std::ptrdiff_t clamped = t < 0 ? 0 : (t > last ? last : t);
    return values[static_cast<std::size_t>(clamped) * dim + d];
  };
  for (std::size_t t = 0; t < frames; ++t)
    for (int d = 0; d < dim; ++d) {
      double num = 0.0;
      for (int w = 1; w <= window; ++w)
        num += w * (at(static_cast<std::ptrdiff_t>(t) + w, d) -
                    at(static_cast<std::ptrdiff_t>(t) - w, d));
      deltas[t * dim + d] = num / denom;
    }
  return deltas;
}

}  // namespace detail

void validate_mfcc_config(const MfccConfig& config) {
  if (config.n_static < 2) throw std::invalid_argument("mfcc: n_static must be >= 2");
  if (config.n_mel_filters < config.n_static)
    throw std::invalid_argument("mfcc: need at least n_static mel filters");
  if (config.fft_size != 0 &&
      (config.fft_size < 2 || (config.fft_size & (config.fft_size - 1)) != 0))
    throw std::invalid_argument("mfcc: fft_size must be 0 or a power of two");
  if (config.delta_window < 1) throw std::invalid_argument("mfcc: delta_window must be >= 1");
}

FeatureSequence extract_mfcc(const AudioSignal& signal, const FrameConfig& frame_config,
                             const MfccConfig& mfcc_config) {
  validate_frame_config(frame_config);
  validate_mfcc_config(mfcc_config);

  const AudioSignal at_rate = signal.sample_rate == frame_config.target_rate
                                  ? signal
                                  : resample(signal, frame_config.target_rate);
  const AudioSignal emphasized = preemphasize(at_rate, frame_config.preemphasis_coefficient);
  const std::vector<std::vector<double>> frames = frame_signal(emphasized, frame_config);

  const int frame_len = frame_config.frame_length_samples();
  int fft_size = mfcc_config.fft_size == 0 ? next_pow2(frame_len) : mfcc_config.fft_size;
  if (fft_size < frame_len)
    throw std::invalid_argument("mfcc: fft_size smaller than the frame length");
  const int bins = fft_size / 2 + 1;

  std::vector<double> window(frame_len);
  for (int i = 0; i < frame_len; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (frame_len - 1));

  const std::vector<double> bank =
      mel_filterbank(mfcc_config.n_mel_filters, fft_size, frame_config.target_rate);

  const int n_static = mfcc_config.n_static;
  const int n_filters = mfcc_config.n_mel_filters;
  const std::size_t n_frames = frames.size();

  std::vector<double> statics(n_frames * static_cast<std::size_t>(n_static));
  std::vector<std::complex<double>> spectrum(fft_size);
  std::vector<double> power(bins);
  std::vector<double> log_mel(n_filters);

  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::vector<double>& frame = frames[t];

    double energy = 0.0;
    for (double v : frame) energy += v * v;
    statics[t * n_static] = std::log(std::max(energy, kLogFloor));

    for (int i = 0; i < fft_size; ++i)
      spectrum[i] = i < frame_len ? std::complex<double>(frame[i] * window[i], 0.0)
                                  : std::complex<double>(0.0, 0.0);
    detail::fft(spectrum);
    for (int b = 0; b < bins; ++b) power[b] = std::norm(spectrum[b]);

    for (int f = 0; f < n_filters; ++f) {
      double acc = 0.0;
      const double* row = bank.data() + static_cast<std::size_t>(f) * bins;
      for (int b = 0; b < bins; ++b) acc += row[b] * power[b];
      log_mel[f] = std::log(std::max(acc, kLogFloor));
    }

    // DCT-II, keeping coefficients 1..n_static-1 (slot 0 carries log energy).
    const double scale = std::sqrt(2.0 / n_filters);
    for (int c = 1; c < n_static; ++c) {
      double acc = 0.0;
      for (int f = 0; f < n_filters; ++f)
        acc += log_mel[f] * std::cos(std::numbers::pi * c * (f + 0.5) / n_filters);
      statics[t * n_static + c] = scale * acc;
    }
  }

  FeatureSequence fs;
  fs.dim = mfcc_config.output_dim();
  fs.values.resize(n_frames * static_cast<std::size_t>(fs.dim));
  if (mfcc_config.include_deltas) {
    const std::vector<double> deltas =
        detail::delta_coefficients(statics, n_frames, n_static, mfcc_config.delta_window);
    for (std::size_t t = 0; t < n_frames; ++t) {
      for (int d = 0; d < n_static; ++d) {
        fs.values[t * fs.dim + d] = statics[t * n_static + d];
        fs.values[t * fs.dim + n_static + d] = deltas[t * n_static + d];
      }
    }
  } else {
    fs.values = std::move(statics);
  }
  validate_features(fs);
  return fs;
}

}  // namespace hohmm
