#include "hohmm/audio.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hohmm {

int FrameConfig::frame_length_samples() const {
  return static_cast<int>(std::lround(frame_length_ms * target_rate / 1000.0));
}

int FrameConfig::hop_samples() const {
  const int len = frame_length_samples();
  return len - static_cast<int>(std::lround(overlap_fraction * len));
}

void validate_frame_config(const FrameConfig& config) {
  if (!(config.frame_length_ms > 0.0)) throw std::invalid_argument("frame length must be > 0");
  if (!(config.overlap_fraction >= 0.0) || config.overlap_fraction >= 1.0)
    throw std::invalid_argument("overlap fraction must be in [0,1)");
  if (!(config.preemphasis_coefficient >= 0.0) || config.preemphasis_coefficient >= 1.0)
    throw std::invalid_argument("pre-emphasis coefficient must be in [0,1)");
  if (!(config.target_rate > 0.0)) throw std::invalid_argument("target rate must be > 0");
  if (config.frame_length_samples() < 1) throw std::invalid_argument("frame shorter than one sample");
  if (config.hop_samples() < 1) throw std::invalid_argument("hop shorter than one sample");
}

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

AudioSignal resample(const AudioSignal& signal, double target_rate) {
  if (!(target_rate > 0.0)) throw std::invalid_argument("resample: target rate must be > 0");
  if (!(signal.sample_rate > 0.0)) throw std::invalid_argument("resample: input rate must be > 0");
  if (signal.samples.empty()) throw std::invalid_argument("resample: empty signal");
  if (signal.sample_rate == target_rate) return signal;

  const double ratio = target_rate / signal.sample_rate;
  const std::size_t out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(signal.samples.size()) * ratio));
  if (out_len == 0) throw std::invalid_argument("resample: output would be empty");

  // Kernel cutoff sits just below the smaller Nyquist (in cycles per input
  // sample); Hann-windowed sinc with 16 zero crossings per side.
  const double cutoff = 0.5 * std::min(1.0, ratio) * 0.95;
  const int half_width = static_cast<int>(std::ceil(16.0 / (2.0 * cutoff)));
  const auto& x = signal.samples;
  const long n_in = static_cast<long>(x.size());

  AudioSignal out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) / ratio;
    const long lo = std::max(0L, static_cast<long>(std::ceil(pos)) - half_width);
    const long hi = std::min(n_in - 1, static_cast<long>(std::floor(pos)) + half_width);
    double acc = 0.0;
    for (long j = lo; j <= hi; ++j) {
      const double d = pos - static_cast<double>(j);
      const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * d / half_width));
      acc += x[j] * 2.0 * cutoff * sinc(2.0 * cutoff * d) * window;
    }
    out.samples[i] = acc;
  }
  return out;
}

AudioSignal preemphasize(const AudioSignal& signal, double coefficient) {
  if (!(coefficient >= 0.0) || coefficient >= 1.0)
    throw std::invalid_argument("pre-emphasis coefficient must be in [0,1)");
  if (signal.samples.empty()) throw std::invalid_argument("preemphasize: empty signal");
  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  out.samples.resize(signal.samples.size());
  out.samples[0] = signal.samples[0];
  for (std::size_t i = 1; i < signal.samples.size(); ++i)
    out.samples[i] = signal.samples[i] - coefficient * signal.samples[i - 1];
  return out;
}

std::vector<std::vector<double>> frame_signal(const AudioSignal& signal,
                                              const FrameConfig& config) {
  validate_frame_config(config);
  const std::size_t frame_len = static_cast<std::size_t>(config.frame_length_samples());
  const std::size_t hop = static_cast<std::size_t>(config.hop_samples());
  if (signal.samples.size() < frame_len)
    throw std::invalid_argument("frame_signal: signal shorter than one frame");

  const std::size_t count = (signal.samples.size() - frame_len) / hop + 1;
  std::vector<std::vector<double>> frames;
  frames.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto begin = signal.samples.begin() + static_cast<std::ptrdiff_t>(k * hop);
    frames.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(frame_len));
  }
  return frames;
}

}  // namespace hohmm
