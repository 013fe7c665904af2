#ifndef HOHMM_AUDIO_HPP
#define HOHMM_AUDIO_HPP

#include <vector>

namespace hohmm {

struct AudioSignal {
  std::vector<double> samples;  // amplitudes, nominally in [-1, 1]
  double sample_rate = 0.0;     // Hz
};

struct FrameConfig {
  double frame_length_ms = 20.0;
  double overlap_fraction = 0.3125;
  double preemphasis_coefficient = 0.97;
  double target_rate = 12000.0;

  // 240 samples and a 165-sample hop with the defaults at 12 kHz.
  int frame_length_samples() const;
  int hop_samples() const;
};

void validate_frame_config(const FrameConfig& config);

// Windowed-sinc rate conversion; low-pass below the output Nyquist when
// downsampling. A signal already at target_rate is returned unchanged.
AudioSignal resample(const AudioSignal& signal, double target_rate);

// y[0] = x[0], y[n] = x[n] - coefficient * x[n-1].
AudioSignal preemphasize(const AudioSignal& signal, double coefficient);

// Frames of frame_length_samples starting every hop_samples; the tail that
// does not fill a whole frame is dropped.
std::vector<std::vector<double>> frame_signal(const AudioSignal& signal,
                                              const FrameConfig& config);

}  // namespace hohmm

#endif
