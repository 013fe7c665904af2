#ifndef HOHMM_MFCC_HPP
#define HOHMM_MFCC_HPP

#include <complex>
#include <vector>

#include "hohmm/audio.hpp"
#include "hohmm/features.hpp"

namespace hohmm {

struct MfccConfig {
  int n_static = 19;          // log energy + n_static-1 cepstral coefficients
  bool include_deltas = true;
  int n_mel_filters = 26;
  int fft_size = 0;           // 0 = next power of two >= frame length
  int delta_window = 2;

  int output_dim() const { return include_deltas ? 2 * n_static : n_static; }
};

void validate_mfcc_config(const MfccConfig& config);

// Full front end: resample to the frame config's target rate, pre-emphasize,
// frame, Hamming-window, power spectrum, mel filterbank, log (floored at
// 1e-10), DCT-II keeping n_static coefficients with c0 replaced by the log
// frame energy, then delta appending when enabled.
FeatureSequence extract_mfcc(const AudioSignal& signal, const FrameConfig& frame_config,
                             const MfccConfig& mfcc_config);

namespace detail {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& data);

// Regression deltas over +/- window frames with edge replication, applied
// column-wise to a T x dim row-major matrix.
std::vector<double> delta_coefficients(const std::vector<double>& values, std::size_t frames,
                                       int dim, int window);

}  // namespace detail

}  // namespace hohmm

#endif
