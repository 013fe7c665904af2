#ifndef HOHMM_WAV_HPP
#define HOHMM_WAV_HPP

#include <filesystem>

#include "hohmm/audio.hpp"

namespace hohmm {

// 16-bit PCM mono WAV. Multi-channel or non-PCM input is rejected.
AudioSignal read_wav(const std::filesystem::path& path);
void write_wav(const AudioSignal& signal, const std::filesystem::path& path);

}  // namespace hohmm

#endif
