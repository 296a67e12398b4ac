#include "greenlb/random.hpp"

#include <utility>

#include "greenlb/error.hpp"

namespace greenlb {

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

RandomStream RandomStream::derive(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> labels) {
  return RandomStream(derive_seed(seed, std::span(labels.begin(), labels.size())));
}

double RandomStream::next_uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::span<const std::uint64_t> labels) {
  // std::seed_seq::generate is fully specified by the standard.
  std::vector<std::uint32_t> words;
  words.reserve(2 * (labels.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto label : labels) push(label);
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

ScriptedUniforms::ScriptedUniforms(std::vector<double> draws) : draws_(std::move(draws)) {}

double ScriptedUniforms::next_uniform() {
  if (next_ >= draws_.size()) {
    throw LogicError("scripted uniform source exhausted after " + std::to_string(next_) +
                     " draws");
  }
  return draws_[next_++];
}

}  // namespace greenlb
