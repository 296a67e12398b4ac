#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace greenlb {

/// Source of uniform draws in [0, 1).
class UniformSource {
 public:
  virtual ~UniformSource() = default;
  virtual double next_uniform() = 0;
};

/// Seeded Mersenne-Twister stream. The mapping from engine output to [0, 1)
/// uses the top 53 bits, so results are identical on every conforming
/// standard library.
class RandomStream final : public UniformSource {
 public:
  explicit RandomStream(std::uint64_t seed);

  /// Independent substream keyed by `seed` and a list of labels.
  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> labels);

  double next_uniform() override;

 private:
  std::mt19937_64 engine_;
};

/// Deterministic seed derivation shared by streams and the sweep runner.
std::uint64_t derive_seed(std::uint64_t seed, std::span<const std::uint64_t> labels);

/// Replays a fixed list of draws; throws `LogicError` once exhausted.
class ScriptedUniforms final : public UniformSource {
 public:
  explicit ScriptedUniforms(std::vector<double> draws);

  double next_uniform() override;
  std::size_t consumed() const noexcept { return next_; }

 private:
  std::vector<double> draws_;
  std::size_t next_ = 0;
};

/// Stream labels used to split one run seed into independent substreams.
namespace stream_label {
inline constexpr std::uint64_t kArrivals = 0x61727269;  // "arri"
inline constexpr std::uint64_t kPolicy = 0x706f6c69;    // "poli"
}  // namespace stream_label

}  // namespace greenlb
