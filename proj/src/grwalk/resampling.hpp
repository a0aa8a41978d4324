#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grwalk/model.hpp"
#include "grwalk/types.hpp"

namespace grwalk {

enum class ShuffleMode { Signs, Sizes, Returns, BlockJoint, BlockSeparate };

[[nodiscard]] std::string to_string(ShuffleMode mode);
[[nodiscard]] ShuffleMode parse_shuffle_mode(std::string_view text);
[[nodiscard]] constexpr bool is_block_mode(ShuffleMode m) noexcept {
  return m == ShuffleMode::BlockJoint || m == ShuffleMode::BlockSeparate;
}

struct ShuffleSpec {
  ShuffleMode mode = ShuffleMode::Returns;
  std::size_t block_length = 1;  // block modes only
  std::uint64_t seed = 0;
  std::size_t replicates = 1;

  void validate(std::size_t series_length) const;
};

// All shuffles keep timestamps attached to positions: values move, the time
// grid does not.

[[nodiscard]] ReturnDecomposition shuffle_signs(const ReturnDecomposition& d, std::uint64_t seed);
[[nodiscard]] ReturnDecomposition shuffle_sizes(const ReturnDecomposition& d, std::uint64_t seed);
/// One permutation applied to (sign, size) pairs.
[[nodiscard]] ReturnDecomposition shuffle_returns(const ReturnDecomposition& d, std::uint64_t seed);
/// Consecutive blocks of L pairs (last block may be short) in random order.
[[nodiscard]] ReturnDecomposition block_shuffle_joint(const ReturnDecomposition& d, std::size_t L,
                                                      std::uint64_t seed);
/// Signs and sizes block-shuffled independently, each with its own random
/// boundary offset in [0, L) and its own block permutation.
[[nodiscard]] ReturnDecomposition block_shuffle_separate(const ReturnDecomposition& d,
                                                         std::size_t L, std::uint64_t seed);

[[nodiscard]] ReturnDecomposition apply_shuffle(const ReturnDecomposition& d, ShuffleMode mode,
                                                std::size_t L, std::uint64_t seed);

/// Permutation of [0, n) that block-shuffles with blocks starting at `offset`
/// (a leading block [0, offset) when offset > 0).
[[nodiscard]] std::vector<std::size_t> block_permutation(std::size_t n, std::size_t L,
                                                         std::size_t offset, std::uint64_t seed);

struct ReplicateResult {
  std::uint64_t seed = 0;
  WeightedMean weighted_mean_rho;
  std::optional<WeightedMean> raw_mean_rho;
  std::vector<RhoBin> bins;
  std::size_t intervals = 0;
};

struct ExperimentReport {
  ShuffleSpec spec;
  Nanoseconds interval_length{0};
  std::vector<ReplicateResult> replicates;
  double mean_rho = 0.0;    // mean of per-replicate weighted means
  double spread = 0.0;      // sample std across replicates (0 for one replicate)
  double standard_error = 0.0;
  std::vector<RhoBin> bins;  // bin-wise average across replicates
};

/// Shuffle, recompute global ACFs and interval moments on the same partition,
/// and aggregate the weighted-mean rho across replicates. Replicate r uses
/// seed derive_seed(spec.seed, r).
[[nodiscard]] ExperimentReport run_experiment(const ReturnDecomposition& d,
                                              const IntervalPartition& partition,
                                              const ShuffleSpec& spec, const ModelOptions& model,
                                              unsigned threads = 1);

}  // namespace grwalk
