#include "grwalk/resampling.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "grwalk/parallel.hpp"

namespace grwalk {
namespace {

using Rng = std::mt19937_64;

// In-place Fisher-Yates.
template <class T>
void fisher_yates(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(v[i - 1], v[pick(rng)]);
  }
}

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

template <class T>
std::vector<T> gather(std::span<const T> values, const std::vector<std::size_t>& perm) {
  std::vector<T> out(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[i] = values[perm[i]];
  return out;
}

void check_block_length(const ReturnDecomposition& d, std::size_t L) {
  if (L == 0) throw ValidationError("block length must be at least 1");
  if (L > d.size())
    throw ValidationError("block length " + std::to_string(L) + " exceeds series length " +
                          std::to_string(d.size()));
}

}  // namespace

std::string to_string(ShuffleMode mode) {
  switch (mode) {
    case ShuffleMode::Signs: return "signs";
    case ShuffleMode::Sizes: return "sizes";
    case ShuffleMode::Returns: return "returns";
    case ShuffleMode::BlockJoint: return "block-joint";
    case ShuffleMode::BlockSeparate: return "block-separate";
  }
  return "unknown";
}

ShuffleMode parse_shuffle_mode(std::string_view text) {
  if (text == "signs") return ShuffleMode::Signs;
  if (text == "sizes") return ShuffleMode::Sizes;
  if (text == "returns") return ShuffleMode::Returns;
  if (text == "block-joint" || text == "block_joint") return ShuffleMode::BlockJoint;
  if (text == "block-separate" || text == "block_separate") return ShuffleMode::BlockSeparate;
  throw ValidationError("unknown shuffle mode '" + std::string(text) + "'");
}

void ShuffleSpec::validate(std::size_t series_length) const {
  if (replicates == 0) throw ValidationError("replicates must be at least 1");
  if (is_block_mode(mode)) {
    if (block_length == 0) throw ValidationError("block length must be at least 1");
    if (block_length > series_length)
      throw ValidationError("block length " + std::to_string(block_length) +
                            " exceeds series length " + std::to_string(series_length));
  }
}

std::vector<std::size_t> block_permutation(std::size_t n, std::size_t L, std::size_t offset,
                                           std::uint64_t seed) {
  struct Block {
    std::size_t begin, end;
  };
  std::vector<Block> blocks;
  if (offset > 0) blocks.push_back({0, std::min(offset, n)});
  for (std::size_t b = offset; b < n; b += L) blocks.push_back({b, std::min(b + L, n)});
  Rng rng(seed);
  fisher_yates(blocks, rng);
  std::vector<std::size_t> perm;
  perm.reserve(n);
  for (const auto& blk : blocks)
    for (std::size_t i = blk.begin; i < blk.end; ++i) perm.push_back(i);
  return perm;
}

ReturnDecomposition shuffle_signs(const ReturnDecomposition& d, std::uint64_t seed) {
  std::vector<std::int8_t> signs(d.signs().begin(), d.signs().end());
  Rng rng(seed);
  fisher_yates(signs, rng);
  return d.with_values(std::move(signs), {d.sizes().begin(), d.sizes().end()});
}

ReturnDecomposition shuffle_sizes(const ReturnDecomposition& d, std::uint64_t seed) {
  std::vector<double> sizes(d.sizes().begin(), d.sizes().end());
  Rng rng(seed);
  fisher_yates(sizes, rng);
  return d.with_values({d.signs().begin(), d.signs().end()}, std::move(sizes));
}

ReturnDecomposition shuffle_returns(const ReturnDecomposition& d, std::uint64_t seed) {
  auto perm = identity(d.size());
  Rng rng(seed);
  fisher_yates(perm, rng);
  return d.with_values(gather(d.signs(), perm), gather(d.sizes(), perm));
}

ReturnDecomposition block_shuffle_joint(const ReturnDecomposition& d, std::size_t L,
                                        std::uint64_t seed) {
  check_block_length(d, L);
  const auto perm = block_permutation(d.size(), L, 0, seed);
  return d.with_values(gather(d.signs(), perm), gather(d.sizes(), perm));
}

ReturnDecomposition block_shuffle_separate(const ReturnDecomposition& d, std::size_t L,
                                           std::uint64_t seed) {
  check_block_length(d, L);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> offset(0, L - 1);
  const std::size_t sign_offset = offset(rng);
  const std::size_t size_offset = offset(rng);
  const auto sign_perm = block_permutation(d.size(), L, sign_offset, derive_seed(seed, 1));
  const auto size_perm = block_permutation(d.size(), L, size_offset, derive_seed(seed, 2));
  return d.with_values(gather(d.signs(), sign_perm), gather(d.sizes(), size_perm));
}

ReturnDecomposition apply_shuffle(const ReturnDecomposition& d, ShuffleMode mode, std::size_t L,
                                  std::uint64_t seed) {
  switch (mode) {
    case ShuffleMode::Signs: return shuffle_signs(d, seed);
    case ShuffleMode::Sizes: return shuffle_sizes(d, seed);
    case ShuffleMode::Returns: return shuffle_returns(d, seed);
    case ShuffleMode::BlockJoint: return block_shuffle_joint(d, L, seed);
    case ShuffleMode::BlockSeparate: return block_shuffle_separate(d, L, seed);
  }
  throw ValidationError("unknown shuffle mode");
}

ExperimentReport run_experiment(const ReturnDecomposition& d, const IntervalPartition& partition,
                                const ShuffleSpec& spec, const ModelOptions& model,
                                unsigned threads) {
  spec.validate(d.size());
  ExperimentReport report;
  report.spec = spec;
  report.interval_length = partition.interval_length;
  report.replicates.resize(spec.replicates);

  parallel_for(spec.replicates, threads, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(spec.seed, r);
    const auto shuffled = apply_shuffle(d, spec.mode, spec.block_length, seed);
    const RhoReport rho = run_model(shuffled, partition, model);
    ReplicateResult& out = report.replicates[r];
    out.seed = seed;
    out.weighted_mean_rho = *rho.weighted_mean_rho;
    out.raw_mean_rho = rho.raw_mean_rho;
    out.bins = rho.bins;
    out.intervals = rho.per_interval.size();
  });

  const double R = static_cast<double>(spec.replicates);
  std::vector<double> means;
  for (const auto& rep : report.replicates) means.push_back(rep.weighted_mean_rho.value);
  report.mean_rho = sample_mean(means);
  if (spec.replicates >= 2) {
    report.spread = std::sqrt(sample_moments(means).variance);
    report.standard_error = report.spread / std::sqrt(R);
  } else {
    report.standard_error = report.replicates.front().weighted_mean_rho.standard_error;
  }

  const std::size_t nb = report.replicates.front().bins.size();
  report.bins.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    RhoBin& agg = report.bins[b];
    std::vector<double> bin_means;
    double se2 = 0.0;
    bool all_defined = true;
    for (const auto& rep : report.replicates) {
      const RhoBin& bin = rep.bins[b];
      agg.mean_V_hat += bin.mean_V_hat / R;
      agg.count = bin.count;
      bin_means.push_back(bin.mean_rho);
      if (bin.standard_error) se2 += *bin.standard_error * *bin.standard_error;
      else all_defined = false;
    }
    agg.mean_rho = sample_mean(bin_means);
    if (spec.replicates >= 2) {
      const double sd = std::sqrt(sample_moments(bin_means).variance);
      if (sd > 0.0) agg.standard_error = sd / std::sqrt(R);
    } else if (all_defined) {
      agg.standard_error = std::sqrt(se2);
    }
  }
  return report;
}

}  // namespace grwalk
