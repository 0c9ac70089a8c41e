#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zipknn/bytes.hpp"
#include "zipknn/compressor.hpp"
#include "zipknn/corpus.hpp"

namespace zipknn {

struct SplitSpec {
  double train_ratio = 0.5;  // in (0, 1)
  int repetition = 0;
  std::uint64_t base_seed = 0;
};

struct Split {
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> test_ids;
};

// Seed of one (ratio, repetition) sweep cell. Derived by mixing the base seed
// with the quantized ratio value and the repetition index, so extending the
// ratio grid never shifts the randomness of existing cells.
std::uint64_t cell_seed(const SplitSpec& spec);

// Per class: shuffle ids with a PRNG seeded from (cell seed, class index),
// send the first round(ratio * n) to train, the rest to test. Throws
// DegenerateSplit when any class would contribute 0 items to either side.
Split stratified_split(std::span<const int> labels, std::size_t n_classes, const SplitSpec& spec);
Split stratified_split(const CorpusManifest& manifest, const SplitSpec& spec);

struct RunRecord {
  double ratio = 0.0;
  int repetition = 0;
  std::uint64_t seed = 0;  // cell seed actually used for the split
  int k = 1;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  double accuracy = 0.0;  // correct / test_count exactly
};

struct RatioAggregate {
  double ratio = 0.0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample std over repetitions; 0 when n = 1
  int n = 0;
};

struct SweepResult {
  std::vector<RunRecord> runs;
  std::vector<RatioAggregate> aggregates;
};

std::vector<double> default_ratio_grid();  // 0.1, 0.2, ..., 0.9

struct SweepOptions {
  std::vector<double> ratios = default_ratio_grid();
  int repetitions = 5;
  int k = 1;
  CompressorConfig codec;
  std::uint64_t base_seed = 0;
  unsigned threads = 0;
};

// For each (ratio, repetition): split, classify every test item against the
// training side, record accuracy; aggregates mean and sample std per ratio.
SweepResult run_sweep(const CorpusManifest& manifest, std::span<const ByteSequence> blobs,
                      const SweepOptions& opts);

struct ModelSizeReport {
  std::size_t raw_bytes = 0;         // serialized training images + 1 label byte per item
  std::size_t compressed_bytes = 0;  // gzip of images concatenated in train order ++ label bytes
  std::size_t item_count = 0;
};

ModelSizeReport model_size(std::span<const ByteSequence> train_items,
                           std::span<const int> train_labels, const CompressorConfig& cfg);

}  // namespace zipknn
