#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "zipknn/bytes.hpp"
#include "zipknn/compressor.hpp"

namespace zipknn {

struct LabeledCorpus {
  std::vector<ByteSequence> items;
  std::vector<int> labels;  // indices into class_names
  std::vector<std::string> class_names;
};

struct Neighbor {
  std::size_t train_index = 0;
  double distance = 0.0;
  int label = 0;
};

struct Prediction {
  int label = 0;
  std::vector<Neighbor> neighbors;  // the k used, sorted by (distance, train index)
  std::vector<int> tally;           // votes per class index
};

// Majority vote over the k nearest neighbors. Neighbor selection breaks
// distance ties by lower training index; vote ties fall back to smaller mean
// distance within the tied labels, then to the lexicographically smaller
// class name. Fully deterministic.
Prediction knn_predict(std::span<const double> distances, std::span<const int> labels,
                       std::span<const std::string> class_names, int k);

// distance_matrix + per-query knn_predict; the end-to-end inference path.
std::vector<Prediction> classify_batch(const LabeledCorpus& corpus,
                                       std::span<const ByteSequence> queries, int k,
                                       const CompressorConfig& cfg, unsigned threads = 0);

}  // namespace zipknn
