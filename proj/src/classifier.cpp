#include "zipknn/classifier.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "zipknn/error.hpp"
#include "zipknn/ncd.hpp"

namespace zipknn {

Prediction knn_predict(std::span<const double> distances, std::span<const int> labels,
                       std::span<const std::string> class_names, int k) {
  if (k < 1) raise(Errc::InvalidK, "k must be >= 1, got " + std::to_string(k));
  if (distances.empty() || distances.size() != labels.size()) {
    raise(Errc::LengthMismatch,
          "got " + std::to_string(distances.size()) + " distances for " +
              std::to_string(labels.size()) + " labels");
  }
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= class_names.size()) {
      raise(Errc::LengthMismatch, "label index " + std::to_string(label) + " out of range");
    }
  }

  const std::size_t n = distances.size();
  const std::size_t kk = std::min(static_cast<std::size_t>(k), n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (distances[a] != distances[b]) return distances[a] < distances[b];
                      return a < b;  // distance ties go to the lower training index
                    });

  Prediction pred;
  pred.neighbors.reserve(kk);
  pred.tally.assign(class_names.size(), 0);
  for (std::size_t r = 0; r < kk; ++r) {
    const std::size_t i = order[r];
    pred.neighbors.push_back({i, distances[i], labels[i]});
    ++pred.tally[static_cast<std::size_t>(labels[i])];
  }

  const int max_votes = *std::max_element(pred.tally.begin(), pred.tally.end());

  // Vote tie-break: smaller mean distance within the tied labels, then the
  // lexicographically smaller class name.
  int best = -1;
  double best_mean = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < pred.tally.size(); ++c) {
    if (pred.tally[c] != max_votes) continue;
    double sum = 0.0;
    for (const Neighbor& nb : pred.neighbors) {
      if (static_cast<std::size_t>(nb.label) == c) sum += nb.distance;
    }
    const double mean = sum / max_votes;
    if (best < 0 || mean < best_mean ||
        (mean == best_mean && class_names[c] < class_names[static_cast<std::size_t>(best)])) {
      best = static_cast<int>(c);
      best_mean = mean;
    }
  }
  pred.label = best;
  return pred;
}

std::vector<Prediction> classify_batch(const LabeledCorpus& corpus,
                                       std::span<const ByteSequence> queries, int k,
                                       const CompressorConfig& cfg, unsigned threads) {
  if (corpus.items.empty()) raise(Errc::EmptyTrainSet, "corpus has no items");
  if (corpus.items.size() != corpus.labels.size()) {
    raise(Errc::LengthMismatch, "corpus items and labels differ in length");
  }

  const DistanceMatrix m = distance_matrix(corpus.items, queries, cfg, threads);

  std::vector<Prediction> predictions;
  predictions.reserve(queries.size());
  std::vector<double> column(m.rows);
  for (std::size_t j = 0; j < m.cols; ++j) {
    for (std::size_t i = 0; i < m.rows; ++i) column[i] = m.at(i, j);
    predictions.push_back(knn_predict(column, corpus.labels, corpus.class_names, k));
  }
  return predictions;
}

}  // namespace zipknn
