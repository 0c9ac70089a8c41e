#include "zipknn/eval.hpp"

#include <algorithm>
#include <cmath>

#include "zipknn/classifier.hpp"
#include "zipknn/error.hpp"
#include "zipknn/rng.hpp"

namespace zipknn {

namespace {

std::uint64_t quantized_ratio(double ratio) {
  return static_cast<std::uint64_t>(std::llround(ratio * 1'000'000.0));
}

void validate_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    raise(Errc::InvalidConfig, "train ratio must lie in (0, 1), got " + std::to_string(ratio));
  }
}

}  // namespace

std::uint64_t cell_seed(const SplitSpec& spec) {
  return mix_seed({spec.base_seed, quantized_ratio(spec.train_ratio),
                   static_cast<std::uint64_t>(spec.repetition)});
}

Split stratified_split(std::span<const int> labels, std::size_t n_classes, const SplitSpec& spec) {
  validate_ratio(spec.train_ratio);
  if (n_classes < 1) raise(Errc::InvalidConfig, "need at least one class");

  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
      raise(Errc::LengthMismatch, "label index " + std::to_string(label) + " out of range");
    }
    by_class[static_cast<std::size_t>(label)].push_back(i);
  }

  const std::uint64_t seed = cell_seed(spec);
  Split split;
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto& ids = by_class[c];
    const std::size_t n = ids.size();
    // round half up
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(spec.train_ratio * static_cast<double>(n) + 0.5));
    if (n_train == 0 || n_train >= n) {
      raise(Errc::DegenerateSplit,
            "class " + std::to_string(c) + " (" + std::to_string(n) + " items) would give " +
                std::to_string(n_train) + " train / " + std::to_string(n - n_train) + " test");
    }
    seeded_shuffle(std::span<std::size_t>(ids), mix_seed({seed, c}));
    split.train_ids.insert(split.train_ids.end(), ids.begin(),
                           ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test_ids.insert(split.test_ids.end(), ids.begin() + static_cast<std::ptrdiff_t>(n_train),
                          ids.end());
  }
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

Split stratified_split(const CorpusManifest& manifest, const SplitSpec& spec) {
  std::vector<int> labels;
  labels.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) labels.push_back(manifest.class_index(rec.label));
  return stratified_split(labels, manifest.classes.size(), spec);
}

std::vector<double> default_ratio_grid() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

SweepResult run_sweep(const CorpusManifest& manifest, std::span<const ByteSequence> blobs,
                      const SweepOptions& opts) {
  validate(opts.codec);
  if (opts.ratios.empty()) raise(Errc::InvalidConfig, "ratio grid is empty");
  for (double r : opts.ratios) validate_ratio(r);
  if (opts.repetitions < 1) raise(Errc::InvalidConfig, "repetitions must be >= 1");
  if (opts.k < 1) raise(Errc::InvalidK, "k must be >= 1, got " + std::to_string(opts.k));
  if (blobs.size() != manifest.records.size()) {
    raise(Errc::LengthMismatch, "manifest records and blobs differ in length");
  }

  std::vector<int> labels;
  labels.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) labels.push_back(manifest.class_index(rec.label));

  SweepResult result;
  for (double ratio : opts.ratios) {
    std::vector<double> accuracies;
    std::size_t train_count = 0;
    std::size_t test_count = 0;

    for (int rep = 0; rep < opts.repetitions; ++rep) {
      const SplitSpec spec{ratio, rep, opts.base_seed};
      const Split split = stratified_split(labels, manifest.classes.size(), spec);

      LabeledCorpus corpus;
      corpus.class_names = manifest.classes;
      corpus.items.reserve(split.train_ids.size());
      corpus.labels.reserve(split.train_ids.size());
      for (std::size_t id : split.train_ids) {
        corpus.items.push_back(blobs[id]);
        corpus.labels.push_back(labels[id]);
      }
      std::vector<ByteSequence> queries;
      queries.reserve(split.test_ids.size());
      for (std::size_t id : split.test_ids) queries.push_back(blobs[id]);

      const std::vector<Prediction> preds =
          classify_batch(corpus, queries, opts.k, opts.codec, opts.threads);

      std::size_t correct = 0;
      for (std::size_t j = 0; j < preds.size(); ++j) {
        if (preds[j].label == labels[split.test_ids[j]]) ++correct;
      }
      const double accuracy =
          static_cast<double>(correct) / static_cast<double>(split.test_ids.size());

      result.runs.push_back({ratio, rep, cell_seed(spec), opts.k, split.train_ids.size(),
                             split.test_ids.size(), accuracy});
      accuracies.push_back(accuracy);
      train_count = split.train_ids.size();
      test_count = split.test_ids.size();
    }

    const int n = static_cast<int>(accuracies.size());
    double mean = 0.0;
    for (double a : accuracies) mean += a;
    mean /= n;
    double stddev = 0.0;
    if (n > 1) {
      double ss = 0.0;
      for (double a : accuracies) ss += (a - mean) * (a - mean);
      stddev = std::sqrt(ss / (n - 1));
    }
    result.aggregates.push_back({ratio, train_count, test_count, mean, stddev, n});
  }
  return result;
}

ModelSizeReport model_size(std::span<const ByteSequence> train_items,
                           std::span<const int> train_labels, const CompressorConfig& cfg) {
  if (train_items.empty()) raise(Errc::EmptyTrainSet, "model size needs a nonempty corpus");
  if (train_items.size() != train_labels.size()) {
    raise(Errc::LengthMismatch, "items and labels differ in length");
  }

  ByteSequence concat;
  std::size_t image_bytes = 0;
  for (const auto& item : train_items) image_bytes += item.size();
  concat.reserve(image_bytes + train_labels.size());
  for (const auto& item : train_items) concat.insert(concat.end(), item.begin(), item.end());
  for (int label : train_labels) {
    if (label < 0 || label > 255) {
      raise(Errc::InvalidConfig, "label table uses one byte per item; class index " +
                                     std::to_string(label) + " does not fit");
    }
    concat.push_back(static_cast<std::uint8_t>(label));
  }

  ModelSizeReport report;
  report.item_count = train_items.size();
  report.raw_bytes = concat.size();
  report.compressed_bytes = compress_len(concat, cfg);
  return report;
}

}  // namespace zipknn
