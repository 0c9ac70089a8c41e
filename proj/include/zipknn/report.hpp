#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zipknn/eval.hpp"

namespace zipknn {

// One row per sweep cell, then one aggregate row per ratio flagged agg=1.
// Accuracy columns carry 6 decimals so outputs are byte-stable.
std::string results_to_csv(const std::string& dataset, const SweepResult& result, int k,
                           int gzip_level, int side);

struct ParsedResults {
  std::string dataset;
  std::vector<RunRecord> runs;
  std::vector<RatioAggregate> aggregates;
  int k = 0;
  int gzip_level = 0;
  int side = 0;
};

// Throws MalformedCsv on empty input, unknown header or unparsable rows.
ParsedResults parse_results_csv(std::istream& in);

struct ModelSizeRow {
  double ratio = 0.0;
  std::size_t train_count = 0;
  std::size_t raw_bytes = 0;
  std::size_t compressed_bytes = 0;
};

// Accuracy-per-ratio table, one line per aggregate row; appends compressed
// model size when rows are provided.
std::string format_summary(const ParsedResults& results,
                           const std::vector<ModelSizeRow>* sizes = nullptr);

// Line chart of mean accuracy vs train-image count with +-1 std error bars.
std::string render_sweep_svg(const std::string& dataset,
                             std::span<const RatioAggregate> aggregates);

// Write-to-temp-then-rename so outputs are either complete or absent.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace zipknn
