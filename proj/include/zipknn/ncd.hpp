#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "zipknn/bytes.hpp"
#include "zipknn/compressor.hpp"

namespace zipknn {

// NCD(x, y) = (C(xy) - min(C(x), C(y))) / max(C(x), C(y)). Shared by the
// scalar and matrix paths so both produce bit-identical doubles.
inline double ncd_from_lengths(std::size_t cx, std::size_t cy, std::size_t cxy) {
  const double mn = static_cast<double>(std::min(cx, cy));
  const double mx = static_cast<double>(std::max(cx, cy));
  return (static_cast<double>(cxy) - mn) / mx;
}

double ncd(ByteView x, ByteView y, const CompressorConfig& cfg);

// rows = training items, cols = queries, row-major.
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

// Entry (i, j) = ncd(train[i], queries[j]). Per-item compressed lengths are
// computed once and reused; pairwise concatenation lengths are not cached.
// threads = 0 picks hardware concurrency; the result is bitwise identical for
// any thread count.
DistanceMatrix distance_matrix(std::span<const ByteSequence> train,
                               std::span<const ByteSequence> queries,
                               const CompressorConfig& cfg, unsigned threads = 0);

}  // namespace zipknn
