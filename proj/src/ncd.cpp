#include "zipknn/ncd.hpp"

#include <exception>
#include <mutex>
#include <thread>

#include "zipknn/error.hpp"

namespace zipknn {

double ncd(ByteView x, ByteView y, const CompressorConfig& cfg) {
  const std::size_t cx = compress_len(x, cfg);
  const std::size_t cy = compress_len(y, cfg);
  const std::size_t cxy = compress_len_concat(x, y, cfg);
  return ncd_from_lengths(cx, cy, cxy);
}

DistanceMatrix distance_matrix(std::span<const ByteSequence> train,
                               std::span<const ByteSequence> queries,
                               const CompressorConfig& cfg, unsigned threads) {
  if (train.empty()) raise(Errc::EmptyTrainSet, "distance_matrix needs at least one training item");
  if (queries.empty()) raise(Errc::EmptyQuerySet, "distance_matrix needs at least one query");
  validate(cfg);

  std::vector<std::size_t> train_len(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) train_len[i] = compress_len(train[i], cfg);
  std::vector<std::size_t> query_len(queries.size());
  for (std::size_t j = 0; j < queries.size(); ++j) query_len[j] = compress_len(queries[j], cfg);

  DistanceMatrix m;
  m.rows = train.size();
  m.cols = queries.size();
  m.values.assign(m.rows * m.cols, 0.0);

  const std::size_t cells = m.rows * m.cols;
  unsigned n_threads = threads != 0 ? threads : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  if (n_threads > cells) n_threads = static_cast<unsigned>(cells);

  // Every cell is written exactly once from its own (i, j); the result does
  // not depend on how cells are partitioned across workers.
  auto compute_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t i = idx / m.cols;
      const std::size_t j = idx % m.cols;
      const std::size_t cxy = compress_len_concat(train[i], queries[j], cfg);
      m.values[idx] = ncd_from_lengths(train_len[i], query_len[j], cxy);
    }
  };

  if (n_threads == 1) {
    compute_range(0, cells);
    return m;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto guarded_range = [&](std::size_t begin, std::size_t end) {
    try {
      compute_range(begin, end);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  const std::size_t chunk = (cells + n_threads - 1) / n_threads;
  for (unsigned t = 0; t < n_threads; ++t) {
    const std::size_t begin = static_cast<std::size_t>(t) * chunk;
    const std::size_t end = std::min(cells, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back(guarded_range, begin, end);
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
  return m;
}

}  // namespace zipknn
