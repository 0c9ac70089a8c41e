#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zipknn/bytes.hpp"
#include "zipknn/compressor.hpp"

namespace zipknn {

std::uint64_t fnv1a64(ByteView data);
std::string digest_hex(std::uint64_t digest);

struct ManifestRecord {
  std::string source;  // path relative to the dataset root
  std::string label;
  std::string digest;  // fnv1a-64 of the canonical blob, 16 hex chars
};

struct CorpusManifest {
  std::string dataset;
  std::vector<std::string> classes;
  std::vector<ManifestRecord> records;
  int side = 32;
  std::string grayscale_id;
  CompressorConfig codec;

  // Index into classes for a record's label; throws on unknown labels.
  int class_index(const std::string& label) const;
};

struct IngestOptions {
  std::optional<std::vector<std::string>> classes;  // discovered from subdirectories when unset
  std::optional<std::size_t> per_class_cap;
  std::uint64_t seed = 0;
  int side = 32;
  CompressorConfig codec;
};

// Scans root/<class>/*.{png,jpg,jpeg,pgm}, canonicalizes every selected image
// and writes blobs plus manifest.json under out_dir. When per_class_cap is
// set, exactly cap images per class are drawn with the seeded PRNG; discovery
// order is lexicographic so the draw is machine-independent.
CorpusManifest ingest_dataset(const std::filesystem::path& root, const IngestOptions& opts,
                              const std::filesystem::path& out_dir);

CorpusManifest load_manifest(const std::filesystem::path& cache_dir);

// Reads every record's blob and verifies its digest.
std::vector<ByteSequence> load_blobs(const std::filesystem::path& cache_dir,
                                     const CorpusManifest& manifest);

std::string manifest_to_json(const CorpusManifest& manifest);

}  // namespace zipknn
