#include "zipknn/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "zipknn/error.hpp"
#include "zipknn/image.hpp"
#include "zipknn/rng.hpp"

namespace zipknn {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(ByteView data) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = hex[digest & 0xf];
    digest >>= 4;
  }
  return s;
}

int CorpusManifest::class_index(const std::string& label) const {
  auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) {
    raise(Errc::InvalidConfig, "label '" + label + "' is not in the declared class set");
  }
  return static_cast<int>(it - classes.begin());
}

namespace {

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".pgm";
}

std::vector<std::string> list_class_files(const fs::path& class_dir) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(class_dir)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

void write_binary_file(const fs::path& path, ByteView data) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) raise(Errc::IoError, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

json codec_to_json(const CompressorConfig& codec) {
  return json{{"name", "gzip-deflate"},
              {"level", codec.level},
              {"normalized_header", codec.normalize_header},
              {"id", codec_id(codec)}};
}

CompressorConfig codec_from_json(const json& j) {
  CompressorConfig codec;
  codec.level = j.at("level").get<int>();
  codec.normalize_header = j.at("normalized_header").get<bool>();
  return codec;
}

}  // namespace

std::string manifest_to_json(const CorpusManifest& manifest) {
  json records = json::array();
  for (const auto& rec : manifest.records) {
    records.push_back(json{{"source", rec.source}, {"label", rec.label}, {"digest", rec.digest}});
  }
  const json j{{"dataset", manifest.dataset},
               {"classes", manifest.classes},
               {"side", manifest.side},
               {"grayscale", manifest.grayscale_id},
               {"digest_algo", "fnv1a-64"},
               {"codec", codec_to_json(manifest.codec)},
               {"records", records}};
  return j.dump(2) + "\n";
}

CorpusManifest ingest_dataset(const fs::path& root, const IngestOptions& opts,
                              const fs::path& out_dir) {
  validate(opts.codec);
  if (opts.side < 1) {
    raise(Errc::InvalidSide, "canonical side must be >= 1, got " + std::to_string(opts.side));
  }
  if (opts.per_class_cap && *opts.per_class_cap < 1) {
    raise(Errc::InvalidConfig, "per-class cap must be >= 1");
  }
  if (!fs::is_directory(root)) {
    raise(Errc::MissingClassDir, "dataset root " + root.string() + " is not a directory");
  }

  std::vector<std::string> classes;
  if (opts.classes) {
    classes = *opts.classes;
    std::sort(classes.begin(), classes.end());
    for (const auto& name : classes) {
      if (!fs::is_directory(root / name)) {
        raise(Errc::MissingClassDir, (root / name).string());
      }
    }
  } else {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (entry.is_directory()) classes.push_back(entry.path().filename().string());
    }
    std::sort(classes.begin(), classes.end());
  }
  if (classes.size() < 2) {
    raise(Errc::MissingClassDir,
          "need at least 2 class directories under " + root.string() + ", found " +
              std::to_string(classes.size()));
  }

  CorpusManifest manifest;
  manifest.dataset = root.filename().string();
  if (manifest.dataset.empty()) manifest.dataset = root.parent_path().filename().string();
  manifest.classes = classes;
  manifest.side = opts.side;
  manifest.grayscale_id = kGrayscaleId;
  manifest.codec = opts.codec;

  fs::create_directories(out_dir / "blobs");

  for (std::size_t c = 0; c < classes.size(); ++c) {
    const fs::path class_dir = root / classes[c];
    std::vector<std::string> files = list_class_files(class_dir);

    if (opts.per_class_cap) {
      if (files.size() < *opts.per_class_cap) {
        raise(Errc::InsufficientImages,
              "class '" + classes[c] + "' has " + std::to_string(files.size()) +
                  " images, need " + std::to_string(*opts.per_class_cap));
      }
      seeded_shuffle(std::span<std::string>(files), mix_seed({opts.seed, c}));
      files.resize(*opts.per_class_cap);
      std::sort(files.begin(), files.end());
    }
    if (files.empty()) {
      raise(Errc::InsufficientImages, "class '" + classes[c] + "' has no decodable images");
    }

    for (const auto& name : files) {
      const fs::path src = class_dir / name;
      const RawImage raw = decode_image(src);
      const ByteSequence blob = serialize(canonicalize(raw, opts.side));
      const std::string digest = digest_hex(fnv1a64(blob));
      write_binary_file(out_dir / "blobs" / (digest + ".bin"), blob);
      manifest.records.push_back({classes[c] + "/" + name, classes[c], digest});
    }
  }

  const std::string text = manifest_to_json(manifest);
  const fs::path manifest_path = out_dir / "manifest.json";
  const fs::path tmp = manifest_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::IoError, "cannot open " + tmp.string() + " for writing");
    out << text;
  }
  fs::rename(tmp, manifest_path);
  return manifest;
}

CorpusManifest load_manifest(const fs::path& cache_dir) {
  const fs::path manifest_path = cache_dir / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open " + manifest_path.string());

  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(Errc::IoError, manifest_path.string() + ": " + e.what());
  }

  CorpusManifest manifest;
  try {
    manifest.dataset = j.at("dataset").get<std::string>();
    manifest.classes = j.at("classes").get<std::vector<std::string>>();
    manifest.side = j.at("side").get<int>();
    manifest.grayscale_id = j.at("grayscale").get<std::string>();
    manifest.codec = codec_from_json(j.at("codec"));
    for (const auto& rec : j.at("records")) {
      manifest.records.push_back({rec.at("source").get<std::string>(),
                                  rec.at("label").get<std::string>(),
                                  rec.at("digest").get<std::string>()});
    }
  } catch (const json::exception& e) {
    raise(Errc::IoError, manifest_path.string() + ": " + e.what());
  }
  for (const auto& rec : manifest.records) {
    manifest.class_index(rec.label);  // label set check
  }
  return manifest;
}

std::vector<ByteSequence> load_blobs(const fs::path& cache_dir, const CorpusManifest& manifest) {
  std::vector<ByteSequence> blobs;
  blobs.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) {
    const fs::path path = cache_dir / "blobs" / (rec.digest + ".bin");
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      raise(Errc::UndecodableImage, "cache miss for '" + rec.source + "': " + path.string());
    }
    ByteSequence data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (digest_hex(fnv1a64(data)) != rec.digest) {
      raise(Errc::UndecodableImage, "cache blob corrupt for '" + rec.source + "'");
    }
    blobs.push_back(std::move(data));
  }
  return blobs;
}

}  // namespace zipknn
