#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "zipknn/classifier.hpp"
#include "zipknn/compressor.hpp"
#include "zipknn/corpus.hpp"
#include "zipknn/error.hpp"
#include "zipknn/eval.hpp"
#include "zipknn/image.hpp"
#include "zipknn/ncd.hpp"
#include "zipknn/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flag-level validation failures; mapped to exit code 1 before any work runs.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string root;
  std::string cache;
  std::string out;
  std::string svg;
  std::string classes_csv;
  std::string ratios_spec = "0.1:0.9:0.1";
  std::optional<std::size_t> cap;
  std::uint64_t seed = 0;
  int side = 32;
  int gzip_level = 6;
  int k = 1;
  int reps = 5;
  unsigned threads = 0;
};

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

// "a:b:step" or comma-separated values; every ratio must lie in (0, 1).
std::vector<double> parse_ratio_grid(const std::string& spec) {
  std::vector<double> ratios;
  try {
    if (spec.find(':') != std::string::npos) {
      const auto parts = [&] {
        std::vector<std::string> p;
        std::string cur;
        for (char ch : spec) {
          if (ch == ':') {
            p.push_back(cur);
            cur.clear();
          } else {
            cur.push_back(ch);
          }
        }
        p.push_back(cur);
        return p;
      }();
      if (parts.size() != 3) throw UsageError("ratio range must be start:end:step");
      const double start = std::stod(parts[0]);
      const double end = std::stod(parts[1]);
      const double step = std::stod(parts[2]);
      if (step <= 0.0 || end < start) throw UsageError("ratio range must be start:end:step with step > 0");
      const long count = static_cast<long>(std::floor((end - start) / step + 1e-9)) + 1;
      for (long i = 0; i < count; ++i) ratios.push_back(start + static_cast<double>(i) * step);
    } else {
      for (const std::string& field : split_csv_list(spec)) ratios.push_back(std::stod(field));
    }
  } catch (const std::invalid_argument&) {
    throw UsageError("cannot parse ratio grid '" + spec + "'");
  } catch (const std::out_of_range&) {
    throw UsageError("cannot parse ratio grid '" + spec + "'");
  }
  if (ratios.empty()) throw UsageError("ratio grid '" + spec + "' is empty");
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) {
      throw UsageError("train ratio " + std::to_string(r) + " must lie in (0, 1)");
    }
  }
  return ratios;
}

zipknn::ByteSequence read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) zipknn::raise(zipknn::Errc::IoError, "cannot open " + path.string());
  return zipknn::ByteSequence((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

// Every file-producing run records its configuration next to the outputs so
// results can be reproduced by replay.
void write_run_manifest(const fs::path& path, const std::string& command,
                        const zipknn::CompressorConfig& codec, const json& config) {
  const json j{{"command", command},
               {"version", zipknn::kVersion},
               {"codec", zipknn::codec_id(codec)},
               {"config", config}};
  zipknn::write_file_atomic(path, j.dump(2) + "\n");
}

int cmd_prepare(const RunConfig& cfg) {
  zipknn::IngestOptions opts;
  if (!cfg.classes_csv.empty()) opts.classes = split_csv_list(cfg.classes_csv);
  opts.per_class_cap = cfg.cap;
  opts.seed = cfg.seed;
  opts.side = cfg.side;
  opts.codec.level = cfg.gzip_level;

  const zipknn::CorpusManifest manifest = zipknn::ingest_dataset(cfg.root, opts, cfg.out);

  json config{{"root", cfg.root}, {"out", cfg.out},   {"seed", cfg.seed},
              {"side", cfg.side}, {"classes", manifest.classes}};
  if (cfg.cap) config["cap"] = *cfg.cap;
  write_run_manifest(fs::path(cfg.out) / "run.json", "prepare", opts.codec, config);

  std::cout << "prepared " << manifest.records.size() << " images across "
            << manifest.classes.size() << " classes into " << cfg.out << "\n";
  return 0;
}

int cmd_ncd(const std::string& file_a, const std::string& file_b, int gzip_level) {
  zipknn::CompressorConfig codec;
  codec.level = gzip_level;
  const double value = zipknn::ncd(read_file_bytes(file_a), read_file_bytes(file_b), codec);
  std::printf("%.6f\n", value);
  return 0;
}

int cmd_matrix(const std::vector<std::string>& train_files,
               const std::vector<std::string>& query_files, const RunConfig& cfg) {
  zipknn::CompressorConfig codec;
  codec.level = cfg.gzip_level;

  std::vector<zipknn::ByteSequence> train, queries;
  for (const auto& f : train_files) train.push_back(read_file_bytes(f));
  for (const auto& f : query_files) queries.push_back(read_file_bytes(f));

  const zipknn::DistanceMatrix m = zipknn::distance_matrix(train, queries, codec, cfg.threads);

  std::string csv = "train_id";
  for (const auto& q : query_files) csv += "," + q;
  csv += '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.rows; ++i) {
    csv += train_files[i];
    for (std::size_t j = 0; j < m.cols; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.6f", m.at(i, j));
      csv += buf;
    }
    csv += '\n';
  }

  if (cfg.out.empty()) {
    std::cout << csv;
  } else {
    zipknn::write_file_atomic(cfg.out, csv);
    json config{{"train", train_files}, {"query", query_files}, {"out", cfg.out}};
    write_run_manifest(fs::path(cfg.out).replace_extension(".run.json"), "matrix", codec, config);
  }
  return 0;
}

int cmd_classify(const RunConfig& cfg, const std::string& input) {
  const zipknn::CorpusManifest manifest = zipknn::load_manifest(cfg.cache);
  const std::vector<zipknn::ByteSequence> blobs = zipknn::load_blobs(cfg.cache, manifest);

  zipknn::LabeledCorpus corpus;
  corpus.class_names = manifest.classes;
  corpus.items = blobs;
  for (const auto& rec : manifest.records) corpus.labels.push_back(manifest.class_index(rec.label));

  const zipknn::RawImage raw = zipknn::decode_image(input);
  const zipknn::ByteSequence query = zipknn::serialize(zipknn::canonicalize(raw, manifest.side));

  const std::vector<zipknn::Prediction> preds =
      zipknn::classify_batch(corpus, std::span<const zipknn::ByteSequence>(&query, 1), cfg.k,
                             manifest.codec, cfg.threads);
  const zipknn::Prediction& pred = preds.front();

  json neighbors = json::array();
  for (const auto& nb : pred.neighbors) {
    neighbors.push_back(json{{"train_index", nb.train_index},
                             {"source", manifest.records[nb.train_index].source},
                             {"label", manifest.classes[static_cast<std::size_t>(nb.label)]},
                             {"distance", round6(nb.distance)}});
  }
  json votes;
  for (std::size_t c = 0; c < pred.tally.size(); ++c) {
    votes[manifest.classes[c]] = pred.tally[c];
  }
  const json out{{"label", manifest.classes[static_cast<std::size_t>(pred.label)]},
                 {"k", cfg.k},
                 {"neighbors", neighbors},
                 {"votes", votes}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  const std::vector<double> ratios = parse_ratio_grid(cfg.ratios_spec);

  const zipknn::CorpusManifest manifest = zipknn::load_manifest(cfg.cache);
  const std::vector<zipknn::ByteSequence> blobs = zipknn::load_blobs(cfg.cache, manifest);

  zipknn::SweepOptions opts;
  opts.ratios = ratios;
  opts.repetitions = cfg.reps;
  opts.k = cfg.k;
  opts.codec = manifest.codec;  // codec snapshot from the corpus cache
  opts.base_seed = cfg.seed;
  opts.threads = cfg.threads;

  const zipknn::SweepResult result = zipknn::run_sweep(manifest, blobs, opts);

  std::vector<int> labels;
  for (const auto& rec : manifest.records) labels.push_back(manifest.class_index(rec.label));

  // Model size per ratio, measured on the first repetition's training set.
  json sizes = json::array();
  for (double ratio : ratios) {
    const zipknn::Split split =
        zipknn::stratified_split(labels, manifest.classes.size(), {ratio, 0, cfg.seed});
    std::vector<zipknn::ByteSequence> items;
    std::vector<int> item_labels;
    for (std::size_t id : split.train_ids) {
      items.push_back(blobs[id]);
      item_labels.push_back(labels[id]);
    }
    const zipknn::ModelSizeReport report = zipknn::model_size(items, item_labels, opts.codec);
    sizes.push_back(json{{"ratio", round6(ratio)},
                         {"train_count", report.item_count},
                         {"raw_bytes", report.raw_bytes},
                         {"compressed_bytes", report.compressed_bytes},
                         {"label_encoding", "one byte per item (class index)"}});
  }

  const std::string csv =
      zipknn::results_to_csv(manifest.dataset, result, cfg.k, manifest.codec.level, manifest.side);
  zipknn::write_file_atomic(cfg.out, csv);

  const fs::path out_path(cfg.out);
  fs::path stem = out_path;
  stem.replace_extension();
  zipknn::write_file_atomic(stem.string() + ".model_size.json", sizes.dump(2) + "\n");

  if (!cfg.svg.empty()) {
    zipknn::write_file_atomic(cfg.svg,
                              zipknn::render_sweep_svg(manifest.dataset, result.aggregates));
  }

  json config{{"cache", cfg.cache}, {"ratios", cfg.ratios_spec}, {"reps", cfg.reps},
              {"k", cfg.k},         {"seed", cfg.seed},          {"threads", cfg.threads},
              {"out", cfg.out},     {"svg", cfg.svg},            {"side", manifest.side}};
  write_run_manifest(stem.string() + ".run.json", "eval", opts.codec, config);

  for (const auto& agg : result.aggregates) {
    std::printf("ratio %.2f: %zu train / %zu test, accuracy %.4f +- %.4f (n=%d)\n", agg.ratio,
                agg.train_count, agg.test_count, agg.mean, agg.stddev, agg.n);
  }
  return 0;
}

int cmd_report(const std::string& csv_path, const std::string& svg_path,
               const std::string& sizes_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) zipknn::raise(zipknn::Errc::IoError, "cannot open " + csv_path);
  const zipknn::ParsedResults results = zipknn::parse_results_csv(in);

  std::vector<zipknn::ModelSizeRow> sizes;
  fs::path sizes_file = sizes_path;
  if (sizes_file.empty()) {
    fs::path guess(csv_path);
    guess.replace_extension();
    guess = guess.string() + ".model_size.json";
    if (fs::exists(guess)) sizes_file = guess;
  }
  if (!sizes_file.empty()) {
    std::ifstream sin(sizes_file, std::ios::binary);
    if (!sin) zipknn::raise(zipknn::Errc::IoError, "cannot open " + sizes_file.string());
    json j;
    try {
      sin >> j;
      for (const auto& row : j) {
        sizes.push_back({row.at("ratio").get<double>(), row.at("train_count").get<std::size_t>(),
                         row.at("raw_bytes").get<std::size_t>(),
                         row.at("compressed_bytes").get<std::size_t>()});
      }
    } catch (const json::exception& e) {
      zipknn::raise(zipknn::Errc::IoError, sizes_file.string() + ": " + e.what());
    }
  }

  std::cout << zipknn::format_summary(results, sizes.empty() ? nullptr : &sizes);

  if (!svg_path.empty()) {
    zipknn::write_file_atomic(svg_path,
                              zipknn::render_sweep_svg(results.dataset, results.aggregates));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compression-distance image classification toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;

  auto* prepare = app.add_subcommand("prepare", "canonicalize a dataset into a corpus cache");
  prepare->add_option("--root", cfg.root, "dataset root with one subdirectory per class")
      ->required();
  prepare->add_option("--out", cfg.out, "cache output directory")->required();
  prepare->add_option("--classes", cfg.classes_csv, "comma-separated class names (default: all)");
  std::size_t cap_value = 0;
  auto* cap_opt = prepare->add_option("--cap", cap_value, "images drawn per class")
                      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  prepare->add_option("--seed", cfg.seed, "sampling seed");
  prepare->add_option("--side", cfg.side, "canonical image side")->check(CLI::Range(1, 4096));
  prepare->add_option("--gzip-level", cfg.gzip_level, "compression level")
      ->check(CLI::Range(1, 9));

  std::string file_a, file_b;
  auto* ncd_cmd = app.add_subcommand("ncd", "normalized compression distance between two files");
  ncd_cmd->add_option("fileA", file_a)->required();
  ncd_cmd->add_option("fileB", file_b)->required();
  ncd_cmd->add_option("--gzip-level", cfg.gzip_level, "compression level")
      ->check(CLI::Range(1, 9));

  std::vector<std::string> train_files, query_files;
  auto* matrix = app.add_subcommand("matrix", "NCD matrix between train and query files as CSV");
  matrix->add_option("--train", train_files, "training files")->required()->expected(-1);
  matrix->add_option("--query", query_files, "query files")->required()->expected(-1);
  matrix->add_option("--gzip-level", cfg.gzip_level, "compression level")->check(CLI::Range(1, 9));
  matrix->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
  matrix->add_option("--out", cfg.out, "output CSV path (default: stdout)");

  std::string input_image;
  auto* classify = app.add_subcommand("classify", "classify one image against a corpus cache");
  classify->add_option("--model", cfg.cache, "corpus cache directory")->required();
  classify->add_option("--input", input_image, "image to classify")->required();
  classify->add_option("--k", cfg.k, "neighbors to vote")->check(CLI::Range(1, 1 << 20));
  classify->add_option("--threads", cfg.threads, "worker threads (0 = auto)");

  auto* eval = app.add_subcommand("eval", "sliding train:test accuracy sweep");
  eval->add_option("--cache", cfg.cache, "corpus cache directory")->required();
  eval->add_option("--ratios", cfg.ratios_spec, "start:end:step or comma list (default 0.1:0.9:0.1)");
  eval->add_option("--reps", cfg.reps, "repetitions per ratio")->check(CLI::Range(1, 1 << 20));
  eval->add_option("--k", cfg.k, "neighbors to vote")->check(CLI::Range(1, 1 << 20));
  eval->add_option("--seed", cfg.seed, "base seed for split derivation");
  eval->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
  eval->add_option("--out", cfg.out, "results CSV path")->required();
  eval->add_option("--svg", cfg.svg, "accuracy curve SVG path");

  std::string report_csv, report_sizes;
  auto* report = app.add_subcommand("report", "summarize a results CSV");
  report->add_option("csv", report_csv, "results CSV produced by eval")->required();
  report->add_option("--svg", cfg.svg, "write the accuracy curve SVG");
  report->add_option("--model-size", report_sizes, "model size JSON produced by eval");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (cap_opt->count() > 0) cfg.cap = cap_value;

  try {
    if (prepare->parsed()) return cmd_prepare(cfg);
    if (ncd_cmd->parsed()) return cmd_ncd(file_a, file_b, cfg.gzip_level);
    if (matrix->parsed()) return cmd_matrix(train_files, query_files, cfg);
    if (classify->parsed()) return cmd_classify(cfg, input_image);
    if (eval->parsed()) return cmd_eval(cfg);
    if (report->parsed()) return cmd_report(report_csv, cfg.svg, report_sizes);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const zipknn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
