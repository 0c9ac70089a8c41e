#include "zipknn/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "zipknn/error.hpp"

namespace zipknn {

namespace {

constexpr const char* kCsvHeader =
    "dataset,ratio,repetition,seed,k,gzip_level,side,train_count,test_count,accuracy,"
    "agg,mean_accuracy,std_accuracy,n_reps";

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    raise(Errc::MalformedCsv, std::string("bad ") + what + " value '" + s + "'");
  }
  return v;
}

template <typename T>
T parse_integer(const std::string& s, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    raise(Errc::MalformedCsv, std::string("bad ") + what + " value '" + s + "'");
  }
  return v;
}

}  // namespace

std::string results_to_csv(const std::string& dataset, const SweepResult& result, int k,
                           int gzip_level, int side) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const RunRecord& run : result.runs) {
    out += dataset;
    out += ',' + fixed6(run.ratio);
    out += ',' + std::to_string(run.repetition);
    out += ',' + std::to_string(run.seed);
    out += ',' + std::to_string(run.k);
    out += ',' + std::to_string(gzip_level);
    out += ',' + std::to_string(side);
    out += ',' + std::to_string(run.train_count);
    out += ',' + std::to_string(run.test_count);
    out += ',' + fixed6(run.accuracy);
    out += ",0,,,\n";
  }
  for (const RatioAggregate& agg : result.aggregates) {
    out += dataset;
    out += ',' + fixed6(agg.ratio);
    out += ",,";  // repetition, seed not applicable
    out += ',' + std::to_string(k);
    out += ',' + std::to_string(gzip_level);
    out += ',' + std::to_string(side);
    out += ',' + std::to_string(agg.train_count);
    out += ',' + std::to_string(agg.test_count);
    out += ',';  // accuracy not applicable
    out += ",1";
    out += ',' + fixed6(agg.mean);
    out += ',' + fixed6(agg.stddev);
    out += ',' + std::to_string(agg.n);
    out += '\n';
  }
  return out;
}

ParsedResults parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    raise(Errc::MalformedCsv, "empty input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    raise(Errc::MalformedCsv, "unexpected header '" + line + "'");
  }

  ParsedResults results;
  bool first_row = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 14) {
      raise(Errc::MalformedCsv,
            "expected 14 fields, got " + std::to_string(f.size()) + " in '" + line + "'");
    }
    if (first_row) {
      results.dataset = f[0];
      results.k = parse_integer<int>(f[4], "k");
      results.gzip_level = parse_integer<int>(f[5], "gzip_level");
      results.side = parse_integer<int>(f[6], "side");
      first_row = false;
    }
    const int agg = parse_integer<int>(f[10], "agg");
    if (agg == 0) {
      RunRecord run;
      run.ratio = parse_double(f[1], "ratio");
      run.repetition = parse_integer<int>(f[2], "repetition");
      run.seed = parse_integer<std::uint64_t>(f[3], "seed");
      run.k = parse_integer<int>(f[4], "k");
      run.train_count = parse_integer<std::size_t>(f[7], "train_count");
      run.test_count = parse_integer<std::size_t>(f[8], "test_count");
      run.accuracy = parse_double(f[9], "accuracy");
      results.runs.push_back(run);
    } else if (agg == 1) {
      RatioAggregate a;
      a.ratio = parse_double(f[1], "ratio");
      a.train_count = parse_integer<std::size_t>(f[7], "train_count");
      a.test_count = parse_integer<std::size_t>(f[8], "test_count");
      a.mean = parse_double(f[11], "mean_accuracy");
      a.stddev = parse_double(f[12], "std_accuracy");
      a.n = parse_integer<int>(f[13], "n_reps");
      results.aggregates.push_back(a);
    } else {
      raise(Errc::MalformedCsv, "agg flag must be 0 or 1, got '" + f[10] + "'");
    }
  }
  if (results.runs.empty() && results.aggregates.empty()) {
    raise(Errc::MalformedCsv, "no data rows");
  }
  return results;
}

std::string format_summary(const ParsedResults& results, const std::vector<ModelSizeRow>* sizes) {
  std::string out = "dataset: " + results.dataset + " (k=" + std::to_string(results.k) +
                    ", gzip_level=" + std::to_string(results.gzip_level) +
                    ", side=" + std::to_string(results.side) + ")\n";
  char buf[128];
  for (const RatioAggregate& agg : results.aggregates) {
    std::snprintf(buf, sizeof(buf), "%zu train images | %.2f%%", agg.train_count,
                  agg.mean * 100.0);
    out += buf;
    if (agg.n > 1) {
      std::snprintf(buf, sizeof(buf), " ± %.2f%%", agg.stddev * 100.0);
      out += buf;
    }
    if (sizes != nullptr) {
      const auto it = std::find_if(sizes->begin(), sizes->end(), [&](const ModelSizeRow& row) {
        return row.train_count == agg.train_count;
      });
      if (it != sizes->end()) {
        std::snprintf(buf, sizeof(buf), " | %.2f kB", static_cast<double>(it->compressed_bytes) / 1000.0);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

std::string render_sweep_svg(const std::string& dataset,
                             std::span<const RatioAggregate> aggregates) {
  constexpr double width = 640.0, height = 420.0;
  constexpr double left = 64.0, right = 24.0, top = 36.0, bottom = 56.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = 0.0, x_max = 1.0;
  if (!aggregates.empty()) {
    x_min = static_cast<double>(aggregates.front().train_count);
    x_max = x_min;
    for (const auto& a : aggregates) {
      x_min = std::min(x_min, static_cast<double>(a.train_count));
      x_max = std::max(x_max, static_cast<double>(a.train_count));
    }
    if (x_min == x_max) {
      x_min -= 1.0;
      x_max += 1.0;
    }
  }

  const auto sx = [&](double v) { return left + (v - x_min) / (x_max - x_min) * plot_w; };
  const auto sy = [&](double acc) { return top + (1.0 - acc) * plot_h; };

  char buf[256];
  std::string svg;
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                width, height, width, height);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                "font-size=\"14\">%s</text>\n",
                left + plot_w / 2.0, dataset.c_str());
  svg += buf;

  // axes
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
                top, left, top + plot_h);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
                top + plot_h, left + plot_w, top + plot_h);
  svg += buf;

  // y ticks every 0.1 of accuracy
  for (int i = 0; i <= 10; ++i) {
    const double acc = i / 10.0;
    const double y = sy(acc);
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  left - 4.0, y, left, y);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\" "
                  "font-size=\"10\">%.1f</text>\n",
                  left - 8.0, y + 3.0, acc);
    svg += buf;
  }

  // x ticks at the data points (train-image counts)
  for (const auto& a : aggregates) {
    const double x = sx(static_cast<double>(a.train_count));
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", x,
                  top + plot_h, x, top + plot_h + 4.0);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                  "font-size=\"10\">%zu</text>\n",
                  x, top + plot_h + 16.0, a.train_count);
    svg += buf;
  }

  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                "font-size=\"12\">training images</text>\n",
                left + plot_w / 2.0, height - 12.0);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"16\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                "font-size=\"12\" transform=\"rotate(-90 16 %.1f)\">mean accuracy</text>\n",
                top + plot_h / 2.0, top + plot_h / 2.0);
  svg += buf;

  // error bars: +-1 std
  for (const auto& a : aggregates) {
    const double x = sx(static_cast<double>(a.train_count));
    const double y_lo = sy(std::max(0.0, a.mean - a.stddev));
    const double y_hi = sy(std::min(1.0, a.mean + a.stddev));
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"steelblue\"/>\n",
                  x, y_lo, x, y_hi);
    svg += buf;
    for (double y : {y_lo, y_hi}) {
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"steelblue\"/>\n",
                    x - 3.0, y, x + 3.0, y);
      svg += buf;
    }
  }

  // mean accuracy polyline + markers
  if (!aggregates.empty()) {
    svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < aggregates.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.1f,%.1f", i == 0 ? "" : " ",
                    sx(static_cast<double>(aggregates[i].train_count)), sy(aggregates[i].mean));
      svg += buf;
    }
    svg += "\"/>\n";
    for (const auto& a : aggregates) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"steelblue\"/>\n",
                    sx(static_cast<double>(a.train_count)), sy(a.mean));
      svg += buf;
    }
  }
  svg += "</svg>\n";
  return svg;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::IoError, "cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) raise(Errc::IoError, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace zipknn
