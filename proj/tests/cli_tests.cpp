#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "support.hpp"

namespace {

std::string cli_path() {
  if (const char* env = std::getenv("ZIPKNN_CLI")) return env;
#ifdef ZIPKNN_CLI_PATH
  return ZIPKNN_CLI_PATH;
#else
  return "zipknn";
#endif
}

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

CmdResult run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult result;
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) result.output += buf;
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void make_pgm_dataset(const std::filesystem::path& root, int per_class) {
  std::filesystem::create_directories(root / "flat");
  std::filesystem::create_directories(root / "noise");
  for (int i = 0; i < per_class; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%03d.pgm", i);
    testsup::write_pgm(root / "flat" / name, 32, 32,
                       std::vector<std::uint8_t>(1024, static_cast<std::uint8_t>(30 + 2 * i)));
    testsup::write_pgm(root / "noise" / name, 32, 32,
                       testsup::prng_bytes(5000 + static_cast<std::uint64_t>(i), 1024));
  }
}

}  // namespace

TEST_CASE("ncd of a file with itself prints a small value and exits 0") {
  testsup::TempDir tmp("cli_ncd");
  const auto file = tmp.path() / "a.bin";
  std::ofstream out(file, std::ios::binary);
  const auto bytes = testsup::prng_bytes(4, 4096);
  out.write(reinterpret_cast<const char*>(bytes.data()), 4096);
  out.close();

  const CmdResult r = run_cli("ncd " + file.string() + " " + file.string());
  CHECK(r.exit_code == 0);
  CHECK(std::stod(r.output) <= 0.1);
  CHECK(r.output.find('.') != std::string::npos);  // fixed-point formatting
}

TEST_CASE("eval rejects a ratio of 1.0 with exit 1") {
  const CmdResult r =
      run_cli("eval --cache /nonexistent --ratios 1.0 --out /tmp/zipknn_never.csv");
  CHECK(r.exit_code == 1);
}

TEST_CASE("unknown flags exit 1") {
  CHECK(run_cli("ncd --bogus").exit_code == 1);
  CHECK(run_cli("--bogus").exit_code == 1);
}

TEST_CASE("prepare on a missing declared class exits 2 and names the error") {
  testsup::TempDir tmp("cli_missing");
  make_pgm_dataset(tmp.path() / "data", 2);
  const CmdResult r = run_cli("prepare --root " + (tmp.path() / "data").string() +
                              " --out " + (tmp.path() / "cache").string() +
                              " --classes flat,noise,ghost");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("MissingClassDir") != std::string::npos);
}

TEST_CASE("prepare then eval produces byte-identical outputs on a rerun") {
  testsup::TempDir tmp("cli_eval");
  make_pgm_dataset(tmp.path() / "data", 8);

  const std::string cache = (tmp.path() / "cache").string();
  const CmdResult prep = run_cli("prepare --root " + (tmp.path() / "data").string() + " --out " +
                                 cache + " --seed 9 --side 32");
  REQUIRE(prep.exit_code == 0);
  CHECK(std::filesystem::exists(tmp.path() / "cache" / "manifest.json"));
  CHECK(std::filesystem::exists(tmp.path() / "cache" / "run.json"));

  const std::string flags = " --ratios 0.25,0.5 --reps 2 --k 1 --seed 1234";
  const std::string out1 = (tmp.path() / "r1.csv").string();
  const std::string out2 = (tmp.path() / "r2.csv").string();
  const std::string svg1 = (tmp.path() / "r1.svg").string();
  const std::string svg2 = (tmp.path() / "r2.svg").string();

  REQUIRE(run_cli("eval --cache " + cache + flags + " --out " + out1 + " --svg " + svg1)
              .exit_code == 0);
  REQUIRE(run_cli("eval --cache " + cache + flags + " --out " + out2 + " --svg " + svg2)
              .exit_code == 0);

  CHECK(read_file(out1) == read_file(out2));
  CHECK(read_file(svg1) == read_file(svg2));
  CHECK(!read_file(out1).empty());
  CHECK(std::filesystem::exists(tmp.path() / "r1.run.json"));
  CHECK(std::filesystem::exists(tmp.path() / "r1.model_size.json"));

  const CmdResult rep = run_cli("report " + out1);
  CHECK(rep.exit_code == 0);
  CHECK(rep.output.find("train images") != std::string::npos);
  CHECK(rep.output.find("kB") != std::string::npos);  // auto-detected size report
}

TEST_CASE("matrix emits a CSV with query header and train rows") {
  testsup::TempDir tmp("cli_matrix");
  const auto a = tmp.path() / "a.bin";
  const auto b = tmp.path() / "b.bin";
  const auto q = tmp.path() / "q.bin";
  for (const auto& [path, seed] : {std::pair{a, 1}, std::pair{b, 2}, std::pair{q, 3}}) {
    std::ofstream out(path, std::ios::binary);
    const auto bytes = testsup::prng_bytes(static_cast<std::uint64_t>(seed), 2048);
    out.write(reinterpret_cast<const char*>(bytes.data()), 2048);
  }
  const CmdResult r = run_cli("matrix --train " + a.string() + " " + b.string() + " --query " +
                              q.string());
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.output);
  std::string header, row1, row2;
  std::getline(lines, header);
  std::getline(lines, row1);
  std::getline(lines, row2);
  CHECK(header == "train_id," + q.string());
  CHECK(row1.rfind(a.string() + ",", 0) == 0);
  CHECK(row2.rfind(b.string() + ",", 0) == 0);
}

TEST_CASE("classify prints a JSON prediction") {
  testsup::TempDir tmp("cli_classify");
  make_pgm_dataset(tmp.path() / "data", 4);
  const std::string cache = (tmp.path() / "cache").string();
  REQUIRE(run_cli("prepare --root " + (tmp.path() / "data").string() + " --out " + cache)
              .exit_code == 0);

  testsup::write_pgm(tmp.path() / "query.pgm", 32, 32, std::vector<std::uint8_t>(1024, 77));
  const CmdResult r =
      run_cli("classify --model " + cache + " --input " + (tmp.path() / "query.pgm").string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"label\": \"flat\"") != std::string::npos);
  CHECK(r.output.find("\"neighbors\"") != std::string::npos);
  CHECK(r.output.find("\"votes\"") != std::string::npos);
}
