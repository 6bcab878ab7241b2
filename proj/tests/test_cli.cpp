#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#ifndef GSPSIM_CLI_PATH
#error "GSPSIM_CLI_PATH must point at the built binary"
#endif

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gspsim_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(GSPSIM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::stringstream buf;
  buf << file.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("a small end-to-end run writes csv, plot, and manifest") {
  TempDir dir;
  const auto csv = dir.path / "out.csv";
  const auto svg = dir.path / "out.svg";
  const int code = run_cli("--alphas -1:1:0.5 --auctions 60 --seed 11 --threads 2 --out " +
                               csv.string() + " --plot " + svg.string(),
                           dir.path / "log.txt");
  CHECK(code == 0);
  REQUIRE(fs::exists(csv));
  REQUIRE(fs::exists(svg));
  REQUIRE(fs::exists(dir.path / "out.manifest.json"));
  const std::string body = slurp(csv);
  CHECK(body.rfind("alpha,revenue,efficiency,relevance,", 0) == 0);
  CHECK(std::count(body.begin(), body.end(), '\n') == 6);  // header + 5 alphas
  const std::string log = slurp(dir.path / "log.txt");
  CHECK(log.find("seed 11") != std::string::npos);
  CHECK(log.find("revenue argmax alpha") != std::string::npos);
}

TEST_CASE("reruns with the same seed reproduce the csv byte for byte") {
  TempDir dir;
  const auto first = dir.path / "a.csv";
  const auto second = dir.path / "b.csv";
  const std::string base = "--alphas -1:1:0.5 --auctions 80 --seed 123 ";
  REQUIRE(run_cli(base + "--threads 1 --out " + first.string(), dir.path / "log1.txt") == 0);
  REQUIRE(run_cli(base + "--threads 2 --out " + second.string(), dir.path / "log2.txt") == 0);
  CHECK(slurp(first) == slurp(second));
}

TEST_CASE("a missing seed is drawn at random and reported") {
  TempDir dir;
  REQUIRE(run_cli("--alphas 0:0.5:0.5 --auctions 5", dir.path / "log.txt") == 0);
  CHECK(slurp(dir.path / "log.txt").find("seed ") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  TempDir dir;
  CHECK(run_cli("--slots 13 --bidders 13", dir.path / "a.txt") == 1);
  CHECK(run_cli("--no-such-flag", dir.path / "b.txt") == 1);
  CHECK(run_cli("--alphas nope", dir.path / "c.txt") == 1);
  CHECK(run_cli("--strengths 0.8 --spearmans 0.2", dir.path / "d.txt") == 1);
  CHECK(run_cli("--help", dir.path / "e.txt") == 0);
  CHECK(slurp(dir.path / "e.txt").find("--alphas") != std::string::npos);
  CHECK(run_cli("--version", dir.path / "f.txt") == 0);
}

TEST_CASE("io failures exit with 2") {
  TempDir dir;
  CHECK(run_cli("--alphas 0:0.5:0.5 --auctions 5 --seed 1 --out /nonexistent_dir_zz/x.csv",
                dir.path / "log.txt") == 2);
}

TEST_CASE("numeric-domain failures exit with 3") {
  TempDir dir;
  // strength large enough to push the beta b-shape negative on the grid
  CHECK(run_cli("--pollution on --strength 100 --auctions 5 --seed 1", dir.path / "log.txt") == 3);
  CHECK(slurp(dir.path / "log.txt").find("alpha=") != std::string::npos);
}

TEST_CASE("sensitivity mode writes one csv per strength plus an overlay plot") {
  TempDir dir;
  const auto csv = dir.path / "sens.csv";
  const auto svg = dir.path / "sens.svg";
  const int code = run_cli("--alphas 0:1:0.5 --auctions 40 --seed 9 --pollution on "
                           "--strengths 0.8,1.2 --out " +
                               csv.string() + " --plot " + svg.string(),
                           dir.path / "log.txt");
  CHECK(code == 0);
  CHECK(fs::exists(dir.path / "sens_strength0.8.csv"));
  CHECK(fs::exists(dir.path / "sens_strength1.2.csv"));
  const std::string plot = slurp(svg);
  CHECK(plot.find("strength 0.8") != std::string::npos);
  CHECK(plot.find("strength 1.2") != std::string::npos);
}
