#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "daboost/daboost.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path scratch_path(const std::string& name) {
  return fs::temp_directory_path() /
         ("daboost_cli_" + std::to_string(::getpid()) + "_" + name);
}

CliResult run_cli(const std::string& args) {
  const fs::path out_file = scratch_path("stdout.txt");
  const fs::path err_file = scratch_path("stderr.txt");
  const std::string command = std::string(DABOOST_CLI_PATH) + " " + args + " >" +
                              out_file.string() + " 2>" + err_file.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  fs::remove(out_file);
  fs::remove(err_file);
  return result;
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

// small two-class csv on disk for the data-driven commands
fs::path write_sample_csv() {
  const fs::path path = scratch_path("data.csv");
  daboost::Rng rng = daboost::make_rng(1234);
  const daboost::Dataset data = testsupport::random_dataset(rng, 120, 5, 0.15);
  std::ofstream out(path, std::ios::binary);
  daboost::write_csv(out, data);
  return path;
}

}  // namespace

TEST_CASE("run writes curves and a summary") {
  const fs::path data = write_sample_csv();
  const fs::path curves = scratch_path("curves.csv");
  const auto result = run_cli("run --algo adaboost --data " + data.string() +
                              " --positive-label +1 --rounds 20 --test-fraction 0.3 --seed 7 "
                              "--out " + curves.string());
  INFO(result.err);
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("algorithm: adaboost") != std::string::npos);
  CHECK(result.out.find("final_train_error:") != std::string::npos);
  CHECK(result.out.find("final_test_error:") != std::string::npos);

  const std::string csv = slurp(curves);
  CHECK(csv.rfind("round,epsilon,step,z,train_error,test_error,exp_loss,bound\n", 0) == 0);
  CHECK(count_lines(csv) <= 21);  // header + at most --rounds rows
  CHECK(count_lines(csv) >= 2);
  fs::remove(data);
  fs::remove(curves);
}

TEST_CASE("identical flags and seed give byte-identical output") {
  const fs::path data = write_sample_csv();
  const fs::path out1 = scratch_path("a.csv");
  const fs::path out2 = scratch_path("b.csv");
  const std::string base = "run --algo daboost --data " + data.string() +
                           " --positive-label +1 --rounds 12 --test-fraction 0.25 --seed 99 "
                           "--mode resample --out ";
  const auto r1 = run_cli(base + out1.string());
  const auto r2 = run_cli(base + out2.string());
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(r1.out == r2.out);
  CHECK(slurp(out1) == slurp(out2));
  fs::remove(data);
  fs::remove(out1);
  fs::remove(out2);
}

TEST_CASE("invalid algorithm is a usage error") {
  const auto result = run_cli("run --algo foo --data /dev/null");
  CHECK(result.exit_code == 1);
  CHECK_FALSE(result.err.empty());
}

TEST_CASE("missing subcommand is a usage error") {
  const auto result = run_cli("");
  CHECK(result.exit_code == 1);
}

TEST_CASE("missing data file is a data error") {
  const auto result = run_cli(
      "run --algo adaboost --data /nonexistent/file.csv --positive-label +1");
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("data error") != std::string::npos);
}

TEST_CASE("run reads libsvm input") {
  const fs::path data = scratch_path("data.svm");
  {
    daboost::Rng rng = daboost::make_rng(77);
    const daboost::Dataset sample = testsupport::random_dataset(rng, 60, 4, 0.2);
    std::ofstream out(data, std::ios::binary);
    daboost::write_libsvm(out, sample);
  }
  const auto result = run_cli("run --algo gradproj --format libsvm --data " + data.string() +
                              " --rounds 8 --seed 1");
  INFO(result.err);
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("rounds_completed: 8") != std::string::npos);
  fs::remove(data);
}

TEST_CASE("sqrt step rule is accepted") {
  const auto result =
      run_cli("run --algo daboost --format toy --n 200 --dim 10 --rounds 5 --seed 3 "
              "--step-rule sqrt");
  INFO(result.err);
  CHECK(result.exit_code == 0);
}

TEST_CASE("toy reports the zero-error round for both engines") {
  const auto result = run_cli("toy --n 400 --dim 20 --rounds 8 --seed 0");
  INFO(result.err);
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("adaboost_zero_train_error_round:") != std::string::npos);
  CHECK(result.out.find("daboost_zero_train_error_round:") != std::string::npos);
}

TEST_CASE("toy rejects dim below three") {
  const auto result = run_cli("toy --dim 2 --n 100");
  CHECK(result.exit_code == 1);
  CHECK_FALSE(result.err.empty());
}

TEST_CASE("compare merges both engines") {
  const fs::path data = write_sample_csv();
  const fs::path merged = scratch_path("merged.csv");
  const auto result = run_cli("compare --data " + data.string() +
                              " --positive-label +1 --rounds 10 --test-fraction 0.3 --seed 11 "
                              "--out " + merged.string());
  INFO(result.err);
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("engine,final_train_error,best_test_error,best_test_round") !=
        std::string::npos);
  CHECK(result.out.find("adaboost,") != std::string::npos);
  CHECK(result.out.find("daboost,") != std::string::npos);

  const std::string csv = slurp(merged);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("round,adaboost_epsilon,", 0) == 0);
  CHECK(count_lines(csv) == 11);  // header + ten rounds (maximum of both engines)

  // round 1 has no history yet, so the two engines' cells agree
  std::string row1;
  REQUIRE(std::getline(lines, row1));
  std::vector<std::string> cells;
  std::istringstream row_stream(row1);
  std::string cell;
  while (std::getline(row_stream, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 11);
  for (int k = 0; k < 5; ++k) CHECK(cells[1 + k] == cells[6 + k]);
  fs::remove(data);
  fs::remove(merged);
}

TEST_CASE("model dump writes one term per line") {
  const fs::path model = scratch_path("model.txt");
  const auto result = run_cli("run --algo adaboost --format toy --n 200 --dim 5 --rounds 4 "
                              "--seed 2 --model-out " + model.string());
  INFO(result.err);
  REQUIRE(result.exit_code == 0);
  const std::string text = slurp(model);
  REQUIRE(count_lines(text) >= 1);
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    double coefficient, threshold;
    std::size_t feature;
    int polarity;
    REQUIRE((fields >> coefficient >> feature >> threshold >> polarity));
    CHECK((polarity == 1 || polarity == -1));
  }
  fs::remove(model);
}
