// Copyright 2026 The Binaural Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bw/error.hpp"
#include "bw/io.hpp"
#include "bw/workbench.hpp"
#include "doctest.h"

using namespace bw;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bw_wb_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(BWB_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string tree_hash(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    all += fs::relative(f, root).generic_string() + ":" + file_fingerprint(f) + "\n";
  }
  return fnv1a_hex(all);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("simulate with zero scenes leaves an empty directory") {
  const auto d = temp_dir("zero");
  CHECK(run("simulate --synthetic --count 0 --out " + (d / "ds").string(), d / "log") == 0);
  CHECK(fs::is_directory(d / "ds"));
  CHECK(fs::is_empty(d / "ds"));
}

TEST_CASE("simulate without material is a validation error") {
  const auto d = temp_dir("pool");
  fs::create_directories(d / "empty");
  CHECK(run("simulate --count 1 --speech " + (d / "empty").string() + " --out " +
                (d / "ds").string(), d / "log") == 1);
  CHECK(read_file(d / "log").find("empty WAV pool") != std::string::npos);
}

TEST_CASE("simulate is reproducible for a fixed seed, across job counts") {
  const auto d = temp_dir("det");
  const std::string base = "simulate --synthetic --seconds 1 --count 3 --seed 17 --out ";
  REQUIRE(run(base + (d / "a").string(), d / "log") == 0);
  REQUIRE(run(base + (d / "b").string() + " --jobs 3", d / "log") == 0);
  // run.json records the output directory only through relative paths.
  CHECK(tree_hash(d / "a") == tree_hash(d / "b"));
  const auto m = read_json(d / "a" / "scene_00001" / "manifest.json");
  CHECK(m.at("schema_version") == kSchemaVersion);
  CHECK(m.at("fingerprints").at("capture.wav") ==
        file_fingerprint(d / "a" / "scene_00001" / "capture.wav"));
  const auto run_json = read_json(d / "a" / "run.json");
  CHECK(run_json.at("subcommand") == "simulate");
  CHECK(run_json.at("config").at("seed") == 17);
  CHECK(run_json.at("config").contains("ranges"));
}

TEST_CASE("evaluate: identity, averaging and missing estimates") {
  const auto d = temp_dir("eval");
  REQUIRE(run("simulate --synthetic --seconds 1 --count 3 --seed 2 --out " + (d / "ds").string(),
              d / "log") == 0);
  CHECK(run("evaluate --est-dir " + (d / "ds").string() + " --ref-dir " + (d / "ds").string() +
                " --out " + (d / "same").string(), d / "log") == 0);
  for (const auto& row : read_csv(d / "same" / "metrics.csv")) {
    if (row[0] == "scene_id") continue;
    CHECK(row[4] == "0");
    CHECK(row[5] == "0");
    CHECK(row[6] == "0");
  }
  REQUIRE(run("baseline --method lbh-mvdr --dataset " + (d / "ds").string() + " --out " +
                  (d / "lbh").string(), d / "log") == 0);
  REQUIRE(run("evaluate --est-dir " + (d / "lbh").string() + " --ref-dir " + (d / "ds").string() +
                  " --out " + (d / "ev").string(), d / "log") == 0);
  const auto rows = read_csv(d / "ev" / "metrics.csv");
  REQUIRE(rows.size() == 4);
  const auto summary = read_json(d / "ev" / "summary.json");
  const char* keys[3] = {"delta_itd_ms", "delta_ild_db", "sd_db"};
  for (int k = 0; k < 3; ++k) {
    double sum = 0.0;
    for (int r = 1; r < 4; ++r) sum += std::stod(rows[r][4 + k]);
    CHECK(summary.at("mean").at(keys[k]).get<double>() == doctest::Approx(sum / 3).epsilon(1e-8));
  }
  int bucketed = 0;
  for (const auto& [b, v] : summary.at("by_snr_bucket").items()) bucketed += v.at("count").get<int>();
  CHECK(bucketed == 3);

  fs::remove(d / "lbh" / "scene_00002" / "estimate.wav");
  CHECK(run("evaluate --est-dir " + (d / "lbh").string() + " --ref-dir " + (d / "ds").string() +
                " --out " + (d / "ev2").string(), d / "log") == 1);
  CHECK(read_file(d / "log").find("scene_00002") != std::string::npos);
}

TEST_CASE("single-pair evaluate writes a report and a csv row") {
  const auto d = temp_dir("pair");
  REQUIRE(run("simulate --synthetic --seconds 1 --count 1 --out " + (d / "ds").string(), d / "log") == 0);
  const auto t = (d / "ds" / "scene_00000" / "target.wav").string();
  CHECK(run("evaluate --est-wav " + t + " --ref-wav " + t + " --out " + (d / "o").string() +
                " --csv " + (d / "row.csv").string(), d / "log") == 0);
  CHECK(read_json(d / "o" / "metrics.json").at("metrics").at("sd_db") == 0.0);
  CHECK(read_csv(d / "row.csv").size() == 2);
}

TEST_CASE("baseline exit codes") {
  const auto d = temp_dir("base");
  CHECK(run("baseline --manifest " + (d / "nope.json").string() + " --out " + (d / "o").string(),
            d / "log") == 2);
  CHECK(read_file(d / "log").find("\"code\":2") != std::string::npos);
  std::ofstream(d / "bad.json") << "{ not json";
  CHECK(run("baseline --manifest " + (d / "bad.json").string() + " --out " + (d / "o").string(),
            d / "log") == 1);
  CHECK(run("baseline --method beamformer --manifest x --out y", d / "log") == 1);
}

TEST_CASE("gradcheck subcommand prints per-loss errors and passes") {
  const auto d = temp_dir("gc");
  CHECK(run("gradcheck", d / "log") == 0);
  const auto out = read_file(d / "log");
  CHECK(out.find("ri ") != std::string::npos);
  CHECK(out.find("mag ") != std::string::npos);
  CHECK(out.find("mwild ") != std::string::npos);
}

TEST_CASE("train-toy with zero epochs emits the initial filters") {
  const auto d = temp_dir("toy");
  REQUIRE(run("simulate --synthetic --seconds 1 --count 1 --out " + (d / "ds").string(), d / "log") == 0);
  CHECK(run("train-toy --epochs 0 --manifest " + (d / "ds" / "scene_00000" / "manifest.json").string() +
                " --out " + (d / "t").string(), d / "log") == 0);
  const auto w = filters_from_json(read_json(d / "t" / "filters.json"));
  CHECK(w == FilterSet::zeros(6, 161));
  CHECK(read_json(d / "t" / "metrics.json").at("epochs_run") == 0);
  CHECK(fs::is_regular_file(d / "t" / "loss_curve.csv"));
  CHECK(fs::is_regular_file(d / "t" / "run.json"));
}

TEST_CASE("snr buckets use the nearest nominal value") {
  CHECK(snr_bucket(0.0) == 0);
  CHECK(snr_bucket(4.9) == 0);
  CHECK(snr_bucket(5.1) == 10);
  CHECK(snr_bucket(26.0) == 30);
}

TEST_CASE("parallel_for rethrows worker errors") {
  std::vector<int> hit(10, 0);
  parallel_for(10, 4, [&](int i) { hit[i] = 1; });
  CHECK(std::count(hit.begin(), hit.end(), 1) == 10);
  CHECK_THROWS_AS(parallel_for(5, 2, [](int i) {
                    if (i == 3) throw Error("boom");
                  }),
                  Error);
}
