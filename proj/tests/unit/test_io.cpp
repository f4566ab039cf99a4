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

#include <filesystem>
#include <fstream>

#include "bw/error.hpp"
#include "bw/io.hpp"
#include "bw/rng.hpp"
#include "bw/wav.hpp"
#include "doctest.h"

using namespace bw;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bw_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("float32 wav round trip is exact for float values") {
  const auto dir = temp_dir("wav32");
  Audio a;
  a.sample_rate = 16000;
  a.channels = {{0.5, -0.25, 0.125, 1.5}, {0.0, 1.0, -1.0, 0.75}};
  write_wav(dir / "a.wav", a);
  const Audio b = read_wav(dir / "a.wav");
  CHECK(b.sample_rate == 16000);
  CHECK(b.channels == a.channels);
}

TEST_CASE("pcm16 wav round trip within one quantization step") {
  const auto dir = temp_dir("wav16");
  Audio a;
  a.channels = {{0.1, -0.7, 0.999, -1.0}};
  write_wav(dir / "a.wav", a, SampleFormat::kPcm16);
  const Audio b = read_wav(dir / "a.wav");
  REQUIRE(b.num_channels() == 1);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(b.channels[0][n] - a.channels[0][n]) <= 1.0 / 32768);
  CHECK(fs::file_size(dir / "a.wav") == 44 + 8);
}

TEST_CASE("wav errors") {
  const auto dir = temp_dir("wav_err");
  CHECK_THROWS_AS(read_wav(dir / "missing.wav"), IoError);
  std::ofstream(dir / "junk.wav") << "not a riff file";
  CHECK_THROWS_AS(read_wav(dir / "junk.wav"), IoError);
  Audio a;
  a.sample_rate = 8000;
  a.channels = {{0.0, 0.1}};
  write_wav(dir / "8k.wav", a);
  CHECK_THROWS_WITH(read_wav(dir / "8k.wav", 16000), doctest::Contains("8000"));
}

TEST_CASE("atomic write leaves no temporary files") {
  const auto dir = temp_dir("atomic");
  write_file_atomic(dir / "x.txt", "hello");
  write_file_atomic(dir / "x.txt", "world");
  CHECK(read_file(dir / "x.txt") == "world");
  int n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++n;
  CHECK(n == 1);
}

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("rng streams are reproducible and derived seeds differ") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    const int k = u.integer(-2, 3);
    CHECK(k >= -2);
    CHECK(k <= 3);
  }
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
}
