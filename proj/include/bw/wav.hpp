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

#pragma once

#include <filesystem>
#include <vector>

namespace bw {

enum class SampleFormat { kPcm16, kFloat32 };

struct Audio {
  int sample_rate = 16000;
  // channels[c][n]
  std::vector<std::vector<double>> channels;

  int num_channels() const { return static_cast<int>(channels.size()); }
  std::size_t num_samples() const {
    return channels.empty() ? 0 : channels[0].size();
  }
};

// Reads RIFF/WAVE PCM 16-bit or IEEE float32 (plain or extensible header).
// Throws IoError on missing files and unsupported encodings.
Audio read_wav(const std::filesystem::path& path);

// Throws Error if the file's rate differs from `expected_rate`; resampling is
// not supported.
Audio read_wav(const std::filesystem::path& path, int expected_rate);

// Writes to a temporary sibling and renames it into place, so readers never
// see a partial file.
void write_wav(const std::filesystem::path& path, const Audio& audio,
               SampleFormat format = SampleFormat::kFloat32);

}  // namespace bw
