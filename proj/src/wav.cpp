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

#include "bw/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "bw/error.hpp"
#include "bw/io.hpp"

namespace bw {
namespace {

static_assert(std::endian::native == std::endian::little,
              "wav codec assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const std::vector<char>& buf, std::size_t pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  return v;
}

template <typename T>
void store(std::string& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.append(bytes, sizeof(T));
}

}  // namespace

Audio read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav file: " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& why) {
    throw IoError("malformed wav file " + path.string() + ": " + why);
  };
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    fail("missing RIFF/WAVE header");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_pos = 0, data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t size = load<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (size < 16 || body + size > buf.size()) fail("short fmt chunk");
      format = load<std::uint16_t>(buf, body);
      channels = load<std::uint16_t>(buf, body + 2);
      rate = load<std::uint32_t>(buf, body + 4);
      bits = load<std::uint16_t>(buf, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) fail("short extensible fmt chunk");
        format = load<std::uint16_t>(buf, body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      data_pos = body;
      data_len = std::min<std::size_t>(size, buf.size() - body);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) fail("no fmt chunk");
  if (data_pos == 0) fail("no data chunk");
  if (channels == 0) fail("zero channels");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    throw IoError("unsupported wav encoding in " + path.string() +
                  " (need PCM16 or float32)");
  }
  const std::size_t width = bits / 8;
  const std::size_t frames = data_len / (width * channels);
  Audio audio;
  audio.sample_rate = static_cast<int>(rate);
  audio.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t at = data_pos + (n * channels + c) * width;
      audio.channels[c][n] =
          pcm16 ? load<std::int16_t>(buf, at) / 32768.0
                : static_cast<double>(load<float>(buf, at));
    }
  }
  return audio;
}

Audio read_wav(const std::filesystem::path& path, int expected_rate) {
  Audio a = read_wav(path);
  if (a.sample_rate != expected_rate) {
    throw Error("sample rate mismatch in " + path.string() + ": file is " +
                std::to_string(a.sample_rate) + " Hz, expected " +
                std::to_string(expected_rate) +
                " Hz (resampling is not supported)");
  }
  return a;
}

void write_wav(const std::filesystem::path& path, const Audio& audio,
               SampleFormat format) {
  require(audio.num_channels() > 0, "write_wav: no channels");
  for (const auto& c : audio.channels) {
    require(c.size() == audio.num_samples(),
            "write_wav: channels differ in length");
  }
  const std::uint16_t channels = static_cast<std::uint16_t>(audio.num_channels());
  const std::uint16_t bits = format == SampleFormat::kPcm16 ? 16 : 32;
  const std::uint16_t tag =
      format == SampleFormat::kPcm16 ? kFormatPcm : kFormatFloat;
  const std::uint32_t block = channels * bits / 8;
  const std::uint32_t data_len =
      static_cast<std::uint32_t>(audio.num_samples() * block);
  std::string out;
  out.reserve(44 + data_len);
  out.append("RIFF");
  store<std::uint32_t>(out, 36 + data_len);
  out.append("WAVEfmt ");
  store<std::uint32_t>(out, 16);
  store<std::uint16_t>(out, tag);
  store<std::uint16_t>(out, channels);
  store<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate));
  store<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate) * block);
  store<std::uint16_t>(out, static_cast<std::uint16_t>(block));
  store<std::uint16_t>(out, bits);
  out.append("data");
  store<std::uint32_t>(out, data_len);
  for (std::size_t n = 0; n < audio.num_samples(); ++n) {
    for (const auto& c : audio.channels) {
      if (format == SampleFormat::kPcm16) {
        const double v = std::clamp(c[n], -1.0, 32767.0 / 32768.0);
        store<std::int16_t>(out,
                            static_cast<std::int16_t>(std::lround(v * 32768.0)));
      } else {
        store<float>(out, static_cast<float>(c[n]));
      }
    }
  }
  write_file_atomic(path, out);
}

}  // namespace bw
