#include "empdet/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "empdet/errors.hpp"

namespace empdet {

namespace {

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

// Walks RIFF chunks; on success leaves the stream positioned at the start of
// the data payload and reports its byte size.
void open_pcm16(std::ifstream& in, const std::string& path, FmtChunk& fmt,
                std::uint32_t& data_size) {
  unsigned char hdr[12];
  if (!in.read(reinterpret_cast<char*>(hdr), 12) || std::memcmp(hdr, "RIFF", 4) != 0 ||
      std::memcmp(hdr + 8, "WAVE", 4) != 0) {
    throw InputError(path + ": not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  unsigned char ch[8];
  while (in.read(reinterpret_cast<char*>(ch), 8)) {
    std::uint32_t size = read_u32(ch + 4);
    if (std::memcmp(ch, "fmt ", 4) == 0) {
      if (size < 16) throw InputError(path + ": truncated fmt chunk");
      unsigned char body[16];
      if (!in.read(reinterpret_cast<char*>(body), 16)) {
        throw InputError(path + ": truncated fmt chunk");
      }
      fmt.format = read_u16(body);
      fmt.channels = read_u16(body + 2);
      fmt.sample_rate = read_u32(body + 4);
      fmt.bits = read_u16(body + 14);
      in.seekg(size - 16 + (size & 1), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(ch, "data", 4) == 0) {
      if (!have_fmt) throw InputError(path + ": data chunk precedes fmt");
      if (fmt.format != 1 || fmt.bits != 16) {
        throw InputError(path + ": only 16-bit PCM is supported");
      }
      if (fmt.channels != 1) throw InputError(path + ": only mono audio is supported");
      data_size = size;
      return;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  throw InputError(path + ": no data chunk");
}

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open audio file: " + path);
  FmtChunk fmt;
  std::uint32_t data_size = 0;
  open_pcm16(in, path, fmt, data_size);

  WavData wav;
  wav.sample_rate = static_cast<int>(fmt.sample_rate);
  std::size_t n = data_size / 2;
  wav.samples.resize(n);
  std::vector<char> raw(data_size);
  if (!in.read(raw.data(), data_size)) throw InputError(path + ": truncated data chunk");
  for (std::size_t i = 0; i < n; ++i) {
    std::int16_t s = static_cast<std::int16_t>(
        static_cast<unsigned char>(raw[2 * i]) |
        (static_cast<unsigned char>(raw[2 * i + 1]) << 8));
    wav.samples[i] = static_cast<float>(s) / 32768.0f;
  }
  return wav;
}

void write_wav(const std::string& path, std::span<const float> samples, int sample_rate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write audio file: " + path);

  std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * 2);
  auto put_u32 = [&](std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                 static_cast<char>(v >> 24)};
    out.write(b, 4);
  };
  auto put_u16 = [&](std::uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    out.write(b, 2);
  };

  out.write("RIFF", 4);
  put_u32(36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<std::uint32_t>(sample_rate));
  put_u32(static_cast<std::uint32_t>(sample_rate) * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_size);

  std::vector<char> raw(samples.size() * 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    float x = std::clamp(samples[i], -1.0f, 1.0f);
    auto s = static_cast<std::int16_t>(std::lround(x * 32767.0f));
    raw[2 * i] = static_cast<char>(s & 0xff);
    raw[2 * i + 1] = static_cast<char>((s >> 8) & 0xff);
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw InputError("short write to audio file: " + path);
}

double wav_duration_s(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open audio file: " + path);
  FmtChunk fmt;
  std::uint32_t data_size = 0;
  open_pcm16(in, path, fmt, data_size);
  return static_cast<double>(data_size / 2) / static_cast<double>(fmt.sample_rate);
}

}  // namespace empdet
