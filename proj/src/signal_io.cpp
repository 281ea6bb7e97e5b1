#include "pitchstyle/signal_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "pitchstyle/error.hpp"

namespace pitchstyle {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::string& b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

std::uint32_t read_u32(const std::string& b, std::size_t at) {
  return static_cast<std::uint32_t>(read_u16(b, at)) |
         (static_cast<std::uint32_t>(read_u16(b, at + 2)) << 16);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  put_u16(out, static_cast<std::uint16_t>(v & 0xFFFF));
  put_u16(out, static_cast<std::uint16_t>(v >> 16));
}

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FormatChunk parse_format_chunk(const std::string& b, std::size_t at,
                               std::uint32_t size) {
  if (size < 16) fail(ErrorKind::kMalformedHeader, "fmt chunk shorter than 16 bytes");
  FormatChunk f;
  f.format = read_u16(b, at);
  f.channels = read_u16(b, at + 2);
  f.sample_rate = read_u32(b, at + 4);
  f.block_align = read_u16(b, at + 12);
  f.bits = read_u16(b, at + 14);
  if (f.format == kFormatExtensible) {
    // cbSize(2) validBits(2) channelMask(4) then the subformat GUID whose first
    // two bytes carry the real format tag.
    if (size < 40) fail(ErrorKind::kMalformedHeader, "extensible fmt chunk too short");
    f.format = read_u16(b, at + 24);
  }
  return f;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  (void)ec;
  return std::string(buf.data(), end);
}

}  // namespace

AudioBuffer parse_wav(const std::string& b) {
  if (b.size() < 12) fail(ErrorKind::kMalformedHeader, "file too short for a RIFF header");
  const std::string magic = b.substr(0, 4);
  if (magic == "RIFX" || magic == "RF64") {
    fail(ErrorKind::kUnsupportedFormat, magic + " container is not supported");
  }
  if (magic != "RIFF" || b.compare(8, 4, "WAVE") != 0) {
    fail(ErrorKind::kMalformedHeader, "missing RIFF/WAVE signature");
  }

  FormatChunk fmt;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::string id = b.substr(pos, 4);
    const std::uint32_t size = read_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (body + size > b.size()) fail(ErrorKind::kMalformedHeader, "fmt chunk overruns file");
      fmt = parse_format_chunk(b, body, size);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail(ErrorKind::kMalformedHeader, "data chunk precedes fmt chunk");
      if (fmt.channels != 1 && fmt.channels != 2) {
        fail(ErrorKind::kUnsupportedFormat,
             std::to_string(fmt.channels) + " channels (only mono/stereo)");
      }
      const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
      const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
      if (!pcm16 && !float32) {
        fail(ErrorKind::kUnsupportedFormat,
             "codec " + std::to_string(fmt.format) + " with " +
                 std::to_string(fmt.bits) + " bits (only PCM16 and float32)");
      }
      if (fmt.sample_rate == 0) fail(ErrorKind::kMalformedHeader, "sample rate is zero");
      const std::size_t width = fmt.bits / 8;
      const std::size_t frame_bytes = width * fmt.channels;
      if (fmt.block_align != frame_bytes) {
        fail(ErrorKind::kMalformedHeader, "block_align disagrees with channels/bits");
      }
      if (body + size > b.size() || size % frame_bytes != 0) {
        fail(ErrorKind::kTruncatedData,
             "data chunk declares " + std::to_string(size) + " bytes but " +
                 std::to_string(b.size() - std::min(body, b.size())) +
                 " are present");
      }
      AudioBuffer out;
      out.sample_rate = static_cast<int>(fmt.sample_rate);
      const std::size_t frames = size / frame_bytes;
      out.samples.resize(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < fmt.channels; ++c) {
          const std::size_t at = body + i * frame_bytes + c * width;
          if (pcm16) {
            acc += static_cast<std::int16_t>(read_u16(b, at)) / 32768.0;
          } else {
            const std::uint32_t bits = read_u32(b, at);
            float f;
            std::memcpy(&f, &bits, sizeof f);
            if (!std::isfinite(f)) {
              fail(ErrorKind::kMalformedHeader,
                   "non-finite float sample at frame " + std::to_string(i));
            }
            acc += f;
          }
        }
        out.samples[i] = acc / fmt.channels;
      }
      return out;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) fail(ErrorKind::kMalformedHeader, "no fmt chunk");
  fail(ErrorKind::kMalformedHeader, "no data chunk");
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  return parse_wav(read_text_file(path));
}

std::string encode_wav(const AudioBuffer& buffer) {
  if (buffer.sample_rate <= 0) fail(ErrorKind::kInvalidArgument, "sample_rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(buffer.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (double s : buffer.samples) {
    const double clamped = std::isfinite(s) ? std::clamp(s, -1.0, 1.0) : 0.0;
    const long q = std::clamp(std::lround(clamped * 32768.0), -32768L, 32767L);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer) {
  write_text_file(path, encode_wav(buffer));
}

ContourFormat contour_format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? ContourFormat::kCsv : ContourFormat::kJson;
}

std::string format_contour(const F0Contour& contour, ContourFormat format) {
  validate(contour);
  std::string out;
  if (format == ContourFormat::kCsv) {
    out += "# frame_rate=" + format_double(contour.frame_rate) + "\n";
    out += "index,f0,voiced\n";
    for (std::size_t i = 0; i < contour.size(); ++i) {
      out += std::to_string(i) + "," + format_double(contour.f0_hz[i]) + "," +
             (contour.voiced[i] ? "1" : "0") + "\n";
    }
    return out;
  }
  // Hand-rolled so numbers keep 17 significant digits and the layout stays
  // one frame per line (diff-friendly).
  out += "{\n  \"frame_rate\": " + format_double(contour.frame_rate) +
         ",\n  \"frames\": [";
  for (std::size_t i = 0; i < contour.size(); ++i) {
    out += i == 0 ? "\n    " : ",\n    ";
    out += "{\"f0\": " + format_double(contour.f0_hz[i]) +
           ", \"voiced\": " + (contour.voiced[i] ? "true" : "false") + "}";
  }
  out += contour.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

namespace {

F0Contour parse_json_contour(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kSchema, std::string("contour JSON does not parse: ") + e.what());
  }
  if (!j.is_object() || !j.contains("frame_rate") || !j["frame_rate"].is_number() ||
      !j.contains("frames") || !j["frames"].is_array()) {
    fail(ErrorKind::kSchema, "contour JSON needs numeric frame_rate and frames array");
  }
  F0Contour c;
  c.frame_rate = j["frame_rate"].get<double>();
  const auto& frames = j["frames"];
  c.f0_hz.reserve(frames.size());
  c.voiced.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& fr = frames[i];
    if (!fr.is_object() || !fr.contains("f0") || !fr["f0"].is_number() ||
        !fr.contains("voiced") || !fr["voiced"].is_boolean()) {
      fail(ErrorKind::kSchema, "frame " + std::to_string(i) +
                                   " needs numeric f0 and boolean voiced");
    }
    c.f0_hz.push_back(fr["f0"].get<double>());
    c.voiced.push_back(fr["voiced"].get<bool>());
  }
  return c;
}

bool parse_number(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

F0Contour parse_csv_contour(const std::string& text) {
  F0Contour c;
  bool have_rate = false;
  bool have_header = false;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find("frame_rate=");
      if (eq != std::string::npos) {
        if (!parse_number(std::string_view(line).substr(eq + 11), c.frame_rate)) {
          fail(ErrorKind::kSchema, "bad frame_rate comment on line " + std::to_string(line_no));
        }
        have_rate = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != "index,f0,voiced") {
        fail(ErrorKind::kSchema, "CSV header must be 'index,f0,voiced'");
      }
      have_header = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      fail(ErrorKind::kSchema, "row " + std::to_string(c.size()) + " (line " +
                                   std::to_string(line_no) + ") needs three columns");
    }
    const std::string_view sv(line);
    double index = 0.0;
    double f0 = 0.0;
    double flag = 0.0;
    if (!parse_number(sv.substr(0, c1), index) ||
        index != static_cast<double>(c.size())) {
      fail(ErrorKind::kSchema, "row " + std::to_string(c.size()) + " (line " +
                                   std::to_string(line_no) + ") has bad index");
    }
    if (!parse_number(sv.substr(c1 + 1, c2 - c1 - 1), f0)) {
      fail(ErrorKind::kSchema, "row " + std::to_string(c.size()) + " (line " +
                                   std::to_string(line_no) + ") has non-numeric f0");
    }
    if (!parse_number(sv.substr(c2 + 1), flag) || (flag != 0.0 && flag != 1.0)) {
      fail(ErrorKind::kSchema, "row " + std::to_string(c.size()) + " (line " +
                                   std::to_string(line_no) + ") voiced must be 0 or 1");
    }
    c.f0_hz.push_back(f0);
    c.voiced.push_back(flag == 1.0);
  }
  if (!have_rate) fail(ErrorKind::kSchema, "CSV contour lacks '# frame_rate=' line");
  if (!have_header) fail(ErrorKind::kSchema, "CSV contour lacks header");
  return c;
}

}  // namespace

F0Contour parse_contour(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  F0Contour c = (first != std::string::npos && text[first] == '{')
                    ? parse_json_contour(text)
                    : parse_csv_contour(text);
  try {
    validate(c);
  } catch (const Error& e) {
    fail(ErrorKind::kSchema, e.what());
  }
  return c;
}

void write_contour(const std::filesystem::path& path, const F0Contour& contour,
                   ContourFormat format) {
  write_text_file(path, format_contour(contour, format));
}

void write_contour(const std::filesystem::path& path, const F0Contour& contour) {
  write_contour(path, contour, contour_format_for(path));
}

F0Contour read_contour(const std::filesystem::path& path) {
  return parse_contour(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace pitchstyle
