#include "hexcnn/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hexcnn/errors.hpp"

namespace hexcnn::io {
namespace {

template <class U>
void write_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <class U>
U read_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw FormatError("unexpected end of file");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

void require_eof(std::istream& in, const char* what) {
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(std::string(what) + ": payload longer than the header declares");
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

// Next whitespace-delimited token of a PNM header, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      if (!tok.empty()) break;
    } else {
      tok.push_back(static_cast<char>(ch));
    }
    ch = in.get();
  }
  if (tok.empty()) throw FormatError("truncated PNM header");
  return tok;
}

int pnm_int(std::istream& in) {
  const std::string tok = pnm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw FormatError("bad PNM number: " + tok);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad PNM number: " + tok);
  }
}

}  // namespace

void write_u32(std::ostream& out, std::uint32_t v) { write_le(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { write_le(out, v); }
void write_f32(std::ostream& out, float v) { write_le(out, std::bit_cast<std::uint32_t>(v)); }
void write_f64(std::ostream& out, double v) { write_le(out, std::bit_cast<std::uint64_t>(v)); }
std::uint32_t read_u32(std::istream& in) { return read_le<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return read_le<std::uint64_t>(in); }
float read_f32(std::istream& in) { return std::bit_cast<float>(read_le<std::uint32_t>(in)); }
double read_f64(std::istream& in) { return std::bit_cast<double>(read_le<std::uint64_t>(in)); }

void expect_magic(std::istream& in, const char (&magic)[5]) {
  char buf[4] = {};
  in.read(buf, 4);
  if (in.gcount() != 4 || std::memcmp(buf, magic, 4) != 0) {
    throw FormatError(std::string("missing ") + magic + " magic");
  }
}

void write_hxt(std::ostream& out, const HexTensor& t, ElementWidth width) {
  out.write("HXT1", 4);
  write_u32(out, static_cast<std::uint32_t>(t.side()));
  write_u32(out, static_cast<std::uint32_t>(t.channels()));
  write_u32(out, static_cast<std::uint32_t>(width));
  for (double v : t.values()) {
    if (width == ElementWidth::f32) {
      write_f32(out, static_cast<float>(v));
    } else {
      write_f64(out, v);
    }
  }
  if (!out) throw FormatError("HXT1 write failed");
}

HexTensor read_hxt(std::istream& in) {
  expect_magic(in, "HXT1");
  const std::uint32_t side = read_u32(in);
  const std::uint32_t channels = read_u32(in);
  const std::uint32_t width = read_u32(in);
  if (side < 1 || side > 1u << 15 || channels < 1 || channels > 1u << 16) {
    throw FormatError("HXT1 header has implausible side/channels");
  }
  if (width != 4 && width != 8) throw FormatError("HXT1 element width must be 4 or 8");
  const std::size_t n = static_cast<std::size_t>(channels) * cell_count(static_cast<int>(side));
  std::vector<double> data(n);
  try {
    for (double& v : data) v = width == 4 ? static_cast<double>(read_f32(in)) : read_f64(in);
  } catch (const FormatError&) {
    throw FormatError("HXT1 payload shorter than side/channels require");
  }
  require_eof(in, "HXT1");
  return HexTensor(HexShape(static_cast<int>(side)), static_cast<int>(channels), std::move(data));
}

void save_hxt(const std::filesystem::path& path, const HexTensor& t, ElementWidth width) {
  auto out = open_out(path);
  write_hxt(out, t, width);
}

HexTensor load_hxt(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_hxt(in);
}

void write_img1(std::ostream& out, const SquareImage& img) {
  out.write("IMG1", 4);
  write_u32(out, static_cast<std::uint32_t>(img.height));
  write_u32(out, static_cast<std::uint32_t>(img.width));
  write_u32(out, static_cast<std::uint32_t>(img.channels));
  for (float v : img.data) write_f32(out, v);
}

SquareImage read_img1(std::istream& in) {
  expect_magic(in, "IMG1");
  const std::uint32_t h = read_u32(in);
  const std::uint32_t w = read_u32(in);
  const std::uint32_t c = read_u32(in);
  if (h < 1 || w < 1 || c < 1 || h > 1u << 16 || w > 1u << 16 || c > 64) {
    throw FormatError("IMG1 header has implausible dimensions");
  }
  SquareImage img(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
  try {
    for (float& v : img.data) v = read_f32(in);
  } catch (const FormatError&) {
    throw FormatError("IMG1 payload shorter than the header declares");
  }
  require_eof(in, "IMG1");
  return img;
}

SquareImage read_pnm(std::istream& in) {
  char magic[2] = {};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P') throw FormatError("not a PNM file");
  const char kind = magic[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
    throw FormatError(std::string("unsupported PNM variant P") + kind);
  }
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;
  const int w = pnm_int(in);
  const int h = pnm_int(in);
  const int maxval = pnm_int(in);
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw FormatError("bad PNM dimensions");
  SquareImage img(h, w, channels);
  const float scale = 1.0f / static_cast<float>(maxval);
  const bool ascii = kind == '2' || kind == '3';
  for (float& v : img.data) {
    int raw = 0;
    if (ascii) {
      raw = pnm_int(in);
    } else if (maxval < 256) {
      const int ch = in.get();
      if (ch == EOF) throw FormatError("PNM payload truncated");
      raw = ch;
    } else {
      const int hi = in.get();
      const int lo = in.get();
      if (lo == EOF) throw FormatError("PNM payload truncated");
      raw = (hi << 8) | lo;
    }
    if (raw > maxval) throw FormatError("PNM sample exceeds maxval");
    v = static_cast<float>(raw) * scale;
  }
  return img;
}

void write_pnm(std::ostream& out, const SquareImage& img) {
  if (img.channels != 1 && img.channels != 3) throw FormatError("PNM needs 1 or 3 channels");
  out << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
  for (float v : img.data) {
    const float clamped = std::clamp(v, 0.0f, 1.0f);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0f))));
  }
}

SquareImage load_image(const std::filesystem::path& path) {
  auto in = open_in(path);
  char head[2] = {};
  in.read(head, 2);
  in.clear();
  in.seekg(0);
  if (head[0] == 'I' && head[1] == 'M') return read_img1(in);
  if (head[0] == 'P') return read_pnm(in);
  throw FormatError(path.string() + ": unrecognised image format");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw FormatError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".hxt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Dataset ds;
  std::ifstream labels(dir / "labels.txt");
  if (!labels) throw FormatError("dataset is missing labels.txt");
  std::string line;
  while (std::getline(labels, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    int label = 0;
    if (!(ls >> label)) throw FormatError("bad label line: " + line);
    ds.labels.push_back(label);
  }
  if (ds.labels.size() != files.size()) {
    throw FormatError("labels.txt has " + std::to_string(ds.labels.size()) + " entries for " +
                      std::to_string(files.size()) + " tensors");
  }
  ds.samples.reserve(files.size());
  for (const auto& f : files) ds.samples.push_back(load_hxt(f));
  return ds;
}

void save_dataset(const std::filesystem::path& dir, const Dataset& data) {
  if (data.samples.size() != data.labels.size()) throw ShapeError("one label per sample required");
  std::filesystem::create_directories(dir);
  std::ofstream labels(dir / "labels.txt");
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.hxt", i);
    save_hxt(dir / name, data.samples[i]);
    labels << data.labels[i] << '\n';
  }
}

}  // namespace hexcnn::io
