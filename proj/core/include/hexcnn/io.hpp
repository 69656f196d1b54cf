#pragma once

// Binary formats.
//
//   HXT1  hexagonal tensor: "HXT1", u32 side, u32 channels, u32 element
//         width (4 or 8), then channels*cell_count(side) little-endian
//         floats in storage order.
//   IMG1  raw image: "IMG1", u32 height, u32 width, u32 channels, then
//         row-major (h, w, c) little-endian f32.
//   PGM/PPM  binary P5/P6 and ASCII P2/P3 with maxval <= 65535, scaled to [0, 1].
//
// Dataset directory: HXT1 tensors named *.hxt (read in lexicographic
// filename order) plus labels.txt with one integer label per line.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hexcnn/hexgrid.hpp"
#include "hexcnn/resample.hpp"

namespace hexcnn::io {

enum class ElementWidth : std::uint32_t { f32 = 4, f64 = 8 };

void write_hxt(std::ostream& out, const HexTensor& t, ElementWidth width = ElementWidth::f64);
HexTensor read_hxt(std::istream& in);
void save_hxt(const std::filesystem::path& path, const HexTensor& t,
              ElementWidth width = ElementWidth::f64);
HexTensor load_hxt(const std::filesystem::path& path);

void write_img1(std::ostream& out, const SquareImage& img);
SquareImage read_img1(std::istream& in);
SquareImage read_pnm(std::istream& in);
void write_pnm(std::ostream& out, const SquareImage& img);

/// Dispatches on the magic bytes: IMG1, P2, P3, P5 or P6.
SquareImage load_image(const std::filesystem::path& path);

struct Dataset {
  std::vector<HexTensor> samples;
  std::vector<int> labels;
};

Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const std::filesystem::path& dir, const Dataset& data);

// Little-endian primitives shared by the formats.
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f32(std::ostream& out, float v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
float read_f32(std::istream& in);
double read_f64(std::istream& in);
void expect_magic(std::istream& in, const char (&magic)[5]);

}  // namespace hexcnn::io
