#include <charconv>
#include <ostream>

#include "hexcnn/cli/commands.hpp"
#include "hexcnn/io.hpp"
#include "hexcnn/resample.hpp"

namespace hexcnn::cli {

int cmd_resample(const ResampleOptions& opt, std::ostream& out, std::ostream& err) {
  SquareImage img;
  try {
    img = io::load_image(opt.input);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  int side = 0;
  if (opt.side == "auto") {
    side = min_cover_side(std::max(img.height, img.width));
  } else {
    const auto* end = opt.side.data() + opt.side.size();
    const auto [ptr, ec] = std::from_chars(opt.side.data(), end, side);
    if (ec != std::errc() || ptr != end || side < 1) {
      err << "error: --side must be a positive integer or 'auto'\n";
      return kUsage;
    }
  }
  HexLatticeGeometry geom;
  if (opt.scale == "fit") {
    geom.scale = fit_scale(img, side);
  } else {
    try {
      std::size_t used = 0;
      geom.scale = std::stod(opt.scale, &used);
      if (used != opt.scale.size() || !(geom.scale > 0.0)) throw std::invalid_argument("scale");
    } catch (const std::exception&) {
      err << "error: --scale must be a positive number or 'fit'\n";
      return kUsage;
    }
  }
  const HexTensor hex = square_to_hex(img, side, geom);
  try {
    io::save_hxt(opt.output, hex,
                 opt.single_precision ? io::ElementWidth::f32 : io::ElementWidth::f64);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  out << "wrote " << opt.output.string() << ": side " << side << ", " << hex.channels()
      << " channel(s), scale " << geom.scale << " px from " << img.height << "x" << img.width
      << '\n';
  return kOk;
}

}  // namespace hexcnn::cli
