#pragma once

// Minimal SVG output for planar pictures.  Presentation only: coordinates
// are rounded to doubles.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rtile/geometry.hpp"

namespace rtile {

class SvgCanvas {
 public:
  /// `view` is the region drawn; the picture is `width` pixels wide.
  SvgCanvas(const Rect& view, double width = 800) : view_(view), width_(width) {
    x0_ = view.lo(0).to_double();
    y0_ = view.dim() > 1 ? view.lo(1).to_double() : 0;
    const double w = view.side(0).to_double();
    const double h = view.dim() > 1 ? view.side(1).to_double() : w / 8;
    scale_ = width_ / w;
    height_ = h * scale_;
  }

  void rect(const Rect& r, const std::string& fill, const std::string& stroke = "#333", double stroke_width = 0.5,
            double opacity = 1.0) {
    const double x = (r.lo(0).to_double() - x0_) * scale_;
    const double w = r.side(0).to_double() * scale_;
    double y = 0, h = height_;
    if (r.dim() > 1) {
      h = r.side(1).to_double() * scale_;
      y = height_ - (r.lo(1).to_double() - y0_) * scale_ - h;  // y axis up
    }
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"%s\" fill-opacity=\"%.2f\" "
                  "stroke=\"%s\" stroke-width=\"%.2f\"/>\n",
                  x, y, w, h, fill.c_str(), opacity, stroke.c_str(), stroke_width);
    body_ << buf;
  }

  std::string str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
        << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

  void save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) fail(Errc::precondition_violated, "cannot write " + path);
    f << str();
  }

 private:
  Rect view_;
  double width_, height_ = 0, scale_ = 1, x0_ = 0, y0_ = 0;
  std::ostringstream body_;
};

/// Fill colour per tile type bits.
inline std::string type_colour(std::uint32_t bits) {
  static const std::vector<std::string> palette{"#f4d35e", "#ee964b", "#0d3b66", "#5fa8d3",
                                                "#a1c181", "#619b8a", "#c9ada7", "#9a8c98"};
  return palette[bits % palette.size()];
}

}  // namespace rtile
