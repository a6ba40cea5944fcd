#include <algorithm>
#include <cmath>
#include <numeric>

#include "coldloop/common.hpp"
#include "coldloop/imaging.hpp"

namespace coldloop::imaging {

RasterImage::RasterImage(int w, int h, double scale, double ox, double oy)
    : width(w), height(h), pixel_scale(scale), origin_x(ox), origin_y(oy) {
  if (w < 0 || h < 0) throw Error("image dimensions must be non-negative");
  pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
}

std::size_t RasterImage::count_nonzero() const {
  return static_cast<std::size_t>(std::count_if(pixels.begin(), pixels.end(), [](auto v) { return v != 0; }));
}

bool RasterImage::same_geometry(const RasterImage& o) const {
  return width == o.width && height == o.height && pixel_scale == o.pixel_scale && origin_x == o.origin_x &&
         origin_y == o.origin_y;
}

RasterImage blank_for_box(const Vec3& box, double pixel_scale) {
  if (!(pixel_scale > 0.0)) throw Error("pixel_scale must be positive");
  const int w = static_cast<int>(std::ceil(box[0] * pixel_scale - 1e-9));
  const int h = static_cast<int>(std::ceil(box[1] * pixel_scale - 1e-9));
  return RasterImage(std::max(w, 0), std::max(h, 0), pixel_scale);
}

void RenderRule::validate() const {
  if (!(z_min < z_max)) throw Error("render rule needs z_min < z_max");
  if (!(atom_draw_radius > 0.0)) throw Error("render rule needs a positive draw radius");
  if (!(pixel_scale > 0.0)) throw Error("render rule needs a positive pixel scale");
}

bool GroupFilter::accepts(md::Group g) const {
  switch (g) {
    case md::Group::Substrate: return substrate;
    case md::Group::Particle: return particle;
    case md::Group::FixedWall: return wall;
  }
  return false;
}

double surface_height(const md::Snapshot& s) {
  double top = 0.0;
  bool any = false;
  for (const auto& a : s.atoms)
    if (a.group != md::Group::Particle) {
      top = any ? std::max(top, a.position[2]) : a.position[2];
      any = true;
    }
  return top;
}

std::uint8_t band_intensity(double z, double lo, double hi) {
  const double t = std::clamp((z - lo) / (hi - lo), 0.0, 1.0);
  return static_cast<std::uint8_t>(1 + std::lround(254.0 * t));
}

namespace {

struct Disc {
  double x, y, z;
  std::uint8_t value;
};

// Discs are painted in ascending z; equal heights keep snapshot (id) order.
RasterImage paint(std::vector<Disc> discs, const Vec3& box, const RenderRule& rule) {
  RasterImage img = blank_for_box(box, rule.pixel_scale);
  std::stable_sort(discs.begin(), discs.end(), [](const Disc& a, const Disc& b) { return a.z < b.z; });
  const double s = rule.pixel_scale;
  const double r = rule.atom_draw_radius * s;  // radius in pixels
  const double r2 = r * r;
  for (const auto& d : discs) {
    const double cx = (d.x - img.origin_x) * s, cy = (d.y - img.origin_y) * s;
    // Pixel centres at (i + 0.5); include i with |i + 0.5 - c| <= r.
    const int x0 = std::max(0, static_cast<int>(std::ceil(cx - r - 0.5)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::floor(cx + r - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(cy - r - 0.5)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::floor(cy + r - 0.5)));
    for (int y = y0; y <= y1; ++y) {
      const double dy = y + 0.5 - cy;
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - cx;
        if (dx * dx + dy * dy <= r2) img.at(x, y) = d.value;
      }
    }
  }
  return img;
}

}  // namespace

RasterImage render_band(const md::Snapshot& snapshot, const RenderRule& rule, const GroupFilter& groups, double lo,
                        double hi) {
  rule.validate();
  if (!(lo <= hi)) throw Error("render band needs lo <= hi");
  std::vector<Disc> discs;
  for (const auto& a : snapshot.atoms) {
    if (!groups.accepts(a.group)) continue;
    const double z = a.position[2];
    if (z < lo || z > hi) continue;
    const auto v = hi > lo ? band_intensity(z, lo, hi) : std::uint8_t{255};
    discs.push_back({a.position[0], a.position[1], z, v});
  }
  return paint(std::move(discs), snapshot.box, rule);
}

RasterImage render_topview(const md::Snapshot& snapshot, const RenderRule& rule, const GroupFilter& groups,
                           double surface_z) {
  return render_band(snapshot, rule, groups, surface_z + rule.z_min, surface_z + rule.z_max);
}

RasterImage render_topview(const md::Snapshot& snapshot, const RenderRule& rule, const GroupFilter& groups) {
  return render_topview(snapshot, rule, groups, surface_height(snapshot));
}

RasterImage render_stress(const md::Snapshot& snapshot, const RenderRule& rule, double vm_lo, double vm_hi) {
  rule.validate();
  if (!(vm_lo < vm_hi)) throw Error("stress range needs lo < hi");
  std::vector<Disc> discs;
  discs.reserve(snapshot.atoms.size());
  for (const auto& a : snapshot.atoms)
    discs.push_back({a.position[0], a.position[1], a.position[2], band_intensity(a.von_mises, vm_lo, vm_hi)});
  return paint(std::move(discs), snapshot.box, rule);
}

RasterImage image_difference(const RasterImage& frame, const RasterImage& background) {
  if (!frame.same_geometry(background))
    throw Error("image_difference: frame and background differ in size or scale");
  RasterImage out = frame;
  for (std::size_t k = 0; k < out.pixels.size(); ++k) {
    const int d = static_cast<int>(frame.pixels[k]) - static_cast<int>(background.pixels[k]);
    out.pixels[k] = static_cast<std::uint8_t>(d < 0 ? -d : d);
  }
  return out;
}

RasterImage to_binary(const RasterImage& image, int threshold) {
  if (threshold < 0 || threshold > 255) throw Error("threshold must lie in [0, 255]");
  RasterImage out = image;
  for (auto& v : out.pixels) v = v >= threshold ? 255 : 0;
  return out;
}

RasterImage reversed_phase(const RasterImage& image) {
  RasterImage out = image;
  for (auto& v : out.pixels) v = static_cast<std::uint8_t>(255 - v);
  return out;
}

}  // namespace coldloop::imaging
