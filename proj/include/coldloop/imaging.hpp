#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coldloop/md/snapshot.hpp"

namespace coldloop::imaging {

/// 8-bit grayscale raster, row-major with row index = y pixel.
/// Pixel (x, y) covers [origin + x/scale, origin + (x+1)/scale) along each axis.
struct RasterImage {
  int width = 0;
  int height = 0;
  double pixel_scale = 4.0;  // pixels per A
  double origin_x = 0.0;     // A offset of pixel (0, 0)
  double origin_y = 0.0;
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(int w, int h, double scale, double ox = 0.0, double oy = 0.0);

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count_nonzero() const;
  bool same_geometry(const RasterImage& other) const;

  bool operator==(const RasterImage&) const = default;
};

/// Blank image covering the x-y extent of a box: ceil(L * scale) pixels per axis.
RasterImage blank_for_box(const Vec3& box, double pixel_scale);

struct RenderRule {
  double z_min = 0.0;             // A above the substrate top
  double z_max = 10.0;            // A above the substrate top
  double atom_draw_radius = 1.4;  // A
  double pixel_scale = 4.0;       // pixels per A
  void validate() const;
};

/// Which atom groups a render includes.
struct GroupFilter {
  bool substrate = true;
  bool particle = true;
  bool wall = true;
  bool accepts(md::Group g) const;
  static GroupFilter all() { return {}; }
  static GroupFilter particle_only() { return {false, true, false}; }
  static GroupFilter substrate_only() { return {true, false, true}; }
};

/// Height of the substrate surface: highest z among substrate and wall atoms (0 if none).
double surface_height(const md::Snapshot& snapshot);

/// Intensity of an in-band height: 1 at the band floor rising linearly to 255 at the
/// ceiling, so every drawn atom differs from the 0 background.
std::uint8_t band_intensity(double z, double lo, double hi);

/// Top-view orthographic render. In-band atoms (lo <= z <= hi, absolute) are drawn as
/// filled discs in ascending z so higher atoms cover lower ones. A pixel belongs to a
/// disc when its centre lies within the draw radius.
RasterImage render_band(const md::Snapshot& snapshot, const RenderRule& rule, const GroupFilter& groups, double lo,
                        double hi);

/// render_band with the rule's band taken relative to `surface_z`.
RasterImage render_topview(const md::Snapshot& snapshot, const RenderRule& rule, const GroupFilter& groups,
                           double surface_z);

/// render_topview with the surface taken from the snapshot itself.
RasterImage render_topview(const md::Snapshot& snapshot, const RenderRule& rule, const GroupFilter& groups = {});

/// Same rasterizer, intensity from per-atom Von Mises stress mapped linearly over
/// [vm_lo, vm_hi] onto 1..255 (clamped). Atoms are drawn in ascending z over the full height.
RasterImage render_stress(const md::Snapshot& snapshot, const RenderRule& rule, double vm_lo, double vm_hi);

/// Per-pixel |frame - background|. Geometry must match.
RasterImage image_difference(const RasterImage& frame, const RasterImage& background);

/// pixel >= threshold -> 255, else 0.
RasterImage to_binary(const RasterImage& image, int threshold = 10);

/// One 3x3 median pass (zero padding outside the image).
RasterImage median3x3(const RasterImage& image);

/// Drop 8-connected foreground components with fewer than `min_area` pixels.
RasterImage remove_small_components(const RasterImage& binary, std::size_t min_area);

/// Median filtering and small-component removal repeated to a fixed point.
RasterImage denoise(const RasterImage& binary, std::size_t min_area = 20);

struct Component {
  std::size_t area = 0;
  double centroid_x = 0.0;  // pixel coordinates (column)
  double centroid_y = 0.0;  // pixel coordinates (row)
};

/// 8-connected labeling, one label per pixel (0 = background), labels numbered in raster
/// order of their first pixel.
std::vector<std::uint32_t> label_components(const RasterImage& binary, std::size_t& count);

/// Largest 8-connected component; ties go to the component met first in raster order.
Component largest_component(const RasterImage& binary);

/// Binary mask of the largest component only.
RasterImage largest_component_mask(const RasterImage& binary);

/// Presentation-only inversion (255 - v). Never part of the measurement.
RasterImage reversed_phase(const RasterImage& image);

struct PipelineParams {
  int threshold = 10;
  std::size_t min_component = 20;
  double contact_gap = 3.5;  // A; a frame is post-contact once the particle is this close to the surface
};

struct FrameMeasurement {
  double time = 0.0;
  Component splat;
};

struct MeasurementResult {
  double S_i = 0.0;             // px^2, pre-impact particle cross-section
  double S_m = 0.0;             // px^2, largest splat area over post-contact frames
  double mu = 0.0;              // S_m / S_i
  double frame_of_max = -1.0;   // ps; -1 when no post-contact frame exists
  std::vector<FrameMeasurement> frames;  // one per post-contact frame
};

/// Receives the stage images of every measured frame:
/// "render", "difference", "binary", "denoised", "splat".
using AuditSink = std::function<void(double time, std::string_view stage, const RasterImage&)>;

/// Flattening measurement over a run's frames. S_i comes from the particle-only render
/// of the pre-impact frame over the particle's own height; each post-contact frame is
/// rendered in full, differenced against the substrate-only render of the pre-impact
/// frame, binarized, denoised and reduced to its largest component.
MeasurementResult measure_flattening(const std::vector<md::Snapshot>& frames, const RenderRule& rule,
                                     const PipelineParams& params = {}, const AuditSink& audit = {});

/// 8-bit grayscale PNG.
void write_png(const std::string& path, const RasterImage& image);
RasterImage read_png(const std::string& path);

}  // namespace coldloop::imaging
