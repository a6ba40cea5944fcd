#include <algorithm>
#include <cmath>
#include <limits>

#include "coldloop/common.hpp"
#include "coldloop/imaging.hpp"

namespace coldloop::imaging {

namespace {

struct ZRange {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool empty() const { return lo > hi; }
};

ZRange particle_range(const md::Snapshot& s) {
  ZRange r;
  for (const auto& a : s.atoms)
    if (a.group == md::Group::Particle) {
      r.lo = std::min(r.lo, a.position[2]);
      r.hi = std::max(r.hi, a.position[2]);
    }
  return r;
}

}  // namespace

MeasurementResult measure_flattening(const std::vector<md::Snapshot>& frames, const RenderRule& rule,
                                     const PipelineParams& params, const AuditSink& audit) {
  rule.validate();
  auto pre = std::find_if(frames.begin(), frames.end(), [](const md::Snapshot& s) { return s.pre_impact; });
  if (pre == frames.end()) throw Error("measure_flattening: no pre-impact frame among the snapshots");
  const ZRange body = particle_range(*pre);
  if (body.empty()) throw Error("measure_flattening: pre-impact frame has no particle atoms");
  const double surface = surface_height(*pre);

  MeasurementResult out;
  // Cross-section: the particle alone, over its own height so nothing is clipped.
  const auto section = to_binary(render_band(*pre, rule, GroupFilter::particle_only(), body.lo, body.hi),
                                 params.threshold);
  out.S_i = static_cast<double>(largest_component(section).area);
  if (out.S_i <= 0.0) throw Error("measure_flattening: particle is invisible in the pre-impact render (S_i = 0)");

  const auto background = render_topview(*pre, rule, GroupFilter::substrate_only(), surface);
  for (const auto& f : frames) {
    if (f.pre_impact) continue;
    const ZRange r = particle_range(f);
    if (r.empty() || r.lo > surface + params.contact_gap) continue;

    const auto full = render_topview(f, rule, GroupFilter::all(), surface);
    const auto diff = image_difference(full, background);
    const auto bin = to_binary(diff, params.threshold);
    const auto clean = denoise(bin, params.min_component);
    const auto splat = largest_component(clean);
    if (audit) {
      audit(f.time, "render", full);
      audit(f.time, "difference", diff);
      audit(f.time, "binary", bin);
      audit(f.time, "denoised", clean);
      audit(f.time, "splat", largest_component_mask(clean));
    }
    out.frames.push_back({f.time, splat});
    if (static_cast<double>(splat.area) > out.S_m) {
      out.S_m = static_cast<double>(splat.area);
      out.frame_of_max = f.time;
    }
  }
  out.mu = out.S_m / out.S_i;
  return out;
}

}  // namespace coldloop::imaging
