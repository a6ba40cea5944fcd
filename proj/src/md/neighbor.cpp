#include "coldloop/md/neighbor.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace coldloop::md {

NeighborList::NeighborList(double cutoff, double skin) : cutoff_(cutoff), skin_(skin) {
  if (!(cutoff > 0.0) || skin < 0.0) throw Error("neighbor list needs cutoff > 0 and skin >= 0");
}

namespace {

struct Axis {
  int cells = 1;
  double origin = 0.0;
  double width = 1.0;
  bool periodic = false;

  int index(double x) const {
    int c = static_cast<int>(std::floor((x - origin) / width));
    if (periodic) {
      c %= cells;
      if (c < 0) c += cells;
    } else {
      c = std::clamp(c, 0, cells - 1);
    }
    return c;
  }

  // Distinct neighbouring cell indices of c along this axis.
  int neighbours(int c, std::array<int, 3>& out) const {
    int n = 0;
    for (int d = -1; d <= 1; ++d) {
      int k = c + d;
      if (periodic) {
        k = (k % cells + cells) % cells;
      } else if (k < 0 || k >= cells) {
        continue;
      }
      if (std::find(out.begin(), out.begin() + n, k) == out.begin() + n) out[n++] = k;
    }
    return n;
  }
};

}  // namespace

void NeighborList::build(const AtomSystem& s) {
  s.box.validate();
  const std::size_t n = s.size();
  const double range = cutoff_ + skin_;
  const double range2 = range * range;

  std::array<Axis, 3> axes;
  for (int k = 0; k < 3; ++k) {
    Axis& a = axes[k];
    a.periodic = s.box.boundary[k] == Boundary::Periodic;
    double lo = 0.0, hi = s.box.lengths[k];
    if (a.periodic) {
      if (s.box.lengths[k] < 2.0 * range)
        throw Error(fmt::format("periodic box length {} on axis {} is shorter than twice the interaction range {}",
                                s.box.lengths[k], k, range));
    } else if (n > 0) {
      lo = hi = s.positions[0][k];
      for (const auto& p : s.positions) {
        lo = std::min(lo, p[k]);
        hi = std::max(hi, p[k]);
      }
    }
    a.origin = lo;
    a.cells = std::max(1, static_cast<int>(std::floor((hi - lo) / range)));
    // Open-axis grids are capped so that stray atoms far from the bulk
    // cannot blow up the cell count.
    if (!a.periodic) a.cells = std::min(a.cells, 1024);
    a.width = std::max((hi - lo) / a.cells, range);
    if (a.periodic) a.width = (hi - lo) / a.cells;
  }

  const std::size_t ncell = static_cast<std::size_t>(axes[0].cells) * axes[1].cells * axes[2].cells;
  std::vector<std::uint32_t> cell_of(n);
  std::vector<std::uint32_t> head(ncell + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = s.positions[i];
    const std::size_t c = (static_cast<std::size_t>(axes[2].index(p[2])) * axes[1].cells + axes[1].index(p[1])) *
                              axes[0].cells +
                          axes[0].index(p[0]);
    cell_of[i] = static_cast<std::uint32_t>(c);
    ++head[c + 1];
  }
  for (std::size_t c = 0; c < ncell; ++c) head[c + 1] += head[c];
  std::vector<std::uint32_t> members(n);
  {
    std::vector<std::uint32_t> fill(head.begin(), head.end() - 1);
    for (std::size_t i = 0; i < n; ++i) members[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }

  offsets_.assign(n + 1, 0);
  list_.clear();
  std::vector<std::uint32_t> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = s.positions[i];
    std::array<int, 3> cx{}, cy{}, cz{};
    const int nx = axes[0].neighbours(axes[0].index(p[0]), cx);
    const int ny = axes[1].neighbours(axes[1].index(p[1]), cy);
    const int nz = axes[2].neighbours(axes[2].index(p[2]), cz);
    scratch.clear();
    for (int a = 0; a < nz; ++a)
      for (int b = 0; b < ny; ++b)
        for (int c = 0; c < nx; ++c) {
          const std::size_t cell = (static_cast<std::size_t>(cz[a]) * axes[1].cells + cy[b]) * axes[0].cells + cx[c];
          for (std::uint32_t m = head[cell]; m < head[cell + 1]; ++m) {
            const std::uint32_t j = members[m];
            if (j <= i) continue;
            const Vec3 d = s.box.minimum_image(s.positions[j] - p);
            if (dot(d, d) < range2) scratch.push_back(j);
          }
        }
    std::sort(scratch.begin(), scratch.end());
    list_.insert(list_.end(), scratch.begin(), scratch.end());
    offsets_[i + 1] = static_cast<std::uint32_t>(list_.size());
  }

  anchor_ = s.positions;
  anchor_box_ = s.box.lengths;
  ++builds_;
}

bool NeighborList::needs_rebuild(const AtomSystem& s) const {
  if (anchor_.size() != s.size() || anchor_box_ != s.box.lengths) return true;
  const double limit2 = 0.25 * skin_ * skin_;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 d = s.box.minimum_image(s.positions[i] - anchor_[i]);
    if (dot(d, d) > limit2) return true;
  }
  return false;
}

}  // namespace coldloop::md
