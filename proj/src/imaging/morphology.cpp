#include <algorithm>
#include <array>
#include <numeric>

#include "coldloop/imaging.hpp"

namespace coldloop::imaging {

RasterImage median3x3(const RasterImage& image) {
  RasterImage out = image;
  std::array<std::uint8_t, 9> win{};
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx, yy = y + dy;
          win[n++] = (xx < 0 || yy < 0 || xx >= image.width || yy >= image.height) ? 0 : image.at(xx, yy);
        }
      std::nth_element(win.begin(), win.begin() + 4, win.end());
      out.at(x, y) = win[4];
    }
  return out;
}

namespace {

// Union-find over provisional labels.
struct Forest {
  std::vector<std::uint32_t> parent{0};
  std::uint32_t make() {
    parent.push_back(static_cast<std::uint32_t>(parent.size()));
    return parent.back();
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<std::uint32_t> label_components(const RasterImage& img, std::size_t& count) {
  const int w = img.width, h = img.height;
  std::vector<std::uint32_t> lab(img.pixels.size(), 0);
  Forest f;
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (img.at(x, y) == 0) continue;
      // Already-visited 8-neighbours: W, NW, N, NE.
      std::uint32_t l = 0;
      const int nx[4] = {x - 1, x - 1, x, x + 1}, ny[4] = {y, y - 1, y - 1, y - 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w) continue;
        const auto m = lab[idx(nx[k], ny[k])];
        if (m == 0) continue;
        if (l == 0) l = m;
        else f.unite(l, m);
      }
      lab[idx(x, y)] = l ? l : f.make();
    }
  // Resolve roots and renumber in raster order of first appearance.
  std::vector<std::uint32_t> remap(f.parent.size(), 0);
  std::uint32_t next = 0;
  for (auto& l : lab) {
    if (l == 0) continue;
    const auto r = f.find(l);
    if (remap[r] == 0) remap[r] = ++next;
    l = remap[r];
  }
  count = next;
  return lab;
}

RasterImage remove_small_components(const RasterImage& binary, std::size_t min_area) {
  std::size_t n = 0;
  const auto lab = label_components(binary, n);
  std::vector<std::size_t> area(n + 1, 0);
  for (auto l : lab) ++area[l];
  RasterImage out = binary;
  for (std::size_t k = 0; k < lab.size(); ++k)
    if (lab[k] != 0 && area[lab[k]] < min_area) out.pixels[k] = 0;
  return out;
}

RasterImage denoise(const RasterImage& binary, std::size_t min_area) {
  // Each pass only removes or restores pixels toward a median-stable, component-clean
  // image; iterate until nothing changes so the result is its own fixed point.
  RasterImage cur = binary;
  for (int guard = 0; guard < 10000; ++guard) {
    RasterImage next = cur;
    for (;;) {
      RasterImage m = median3x3(next);
      if (m == next) break;
      next = std::move(m);
    }
    next = remove_small_components(next, min_area);
    if (next == cur) return cur;
    cur = std::move(next);
  }
  return cur;
}

Component largest_component(const RasterImage& binary) {
  std::size_t n = 0;
  const auto lab = label_components(binary, n);
  std::vector<std::size_t> area(n + 1, 0);
  std::vector<double> sx(n + 1, 0.0), sy(n + 1, 0.0);
  for (int y = 0; y < binary.height; ++y)
    for (int x = 0; x < binary.width; ++x) {
      const auto l = lab[static_cast<std::size_t>(y) * binary.width + x];
      if (l == 0) continue;
      ++area[l];
      sx[l] += x;
      sy[l] += y;
    }
  std::size_t best = 0;
  for (std::size_t l = 1; l <= n; ++l)
    if (area[l] > area[best]) best = l;
  if (best == 0) return {};
  const double a = static_cast<double>(area[best]);
  return {area[best], sx[best] / a, sy[best] / a};
}

RasterImage largest_component_mask(const RasterImage& binary) {
  std::size_t n = 0;
  const auto lab = label_components(binary, n);
  std::vector<std::size_t> area(n + 1, 0);
  for (auto l : lab) ++area[l];
  area[0] = 0;
  std::size_t best = 0;
  for (std::size_t l = 1; l <= n; ++l)
    if (area[l] > area[best]) best = l;
  RasterImage out = binary;
  for (std::size_t k = 0; k < lab.size(); ++k) out.pixels[k] = (best != 0 && lab[k] == best) ? 255 : 0;
  return out;
}

}  // namespace coldloop::imaging
