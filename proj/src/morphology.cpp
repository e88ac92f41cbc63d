#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <mutex>
#include <string>

#include "hsi/error.hpp"
#include "hsi/features.hpp"

namespace hsi::features {
namespace {

using Element = std::vector<Offset>;

std::ptrdiff_t extent(const Element& e) {
  std::ptrdiff_t r = 0;
  for (const auto& o : e) r = std::max({r, std::abs(o.dy), std::abs(o.dx)});
  return r;
}

// Occupancy grid centred on the origin with half-size r.
struct Mask {
  std::ptrdiff_t r;
  std::vector<bool> bits;

  explicit Mask(std::ptrdiff_t radius) : r(radius), bits(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1))) {}
  bool get(std::ptrdiff_t dy, std::ptrdiff_t dx) const {
    if (std::abs(dy) > r || std::abs(dx) > r) return false;
    return bits[static_cast<std::size_t>((dy + r) * (2 * r + 1) + dx + r)];
  }
  void set(std::ptrdiff_t dy, std::ptrdiff_t dx) { bits[static_cast<std::size_t>((dy + r) * (2 * r + 1) + dx + r)] = true; }
};

Element disk(std::ptrdiff_t r, std::ptrdiff_t threshold) {
  Element e;
  for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
    for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
      if (dy * dy + dx * dx <= threshold) e.push_back({dy, dx});
    }
  }
  return e;
}

// True when `a` equals the union of all translates of `b` that fit inside `a`.
bool is_open(const Element& a, const Element& b) {
  const std::ptrdiff_t r = extent(a);
  Mask in(r), covered(r);
  for (const auto& o : a) in.set(o.dy, o.dx);
  for (const auto& t : a) {
    const bool fits = std::all_of(b.begin(), b.end(), [&](const Offset& o) { return in.get(t.dy + o.dy, t.dx + o.dx); });
    if (!fits) continue;
    for (const auto& o : b) covered.set(t.dy + o.dy, t.dx + o.dx);
  }
  return std::all_of(a.begin(), a.end(), [&](const Offset& o) { return covered.get(o.dy, o.dx); });
}

Element minkowski(const Element& a, const Element& b) {
  const std::ptrdiff_t r = extent(a) + extent(b);
  Mask m(r);
  for (const auto& p : a) {
    for (const auto& q : b) m.set(p.dy + q.dy, p.dx + q.dx);
  }
  Element out;
  for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
    for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
      if (m.get(dy, dx)) out.push_back({dy, dx});
    }
  }
  return out;
}

std::size_t symmetric_difference(const Element& a, const Element& b) {
  const std::ptrdiff_t r = std::max(extent(a), extent(b));
  Mask ma(r), mb(r);
  for (const auto& o : a) ma.set(o.dy, o.dx);
  for (const auto& o : b) mb.set(o.dy, o.dx);
  std::size_t d = 0;
  for (std::size_t i = 0; i < ma.bits.size(); ++i) d += ma.bits[i] != mb.bits[i];
  return d;
}

Element next_element(const Element& prev, std::ptrdiff_t r) {
  for (std::ptrdiff_t t = r * r; t < (r + 1) * (r + 1); ++t) {
    Element cand = disk(r, t);
    if (is_open(cand, prev)) return cand;
  }
  // No Euclidean disk in this radius band is open w.r.t. the previous element; grow the
  // previous element by a unit cross or square, which keeps the family ordered.
  const Element cross = disk(1, 1);
  const Element square = disk(1, 2);
  Element a = minkowski(prev, cross);
  Element b = minkowski(prev, square);
  const Element target = disk(r, r * r);
  return symmetric_difference(a, target) <= symmetric_difference(b, target) ? a : b;
}

Plane pad_replicate(const Plane& p, std::size_t pad) {
  Plane out(p.height + 2 * pad, p.width + 2 * pad);
  const auto ip = static_cast<std::ptrdiff_t>(pad);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      out(y, x) = p.clamped(static_cast<std::ptrdiff_t>(y) - ip, static_cast<std::ptrdiff_t>(x) - ip);
    }
  }
  return out;
}

Plane crop(const Plane& p, std::size_t pad, std::size_t h, std::size_t w) {
  Plane out(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) out(y, x) = p(y + pad, x + pad);
  }
  return out;
}

template <class Pick>
Plane rank_filter(const Plane& plane, std::span<const Offset> element, double init, Pick pick) {
  Plane out(plane.height, plane.width);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t yy = 0; yy < static_cast<std::ptrdiff_t>(plane.height); ++yy) {
    for (std::size_t x = 0; x < plane.width; ++x) {
      double v = init;
      for (const auto& o : element) v = pick(v, plane.clamped(yy + o.dy, static_cast<std::ptrdiff_t>(x) + o.dx));
      out(static_cast<std::size_t>(yy), x) = v;
    }
  }
  return out;
}

}  // namespace

const std::vector<Offset>& disk_element(std::size_t radius) {
  if (radius == 0) throw InvalidArgument("structuring element radius must be >= 1");
  static std::mutex lock;
  static std::deque<Element> cache{Element{}, disk(1, 1)};  // deque keeps references stable
  std::lock_guard guard(lock);
  while (cache.size() <= radius) {
    const auto r = static_cast<std::ptrdiff_t>(cache.size());
    cache.push_back(next_element(cache.back(), r));
  }
  return cache[radius];
}

Plane erode(const Plane& plane, std::span<const Offset> element) {
  return rank_filter(plane, element, std::numeric_limits<double>::infinity(),
                     [](double a, double b) { return std::min(a, b); });
}

Plane dilate(const Plane& plane, std::span<const Offset> element) {
  // Dilation uses the reflected element; the disks are symmetric so the offsets are reused.
  return rank_filter(plane, element, -std::numeric_limits<double>::infinity(),
                     [](double a, double b) { return std::max(a, b); });
}

// Padding by 2r makes the result the exact opening/closing of the edge-replicated
// extension, so the ordering across radii also holds at the border.
Plane morph_open(const Plane& plane, std::size_t radius) {
  const auto& se = disk_element(radius);
  const auto pad = static_cast<std::size_t>(2 * extent(se));
  return crop(dilate(erode(pad_replicate(plane, pad), se), se), pad, plane.height, plane.width);
}

Plane morph_close(const Plane& plane, std::size_t radius) {
  const auto& se = disk_element(radius);
  const auto pad = static_cast<std::size_t>(2 * extent(se));
  return crop(erode(dilate(pad_replicate(plane, pad), se), se), pad, plane.height, plane.width);
}

void EmpSpec::validate(std::size_t bands) const {
  if (pca_components == 0 || pca_components > bands) {
    throw InvalidArgument("EMP needs 1 <= m <= " + std::to_string(bands) + " principal components");
  }
  if (max_se_radius == 0) throw InvalidArgument("EMP needs a structuring element radius n >= 1");
  if (!stack_spectral) throw InvalidArgument("EMP always stacks the spectral response");
}

std::vector<Plane> morphological_profile(const Plane& plane, std::size_t max_radius) {
  std::vector<Plane> profile(2 * max_radius + 1);
  for (std::size_t r = 1; r <= max_radius; ++r) {
    profile[max_radius - r] = morph_open(plane, r);
    profile[max_radius + r] = morph_close(plane, r);
  }
  profile[max_radius] = plane;
  return profile;
}

FeatureSet emp_features(const HyperCube& cube, std::span<const Pixel> selection, const EmpSpec& spec) {
  spec.validate(cube.bands());
  if (selection.empty()) throw DataError("feature extraction needs a non-empty pixel selection");
  for (const Pixel& p : selection) {
    if (p.y >= cube.height() || p.x >= cube.width()) throw InvalidArgument("selected pixel outside the cube");
  }
  const auto model = pca_fit(cube);
  // Directions without variance score 0 at every pixel; pad them instead of failing.
  const std::size_t kept = std::min(spec.pca_components, model.rank);
  auto scores = kept ? pca_scores(cube, model, kept) : std::vector<Plane>{};
  scores.resize(spec.pca_components, Plane(cube.height(), cube.width()));
  const std::size_t per = 2 * spec.max_se_radius + 1;
  const std::size_t dim = spec.dim(cube.bands());

  std::vector<std::vector<Plane>> profiles(scores.size());
  for (std::size_t c = 0; c < scores.size(); ++c) profiles[c] = morphological_profile(scores[c], spec.max_se_radius);

  std::vector<double> out(selection.size() * dim);
  for (std::size_t i = 0; i < selection.size(); ++i) {
    const Pixel p = selection[i];
    double* row = out.data() + i * dim;
    for (std::size_t c = 0; c < profiles.size(); ++c) {
      for (std::size_t k = 0; k < per; ++k) row[c * per + k] = profiles[c][k](p.y, p.x);
    }
    const auto px = cube.pixel(p.y, p.x);
    std::copy(px.begin(), px.end(), row + profiles.size() * per);
  }
  return FeatureSet(cube.height(), cube.width(), dim, std::move(out), {selection.begin(), selection.end()});
}

}  // namespace hsi::features
