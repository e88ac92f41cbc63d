#include "hsi/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsi/error.hpp"

namespace hsi::reference {
namespace {

template <class PlaneOp>
HyperCube per_band(const HyperCube& cube, PlaneOp op) {
  std::vector<std::vector<double>> planes;
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    planes.push_back(op(Plane(cube.height(), cube.width(), cube.plane(b))).data);
  }
  return cube_from_planes(cube.height(), cube.width(), planes);
}

template <class Inner, class Outer>
Plane two_stage(const Plane& p, std::size_t radius, double inner_init, Inner inner, double outer_init, Outer outer) {
  const auto& se = features::disk_element(radius);
  Plane out(p.height, p.width);
  for (std::size_t y = 0; y < p.height; ++y) {
    for (std::size_t x = 0; x < p.width; ++x) {
      double o = outer_init;
      for (const auto& b : se) {
        double v = inner_init;
        for (const auto& c : se) {
          v = inner(v, p.clamped(static_cast<std::ptrdiff_t>(y) + b.dy - c.dy, static_cast<std::ptrdiff_t>(x) + b.dx - c.dx));
        }
        o = outer(o, v);
      }
      out(y, x) = o;
    }
  }
  return out;
}

}  // namespace

Plane mean_filter(const Plane& plane, const filters::WindowSpec& window) {
  window.validate();
  const auto ry = static_cast<std::ptrdiff_t>(window.height / 2);
  const auto rx = static_cast<std::ptrdiff_t>(window.width / 2);
  Plane out(plane.height, plane.width);
  for (std::size_t y = 0; y < plane.height; ++y) {
    for (std::size_t x = 0; x < plane.width; ++x) {
      double s = 0.0;
      for (std::ptrdiff_t dy = -ry; dy <= ry; ++dy) {
        for (std::ptrdiff_t dx = -rx; dx <= rx; ++dx) {
          s += plane.clamped(static_cast<std::ptrdiff_t>(y) + dy, static_cast<std::ptrdiff_t>(x) + dx);
        }
      }
      out(y, x) = s / static_cast<double>(window.width * window.height);
    }
  }
  return out;
}

Plane gaussian_filter(const Plane& plane, const filters::GaussianSpec& spec) {
  const auto taps = filters::gaussian_kernel(spec);
  const auto r = static_cast<std::ptrdiff_t>(taps.size() / 2);
  Plane out(plane.height, plane.width);
  for (std::size_t y = 0; y < plane.height; ++y) {
    for (std::size_t x = 0; x < plane.width; ++x) {
      double s = 0.0;
      for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
          s += taps[static_cast<std::size_t>(dy + r)] * taps[static_cast<std::size_t>(dx + r)] *
               plane.clamped(static_cast<std::ptrdiff_t>(y) + dy, static_cast<std::ptrdiff_t>(x) + dx);
        }
      }
      out(y, x) = s;
    }
  }
  return out;
}

HyperCube mean_filter(const HyperCube& cube, const filters::WindowSpec& window) {
  return per_band(cube, [&](const Plane& p) { return reference::mean_filter(p, window); });
}

HyperCube gaussian_filter(const HyperCube& cube, const filters::GaussianSpec& spec) {
  return per_band(cube, [&](const Plane& p) { return reference::gaussian_filter(p, spec); });
}

Plane morph_open(const Plane& plane, std::size_t radius) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return two_stage(
      plane, radius, inf, [](double a, double b) { return std::min(a, b); }, -inf,
      [](double a, double b) { return std::max(a, b); });
}

Plane morph_close(const Plane& plane, std::size_t radius) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return two_stage(
      plane, radius, -inf, [](double a, double b) { return std::max(a, b); }, inf,
      [](double a, double b) { return std::min(a, b); });
}

double overlap_rate(const SplitMask& split, std::size_t w) {
  if (w == 0 || w % 2 == 0) throw InvalidArgument("window must be odd");
  const auto r = static_cast<std::ptrdiff_t>(w / 2);
  const auto h = static_cast<std::ptrdiff_t>(split.height());
  const auto wd = static_cast<std::ptrdiff_t>(split.width());
  std::size_t tests = 0, hit = 0;
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < wd; ++x) {
      if (split.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x)) != SplitState::Test) continue;
      ++tests;
      bool found = false;
      for (std::ptrdiff_t yy = std::max<std::ptrdiff_t>(0, y - r); !found && yy <= std::min(h - 1, y + r); ++yy) {
        for (std::ptrdiff_t xx = std::max<std::ptrdiff_t>(0, x - r); !found && xx <= std::min(wd - 1, x + r); ++xx) {
          found = split.at(static_cast<std::size_t>(yy), static_cast<std::size_t>(xx)) == SplitState::Train;
        }
      }
      hit += found;
    }
  }
  if (tests == 0) throw DataError("split has no test pixels");
  return static_cast<double>(hit) / static_cast<double>(tests);
}

std::optional<double> pearson(std::span<const float> a, std::span<const float> b) {
  const auto n = static_cast<double>(a.size());
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
  }
  const double ma = sa / n, mb = sb / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(va > 0.0) || !(vb > 0.0)) return std::nullopt;
  return cov / std::sqrt(va * vb);
}

std::optional<double> mean_correlation(const HyperCube& cube, std::ptrdiff_t dy, std::ptrdiff_t dx) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t y = 0; y < cube.height(); ++y) {
    for (std::size_t x = 0; x < cube.width(); ++x) {
      const auto ny = static_cast<std::ptrdiff_t>(y) + dy;
      const auto nx = static_cast<std::ptrdiff_t>(x) + dx;
      if (ny < 0 || nx < 0 || ny >= static_cast<std::ptrdiff_t>(cube.height()) ||
          nx >= static_cast<std::ptrdiff_t>(cube.width())) {
        continue;
      }
      const auto r = pearson(cube.pixel(y, x), cube.pixel(static_cast<std::size_t>(ny), static_cast<std::size_t>(nx)));
      if (!r) continue;
      sum += *r;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace hsi::reference
