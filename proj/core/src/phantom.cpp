#include "phasebeam/phantom.hpp"

#include <cmath>
#include <numbers>

namespace phasebeam::phantom {

namespace {

/// 1 inside, 0 outside, raised-cosine ramp of the given width centred on the
/// boundary. signed_distance > 0 is outside.
double taper(double signed_distance, double width) {
  if (width <= 0.0) return signed_distance <= 0.0 ? 1.0 : 0.0;
  const double h = 0.5 * width;
  if (signed_distance <= -h) return 1.0;
  if (signed_distance >= h) return 0.0;
  return 0.5 * (1.0 - std::sin(std::numbers::pi * signed_distance / width));
}

}  // namespace

Volume3D cylinders(std::size_t nx, std::size_t ny, std::size_t nz, double voxel_pitch,
                   const std::vector<Cylinder>& parts, std::size_t supersample) {
  const double cx = 0.5 * static_cast<double>(nx - 1);
  const double cz = 0.5 * static_cast<double>(nz - 1);
  const std::size_t ss = supersample == 0 ? 1 : supersample;
  std::vector<double> plane(nx * nz);
  std::vector<double> density(nx * ny * nz, 0.0);

  for (const auto& cyl : parts) {
    for (std::size_t iz = 0; iz < nz; ++iz) {
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const double x = static_cast<double>(ix) - cx - cyl.center_x;
        const double z = static_cast<double>(iz) - cz - cyl.center_z;
        double cover = 0.0;
        if (cyl.edge_width > 0.0) {
          cover = taper(std::hypot(x, z) - cyl.radius, cyl.edge_width);
        } else {
          for (std::size_t a = 0; a < ss; ++a) {
            for (std::size_t b = 0; b < ss; ++b) {
              const double sx = x + (static_cast<double>(a) + 0.5) / static_cast<double>(ss) - 0.5;
              const double sz = z + (static_cast<double>(b) + 0.5) / static_cast<double>(ss) - 0.5;
              if (sx * sx + sz * sz <= cyl.radius * cyl.radius) cover += 1.0;
            }
          }
          cover /= static_cast<double>(ss * ss);
        }
        plane[iz * nx + ix] = cover;
      }
    }
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double y = static_cast<double>(iy);
      const double mid = 0.5 * (cyl.y_min + cyl.y_max);
      const double half = 0.5 * (cyl.y_max - cyl.y_min);
      const double cap = taper(std::abs(y - mid) - half, cyl.edge_width);
      if (cap == 0.0) continue;
      for (std::size_t iz = 0; iz < nz; ++iz) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
          density[(iz * ny + iy) * nx + ix] += cyl.density * cap * plane[iz * nx + ix];
        }
      }
    }
  }
  return Volume3D(nx, ny, nz, voxel_pitch, std::move(density));
}

std::vector<Cylinder> two_cylinder_layout(std::size_t n, double density) {
  const double s = static_cast<double>(n) / 128.0;
  const double last = static_cast<double>(n - 1);
  return {
      {-22.0 * s, -4.0 * s, 26.0 * s, 0.16 * last, 0.84 * last, density, 4.0 * s},
      {30.0 * s, 14.0 * s, 16.0 * s, 0.24 * last, 0.76 * last, 0.5 * density, 4.0 * s},
  };
}

Volume3D two_cylinder(std::size_t n, double voxel_pitch, double density) {
  return cylinders(n, n, n, voxel_pitch, two_cylinder_layout(n, density));
}

namespace {

Roi box(double cx, double cy, double half) {
  const auto x0 = static_cast<std::size_t>(std::lround(cx - half));
  const auto y0 = static_cast<std::size_t>(std::lround(cy - half));
  const auto side = static_cast<std::size_t>(std::lround(2.0 * half));
  return Roi{x0, y0, x0 + side, y0 + side};
}

}  // namespace

RoiPair two_cylinder_slice_rois(std::size_t n) {
  if (n < 32) throw InvariantError("two-cylinder ROIs need n >= 32");
  const double s = static_cast<double>(n) / 128.0;
  const double c0 = 0.5 * static_cast<double>(n - 1);
  return {box(c0 - 22.0 * s, c0 - 4.0 * s, 11.0 * s), box(c0 + 28.0 * s, c0 - 30.0 * s, 10.0 * s)};
}

RoiPair two_cylinder_projection_rois(std::size_t n) {
  if (n < 32) throw InvariantError("two-cylinder ROIs need n >= 32");
  const double s = static_cast<double>(n) / 128.0;
  const double c0 = 0.5 * static_cast<double>(n - 1);
  const double x = c0 - 22.0 * s;
  auto at = [](double v) { return static_cast<std::size_t>(std::lround(v)); };
  const Roi signal{at(x - 8.0 * s), at(c0 - 36.0 * s), at(x + 8.0 * s), at(c0 + 36.0 * s)};
  const Roi background{at(2.0 * s), at(2.0 * s), n - 1 - at(2.0 * s), at(14.0 * s)};
  return {signal, background};
}

Volume3D point(std::size_t nx, std::size_t ny, std::size_t nz, double voxel_pitch,
               std::size_t ix, std::size_t iy, std::size_t iz, double density) {
  std::vector<double> d(nx * ny * nz, 0.0);
  d[(iz * ny + iy) * nx + ix] = density;
  return Volume3D(nx, ny, nz, voxel_pitch, std::move(d));
}

Volume3D gaussian_blobs(std::size_t nx, std::size_t ny, std::size_t nz, double voxel_pitch,
                        const std::vector<Blob>& blobs) {
  const double cx = 0.5 * static_cast<double>(nx - 1);
  const double cy = 0.5 * static_cast<double>(ny - 1);
  const double cz = 0.5 * static_cast<double>(nz - 1);
  std::vector<double> d(nx * ny * nz, 0.0);
  for (std::size_t iz = 0; iz < nz; ++iz) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      for (std::size_t ix = 0; ix < nx; ++ix) {
        double v = 0.0;
        for (const auto& b : blobs) {
          const double dx = static_cast<double>(ix) - cx - b.center_x;
          const double dy = static_cast<double>(iy) - cy - b.center_y;
          const double dz = static_cast<double>(iz) - cz - b.center_z;
          v += b.density * std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * b.width * b.width));
        }
        d[(iz * ny + iy) * nx + ix] = v;
      }
    }
  }
  return Volume3D(nx, ny, nz, voxel_pitch, std::move(d));
}

}  // namespace phasebeam::phantom
