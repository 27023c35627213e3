#include "projector.hpp"

#include <algorithm>
#include <cmath>

namespace phasebeam::detail {

std::vector<std::vector<double>> extract_xz_slices(const Volume3D& vol) {
  const std::size_t nx = vol.nx();
  const std::size_t ny = vol.ny();
  const std::size_t nz = vol.nz();
  const auto d = vol.density();
  std::vector<std::vector<double>> slices(ny, std::vector<double>(nx * nz));
  for (std::size_t iz = 0; iz < nz; ++iz) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double* row = d.data() + (iz * ny + iy) * nx;
      std::copy(row, row + nx, slices[iy].begin() + static_cast<std::ptrdiff_t>(iz * nx));
    }
  }
  return slices;
}

double sample_bilinear(std::span<const double> plane, std::size_t nx, std::size_t nz,
                       double x, double z) noexcept {
  const double fx = std::floor(x);
  const double fz = std::floor(z);
  const double ax = x - fx;
  const double az = z - fz;
  const long x0 = static_cast<long>(fx);
  const long z0 = static_cast<long>(fz);
  const long wx = static_cast<long>(nx);
  const long wz = static_cast<long>(nz);
  auto at = [&](long xi, long zi) -> double {
    if (xi < 0 || zi < 0 || xi >= wx || zi >= wz) return 0.0;
    return plane[static_cast<std::size_t>(zi * wx + xi)];
  };
  return (1.0 - az) * ((1.0 - ax) * at(x0, z0) + ax * at(x0 + 1, z0)) +
         az * ((1.0 - ax) * at(x0, z0 + 1) + ax * at(x0 + 1, z0 + 1));
}

void project_slice(const std::vector<std::vector<double>>& slices, std::size_t nx,
                   std::size_t nz, std::size_t iy, double phi, std::span<double> out) {
  const std::span<const double> plane = slices[iy];
  const double cx = 0.5 * static_cast<double>(nx - 1);
  const double cz = 0.5 * static_cast<double>(nz - 1);
  const double c = std::cos(phi);
  const double s = std::sin(phi);

  // Ray samples sit at t = -cz - margin + j so that at phi = 0 they coincide
  // with voxel centres.
  const double half_diag = 0.5 * std::hypot(static_cast<double>(nx), static_cast<double>(nz));
  const long margin = static_cast<long>(std::ceil(half_diag - cz)) + 1;
  const long nt = static_cast<long>(nz) + 2 * margin;
  const double t_start = -cz - static_cast<double>(margin);

  for (std::size_t i = 0; i < nx; ++i) {
    const double u = static_cast<double>(i) - cx;
    double sum = 0.0;
    for (long j = 0; j < nt; ++j) {
      const double t = t_start + static_cast<double>(j);
      const double x = u * c + t * s + cx;
      const double z = -u * s + t * c + cz;
      if (x <= -1.0 || z <= -1.0 || x >= static_cast<double>(nx) ||
          z >= static_cast<double>(nz)) {
        continue;
      }
      sum += sample_bilinear(plane, nx, nz, x, z);
    }
    out[i] = sum;
  }
}

}  // namespace phasebeam::detail
