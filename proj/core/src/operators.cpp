#include "phasebeam/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"

namespace phasebeam {

std::string_view to_string(Padding p) {
  return p == Padding::mirror2x ? "mirror2x" : "none";
}

std::string_view to_string(LaplacianMode m) {
  return m == LaplacianMode::fourier_symbol ? "fourier_symbol" : "finite_difference_5pt";
}

Padding padding_from_string(std::string_view name) {
  if (name == "mirror2x") return Padding::mirror2x;
  if (name == "none") return Padding::none;
  throw InvariantError("unknown padding '" + std::string(name) + "'");
}

LaplacianMode laplacian_mode_from_string(std::string_view name) {
  if (name == "fourier_symbol" || name == "fourier") return LaplacianMode::fourier_symbol;
  if (name == "finite_difference_5pt" || name == "fd") return LaplacianMode::finite_difference_5pt;
  throw InvariantError("unknown Laplacian mode '" + std::string(name) + "'");
}

Raster2D apply_isotropic_symbol(const Raster2D& img, Padding padding,
                                const IsotropicSymbol& symbol, RasterKind out_kind) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::size_t factor = padding == Padding::mirror2x ? 2 : 1;
  const std::size_t nx = w * factor;
  const std::size_t ny = h * factor;

  detail::RealFft2D fft(nx, ny);
  auto real = fft.real();
  const auto src = img.values();
  for (std::size_t y = 0; y < ny; ++y) {
    const std::size_t sy = y < h ? y : 2 * h - 1 - y;
    for (std::size_t x = 0; x < nx; ++x) {
      const std::size_t sx = x < w ? x : 2 * w - 1 - x;
      real[y * nx + x] = src[sy * w + sx];
    }
  }

  fft.forward();

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double dkx = two_pi / (static_cast<double>(nx) * img.pitch_x());
  const double dky = two_pi / (static_cast<double>(ny) * img.pitch_y());
  auto spec = fft.spectrum();
  const std::size_t nkx = fft.nkx();
  for (std::size_t j = 0; j < ny; ++j) {
    const double ky = dky * static_cast<double>(detail::signed_frequency(j, ny));
    for (std::size_t i = 0; i < nkx; ++i) {
      const double kx = dkx * static_cast<double>(i);
      spec[j * nkx + i] *= symbol(kx * kx + ky * ky);
    }
  }

  fft.inverse();

  const double norm = 1.0 / static_cast<double>(nx * ny);
  std::vector<double> out(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) out[y * w + x] = real[y * nx + x] * norm;
  }
  return img.with_values(std::move(out), out_kind);
}

std::vector<double> finite_difference_laplacian(const Raster2D& img) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const double ax = 1.0 / (img.pitch_x() * img.pitch_x());
  const double ay = 1.0 / (img.pitch_y() * img.pitch_y());
  std::vector<double> lap(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t ym = y == 0 ? 0 : y - 1;
    const std::size_t yp = y + 1 == h ? y : y + 1;
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t xm = x == 0 ? 0 : x - 1;
      const std::size_t xp = x + 1 == w ? x : x + 1;
      const double c = img(x, y);
      lap[y * w + x] = ax * (img(xm, y) + img(xp, y) - 2.0 * c) +
                       ay * (img(x, ym) + img(x, yp) - 2.0 * c);
    }
  }
  return lap;
}

Raster2D apply_laplacian_operator(const Raster2D& img, double coefficient,
                                  LaplacianMode mode, Padding padding,
                                  RasterKind out_kind) {
  if (mode == LaplacianMode::fourier_symbol) {
    return apply_isotropic_symbol(
        img, padding, [coefficient](double k2) { return 1.0 - coefficient * k2; }, out_kind);
  }
  auto lap = finite_difference_laplacian(img);
  const auto v = img.values();
  for (std::size_t i = 0; i < lap.size(); ++i) lap[i] = v[i] + coefficient * lap[i];
  return img.with_values(std::move(lap), out_kind);
}

}  // namespace phasebeam
