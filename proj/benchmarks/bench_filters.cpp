#include <benchmark/benchmark.h>

#include <cmath>

#include "phasebeam/forward.hpp"
#include "phasebeam/physics.hpp"
#include "phasebeam/retrieve.hpp"

using namespace phasebeam;

namespace {

constexpr double kPitch = 55e-6;

Material material() { return Material(6.65e-15, 5.55e-28); }
BeamGeometry geometry() { return BeamGeometry(0.04, 10.0, 0.03, 5.919e-10); }

Raster2D bump(std::size_t n) {
  std::vector<double> v(n * n);
  const double c = 0.5 * double(n - 1);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double r2 = (double(x) - c) * (double(x) - c) + (double(y) - c) * (double(y) - c);
      v[y * n + x] = 1e26 * std::exp(-r2 / (0.02 * double(n * n)));
    }
  }
  return Raster2D(n, n, kPitch, kPitch, std::move(v), RasterKind::projected_density);
}

void BM_LorentzianFilter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pad = static_cast<Padding>(state.range(1));
  const auto img = bump(n).with_values(std::vector<double>(n * n, 1.0), RasterKind::generic);
  const double t = physics::tau(material(), geometry());
  for (auto _ : state) benchmark::DoNotOptimize(retrieve::lorentzian_filter(img, t, pad));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_LorentzianFilter)
    ->ArgsProduct({{128, 256, 512}, {int(Padding::none), int(Padding::mirror2x)}})
    ->Unit(benchmark::kMillisecond);

void BM_PhaseContrastForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto rho = bump(n);
  const forward::ForwardConfig cfg{material(), geometry(), 1.2, LaplacianMode::fourier_symbol,
                                   Padding::mirror2x};
  for (auto _ : state) benchmark::DoNotOptimize(forward::phase_contrast_forward(rho, cfg));
}
BENCHMARK(BM_PhaseContrastForward)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RetrieveDensity(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const forward::ForwardConfig fcfg{material(), geometry(), 1.2, LaplacianMode::fourier_symbol,
                                    Padding::mirror2x};
  const auto img = forward::phase_contrast_forward(bump(n), fcfg);
  const auto cfg = retrieve::make_config(material(), geometry(), 1.2);
  for (auto _ : state) benchmark::DoNotOptimize(retrieve::retrieve_density(img, cfg));
}
BENCHMARK(BM_RetrieveDensity)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_PoissonNoise(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Raster2D img = Raster2D::filled(n, n, kPitch, kPitch, 1.2, RasterKind::intensity);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(forward::add_poisson_noise(img, 1.0, ++seed));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_PoissonNoise)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace
