#include <benchmark/benchmark.h>

#include "phasebeam/phantom.hpp"
#include "phasebeam/tomo.hpp"

using namespace phasebeam;

namespace {

constexpr double kPitch = 55e-6;

void BM_MakeSinogram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto threads = static_cast<unsigned>(state.range(1));
  const auto vol = phantom::two_cylinder(n, kPitch, 5e28);
  const auto angles = tomo::uniform_angles(n, tomo::AngularSpan::full_0_360);
  for (auto _ : state) benchmark::DoNotOptimize(tomo::make_sinogram(vol, angles, threads));
}
BENCHMARK(BM_MakeSinogram)->Args({64, 1})->Args({64, 4})->Unit(benchmark::kMillisecond);

void BM_FbpSlice(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto filter = static_cast<tomo::FbpFilter>(state.range(1));
  const auto vol = phantom::two_cylinder(n, kPitch, 5e28);
  const Volume3D slab(n, 1, n, kPitch,
                      [&] {
                        const auto s = vol.slice_xz(n / 2);
                        return std::vector<double>(s.values().begin(), s.values().end());
                      }());
  const auto sino = tomo::make_sinogram(slab, tomo::uniform_angles(2 * n, tomo::AngularSpan::full_0_360));
  for (auto _ : state) benchmark::DoNotOptimize(tomo::fbp(sino, filter, tomo::AngularSpan::full_0_360));
}
BENCHMARK(BM_FbpSlice)
    ->ArgsProduct({{128, 256}, {int(tomo::FbpFilter::ram_lak), int(tomo::FbpFilter::shepp_logan)}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
