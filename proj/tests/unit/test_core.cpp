#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "phasebeam/core.hpp"
#include "test_support.hpp"

using namespace phasebeam;
using namespace phasebeam::testing;

TEST(BeamGeometry, DivergenceOfReferenceSetup) {
  EXPECT_DOUBLE_EQ(reference_geometry().divergence(), 0.004);
}

TEST(BeamGeometry, DivergenceIsOneWhenPinholeEqualsDistance) {
  EXPECT_EQ(BeamGeometry(3.0, 3.0, 0.1, 1e-10).divergence(), 1.0);
}

TEST(BeamGeometry, DivergenceSmallPinhole) {
  // Long-double oracle for 0.01 / 10.
  const long double oracle = 0.01L / 10.0L;
  EXPECT_NEAR(BeamGeometry(0.01, 10.0, 0.03, kLambda).divergence(), static_cast<double>(oracle),
              1e-18);
}

TEST(BeamGeometry, BlurArea) {
  const long double w = 0.004L * 0.03L;
  EXPECT_NEAR(reference_geometry().blur_area(), static_cast<double>(w * w), 1e-22);
  EXPECT_NEAR(reference_geometry().blur_area(), 1.44e-8, 1e-20);
}

TEST(BeamGeometry, ZeroDistanceGivesZeroBlur) {
  EXPECT_EQ(BeamGeometry(kD, kL, 0.0, kLambda).blur_area(), 0.0);
}

TEST(BeamGeometry, MagnificationTwoQuartersBlurArea) {
  const BeamGeometry m1(kD, kL, kDelta, kLambda, 1.0);
  const BeamGeometry m2(kD, kL, kDelta, kLambda, 2.0);
  EXPECT_DOUBLE_EQ(m2.blur_area(), m1.blur_area() / 4.0);
}

TEST(BeamGeometry, UnitMagnificationKeepsDistanceExactly) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(1e-4, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double delta = dist(rng);
    EXPECT_EQ(BeamGeometry(kD, kL, delta, kLambda).effective_distance(), delta);
  }
}

TEST(BeamGeometry, FreeFunctionsArePure) {
  const auto g = reference_geometry();
  EXPECT_EQ(divergence(g), divergence(g));
  EXPECT_EQ(blur_area(g), g.blur_area());
}

TEST(BeamGeometry, RejectsInvalidFields) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(BeamGeometry(0.0, kL, kDelta, kLambda), InvariantError);
  EXPECT_THROW(BeamGeometry(kD, -1.0, kDelta, kLambda), InvariantError);
  EXPECT_THROW(BeamGeometry(kD, kL, -0.01, kLambda), InvariantError);
  EXPECT_THROW(BeamGeometry(kD, kL, kDelta, 0.0), InvariantError);
  EXPECT_THROW(BeamGeometry(kD, kL, kDelta, kLambda, 0.5), InvariantError);
  EXPECT_THROW(BeamGeometry(nan, kL, kDelta, kLambda), InvariantError);
}

TEST(ConstructorFuzz, InvalidInputsAlwaysThrowTypedError) {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> good(1e-3, 1.0);
  std::uniform_real_distribution<double> bad(-1.0, 0.0);
  std::uniform_int_distribution<int> field(0, 4);
  for (int i = 0; i < 500; ++i) {
    double v[5] = {good(rng), good(rng), good(rng), good(rng), 1.0 + good(rng)};
    const int f = field(rng);
    v[f] = f == 2 ? bad(rng) - 1e-9 : (f == 4 ? good(rng) * 0.99 : bad(rng));
    EXPECT_THROW(BeamGeometry(v[0], v[1], v[2], v[3], v[4]), InvariantError) << "field " << f;
  }
  for (int i = 0; i < 200; ++i) {
    EXPECT_THROW(Material(good(rng), bad(rng)), InvariantError);
    EXPECT_THROW(Spectrum({{bad(rng), 1.0}}), InvariantError);
    EXPECT_THROW(Spectrum({{good(rng), bad(rng) - 1e-12}}), InvariantError);
  }
}

TEST(Material, BMayTakeAnySign) {
  EXPECT_NO_THROW(Material(-3.7e-15, 1e-28));
  EXPECT_NO_THROW(Material(0.0, 1e-28));
}

TEST(Material, DispersionMustIncrease) {
  EXPECT_THROW(Material(kB, kSigma, {{2e-10, kB, kSigma}, {1e-10, kB, kSigma}}), InvariantError);
  EXPECT_THROW(Material(kB, kSigma, {{2e-10, kB, kSigma}, {2e-10, kB, kSigma}}), InvariantError);
}

TEST(Material, DispersionInterpolatesLinearly) {
  const Material m(kB, kSigma, {{1e-10, 1e-15, 1e-28}, {3e-10, 3e-15, 5e-28}});
  const auto mid = m.at_wavelength(2e-10);
  EXPECT_NEAR(mid.b(), 2e-15, 1e-30);
  EXPECT_NEAR(mid.sigma(), 3e-28, 1e-42);
  EXPECT_EQ(m.at_wavelength(1e-10).b(), 1e-15);
  EXPECT_FALSE(mid.has_dispersion());
}

TEST(Material, DispersionExtrapolationFails) {
  const Material m(kB, kSigma, {{1e-10, 1e-15, 1e-28}, {3e-10, 3e-15, 5e-28}});
  EXPECT_THROW(m.at_wavelength(0.5e-10), PhysicsError);
  EXPECT_THROW(m.at_wavelength(4e-10), PhysicsError);
}

TEST(Material, WithoutTableReturnsNominal) {
  const auto m = reference_material().at_wavelength(1e-10);
  EXPECT_EQ(m.b(), kB);
  EXPECT_EQ(m.sigma(), kSigma);
}

TEST(Raster2D, ValidatesShapeAndValues) {
  EXPECT_THROW(Raster2D(0, 1, 1.0, 1.0, {}), InvariantError);
  EXPECT_THROW(Raster2D(2, 2, 1.0, 1.0, {1, 2, 3}), InvariantError);
  EXPECT_THROW(Raster2D(1, 1, 0.0, 1.0, {1}), InvariantError);
  EXPECT_THROW(Raster2D(1, 1, 1.0, 1.0, {std::numeric_limits<double>::infinity()}),
               InvariantError);
  EXPECT_THROW(Raster2D(1, 1, 1.0, 1.0, {-1.0}, RasterKind::intensity), InvariantError);
  EXPECT_NO_THROW(Raster2D(1, 1, 1.0, 1.0, {-1.0}, RasterKind::generic));
}

TEST(Raster2D, AccessIsRowMajor) {
  const Raster2D r(3, 2, 1.0, 1.0, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(r(2, 0), 2.0);
  EXPECT_EQ(r(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(r.mean(), 2.5);
}

TEST(Raster2D, KindNamesRoundTrip) {
  for (auto k : {RasterKind::intensity, RasterKind::projected_density, RasterKind::generic}) {
    EXPECT_EQ(raster_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(raster_kind_from_string("bogus"), InvariantError);
}

TEST(Volume3D, IndexingAndSlices) {
  std::vector<double> d(2 * 3 * 4);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = double(i);
  const Volume3D v(2, 3, 4, 1e-3, d);
  EXPECT_EQ(v.at(1, 2, 3), double((3 * 3 + 2) * 2 + 1));
  const auto s = v.slice_xz(1);
  EXPECT_EQ(s.width(), 2u);
  EXPECT_EQ(s.height(), 4u);
  EXPECT_EQ(s(1, 2), v.at(1, 1, 2));
}

TEST(Volume3D, DensityMustBeNonNegativeButReconstructionsMayNot) {
  EXPECT_THROW(Volume3D(1, 1, 1, 1.0, {-1.0}), InvariantError);
  EXPECT_NO_THROW(Volume3D(1, 1, 1, 1.0, {-1.0}, VolumeKind::reconstruction));
}

TEST(Spectrum, TotalsWeights) {
  const Spectrum s({{1e-10, 1.0}, {2e-10, 3.0}});
  EXPECT_EQ(s.total_weight(), 4.0);
  EXPECT_THROW(Spectrum({}), InvariantError);
  EXPECT_THROW(Spectrum({{1e-10, 0.0}}), InvariantError);
  EXPECT_THROW(Spectrum({{2e-10, 1.0}, {1e-10, 1.0}}), InvariantError);
}

TEST(Roi, Validation) {
  const auto r = Raster2D::filled(10, 10, 1.0, 1.0, 0.0);
  EXPECT_NO_THROW(validate_roi({0, 0, 1, 0}, r));
  EXPECT_THROW(validate_roi({0, 0, 0, 0}, r), InvariantError);
  EXPECT_THROW(validate_roi({5, 0, 10, 3}, r), InvariantError);
  EXPECT_THROW(validate_roi({5, 5, 4, 6}, r), InvariantError);
  EXPECT_TRUE((Roi{0, 0, 3, 3}).overlaps(Roi{3, 3, 5, 5}));
  EXPECT_FALSE((Roi{0, 0, 3, 3}).overlaps(Roi{4, 0, 5, 5}));
}
