#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "test_util.hpp"
#include "turbid/estimation.hpp"
#include "turbid/rng.hpp"

using namespace turbid;
using turbid::test::square_mesh;

namespace {

// A frame whose every pixel observes a large floor quad; component images
// are filled in by the caller.
Frame flat_frame(int w, int h, const Surface& surface) {
  const Pose cam = Pose::from_tilts({0, 0, 1}, 0, 0);
  const CameraModel model = CameraModel::from_fov(w, h, std::numbers::pi / 3.0);
  ProjectionMap map = project(surface, cam, model);
  return Frame{ImageD(w, h), ImageD(w, h), ImageD(w, h), ImageD(w, h), Mask(w, h, 1),
               std::move(map), JointView{cam, cam, 0}};
}

}  // namespace

TEST(Descatter, NoiselessInversionRecoversAlbedo) {
  const Surface surface(square_mesh(3.0, 0.0));
  Frame f = flat_frame(32, 24, surface);
  for (int p = 0; p < f.intensity.size(); ++p) {
    const double rho = 0.1 + 0.8 * ((p * 37) % 101) / 100.0;
    f.irradiance[p] = 500.0 + 3.0 * p;
    f.backscatter[p] = 40.0 + 0.5 * p;
    f.intensity[p] = rho * f.irradiance[p] + f.backscatter[p];
  }
  const DescatteredFrame d = descatter(f, EstimationConfig{}, 13.1);
  for (int p = 0; p < f.intensity.size(); ++p) {
    ASSERT_TRUE(d.valid[p]);
    const double rho = 0.1 + 0.8 * ((p * 37) % 101) / 100.0;
    EXPECT_NEAR(d.albedo[p], rho, 1e-9);
  }
}

TEST(Descatter, VarianceArithmetic) {
  const Surface surface(square_mesh(3.0, 0.0));
  Frame f = flat_frame(1, 1, surface);
  f.irradiance[0] = 100.0;
  f.backscatter[0] = 50.0;
  f.intensity[0] = 100.0;
  EstimationConfig cfg;
  cfg.operating_point.rho_bar = 0.5;
  const DescatteredFrame d = descatter(f, cfg, 13.1);
  EXPECT_NEAR(d.variance[0], 0.027161, 1e-12);
}

TEST(Descatter, DarkAndSaturatedPixelsInvalid) {
  const Surface surface(square_mesh(3.0, 0.0));
  Frame f = flat_frame(3, 1, surface);
  f.irradiance[0] = 5.0;  // below the read-noise threshold
  f.irradiance[1] = 100.0;
  f.irradiance[2] = 100.0;
  f.intensity[1] = 24000.0;
  f.intensity[2] = 60.0;
  EstimationConfig cfg;
  const DescatteredFrame d = descatter(f, cfg, 13.1, 24000.0);
  EXPECT_FALSE(d.valid[0]);
  EXPECT_FALSE(d.valid[1]);
  EXPECT_TRUE(d.valid[2]);
  EXPECT_DOUBLE_EQ(d.variance[0], 100.0);
  EXPECT_DOUBLE_EQ(d.variance[1], 100.0);
}

TEST(Descatter, MonteCarloSpreadMatchesModel) {
  const double e = 4000.0, b = 400.0, rho = 0.6, rn = 13.1;
  const int n = 100000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double intensity = sense(rho * e + b, rn, 1e9, stream_key(11, 0, static_cast<std::uint64_t>(i)));
    const double r = (intensity - b) / e;
    s1 += r;
    s2 += r * r;
  }
  const double mean = s1 / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  const double model = std::sqrt(rho * e + b + rn * rn) / e;
  EXPECT_NEAR(sd, model, 0.03 * model);
  EXPECT_NEAR(mean, rho, 3.0 * model / std::sqrt(n));
}

TEST(Conditioning, InactiveMaskSmoothsIrradiance) {
  ImageD e(20, 15), i(20, 15), raw(20, 15, 0.5);
  for (int p = 0; p < e.size(); ++p) {
    e[p] = 100.0 + (p % 7) * 10.0;
    i[p] = 3.0 * p;
  }
  ConditioningConfig c;
  const ImageD out = condition_irradiance(e, i, raw, c);
  const ImageD ref = gaussian_blur(gaussian_blur(e, c.sigma_irradiance), c.sigma_total);
  for (int p = 0; p < e.size(); ++p) EXPECT_NEAR(out[p], ref[p], 1e-9);
}

TEST(Conditioning, PreservesConstants) {
  ImageD ones(17, 13, 1.0), raw(17, 13, 0.0);
  for (int p = 0; p < raw.size(); ++p) raw[p] = (p % 3 == 0) ? 2.0 : 0.5;
  for (double s : {0.5, 2.0, 5.0}) {
    ConditioningConfig c{true, s, 2 * s, s / 2, 1};
    const ImageD out = condition_irradiance(ones, ones, raw, c);
    for (int p = 0; p < out.size(); ++p) EXPECT_NEAR(out[p], 1.0, 1e-12);
  }
}

TEST(Conditioning, UnderestimatedDiskRepaired) {
  const Surface surface(square_mesh(3.0, 0.0));
  Frame f = flat_frame(64, 64, surface);
  const double rho = 0.9;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const int p = y * 64 + x;
      const double e_true = 1000.0 + 4.0 * x;
      const bool disk = (x - 32) * (x - 32) + (y - 32) * (y - 32) < 100;
      f.irradiance[p] = disk ? 0.8 * e_true : e_true;
      f.backscatter[p] = 50.0;
      f.intensity[p] = rho * e_true + f.backscatter[p];
    }
  }
  auto over_one = [](const DescatteredFrame& d) {
    int n = 0;
    for (int p = 0; p < d.albedo.size(); ++p) n += d.valid[p] && d.albedo[p] > 1.0;
    return n;
  };
  EstimationConfig cfg;
  const int before = over_one(descatter(f, cfg, 13.1));
  cfg.conditioning.enabled = true;
  const int after = over_one(descatter(f, cfg, 13.1));
  ASSERT_GT(before, 200);
  EXPECT_LE(after, before / 10);
}

TEST(ResolutionWeight, Examples) {
  EXPECT_DOUBLE_EQ(resolution_weight(0.3, 1.0, 10.0), 0.3);
  EXPECT_NEAR(resolution_weight(1.0, 0.5, 10.0), std::exp(10.0), 1e-6);
  const std::vector<double> v(9, 0.08);
  EXPECT_NEAR(resolution_weight(v, 4.0, 10.0), 0.02, 1e-15);
}

TEST(SegmentQualities, InvisibleFaceGetsZero) {
  std::vector<Vec3> vv;
  std::vector<std::array<int, 3>> ff;
  turbid::test::add_square(vv, ff, 0, 0, 0.3, 0.0);
  turbid::test::add_square(vv, ff, 5, 5, 0.1, 0.0);
  const Surface surface(TriMesh(vv, ff, std::vector<double>(4, 0.5)));
  const ProjectionMap map =
      project(surface, Pose::from_tilts({0, 0, 1}, 0, 0), CameraModel::from_fov(40, 30, 1.0));
  const ImageD var(40, 30, 0.01);
  EstimationConfig cfg;
  cfg.r_min = 100.0;
  const auto q = segment_qualities(map, var, surface.mesh(), cfg);
  EXPECT_GT(q[0], 0.0);
  EXPECT_EQ(q[2], 0.0);
  EXPECT_EQ(q[3], 0.0);
  // gamma >= 1 and uniform variance: Q = gamma / sigma^2.
  const double gamma = map.pixel_count_of(0) / surface.mesh().area(0) / cfg.r_min;
  ASSERT_GE(gamma, 1.0);
  EXPECT_NEAR(q[0], gamma / 0.01, 1e-9 * q[0]);
}
