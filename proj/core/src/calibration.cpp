#include "turbid/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "turbid/errors.hpp"
#include "turbid/parallel.hpp"
#include "turbid/pattern_search.hpp"

namespace turbid {

void CalibrationBounds::validate() const {
  if (!(beta_min > 0.0 && beta_max > beta_min)) throw DataError("beta bounds must satisfy 0 < min < max");
  if (!(g_min > -1.0 && g_max < 1.0 && g_min <= g_max)) throw DataError("g bounds must lie in (-1, 1)");
  if (beta_points < 2 || !(g_step > 0.0)) throw DataError("calibration grid is empty");
}

namespace {

// Everything in the forward model of a fixed view that does not depend on
// the medium, so each (beta, g) costs one pass over exponentials.
struct Geometry {
  struct Pixel {
    double measured;
    double direct;        // C0 cos / l^2 (0 if unlit)
    double direct_path;   // l + depth
    double ambient;       // C0 / (l_lz^2 l_sz^2), or 0
    double ambient_path;  // l_lz + l_sz + depth
    int first_sample;
    int sample_count;
  };
  struct Sample {
    double cos_theta;
    double weight;  // C0 dl / l_lp^2
    double path;    // l_lp + l
  };
  std::vector<Pixel> pixels;
  std::vector<Sample> samples;
  double albedo = 1.0;
  double full_well = 0.0;
  double scattering_fraction = 1.0;
  std::optional<double> ambient_gain;
  bool ambient_enabled = true;
};

Geometry build_geometry(const CalibrationSetup& s) {
  if (!s.surface) throw DataError("calibration needs a reference surface");
  s.optics.validate();
  const CameraModel& cam = s.optics.camera;
  if (s.image.width() != cam.width || s.image.height() != cam.height) {
    throw DataError("calibration image size does not match the camera");
  }
  const ProjectionMap proj = project(*s.surface, s.view.camera, cam);
  if (proj.background_count() > 0) throw DataError("reference sheet must fill the frame");

  Geometry geo;
  geo.albedo = s.reference_albedo;
  geo.full_well = cam.full_well;
  geo.scattering_fraction = s.optics.medium.scattering_fraction;
  geo.ambient_gain = s.optics.medium.ambient_gain;
  geo.ambient_enabled = s.optics.medium.ambient_enabled;

  const SpotLight light = s.optics.light_at(s.view.light);
  const double c0 = light.intensity;
  const Vec3& lpos = light.pose.position();
  const Vec3 axis = light.pose.forward();
  const double cos_half = std::cos(light.half_angle);
  const int n = s.optics.backscatter_samples;
  const Vec3& cpos = s.view.camera.position();
  const double rmin = s.optics.ambient_min_distance;
  const TriMesh& mesh = s.surface->mesh();

  for (int p = 0; p < proj.pixel_count(); ++p) {
    const double measured = s.image[p];
    if (!std::isfinite(measured)) throw DataError("calibration image is not finite");
    if (measured >= cam.full_well) continue;
    Geometry::Pixel px{measured, 0, 0, 0, 0, static_cast<int>(geo.samples.size()), 0};
    const double depth = proj.depth(p);
    const Vec3 ray = proj.ray(p);

    const double dl = depth / n;
    for (int i = 0; i < n; ++i) {
      const double l = (i + 0.5) * dl;
      const Vec3 v = cpos + l * ray - lpos;
      const double l_lp = v.norm();
      if (l_lp == 0.0 || axis.dot(v) < cos_half * l_lp) continue;
      geo.samples.push_back({-v.dot(ray) / l_lp, c0 * dl / (l_lp * l_lp), l_lp + l});
      ++px.sample_count;
    }

    const int f = proj.face(p);
    const Vec3& x = proj.point(p);
    const Vec3& normal = mesh.normal(static_cast<std::size_t>(f));
    const Vec3 to_light = lpos - x;
    const double dist = to_light.norm();
    if (dist > 0.0 && light_visibility(*s.surface, light.pose, light.half_angle, x, normal)) {
      px.direct = c0 * std::max(0.0, normal.dot(to_light) / dist) / (dist * dist);
      px.direct_path = dist + depth;
    }
    const double along = (x - lpos).dot(axis);
    if (along >= 0.0) {
      const double l_lz = std::max(along, rmin);
      const double l_sz = std::max((x - (lpos + along * axis)).norm(), rmin);
      px.ambient = c0 / (l_lz * l_lz * l_sz * l_sz);
      px.ambient_path = l_lz + l_sz + depth;
    }
    geo.pixels.push_back(px);
  }
  if (geo.pixels.empty()) throw NumericalError("unidentifiable: every pixel is saturated");
  return geo;
}

double residual_sq(const Geometry& geo, double beta, double g) {
  Medium m;
  m.beta = beta;
  m.g = g;
  m.scattering_fraction = geo.scattering_fraction;
  m.ambient_gain = geo.ambient_gain;
  m.ambient_enabled = geo.ambient_enabled;
  const double kappa = m.ambient();
  const double sigma_s = m.scattering();
  double sum = 0.0;
  for (const auto& px : geo.pixels) {
    double e = px.direct * std::exp(-beta * px.direct_path);
    if (px.ambient > 0.0) e += kappa * px.ambient * std::exp(-beta * px.ambient_path);
    double b = 0.0;
    if (sigma_s > 0.0) {
      for (int i = 0; i < px.sample_count; ++i) {
        const auto& smp = geo.samples[static_cast<std::size_t>(px.first_sample + i)];
        b += hg_phase(smp.cos_theta, g) * smp.weight * std::exp(-beta * smp.path);
      }
      b *= sigma_s;
    }
    const double pred = std::clamp(geo.albedo * e + b, 0.0, geo.full_well);
    const double r = pred - px.measured;
    sum += r * r;
  }
  return sum;
}

}  // namespace

double calibration_residual(const CalibrationSetup& setup, double beta, double g) {
  return std::sqrt(residual_sq(build_geometry(setup), beta, g));
}

CalibrationResult fit_medium(const CalibrationSetup& setup, const CalibrationBounds& bounds) {
  bounds.validate();
  const Geometry geo = build_geometry(setup);

  const int nb = bounds.beta_points;
  const double lb0 = std::log(bounds.beta_min);
  const double lb1 = std::log(bounds.beta_max);
  const double dlb = (lb1 - lb0) / (nb - 1);
  std::vector<double> gs;
  for (int i = 0;; ++i) {
    const double g = bounds.g_min + i * bounds.g_step;
    if (g > bounds.g_max + 1e-9) break;
    gs.push_back(std::clamp(g, bounds.g_min, bounds.g_max));
  }
  const int ng = static_cast<int>(gs.size());

  std::vector<double> grid(static_cast<std::size_t>(nb * ng));
  parallel_for(nb * ng, [&](int idx) {
    const int ib = idx / ng;
    const int ig = idx % ng;
    grid[static_cast<std::size_t>(idx)] =
        residual_sq(geo, std::exp(lb0 + ib * dlb), gs[static_cast<std::size_t>(ig)]);
  });
  const auto [lo_it, hi_it] = std::minmax_element(grid.begin(), grid.end());
  if (!(*hi_it - *lo_it > 1e-12 * std::max(1.0, *hi_it))) {
    throw NumericalError("unidentifiable: calibration residual is flat");
  }
  const auto best = static_cast<int>(lo_it - grid.begin());

  CalibrationResult out;
  out.evaluations = nb * ng;

  // Refine in scaled (ln beta, g) coordinates. Beta and g trade off along a
  // narrow curved valley, so each round polls along the eigenvectors of a
  // finite-difference Hessian at the current best point.
  const Vec2 scale(dlb, bounds.g_step);
  const Vec2 lower(lb0, bounds.g_min);
  const Vec2 upper(lb1, bounds.g_max);
  std::atomic<int> evaluations{0};
  auto f = [&](const Vec2& x) {
    for (int i = 0; i < 2; ++i) {
      if (!(x[i] >= lower[i] && x[i] <= upper[i])) return std::numeric_limits<double>::infinity();
    }
    evaluations.fetch_add(1, std::memory_order_relaxed);
    return residual_sq(geo, std::exp(x[0]), x[1]);
  };
  Vec2 x(lb0 + (best / ng) * dlb, gs[static_cast<std::size_t>(best % ng)]);
  double fx = *lo_it;
  double step = 0.5;
  constexpr int kRound = 3;
  for (int done = 0; done < bounds.refine_polls && step > 1e-9;) {
    Eigen::Matrix2d basis = Eigen::Matrix2d::Identity();
    {
      const double h = step;
      auto at = [&](double a, double b) { return f(x + scale.cwiseProduct(Vec2(a, b))); };
      Eigen::Matrix2d hess;
      hess(0, 0) = (at(h, 0) - 2 * fx + at(-h, 0)) / (h * h);
      hess(1, 1) = (at(0, h) - 2 * fx + at(0, -h)) / (h * h);
      hess(0, 1) = hess(1, 0) = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
      if (hess.allFinite()) basis = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(hess).eigenvectors();
    }
    const Vec2 origin = x;
    const Objective objective = [&](std::span<const double> y) {
      return -f(origin + scale.cwiseProduct(basis * Vec2(y[0], y[1])));
    };
    PatternSearchOptions opts;
    opts.max_iterations = std::min(kRound, bounds.refine_polls - done);
    opts.min_delta = 1e-9 / step;
    opts.expansion = 2.0;
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> ys{step, step};
    const std::vector<double> lo{-inf, -inf};
    const std::vector<double> hi{inf, inf};
    const auto search = pattern_search(objective, {0.0, 0.0}, ys, lo, hi, opts);
    x = origin + scale.cwiseProduct(basis * Vec2(search.x[0], search.x[1]));
    fx = -search.value;
    step *= search.delta;
    done += std::max(1, search.iterations);
  }
  out.evaluations += evaluations.load();
  out.beta = std::exp(x[0]);
  out.g = x[1];
  out.residual = std::sqrt(fx);

  double gmin = std::numeric_limits<double>::infinity();
  double gmax = 0.0;
  for (double g : gs) {
    const double r = std::sqrt(residual_sq(geo, out.beta, g));
    gmin = std::min(gmin, r);
    gmax = std::max(gmax, r);
  }
  out.evaluations += ng;
  out.weak_g = !(gmax - gmin >= 0.01 * gmax);
  if (out.weak_g) out.warnings.emplace_back("weakly identified g");
  return out;
}

}  // namespace turbid
