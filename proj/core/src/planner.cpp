#include "turbid/planner.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "turbid/errors.hpp"
#include "turbid/parallel.hpp"

namespace turbid {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

bool same_pose(const Pose& a, const Pose& b) {
  return a.position() == b.position() && a.orientation().coeffs() == b.orientation().coeffs();
}

}  // namespace

std::vector<Vec2> CandidateSpec::default_light_tilts() {
  return {{0.0, 0.0},         {10 * kDeg, 0.0}, {-10 * kDeg, 0.0}, {20 * kDeg, 0.0},
          {-20 * kDeg, 0.0},  {0.0, 10 * kDeg}, {0.0, -10 * kDeg}, {0.0, 20 * kDeg},
          {0.0, -20 * kDeg}};
}

CandidateSet generate_candidates(const Pose& camera, const CandidateSpec& spec, int t) {
  if (spec.radii.empty() || spec.azimuths <= 0 || spec.light_tilts.empty()) {
    throw DataError("candidate spec is empty");
  }
  if (!camera.is_finite()) throw DataError("candidate camera pose is not finite");

  std::vector<Pose> cameras;
  if (spec.camera_offsets.empty()) {
    cameras.push_back(camera);
  } else {
    const Vec3 base_tilt = camera.tilts();
    const std::vector<Vec2> tilts =
        spec.camera_tilts.empty() ? std::vector<Vec2>{{base_tilt.x(), base_tilt.y()}}
                                  : spec.camera_tilts;
    for (const Vec3& offset : spec.camera_offsets) {
      for (const Vec2& tilt : tilts) {
        cameras.push_back(Pose::from_tilts(camera.position() + offset, tilt.x(), tilt.y(),
                                           base_tilt.z()));
      }
    }
  }

  CandidateSet set;
  set.views.reserve(cameras.size() * spec.light_states());
  for (const Pose& cam : cameras) {
    for (double r : spec.radii) {
      if (!std::isfinite(r) || r < 0.0) throw DataError("candidate radius must be nonnegative");
      for (int a = 0; a < spec.azimuths; ++a) {
        const double phi = spec.azimuth_offset + 2.0 * std::numbers::pi * a / spec.azimuths;
        const Vec3 pos = cam.position() + Vec3(r * std::cos(phi), r * std::sin(phi), spec.light_height);
        for (const Vec2& tilt : spec.light_tilts) {
          Pose light = Pose::from_tilts(pos, tilt.x(), tilt.y());
          if (!light.is_finite()) throw DataError("candidate light pose is not finite");
          set.views.push_back({cam, light, t});
          set.radius.push_back(r);
        }
      }
    }
  }
  return set;
}

JointView rig_view(const Surface& surface, const Pose& camera, const Vec3& baseline, int t) {
  const Vec3 light_pos = camera.to_world(baseline);
  const auto hit = surface.bvh().intersect({camera.position(), camera.forward()}, 0.0,
                                           std::numeric_limits<double>::infinity());
  const Vec3 target = hit ? Vec3(camera.position() + hit.distance * camera.forward())
                          : Vec3(camera.position() + camera.forward());
  Pose light = camera;
  const Vec3 dir = target - light_pos;
  if (dir.norm() > 1e-12) {
    const Vec3 up = std::abs(dir.normalized().dot(camera.down())) < 0.99 ? Vec3(-camera.down()) : Vec3(camera.right());
    light = Pose::look_at(light_pos, target, up);
  } else {
    light = Pose(light_pos, camera.orientation());
  }
  return {camera, light, t};
}

Selection next_best_view(const World& world, const TextureMap& texture,
                         const CandidateSet& candidates) {
  if (candidates.empty()) throw DataError("no candidate views");
  const std::size_t n = candidates.size();

  // Share projections between candidates with the same camera pose.
  std::vector<std::size_t> proj_index(n);
  std::vector<std::size_t> proj_owner;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = 0;
    while (j < proj_owner.size() && !same_pose(candidates.views[proj_owner[j]].camera,
                                               candidates.views[i].camera)) {
      ++j;
    }
    if (j == proj_owner.size()) proj_owner.push_back(i);
    proj_index[i] = j;
  }
  std::vector<ProjectionMap> projections(proj_owner.size());
  parallel_for(static_cast<int>(proj_owner.size()), [&](int j) {
    projections[static_cast<std::size_t>(j)] =
        project(*world.surface, candidates.views[proj_owner[static_cast<std::size_t>(j)]].camera,
                world.optics.camera);
  });

  Selection sel;
  sel.candidate_gains.assign(n, 0.0);
  parallel_for(static_cast<int>(n), [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    const auto q = prospective_qualities(world, projections[proj_index[k]], candidates.views[k]);
    sel.candidate_gains[k] = view_gain(*world.layout, texture.face_qualities(), q).total;
  });
  for (std::size_t i = 1; i < n; ++i) {
    if (sel.candidate_gains[i] > sel.candidate_gains[sel.index]) sel.index = i;
  }
  sel.view = candidates.views[sel.index];
  sel.report = view_gain(*world.layout, texture.face_qualities(),
                         prospective_qualities(world, projections[proj_index[sel.index]], sel.view));
  return sel;
}

double ScanResult::total_gain() const {
  double sum = 0.0;
  for (const auto& s : steps) sum += s.gain;
  return sum;
}

ScanResult greedy_scan(const World& world, const std::vector<Pose>& waypoints,
                       const ScanSpec& spec, const ScanOptions& options) {
  if (waypoints.empty()) throw DataError("scan needs at least one waypoint");
  const FusionRule rule = options.mode == ScanMode::Nbuv ? FusionRule::MaximumLikelihood
                                                         : FusionRule::SimpleAverage;
  ScanResult result{{}, options.resume ? *options.resume : world.blank_texture(rule)};
  if (result.texture.rule() != rule) throw DataError("resumed texture uses a different fusion rule");

  const int offset = spec.initial_view ? 1 : 0;
  const int last = static_cast<int>(waypoints.size()) + offset;
  for (int t = options.first_step; t < last; ++t) {
    ScanStep step;
    step.t = t;
    const Pose& camera = waypoints[static_cast<std::size_t>(std::max(0, t - offset))];
    const ProjectionMap projection = project(*world.surface, camera, world.optics.camera);
    if (spec.initial_view && t == 0) {
      step.view = rig_view(*world.surface, camera, spec.initial_baseline, t);
      step.candidate_count = 1;
    } else if (options.mode == ScanMode::FixedBaseline) {
      step.view = rig_view(*world.surface, camera, spec.fixed_baseline, t);
      step.candidate_count = 1;
    } else {
      const CandidateSet set = generate_candidates(camera, spec.candidates, t);
      const Selection sel = next_best_view(world, result.texture, set);
      step.view = sel.view;
      step.candidate = sel.index;
      step.candidate_count = set.size();
    }
    step.radius = (step.view.light.position() - step.view.camera.position()).norm();
    step.gain = view_gain(*world.layout, result.texture.face_qualities(),
                          prospective_qualities(world, projection, step.view))
                    .total;

    const Frame frame = render(*world.surface, world.optics, projection, step.view, options.seed);
    const DescatteredFrame d = descatter(frame, world.estimation, world.optics.camera.read_noise,
                                         world.optics.camera.full_well);
    fuse(result.texture, d, projection, world.mesh(), world.optics.camera, step.view.camera,
         world.estimation);
    step.uncertainty = result.texture.total_uncertainty();
    if (options.on_step) options.on_step(step, frame, result.texture);
    result.steps.push_back(step);
  }
  return result;
}

// ---------------------------------------------------------------------------

std::size_t PathPlan::dof() const {
  std::size_t per = 0;
  for (bool f : free) per += f ? 1 : 0;
  return per * views.size();
}

namespace {

std::array<double, PathPlan::kViewDof> view_params(const JointView& v) {
  const Vec3 ct = v.camera.tilts();
  const Vec3 lt = v.light.tilts();
  const Vec3& c = v.camera.position();
  const Vec3& l = v.light.position();
  return {c.x(), c.y(), c.z(), ct.x(), ct.y(), l.x(), l.y(), l.z(), lt.x(), lt.y()};
}

JointView view_from(const std::array<double, PathPlan::kViewDof>& p, const JointView& base) {
  JointView v = base;
  v.camera = Pose::from_tilts({p[0], p[1], p[2]}, p[3], p[4], base.camera.tilts().z());
  v.light = Pose::from_tilts({p[5], p[6], p[7]}, p[8], p[9], base.light.tilts().z());
  return v;
}

}  // namespace

std::vector<double> PathPlan::parameters() const {
  std::vector<double> x;
  x.reserve(dof());
  for (const auto& v : views) {
    const auto p = view_params(v);
    for (int i = 0; i < kViewDof; ++i) {
      if (free[static_cast<std::size_t>(i)]) x.push_back(p[static_cast<std::size_t>(i)]);
    }
  }
  return x;
}

PathPlan PathPlan::with_parameters(std::span<const double> x) const {
  if (x.size() != dof()) throw DataError("path parameter count mismatch");
  PathPlan out = *this;
  std::size_t n = 0;
  for (auto& v : out.views) {
    auto p = view_params(v);
    for (int i = 0; i < kViewDof; ++i) {
      if (free[static_cast<std::size_t>(i)]) p[static_cast<std::size_t>(i)] = x[n++];
    }
    v = view_from(p, v);
  }
  return out;
}

namespace {

template <typename F>
std::vector<double> per_dof(const PathPlan& plan, F&& value) {
  std::vector<double> out;
  out.reserve(plan.dof());
  for (std::size_t v = 0; v < plan.views.size(); ++v) {
    for (int i = 0; i < PathPlan::kViewDof; ++i) {
      if (plan.free[static_cast<std::size_t>(i)]) out.push_back(value(i % 5));
    }
  }
  return out;
}

}  // namespace

std::vector<double> PathPlan::scales() const {
  return per_dof(*this, [&](int i) { return i < 3 ? position_step : angle_step; });
}

std::vector<double> PathPlan::lower() const {
  return per_dof(*this, [&](int i) { return i < 3 ? bounds.lower[i] : -bounds.max_tilt; });
}

std::vector<double> PathPlan::upper() const {
  return per_dof(*this, [&](int i) { return i < 3 ? bounds.upper[i] : bounds.max_tilt; });
}

namespace {

bool pose_clear(const Surface& surface, const Vec3& p, const PathBounds& b) {
  for (int i = 0; i < 3; ++i) {
    if (!(p[i] >= b.lower[i] - 1e-12 && p[i] <= b.upper[i] + 1e-12)) return false;
  }
  const auto h = surface.height_at(p.x(), p.y());
  return !h || p.z() >= *h + b.clearance;
}

bool view_clear(const Surface& surface, const JointView& v, const PathBounds& b) {
  return pose_clear(surface, v.camera.position(), b) && pose_clear(surface, v.light.position(), b);
}

}  // namespace

bool feasible(const Surface& surface, const PathPlan& plan) {
  for (const auto& v : plan.views) {
    if (!v.camera.is_finite() || !v.light.is_finite()) return false;
    const Vec3 ct = v.camera.tilts();
    const Vec3 lt = v.light.tilts();
    for (double a : {ct.x(), ct.y(), lt.x(), lt.y()}) {
      if (std::abs(a) > plan.bounds.max_tilt + 1e-12) return false;
    }
    if (!view_clear(surface, v, plan.bounds)) return false;
  }
  return true;
}

PathOptimization optimize_path(const World& world, const TextureMap& texture,
                               const PathPlan& initial, int iterations) {
  if (initial.views.empty()) throw DataError("path needs at least one view");
  if (!feasible(*world.surface, initial)) throw DataError("initial path is infeasible");

  const std::size_t nviews = initial.views.size();
  const std::size_t per_view = initial.dof() / nviews;
  const auto& q0 = texture.face_qualities();

  // A compass poll moves one view at a time, so view qualities are memoized
  // on that view's parameters.
  std::map<std::vector<double>, std::shared_ptr<const std::vector<double>>> cache;
  std::mutex mutex;
  auto view_quality = [&](const PathPlan& plan, std::size_t v,
                          std::span<const double> key) -> std::shared_ptr<const std::vector<double>> {
    std::vector<double> k(key.begin(), key.end());
    {
      std::lock_guard lock(mutex);
      if (auto it = cache.find(k); it != cache.end()) return it->second;
    }
    auto q = std::make_shared<const std::vector<double>>(prospective_qualities(world, plan.views[v]));
    std::lock_guard lock(mutex);
    return cache.emplace(std::move(k), std::move(q)).first->second;
  };

  const Objective objective = [&](std::span<const double> x) {
    const PathPlan plan = initial.with_parameters(x);
    for (const auto& v : plan.views) {
      if (!view_clear(*world.surface, v, plan.bounds)) {
        return -std::numeric_limits<double>::infinity();
      }
    }
    std::vector<std::vector<double>> qs;
    qs.reserve(nviews);
    for (std::size_t v = 0; v < nviews; ++v) {
      qs.push_back(*view_quality(plan, v, x.subspan(v * per_view, per_view)));
    }
    return path_gain(*world.layout, q0, qs);
  };

  PatternSearchOptions opts;
  opts.max_iterations = iterations;
  const auto scale = initial.scales();
  const auto lo = initial.lower();
  const auto hi = initial.upper();
  PathOptimization out;
  out.search = pattern_search(objective, initial.parameters(), scale, lo, hi, opts);
  out.plan = initial.with_parameters(out.search.x);
  out.initial_gain = out.search.initial_value;
  out.gain = out.search.value;
  if (out.search.x == initial.parameters()) out.plan = initial;
  return out;
}

double path_uncertainty(const World& world, const TextureMap& texture,
                        std::span<const JointView> path) {
  std::vector<double> q = texture.face_qualities();
  for (const auto& v : path) {
    const auto add = prospective_qualities(world, v);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] += add[k];
  }
  double total = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) total += world.layout->patch_count(k) / q[k];
  return total;
}

}  // namespace turbid
