#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "turbid/infogain.hpp"
#include "turbid/pattern_search.hpp"

namespace turbid {

/// Describes the candidate joint views around a camera pose: light rings at
/// the given radii and azimuths, each combined with every light orientation.
/// With camera offsets the camera is drawn from its own grid as well.
struct CandidateSpec {
  std::vector<double> radii{0.06, 0.12, 0.18, 0.24};  // [m]
  int azimuths = 8;
  double azimuth_offset = 0.0;  // [rad]
  /// Light orientations as (tilt_x, tilt_y) from nadir [rad].
  std::vector<Vec2> light_tilts = default_light_tilts();
  double light_height = 0.0;  // light z relative to the camera [m]
  /// Optional camera grid (full mode); empty keeps the camera fixed.
  std::vector<Vec3> camera_offsets;
  std::vector<Vec2> camera_tilts;

  /// Nadir plus +-10 and +-20 degrees about each lateral axis.
  static std::vector<Vec2> default_light_tilts();
  /// Light-only state count per camera pose.
  std::size_t light_states() const { return radii.size() * static_cast<std::size_t>(azimuths) * light_tilts.size(); }
};

struct CandidateSet {
  std::vector<JointView> views;
  /// Radius of each candidate's light ring [m].
  std::vector<double> radius;

  std::size_t size() const { return views.size(); }
  bool empty() const { return views.empty(); }
};

/// Cartesian product of camera states x light positions x light
/// orientations. Throws DataError on an empty spec or non-finite poses.
CandidateSet generate_candidates(const Pose& camera, const CandidateSpec& spec, int t = 0);

/// Light at a fixed offset (in the camera frame) aimed at the point where
/// the camera axis meets the surface.
JointView rig_view(const Surface& surface, const Pose& camera, const Vec3& baseline, int t = 0);

struct Selection {
  std::size_t index = 0;
  JointView view;
  GainReport report;
  std::vector<double> candidate_gains;
};

/// Exhaustive arg max of the view gain over the candidates; ties go to the
/// lowest index. Projections are shared between candidates whose camera
/// poses coincide.
Selection next_best_view(const World& world, const TextureMap& texture,
                         const CandidateSet& candidates);

enum class ScanMode { FixedBaseline, Nbuv };

struct ScanSpec {
  CandidateSpec candidates;
  Vec3 fixed_baseline{0.12, 0.0, 0.0};   // camera frame [m]
  Vec3 initial_baseline{0.02, 0.0, 0.0};  // used for v(0)
  bool initial_view = true;  // take v(0) at the first waypoint before step 1
};

struct ScanStep {
  int t = 0;
  JointView view;
  std::optional<std::size_t> candidate;  // index into that step's candidate set
  std::size_t candidate_count = 0;
  double gain = 0.0;         // nats added by this view
  double uncertainty = 0.0;  // total uncertainty after fusing
  double radius = 0.0;       // camera-light distance [m]
};

struct ScanOptions {
  ScanMode mode = ScanMode::Nbuv;
  std::uint64_t seed = 0;
  /// Resume: texture state and the first step index still to be taken.
  std::optional<TextureMap> resume;
  int first_step = 0;
  std::function<void(const ScanStep&, const Frame&, const TextureMap&)> on_step;
};

struct ScanResult {
  std::vector<ScanStep> steps;
  TextureMap texture;
  double total_gain() const;
};

/// Takes v(0) (optional) and one view per waypoint: each view is rendered
/// with noise, descattered and fused. Fixed-baseline scans use the rig with
/// simple averaging; NBUV scans pick each light by next_best_view and fuse
/// by maximum likelihood. Throws DataError without waypoints.
ScanResult greedy_scan(const World& world, const std::vector<Pose>& waypoints,
                       const ScanSpec& spec, const ScanOptions& options = {});

struct PathBounds {
  Vec3 lower{-1.0, -1.0, 0.0};
  Vec3 upper{1.0, 1.0, 2.0};
  double max_tilt = 0.7;     // [rad]
  double clearance = 0.05;   // minimum height above the surface [m]
};

/// A sequence of joint views and its free parameters. Each view contributes
/// camera (x, y, z, tilt_x, tilt_y) then light (x, y, z, tilt_x, tilt_y);
/// yaw is held at its initial value.
struct PathPlan {
  static constexpr int kViewDof = 10;

  std::vector<JointView> views;
  PathBounds bounds;
  std::array<bool, kViewDof> free{true, true, true, true, true, true, true, true, true, true};
  double position_step = 0.15;  // initial poll step [m]
  double angle_step = 0.35;     // initial poll step [rad]

  std::size_t dof() const;
  std::vector<double> parameters() const;
  PathPlan with_parameters(std::span<const double> x) const;
  std::vector<double> scales() const;
  std::vector<double> lower() const;
  std::vector<double> upper() const;
};

struct PathOptimization {
  PathPlan plan;
  double initial_gain = 0.0;
  double gain = 0.0;
  PatternSearchResult search;
};

/// Maximizes path_gain from the texture's quality state by pattern search.
/// Poses below the surface clearance are infeasible. Throws DataError for
/// an empty or infeasible initial plan.
PathOptimization optimize_path(const World& world, const TextureMap& texture,
                               const PathPlan& initial, int iterations);

/// True when every pose of the plan respects the bounds and clearance.
bool feasible(const Surface& surface, const PathPlan& plan);

/// Total uncertainty sum_k lambda_k / (Q_ML_k + sum Q_k) after the views.
double path_uncertainty(const World& world, const TextureMap& texture,
                        std::span<const JointView> path);

}  // namespace turbid
