#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turbid/planner.hpp"

namespace turbid {

struct Bump {
  Vec2 center;
  double height = 0.0;  // [m]
  double sigma = 0.0;   // [m]
};

/// Terrain of Gaussian bumps on a rectangular floor centered at the origin,
/// with a checker-plus-spots albedo. Dimensions are desk-scale stand-ins.
struct HillsSpec {
  Vec2 size{1.0, 0.4};  // [m]
  int nx = 50;
  int ny = 20;
  std::vector<Bump> bumps{{{-0.2, 0.0}, 0.08, 0.06}, {{0.2, 0.0}, 0.08, 0.06}};
  double checker = 0.1;  // [m]
  double dark = 0.3;
  double light = 0.7;
  double spot_radius = 0.025;  // [m]
  double spot_spacing = 0.125;  // [m]
  double spot_albedo = 0.95;

  /// Procedural ground-truth albedo at (x, y).
  double albedo_at(double x, double y) const;
};

/// Cube resting on a floor grid. The floor has a hole under the cube, so
/// the mesh is 12 cube triangles plus the floor cells.
struct CubeSpec {
  double edge = 0.28;  // [m]
  Vec2 floor{0.98, 1.68};  // [m]
  double cell = 0.07;      // floor grid spacing [m]
  double floor_dark = 0.3;
  double floor_light = 0.7;
  double floor_checker = 0.14;  // [m]
  double cube_albedo = 0.6;
};

TriMesh make_hills(const HillsSpec& spec);
TriMesh make_cube_on_plane(const CubeSpec& spec);
/// Flat rectangle at height z, split into nx x ny cell pairs.
TriMesh make_plane(const Vec2& size, int nx, int ny, double z = 0.0, double albedo = 1.0);

struct MeshSource {
  std::string generator;  // "hills", "cube", "plane" or empty for a file
  HillsSpec hills;
  CubeSpec cube;
  Vec2 plane_size{1.0, 1.0};
  int plane_cells = 10;
  std::filesystem::path obj;
  /// Albedo for file meshes: a per-face CSV, a top-down PFM map over the
  /// mesh bounds, or a uniform value.
  std::filesystem::path albedo_csv;
  std::filesystem::path albedo_map;
  double albedo = 0.5;
};

struct PathConfig {
  std::vector<JointView> views;
  PathBounds bounds;
  double position_step = 0.15;
  double angle_step = 0.35;
  int iterations = 20;
};

/// Everything a scene file specifies. Fields absent from the file are
/// listed in `defaulted`.
struct SceneConfig {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  std::string name;
  MeshSource mesh;
  Medium medium;
  double light_intensity = 15000.0;
  double light_half_angle = 0.61;
  CameraModel camera;
  EstimationConfig estimation;
  int backscatter_samples = 64;
  double ambient_min_distance = 0.05;
  std::uint64_t seed = 1;
  ScanSpec planner;
  std::vector<Pose> waypoints;
  std::optional<PathConfig> path;
  std::vector<std::string> defaulted;

  Optics optics() const;
  void validate() const;
};

/// A resolved scene: configuration plus the built world.
struct Scene {
  SceneConfig config;
  World world;
};

/// Parses a scene document. Relative file paths resolve against `base_dir`.
/// Throws DataError naming the offending field.
SceneConfig parse_scene(std::string_view text, const std::filesystem::path& base_dir = {});
SceneConfig load_scene_config(const std::filesystem::path& path);
/// Canonical JSON for a configuration; parse_scene(serialize(c)) == c.
std::string serialize(const SceneConfig& config);

Scene build_scene(const SceneConfig& config);
Scene load_scene(const std::filesystem::path& path);
TriMesh build_mesh(const MeshSource& source);

/// Canonical configurations of the two simulated experiments.
SceneConfig hills_scene();
SceneConfig cube_scene();

/// Pose and joint-view JSON used by scene files and view files.
std::string serialize_view(const JointView& view);
JointView parse_view(std::string_view text);

bool operator==(const SceneConfig& a, const SceneConfig& b);

}  // namespace turbid
