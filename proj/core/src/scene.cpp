#include "turbid/scene.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "turbid/errors.hpp"
#include "turbid/image_io.hpp"
#include "turbid/obj.hpp"

namespace turbid {

using nlohmann::json;

// ---------------------------------------------------------------- generators

double HillsSpec::albedo_at(double x, double y) const {
  if (spot_radius > 0.0 && spot_spacing > 0.0) {
    const double sx = x - spot_spacing * (std::floor(x / spot_spacing) + 0.5);
    const double sy = y - spot_spacing * (std::floor(y / spot_spacing) + 0.5);
    if (sx * sx + sy * sy < spot_radius * spot_radius) return spot_albedo;
  }
  const auto cx = static_cast<long>(std::floor(x / checker));
  const auto cy = static_cast<long>(std::floor(y / checker));
  return (cx + cy) % 2 == 0 ? dark : light;
}

namespace {

// Grid of (nx+1) x (ny+1) vertices over [x0, x0+sx] x [y0, y0+sy], two
// upward-facing triangles per kept cell.
template <typename Height, typename Keep>
void add_grid(std::vector<Vec3>& vertices, std::vector<std::array<int, 3>>& faces, double x0,
              double y0, double sx, double sy, int nx, int ny, Height&& height, Keep&& keep) {
  const int base = static_cast<int>(vertices.size());
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = x0 + sx * i / nx;
      const double y = y0 + sy * j / ny;
      vertices.emplace_back(x, y, height(x, y));
    }
  }
  auto id = [&](int i, int j) { return base + j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!keep(i, j)) continue;
      faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
}

}  // namespace

TriMesh make_hills(const HillsSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1 || !(spec.size.x() > 0.0) || !(spec.size.y() > 0.0)) {
    throw DataError("hills grid must be nonempty");
  }
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  auto height = [&](double x, double y) {
    double z = 0.0;
    for (const Bump& b : spec.bumps) {
      const double r2 = (Vec2(x, y) - b.center).squaredNorm();
      z += b.height * std::exp(-r2 / (2.0 * b.sigma * b.sigma));
    }
    return z;
  };
  add_grid(vertices, faces, -0.5 * spec.size.x(), -0.5 * spec.size.y(), spec.size.x(),
           spec.size.y(), spec.nx, spec.ny, height, [](int, int) { return true; });
  std::vector<double> albedo;
  albedo.reserve(faces.size());
  for (const auto& f : faces) {
    const Vec3 c = (vertices[f[0]] + vertices[f[1]] + vertices[f[2]]) / 3.0;
    albedo.push_back(spec.albedo_at(c.x(), c.y()));
  }
  return TriMesh(std::move(vertices), std::move(faces), std::move(albedo));
}

TriMesh make_cube_on_plane(const CubeSpec& spec) {
  const double a = 0.5 * spec.edge;
  const int nx = static_cast<int>(std::lround(spec.floor.x() / spec.cell));
  const int ny = static_cast<int>(std::lround(spec.floor.y() / spec.cell));
  auto aligned = [&](double len, int n) {
    const double k = (0.5 * len - a) / spec.cell;
    return std::abs(n * spec.cell - len) < 1e-9 && std::abs(k - std::round(k)) < 1e-9 && k >= 0.0;
  };
  if (!(spec.edge > 0.0) || !(spec.cell > 0.0) || !aligned(spec.floor.x(), nx) ||
      !aligned(spec.floor.y(), ny)) {
    throw DataError("cube footprint must align with the floor grid");
  }
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  const double x0 = -0.5 * spec.floor.x();
  const double y0 = -0.5 * spec.floor.y();
  add_grid(vertices, faces, x0, y0, spec.floor.x(), spec.floor.y(), nx, ny,
           [](double, double) { return 0.0; },
           [&](int i, int j) {
             const double cx = x0 + (i + 0.5) * spec.cell;
             const double cy = y0 + (j + 0.5) * spec.cell;
             return !(std::abs(cx) < a && std::abs(cy) < a);
           });
  const std::size_t floor_faces = faces.size();

  const int c = static_cast<int>(vertices.size());
  for (int k = 0; k < 8; ++k) {
    vertices.emplace_back(k & 1 ? a : -a, k & 2 ? a : -a, k & 4 ? spec.edge : 0.0);
  }
  const Vec3 center(0.0, 0.0, a);
  // Quads as corner bit patterns; orientation fixed up to face outward.
  const int quads[6][4] = {{4, 5, 7, 6}, {0, 2, 3, 1}, {1, 3, 7, 5},
                           {0, 4, 6, 2}, {2, 6, 7, 3}, {0, 1, 5, 4}};
  for (const auto& q : quads) {
    for (const auto& tri : {std::array<int, 3>{q[0], q[1], q[2]}, std::array<int, 3>{q[0], q[2], q[3]}}) {
      std::array<int, 3> f{c + tri[0], c + tri[1], c + tri[2]};
      const Vec3& p0 = vertices[f[0]];
      const Vec3 n = (vertices[f[1]] - p0).cross(vertices[f[2]] - p0);
      if (n.dot(p0 - center) < 0.0) std::swap(f[1], f[2]);
      faces.push_back(f);
    }
  }

  std::vector<double> albedo;
  albedo.reserve(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) {
    if (k >= floor_faces) {
      albedo.push_back(spec.cube_albedo);
      continue;
    }
    const auto& f = faces[k];
    const Vec3 m = (vertices[f[0]] + vertices[f[1]] + vertices[f[2]]) / 3.0;
    const auto ix = static_cast<long>(std::floor(m.x() / spec.floor_checker));
    const auto iy = static_cast<long>(std::floor(m.y() / spec.floor_checker));
    albedo.push_back((ix + iy) % 2 == 0 ? spec.floor_dark : spec.floor_light);
  }
  return TriMesh(std::move(vertices), std::move(faces), std::move(albedo));
}

TriMesh make_plane(const Vec2& size, int nx, int ny, double z, double albedo) {
  if (nx < 1 || ny < 1) throw DataError("plane grid must be nonempty");
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  add_grid(vertices, faces, -0.5 * size.x(), -0.5 * size.y(), size.x(), size.y(), nx, ny,
           [z](double, double) { return z; }, [](int, int) { return true; });
  const std::size_t n = faces.size();
  return TriMesh(std::move(vertices), std::move(faces), std::vector<double>(n, albedo));
}

TriMesh build_mesh(const MeshSource& source) {
  if (source.generator == "hills") return make_hills(source.hills);
  if (source.generator == "cube") return make_cube_on_plane(source.cube);
  if (source.generator == "plane") {
    return make_plane(source.plane_size, source.plane_cells, source.plane_cells, 0.0, source.albedo);
  }
  if (!source.generator.empty()) throw DataError("unknown mesh generator '" + source.generator + "'");
  if (source.obj.empty()) throw DataError("mesh: missing field 'file'");
  TriMesh mesh = read_obj(source.obj);
  if (!source.albedo_csv.empty()) {
    mesh.set_albedo(read_albedo_csv(source.albedo_csv, mesh.face_count()));
  } else if (!source.albedo_map.empty()) {
    const ImageD map = read_pfm(source.albedo_map);
    const auto box = mesh.bounds();
    const Vec3 ext = box.sizes();
    std::vector<double> albedo(mesh.face_count());
    for (std::size_t k = 0; k < mesh.face_count(); ++k) {
      const Vec3 c = mesh.centroid(k);
      const double u = ext.x() > 0 ? (c.x() - box.min().x()) / ext.x() : 0.5;
      const double v = ext.y() > 0 ? (box.max().y() - c.y()) / ext.y() : 0.5;
      const int i = std::clamp(static_cast<int>(u * map.width()), 0, map.width() - 1);
      const int j = std::clamp(static_cast<int>(v * map.height()), 0, map.height() - 1);
      albedo[k] = std::clamp(map.at(i, j), 0.0, 1.0);
    }
    mesh.set_albedo(std::move(albedo));
  } else {
    mesh.set_albedo(std::vector<double>(mesh.face_count(), source.albedo));
  }
  return mesh;
}

// ---------------------------------------------------------------- config

Optics SceneConfig::optics() const {
  Optics o;
  o.camera = camera;
  o.medium = medium;
  o.light_intensity = light_intensity;
  o.light_half_angle = light_half_angle;
  o.backscatter_samples = backscatter_samples;
  o.ambient_min_distance = ambient_min_distance;
  return o;
}

void SceneConfig::validate() const {
  if (schema_version != kSchemaVersion) {
    throw DataError("unsupported schema_version " + std::to_string(schema_version));
  }
  optics().validate();
  estimation.validate();
  for (const auto& p : waypoints) {
    if (!p.is_finite()) throw DataError("waypoints: pose is not finite");
  }
}

namespace {

// Field access that names the full path in errors and records defaults.
class Reader {
 public:
  Reader(const json* node, std::string path, std::vector<std::string>* defaulted)
      : node_(node), path_(std::move(path)), defaulted_(defaulted) {}

  bool has(const char* key) const { return node_ && node_->contains(key) && !(*node_)[key].is_null(); }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  T get(const char* key, T fallback) const {
    if (!has(key)) {
      defaulted_->push_back(field(key));
      return fallback;
    }
    return convert<T>(key);
  }

  template <typename T>
  T require(const char* key) const {
    if (!has(key)) throw DataError("missing field '" + field(key) + "'");
    return convert<T>(key);
  }

  template <typename T>
  std::optional<T> optional(const char* key) const {
    if (!has(key)) return std::nullopt;
    return convert<T>(key);
  }

  Reader child(const char* key) const {
    if (!has(key)) {
      defaulted_->push_back(field(key));
      return Reader(nullptr, field(key), defaulted_);
    }
    if (!(*node_)[key].is_object()) throw DataError("field '" + field(key) + "' must be an object");
    return Reader(&(*node_)[key], field(key), defaulted_);
  }

  const json& raw(const char* key) const { return (*node_)[key]; }

 private:
  template <typename T>
  T convert(const char* key) const {
    try {
      return (*node_)[key].template get<T>();
    } catch (const json::exception&) {
      throw DataError("field '" + field(key) + "' has the wrong type");
    }
  }

  const json* node_;
  std::string path_;
  std::vector<std::string>* defaulted_;
};

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

Vec3 vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw DataError("field '" + field + "' must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Vec2 vec2(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) throw DataError("field '" + field + "' must be [a, b]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json pose_json(const Pose& p) {
  const auto& q = p.orientation();
  return {{"position", vec(p.position())}, {"orientation", json::array({q.w(), q.x(), q.y(), q.z()})}};
}

Pose parse_pose(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("position")) {
    throw DataError("missing field '" + field + ".position'");
  }
  try {
    const Vec3 pos = vec3(j["position"], field + ".position");
    if (j.contains("orientation")) {
      const auto& q = j["orientation"];
      if (!q.is_array() || q.size() != 4) throw DataError("field '" + field + ".orientation' must be [w, x, y, z]");
      return Pose(pos, Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                                          q[3].get<double>()));
    }
    if (j.contains("look_at")) return Pose::look_at(pos, vec3(j["look_at"], field + ".look_at"));
    if (j.contains("tilts_deg")) {
      const Vec3 t = vec3(j["tilts_deg"], field + ".tilts_deg") * (std::numbers::pi / 180.0);
      return Pose::from_tilts(pos, t.x(), t.y(), t.z());
    }
    return Pose::from_tilts(pos, 0.0, 0.0);
  } catch (const json::exception&) {
    throw DataError("field '" + field + "' is malformed");
  }
}

json view_json(const JointView& v) {
  return {{"t", v.t}, {"camera", pose_json(v.camera)}, {"light", pose_json(v.light)}};
}

JointView parse_view_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("camera") || !j.contains("light")) {
    throw DataError("field '" + field + "' needs camera and light poses");
  }
  JointView v{parse_pose(j["camera"], field + ".camera"), parse_pose(j["light"], field + ".light"),
              j.value("t", 0)};
  return v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  if (file.empty()) return {};
  const std::filesystem::path p(file);
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

SceneConfig parse_scene(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("scene is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw DataError("scene must be a JSON object");

  SceneConfig c;
  const Reader r(&root, "", &c.defaulted);
  c.schema_version = r.require<int>("schema_version");
  if (c.schema_version != SceneConfig::kSchemaVersion) {
    throw DataError("unsupported schema_version " + std::to_string(c.schema_version));
  }
  c.name = r.get<std::string>("name", "");
  c.seed = r.get<std::uint64_t>("seed", c.seed);

  {
    if (!r.has("mesh")) throw DataError("missing field 'mesh'");
    const Reader m = r.child("mesh");
    MeshSource& s = c.mesh;
    s.generator = m.get<std::string>("generator", "");
    if (s.generator == "hills") {
      const Reader h = m.child("hills");
      HillsSpec& hs = s.hills;
      if (h.has("size")) hs.size = vec2(h.raw("size"), h.field("size"));
      else c.defaulted.push_back(h.field("size"));
      hs.nx = h.get("nx", hs.nx);
      hs.ny = h.get("ny", hs.ny);
      if (h.has("bumps")) {
        hs.bumps.clear();
        for (const auto& b : h.raw("bumps")) {
          hs.bumps.push_back({vec2(b.at("center"), h.field("bumps") + ".center"),
                              b.at("height").get<double>(), b.at("sigma").get<double>()});
        }
      } else {
        c.defaulted.push_back(h.field("bumps"));
      }
      hs.checker = h.get("checker", hs.checker);
      hs.dark = h.get("dark", hs.dark);
      hs.light = h.get("light", hs.light);
      hs.spot_radius = h.get("spot_radius", hs.spot_radius);
      hs.spot_spacing = h.get("spot_spacing", hs.spot_spacing);
      hs.spot_albedo = h.get("spot_albedo", hs.spot_albedo);
    } else if (s.generator == "cube") {
      const Reader k = m.child("cube");
      CubeSpec& cs = s.cube;
      cs.edge = k.get("edge", cs.edge);
      if (k.has("floor")) cs.floor = vec2(k.raw("floor"), k.field("floor"));
      else c.defaulted.push_back(k.field("floor"));
      cs.cell = k.get("cell", cs.cell);
      cs.floor_dark = k.get("floor_dark", cs.floor_dark);
      cs.floor_light = k.get("floor_light", cs.floor_light);
      cs.floor_checker = k.get("floor_checker", cs.floor_checker);
      cs.cube_albedo = k.get("cube_albedo", cs.cube_albedo);
    } else if (s.generator == "plane") {
      if (m.has("size")) s.plane_size = vec2(m.raw("size"), m.field("size"));
      else c.defaulted.push_back(m.field("size"));
      s.plane_cells = m.get("cells", s.plane_cells);
      s.albedo = m.get("albedo", s.albedo);
    } else if (s.generator.empty()) {
      s.obj = resolve(base_dir, m.require<std::string>("file"));
      s.albedo_csv = resolve(base_dir, m.get<std::string>("albedo_csv", ""));
      s.albedo_map = resolve(base_dir, m.get<std::string>("albedo_map", ""));
      s.albedo = m.get("albedo", s.albedo);
      for (const auto& p : {s.obj, s.albedo_csv, s.albedo_map}) {
        if (!p.empty() && !std::filesystem::exists(p)) throw DataError("file not found: " + p.string());
      }
    } else {
      throw DataError("unknown mesh generator '" + s.generator + "'");
    }
  }

  {
    if (!r.has("medium")) throw DataError("missing field 'medium'");
    const Reader m = r.child("medium");
    c.medium.beta = m.require<double>("beta");
    c.medium.g = m.require<double>("g");
    c.medium.scattering_fraction = m.get("scattering_fraction", c.medium.scattering_fraction);
    c.medium.ambient_gain = m.optional<double>("ambient_gain");
    c.medium.ambient_enabled = m.get("ambient", c.medium.ambient_enabled);
    c.medium.validate();
  }
  {
    const Reader l = r.child("light");
    c.light_intensity = l.get("intensity", c.light_intensity);
    c.light_half_angle = l.get("half_angle", c.light_half_angle);
  }
  {
    const Reader k = r.child("camera");
    const int w = k.get("width", c.camera.width);
    const int h = k.get("height", c.camera.height);
    const double rn = k.get("read_noise", c.camera.read_noise);
    const double fw = k.get("full_well", c.camera.full_well);
    if (k.has("focal")) {
      c.camera.width = w;
      c.camera.height = h;
      c.camera.read_noise = rn;
      c.camera.full_well = fw;
      c.camera.focal = k.require<double>("focal");
      c.camera.cx = k.get("cx", 0.5 * w);
      c.camera.cy = k.get("cy", 0.5 * h);
    } else {
      const double hfov = k.get("hfov_deg", 60.0);
      c.camera = CameraModel::from_fov(w, h, hfov * std::numbers::pi / 180.0, rn, fw);
    }
  }
  {
    const Reader e = r.child("estimation");
    EstimationConfig& est = c.estimation;
    est.r_min = e.get("r_min", est.r_min);
    est.operating_point.rho_bar = e.get("rho_bar", est.operating_point.rho_bar);
    est.eta = e.get("eta", est.eta);
    est.prior_sigma = e.get("prior_sigma", est.prior_sigma);
    est.e_min = e.optional<double>("e_min");
    const Reader k = e.child("conditioning");
    est.conditioning.enabled = k.get("enabled", est.conditioning.enabled);
    est.conditioning.sigma_irradiance = k.get("sigma_irradiance", est.conditioning.sigma_irradiance);
    est.conditioning.sigma_intensity = k.get("sigma_intensity", est.conditioning.sigma_intensity);
    est.conditioning.sigma_total = k.get("sigma_total", est.conditioning.sigma_total);
    est.conditioning.mask_dilation = k.get("mask_dilation", est.conditioning.mask_dilation);
  }
  {
    const Reader k = r.child("render");
    c.backscatter_samples = k.get("backscatter_samples", c.backscatter_samples);
    c.ambient_min_distance = k.get("ambient_min_distance", c.ambient_min_distance);
  }
  {
    const Reader p = r.child("planner");
    CandidateSpec& cs = c.planner.candidates;
    cs.radii = p.get("radii", cs.radii);
    cs.azimuths = p.get("azimuths", cs.azimuths);
    cs.azimuth_offset = p.get("azimuth_offset", cs.azimuth_offset);
    cs.light_height = p.get("light_height", cs.light_height);
    if (p.has("light_tilts")) {
      cs.light_tilts.clear();
      for (const auto& t : p.raw("light_tilts")) cs.light_tilts.push_back(vec2(t, p.field("light_tilts")));
    } else {
      c.defaulted.push_back(p.field("light_tilts"));
    }
    if (p.has("camera_offsets")) {
      for (const auto& t : p.raw("camera_offsets")) cs.camera_offsets.push_back(vec3(t, p.field("camera_offsets")));
    }
    if (p.has("camera_tilts")) {
      for (const auto& t : p.raw("camera_tilts")) cs.camera_tilts.push_back(vec2(t, p.field("camera_tilts")));
    }
    if (p.has("fixed_baseline")) c.planner.fixed_baseline = vec3(p.raw("fixed_baseline"), p.field("fixed_baseline"));
    else c.defaulted.push_back(p.field("fixed_baseline"));
    if (p.has("initial_baseline")) c.planner.initial_baseline = vec3(p.raw("initial_baseline"), p.field("initial_baseline"));
    else c.defaulted.push_back(p.field("initial_baseline"));
    c.planner.initial_view = p.get("initial_view", c.planner.initial_view);
  }
  if (r.has("waypoints")) {
    const auto& w = r.raw("waypoints");
    for (std::size_t i = 0; i < w.size(); ++i) {
      c.waypoints.push_back(parse_pose(w[i], "waypoints[" + std::to_string(i) + "]"));
    }
  } else {
    c.defaulted.push_back("waypoints");
  }
  if (r.has("path")) {
    const Reader p = r.child("path");
    PathConfig pc;
    const auto& views = p.raw("views");
    for (std::size_t i = 0; i < views.size(); ++i) {
      pc.views.push_back(parse_view_json(views[i], "path.views[" + std::to_string(i) + "]"));
    }
    const Reader b = p.child("bounds");
    if (b.has("lower")) pc.bounds.lower = vec3(b.raw("lower"), b.field("lower"));
    else c.defaulted.push_back(b.field("lower"));
    if (b.has("upper")) pc.bounds.upper = vec3(b.raw("upper"), b.field("upper"));
    else c.defaulted.push_back(b.field("upper"));
    pc.bounds.max_tilt = b.get("max_tilt", pc.bounds.max_tilt);
    pc.bounds.clearance = b.get("clearance", pc.bounds.clearance);
    pc.position_step = p.get("position_step", pc.position_step);
    pc.angle_step = p.get("angle_step", pc.angle_step);
    pc.iterations = p.get("iterations", pc.iterations);
    c.path = std::move(pc);
  }
  c.validate();
  return c;
}

SceneConfig load_scene_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scene " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str(), path.parent_path());
}

std::string serialize(const SceneConfig& c) {
  json root;
  root["schema_version"] = c.schema_version;
  root["name"] = c.name;
  root["seed"] = c.seed;

  json mesh;
  const MeshSource& s = c.mesh;
  mesh["generator"] = s.generator;
  if (s.generator == "hills") {
    const HillsSpec& h = s.hills;
    json bumps = json::array();
    for (const Bump& b : h.bumps) {
      bumps.push_back({{"center", vec(b.center)}, {"height", b.height}, {"sigma", b.sigma}});
    }
    mesh["hills"] = {{"size", vec(h.size)}, {"nx", h.nx}, {"ny", h.ny}, {"bumps", bumps},
                     {"checker", h.checker}, {"dark", h.dark}, {"light", h.light},
                     {"spot_radius", h.spot_radius}, {"spot_spacing", h.spot_spacing},
                     {"spot_albedo", h.spot_albedo}};
  } else if (s.generator == "cube") {
    const CubeSpec& k = s.cube;
    mesh["cube"] = {{"edge", k.edge}, {"floor", vec(k.floor)}, {"cell", k.cell},
                    {"floor_dark", k.floor_dark}, {"floor_light", k.floor_light},
                    {"floor_checker", k.floor_checker}, {"cube_albedo", k.cube_albedo}};
  } else if (s.generator == "plane") {
    mesh["size"] = vec(s.plane_size);
    mesh["cells"] = s.plane_cells;
    mesh["albedo"] = s.albedo;
  } else {
    mesh["file"] = s.obj.string();
    if (!s.albedo_csv.empty()) mesh["albedo_csv"] = s.albedo_csv.string();
    if (!s.albedo_map.empty()) mesh["albedo_map"] = s.albedo_map.string();
    mesh["albedo"] = s.albedo;
  }
  root["mesh"] = mesh;

  json medium = {{"beta", c.medium.beta},
                 {"g", c.medium.g},
                 {"scattering_fraction", c.medium.scattering_fraction},
                 {"ambient", c.medium.ambient_enabled}};
  if (c.medium.ambient_gain) medium["ambient_gain"] = *c.medium.ambient_gain;
  root["medium"] = medium;
  root["light"] = {{"intensity", c.light_intensity}, {"half_angle", c.light_half_angle}};
  root["camera"] = {{"width", c.camera.width}, {"height", c.camera.height},
                    {"focal", c.camera.focal}, {"cx", c.camera.cx},
                    {"cy", c.camera.cy}, {"read_noise", c.camera.read_noise},
                    {"full_well", c.camera.full_well}};
  const EstimationConfig& e = c.estimation;
  json est = {{"r_min", e.r_min},
              {"rho_bar", e.operating_point.rho_bar},
              {"eta", e.eta},
              {"prior_sigma", e.prior_sigma},
              {"conditioning",
               {{"enabled", e.conditioning.enabled},
                {"sigma_irradiance", e.conditioning.sigma_irradiance},
                {"sigma_intensity", e.conditioning.sigma_intensity},
                {"sigma_total", e.conditioning.sigma_total},
                {"mask_dilation", e.conditioning.mask_dilation}}}};
  if (e.e_min) est["e_min"] = *e.e_min;
  root["estimation"] = est;
  root["render"] = {{"backscatter_samples", c.backscatter_samples},
                    {"ambient_min_distance", c.ambient_min_distance}};

  const CandidateSpec& cs = c.planner.candidates;
  json tilts = json::array();
  for (const Vec2& t : cs.light_tilts) tilts.push_back(vec(t));
  json planner = {{"radii", cs.radii},
                  {"azimuths", cs.azimuths},
                  {"azimuth_offset", cs.azimuth_offset},
                  {"light_height", cs.light_height},
                  {"light_tilts", tilts},
                  {"fixed_baseline", vec(c.planner.fixed_baseline)},
                  {"initial_baseline", vec(c.planner.initial_baseline)},
                  {"initial_view", c.planner.initial_view}};
  if (!cs.camera_offsets.empty()) {
    json offs = json::array();
    for (const Vec3& o : cs.camera_offsets) offs.push_back(vec(o));
    planner["camera_offsets"] = offs;
  }
  if (!cs.camera_tilts.empty()) {
    json ct = json::array();
    for (const Vec2& t : cs.camera_tilts) ct.push_back(vec(t));
    planner["camera_tilts"] = ct;
  }
  root["planner"] = planner;

  json wps = json::array();
  for (const Pose& p : c.waypoints) wps.push_back(pose_json(p));
  root["waypoints"] = wps;

  if (c.path) {
    json views = json::array();
    for (const auto& v : c.path->views) views.push_back(view_json(v));
    root["path"] = {{"views", views},
                    {"bounds",
                     {{"lower", vec(c.path->bounds.lower)},
                      {"upper", vec(c.path->bounds.upper)},
                      {"max_tilt", c.path->bounds.max_tilt},
                      {"clearance", c.path->bounds.clearance}}},
                    {"position_step", c.path->position_step},
                    {"angle_step", c.path->angle_step},
                    {"iterations", c.path->iterations}};
  }
  return root.dump(2);
}

bool operator==(const SceneConfig& a, const SceneConfig& b) { return serialize(a) == serialize(b); }

Scene build_scene(const SceneConfig& config) {
  config.validate();
  auto surface = std::make_shared<const Surface>(build_mesh(config.mesh));
  return Scene{config, World::make(std::move(surface), config.optics(), config.estimation)};
}

Scene load_scene(const std::filesystem::path& path) { return build_scene(load_scene_config(path)); }

std::string serialize_view(const JointView& view) { return view_json(view).dump(2); }

JointView parse_view(std::string_view text) {
  try {
    return parse_view_json(json::parse(text), "view");
  } catch (const json::exception& e) {
    throw DataError(std::string("view is not valid JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------- canonical

SceneConfig hills_scene() {
  SceneConfig c;
  c.name = "hills";
  c.mesh.generator = "hills";
  c.medium.beta = 5.0;
  c.medium.g = 0.6;
  c.light_intensity = 6000.0;
  c.light_half_angle = 0.61;
  c.camera = CameraModel::from_fov(160, 120, std::numbers::pi / 3.0);
  c.estimation.r_min = 50000.0;
  c.seed = 1;
  constexpr double altitude = 0.30;
  for (int i = 0; i < 8; ++i) {
    c.waypoints.push_back(Pose::from_tilts({-0.35 + 0.1 * i, 0.0, altitude}, 0.0, 0.0));
  }
  return c;
}

SceneConfig cube_scene() {
  SceneConfig c;
  c.name = "cube";
  c.mesh.generator = "cube";
  c.medium.beta = 2.5;
  c.medium.g = 0.6;
  c.light_intensity = 40000.0;
  c.light_half_angle = 0.61;
  c.camera = CameraModel::from_fov(120, 90, std::numbers::pi / 3.0);
  c.estimation.r_min = 5000.0;
  c.seed = 1;
  constexpr double altitude = 0.84;
  const Vec3 baseline(0.34, 0.0, 0.0);
  PathConfig path;
  for (int i = 0; i < 6; ++i) {
    const Vec3 cam(0.0, -0.5 + 0.2 * i, altitude);
    const Pose camera = Pose::from_tilts(cam, 0.0, 0.0);
    c.waypoints.push_back(camera);
    const Vec3 target(cam.x(), cam.y(), 0.0);
    path.views.push_back({camera, Pose::look_at(cam + baseline, target), i + 1});
  }
  path.bounds.lower = {-0.6, -0.9, 0.3};
  path.bounds.upper = {0.6, 0.9, 1.2};
  path.bounds.max_tilt = 0.7;
  path.bounds.clearance = 0.05;
  c.planner.fixed_baseline = baseline;
  c.path = path;
  return c;
}

}  // namespace turbid
