#include "turbid/texture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "turbid/errors.hpp"

namespace turbid {

TextureLayout::TextureLayout(const TriMesh& mesh, double r_min) {
  const std::size_t n = mesh.face_count();
  side_.resize(n);
  offset_.assign(n + 1, 0);
  long total = 0;
  int max_side = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const int side =
        std::max(1, static_cast<int>(std::lround(std::sqrt(mesh.area(k) * r_min))));
    side_[k] = side;
    max_side = std::max(max_side, side);
    offset_[k + 1] = offset_[k] + side * side;
    total += static_cast<long>(side) * side;
  }
  atlas_width_ = std::max(max_side, static_cast<int>(std::ceil(1.1 * std::sqrt(total))));

  texel_face_.resize(static_cast<std::size_t>(total));
  bary_.resize(static_cast<std::size_t>(total));
  atlas_pixel_.resize(static_cast<std::size_t>(total));
  std::vector<std::pair<int, int>> block(n);
  int x = 0;
  int y = 0;
  int shelf = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const int side = side_[k];
    if (x + side > atlas_width_) {
      x = 0;
      y += shelf;
      shelf = 0;
    }
    block[k] = {x, y};
    x += side;
    shelf = std::max(shelf, side);
  }
  atlas_height_ = y + shelf;

  for (std::size_t k = 0; k < n; ++k) {
    const int side = side_[k];
    const auto [bx, by] = block[k];
    int t = offset_[k];
    auto emit = [&](double u, double v, int ax, int ay) {
      const auto idx = static_cast<std::size_t>(t++);
      texel_face_[idx] = static_cast<int>(k);
      bary_[idx] = Vec3(1.0 - u - v, u, v);
      atlas_pixel_[idx] = (by + ay) * atlas_width_ + (bx + ax);
    };
    for (int j = 0; j < side; ++j) {
      for (int i = 0; i + j < side; ++i) {
        emit((i + 1.0 / 3.0) / side, (j + 1.0 / 3.0) / side, i, j);
      }
    }
    for (int j = 0; j < side; ++j) {
      for (int i = 0; i + j < side - 1; ++i) {
        emit((i + 2.0 / 3.0) / side, (j + 2.0 / 3.0) / side, side - 1 - i, side - 1 - j);
      }
    }
  }
}

int TextureLayout::texel_at(std::size_t face, double u, double v) const {
  const int side = side_[face];
  const double a = std::clamp(u, 0.0, 1.0) * side;
  const double b = std::clamp(v, 0.0, 1.0) * side;
  int i = std::min(static_cast<int>(a), side - 1);
  int j = std::min(static_cast<int>(b), side - 1);
  bool upright = (a - i) + (b - j) < 1.0;
  if (i + j > side - 1 || (!upright && i + j > side - 2)) {
    // Outside the face by rounding; snap to the nearest upright texel.
    upright = true;
    j = std::min(j, side - 1);
    i = std::max(0, std::min(i, side - 1 - j));
  }
  if (upright) return offset_[face] + j * side - j * (j - 1) / 2 + i;
  return offset_[face] + side * (side + 1) / 2 + j * (side - 1) - j * (j - 1) / 2 + i;
}

Vec3 TextureLayout::position(const TriMesh& mesh, int texel) const {
  const auto face = static_cast<std::size_t>(face_of(texel));
  const Vec3& b = barycentric(texel);
  return b[0] * mesh.vertex(face, 0) + b[1] * mesh.vertex(face, 1) + b[2] * mesh.vertex(face, 2);
}

TextureMap::TextureMap(std::shared_ptr<const TextureLayout> layout, double prior_quality,
                       FusionRule rule)
    : layout_(std::move(layout)), prior_quality_(prior_quality), rule_(rule) {
  const std::size_t texels = layout_->texel_count();
  const std::size_t faces = layout_->face_count();
  s0_.assign(texels, 0.0);
  s1_.assign(texels, 0.0);
  count_.assign(texels, 0);
  sum_value_.assign(texels, 0.0);
  sum_variance_.assign(texels, 0.0);
  quality_.assign(faces, prior_quality_);
  inv_quality_sum_.assign(faces, 0.0);
  face_obs_.assign(faces, 0);
}

double TextureMap::value(int texel) const {
  const auto i = static_cast<std::size_t>(texel);
  if (count_[i] == 0) return 0.0;
  if (rule_ == FusionRule::MaximumLikelihood) return s1_[i] / s0_[i];
  return sum_value_[i] / count_[i];
}

double TextureMap::variance(int texel) const {
  const auto i = static_cast<std::size_t>(texel);
  if (count_[i] == 0) return 1.0 / prior_quality_;
  if (rule_ == FusionRule::MaximumLikelihood) return 1.0 / s0_[i];
  const double n = count_[i];
  return sum_variance_[i] / (n * n);
}

double TextureMap::face_variance(std::size_t face) const {
  if (rule_ == FusionRule::MaximumLikelihood) return 1.0 / quality_[face];
  const int n = face_obs_[face];
  if (n == 0) return 1.0 / prior_quality_;
  const double avg_var = inv_quality_sum_[face] / (static_cast<double>(n) * n);
  return 1.0 / (prior_quality_ + 1.0 / avg_var);
}

double TextureMap::total_uncertainty() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < quality_.size(); ++k) {
    sum += layout_->patch_count(k) * face_variance(k);
  }
  return sum;
}

void TextureMap::add_face_qualities(const std::vector<double>& q) {
  if (q.size() != quality_.size()) throw DataError("face quality vector size mismatch");
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (!(q[k] > 0.0)) continue;
    quality_[k] += q[k];
    inv_quality_sum_[k] += 1.0 / q[k];
    ++face_obs_[k];
  }
}

void TextureMap::add_measurement(int texel, double albedo, double variance) {
  const auto i = static_cast<std::size_t>(texel);
  s0_[i] += 1.0 / variance;
  s1_[i] += albedo / variance;
  ++count_[i];
  sum_value_[i] += albedo;
  sum_variance_[i] += variance;
}

void TextureMap::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["format"] = "turbid-texture";
  j["version"] = 1;
  j["rule"] = rule_ == FusionRule::MaximumLikelihood ? "ml" : "average";
  j["prior_quality"] = prior_quality_;
  j["texel_count"] = s0_.size();
  j["face_count"] = quality_.size();
  j["texels"] = {{"s0", s0_},
                 {"s1", s1_},
                 {"count", count_},
                 {"sum_value", sum_value_},
                 {"sum_variance", sum_variance_}};
  j["faces"] = {{"quality", quality_},
                {"inv_quality_sum", inv_quality_sum_},
                {"observations", face_obs_}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot write texture snapshot " + path.string());
  out << j.dump();
}

TextureMap TextureMap::load(const std::filesystem::path& path,
                            std::shared_ptr<const TextureLayout> layout) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open texture snapshot " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed texture snapshot " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "turbid-texture") {
    throw DataError(path.string() + " is not a texture snapshot");
  }
  const auto rule = j.at("rule").get<std::string>() == "ml" ? FusionRule::MaximumLikelihood
                                                            : FusionRule::SimpleAverage;
  TextureMap map(std::move(layout), j.at("prior_quality").get<double>(), rule);
  if (j.at("texel_count").get<std::size_t>() != map.s0_.size() ||
      j.at("face_count").get<std::size_t>() != map.quality_.size()) {
    throw DataError("texture snapshot does not match the scene mesh");
  }
  const auto& t = j.at("texels");
  t.at("s0").get_to(map.s0_);
  t.at("s1").get_to(map.s1_);
  t.at("count").get_to(map.count_);
  t.at("sum_value").get_to(map.sum_value_);
  t.at("sum_variance").get_to(map.sum_variance_);
  const auto& f = j.at("faces");
  f.at("quality").get_to(map.quality_);
  f.at("inv_quality_sum").get_to(map.inv_quality_sum_);
  f.at("observations").get_to(map.face_obs_);
  return map;
}

void fuse(TextureMap& texture, const DescatteredFrame& frame, const ProjectionMap& projection,
          const TriMesh& mesh, const CameraModel& camera_model, const Pose& camera,
          const EstimationConfig& config) {
  const TextureLayout& layout = texture.layout();
  const int w = projection.width();
  const int h = projection.height();
  std::vector<int> n;
  std::vector<double> sum_rho;
  std::vector<double> sum_var;
  for (std::size_t k = 0; k < mesh.face_count(); ++k) {
    const int pixels = projection.pixel_count_of(k);
    if (pixels == 0) continue;
    const auto a = camera_model.project(camera, mesh.vertex(k, 0));
    const auto b = camera_model.project(camera, mesh.vertex(k, 1));
    const auto c = camera_model.project(camera, mesh.vertex(k, 2));
    if (a && b && c) {
      const Vec2 e1 = *b - *a;
      const Vec2 e2 = *c - *a;
      if (std::abs(e1.x() * e2.y() - e1.y() * e2.x()) < 1e-12) continue;
    }
    const double gamma = pixels / mesh.area(k) / config.r_min;
    const int first = layout.first_texel(k);
    const int count = layout.patch_count(k);

    // Box filter: pixels are binned into the texel containing their hit.
    n.assign(static_cast<std::size_t>(count), 0);
    sum_rho.assign(static_cast<std::size_t>(count), 0.0);
    sum_var.assign(static_cast<std::size_t>(count), 0.0);
    const Vec3& p0 = mesh.vertex(k, 0);
    const Vec3 e1 = mesh.vertex(k, 1) - p0;
    const Vec3 e2 = mesh.vertex(k, 2) - p0;
    const double d11 = e1.dot(e1), d12 = e1.dot(e2), d22 = e2.dot(e2);
    const double det = d11 * d22 - d12 * d12;
    for (int p : projection.pixels_of(k)) {
      if (!frame.valid[p]) continue;
      const Vec3 r = projection.point(p) - p0;
      const double r1 = r.dot(e1), r2 = r.dot(e2);
      const double u = (d22 * r1 - d12 * r2) / det;
      const double v = (d11 * r2 - d12 * r1) / det;
      const auto local = static_cast<std::size_t>(layout.texel_at(k, u, v) - first);
      ++n[local];
      sum_rho[local] += frame.albedo[p];
      sum_var[local] += frame.variance[p];
    }

    for (int texel = first; texel < first + count; ++texel) {
      const auto local = static_cast<std::size_t>(texel - first);
      if (n[local] > 0) {
        texture.add_measurement(texel, sum_rho[local] / n[local],
                                resolution_weight(sum_var[local] / n[local], gamma, config.eta));
        continue;
      }
      const auto uv = camera_model.project(camera, layout.position(mesh, texel));
      if (!uv) continue;
      const double fx = uv->x() - 0.5;
      const double fy = uv->y() - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const int y0 = static_cast<int>(std::floor(fy));
      const double ax = fx - x0;
      const double ay = fy - y0;
      double wsum = 0.0;
      double rho = 0.0;
      double var = 0.0;
      for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
          const int x = x0 + dx;
          const int y = y0 + dy;
          if (x < 0 || y < 0 || x >= w || y >= h) continue;
          const int p = y * w + x;
          if (!frame.valid[p] || projection.face(p) != static_cast<int>(k)) continue;
          const double wt = (dx ? ax : 1.0 - ax) * (dy ? ay : 1.0 - ay);
          wsum += wt;
          rho += wt * frame.albedo[p];
          var += wt * frame.variance[p];
        }
      }
      if (!(wsum > 0.0)) continue;
      texture.add_measurement(texel, rho / wsum,
                              resolution_weight(var / wsum, gamma, config.eta));
    }
  }
  texture.add_face_qualities(segment_qualities(projection, frame.variance, mesh, config));
}

namespace {

template <typename Fn>
ImageD atlas_image(const TextureMap& texture, Fn&& fn) {
  const TextureLayout& layout = texture.layout();
  ImageD img(layout.atlas_width(), layout.atlas_height(), 0.0);
  for (int t = 0; t < static_cast<int>(layout.texel_count()); ++t) {
    img[layout.atlas_pixel(t)] = fn(t);
  }
  return img;
}

}  // namespace

ImageD atlas_albedo(const TextureMap& texture) {
  return atlas_image(texture, [&](int t) { return texture.value(t); });
}

ImageD atlas_variance(const TextureMap& texture) {
  return atlas_image(texture, [&](int t) { return texture.variance(t); });
}

}  // namespace turbid
