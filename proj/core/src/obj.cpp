#include "turbid/obj.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "turbid/errors.hpp"

namespace turbid {

namespace {

std::string where(const std::filesystem::path& path, int line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

TriMesh read_obj(const std::filesystem::path& path, std::vector<double> albedo) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open mesh " + path.string());
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x() >> v.y() >> v.z())) throw DataError("bad vertex at " + where(path, lineno));
      vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        int i = 0;
        const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), i);
        if (ec != std::errc() || ptr != head.data() + head.size() || i == 0) {
          throw DataError("bad face index at " + where(path, lineno));
        }
        idx.push_back(i > 0 ? i - 1 : static_cast<int>(vertices.size()) + i);
      }
      if (idx.size() != 3) {
        throw DataError("non-triangular face (" + std::to_string(idx.size()) + " corners) at " +
                        where(path, lineno));
      }
      faces.push_back({idx[0], idx[1], idx[2]});
    }
  }
  return TriMesh(std::move(vertices), std::move(faces), std::move(albedo));
}

std::vector<double> read_albedo_csv(const std::filesystem::path& path, std::size_t face_count) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open albedo table " + path.string());
  std::vector<double> albedo(face_count, -1.0);
  std::string line;
  int lineno = 0;
  std::size_t next = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t face = next;
    double value = 0.0;
    try {
      if (const auto comma = line.find(','); comma != std::string::npos) {
        face = std::stoul(line.substr(0, comma));
        value = std::stod(line.substr(comma + 1));
      } else {
        value = std::stod(line);
      }
    } catch (const std::exception&) {
      throw DataError("bad albedo row at " + where(path, lineno));
    }
    if (face >= face_count) throw DataError("albedo face index out of range at " + where(path, lineno));
    albedo[face] = value;
    next = face + 1;
  }
  for (std::size_t k = 0; k < face_count; ++k) {
    if (albedo[k] < 0.0) throw DataError("albedo table misses face " + std::to_string(k));
  }
  return albedo;
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  if (!out) throw DataError("cannot write " + path.string());
}

}  // namespace turbid
