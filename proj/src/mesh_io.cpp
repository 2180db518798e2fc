#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "hipose/error.hpp"
#include "hipose/mesh.hpp"

namespace hipose {
namespace {

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<std::string> properties;  // "list" properties are stored with a "list:" prefix
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void append_polygon(const std::vector<long long>& idx, std::size_t line, std::vector<Face>& faces) {
  if (idx.size() < 3) {
    throw ParseError("face with fewer than 3 indices on line " + std::to_string(line));
  }
  for (long long i : idx) {
    if (i < 0 || i > 0xffffffffLL) {
      throw ParseError("face index " + std::to_string(i) + " out of range on line " +
                       std::to_string(line));
    }
  }
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    faces.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[k]),
                     static_cast<std::uint32_t>(idx[k + 1])});
  }
}

}  // namespace

TriangleMesh parse_ply(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  };

  if (!next_line() || lower(line) != "ply") throw ParseError("missing 'ply' magic");
  std::vector<PlyElement> elements;
  bool ascii = false;
  bool header_done = false;
  while (next_line()) {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    kw = lower(kw);
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw ParseError("only ASCII PLY is supported, got '" + fmt + "'");
      ascii = true;
    } else if (kw == "element") {
      PlyElement e;
      if (!(ls >> e.name >> e.count)) throw ParseError("bad element line " + std::to_string(line_no));
      elements.push_back(std::move(e));
    } else if (kw == "property") {
      if (elements.empty()) throw ParseError("property before element on line " + std::to_string(line_no));
      std::string type, name;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> name;
        elements.back().properties.push_back("list:" + name);
      } else {
        ls >> name;
        elements.back().properties.push_back(name);
      }
    } else if (kw == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError("PLY header not terminated");
  if (!ascii) throw ParseError("PLY format line missing");

  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  for (const PlyElement& e : elements) {
    if (e.name == "vertex") {
      const auto find = [&](const char* n) {
        auto it = std::find(e.properties.begin(), e.properties.end(), n);
        if (it == e.properties.end()) throw ParseError(std::string("vertex property '") + n + "' missing");
        return static_cast<std::size_t>(it - e.properties.begin());
      };
      const std::size_t ix = find("x"), iy = find("y"), iz = find("z");
      vertices.reserve(e.count);
      for (std::size_t k = 0; k < e.count; ++k) {
        if (!next_line()) throw ParseError("unexpected end of file in vertex list");
        std::istringstream ls(line);
        std::vector<double> vals;
        double value;
        while (ls >> value) vals.push_back(value);
        if (!ls.eof() || vals.size() < e.properties.size()) {
          throw ParseError("malformed vertex on line " + std::to_string(line_no));
        }
        vertices.emplace_back(vals[ix], vals[iy], vals[iz]);
      }
    } else if (e.name == "face") {
      for (std::size_t k = 0; k < e.count; ++k) {
        if (!next_line()) throw ParseError("unexpected end of file in face list");
        std::istringstream ls(line);
        long long n = 0;
        if (!(ls >> n) || n < 0) throw ParseError("malformed face on line " + std::to_string(line_no));
        std::vector<long long> idx(static_cast<std::size_t>(n));
        for (long long& i : idx) {
          if (!(ls >> i)) throw ParseError("malformed face on line " + std::to_string(line_no));
        }
        append_polygon(idx, line_no, faces);
      }
    } else {
      for (std::size_t k = 0; k < e.count; ++k) {
        if (!next_line()) throw ParseError("unexpected end of file in element '" + e.name + "'");
      }
    }
  }
  return TriangleMesh(std::move(vertices), std::move(faces));
}

TriangleMesh parse_obj(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    if (kw == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError("malformed vertex on line " + std::to_string(line_no));
      vertices.emplace_back(x, y, z);
    } else if (kw == "f") {
      std::vector<long long> idx;
      std::string tok;
      while (ls >> tok) {
        // v, v/vt, v//vn, v/vt/vn
        const std::string head = tok.substr(0, tok.find('/'));
        long long i = 0;
        try {
          std::size_t used = 0;
          i = std::stoll(head, &used);
          if (used != head.size()) throw std::invalid_argument(head);
        } catch (const std::exception&) {
          throw ParseError("malformed face index '" + tok + "' on line " + std::to_string(line_no));
        }
        if (i == 0) throw ParseError("OBJ face index 0 on line " + std::to_string(line_no));
        idx.push_back(i > 0 ? i - 1 : static_cast<long long>(vertices.size()) + i);
      }
      append_polygon(idx, line_no, faces);
    }
  }
  return TriangleMesh(std::move(vertices), std::move(faces));
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file " + path.string());
  const std::string ext = lower(path.extension().string());
  if (ext == ".ply") return parse_ply(in);
  if (ext == ".obj") return parse_obj(in);
  throw ParseError("unsupported mesh extension '" + ext + "' (expected .ply or .obj)");
}

void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "ply\nformat ascii 1.0\nelement vertex " << mesh.size()
      << "\nproperty double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.faces().size() << "\nproperty list uchar int vertex_indices\n"
      << "end_header\n"
      << std::setprecision(17);
  for (const Vec3& p : mesh.vertices()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Face& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

}  // namespace hipose
