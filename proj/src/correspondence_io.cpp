#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "hipose/correspondence.hpp"
#include "hipose/error.hpp"

namespace hipose {

using nlohmann::json;

std::vector<Correspondence> read_correspondences(std::istream& in) {
  std::vector<Correspondence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = [&] { return " on line " + std::to_string(line_no); };
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON") + where() + ": " + e.what());
    }
    try {
      Correspondence c;
      const auto& p = rec.at("p");
      if (!p.is_array() || p.size() != 3) throw ParseError("\"p\" must be a 3-element array" + where());
      c.point = Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
      if (!c.point.allFinite()) throw ParseError("non-finite point" + where());
      const auto& code = rec.at("code");
      if (!code.is_array() || code.empty()) throw ParseError("\"code\" must be a non-empty array" + where());
      c.code = SoftCode(code.get<std::vector<double>>());
      if (rec.contains("gt_vertex") && !rec["gt_vertex"].is_null()) {
        const auto v = rec["gt_vertex"].get<std::int64_t>();
        if (v < 0 || v > UINT32_MAX) throw ParseError("gt_vertex out of range" + where());
        c.gt_vertex = static_cast<std::uint32_t>(v);
      }
      if (!out.empty() && out.front().code.size() != c.code.size()) {
        throw ParseError("code length differs from first record" + where());
      }
      out.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed correspondence") + where() + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string(e.what()) + where());
    }
  }
  return out;
}

std::vector<Correspondence> read_correspondences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open correspondence file " + path.string());
  return read_correspondences(in);
}

void write_correspondences(std::ostream& out, std::span<const Correspondence> corrs) {
  for (const Correspondence& c : corrs) {
    json rec;
    rec["p"] = {c.point.x(), c.point.y(), c.point.z()};
    rec["code"] = std::vector<double>(c.code.values().begin(), c.code.values().end());
    if (c.gt_vertex) rec["gt_vertex"] = *c.gt_vertex;
    out << rec.dump() << '\n';
  }
}

void write_correspondences(const std::filesystem::path& path, std::span<const Correspondence> corrs) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_correspondences(out, corrs);
}

}  // namespace hipose
