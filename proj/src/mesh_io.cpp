#include "triflow/mesh_io.hpp"

#include <fstream>
#include <sstream>

namespace triflow {

namespace {

/// Line-oriented tokenizer with '#' comments and line-numbered failures.
class LineReader {
 public:
  LineReader(const std::string& text, const std::string& name)
      : in_(text), name_(name) {}

  /// Next non-empty line split into tokens; false at end of input.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
      std::istringstream ls(line);
      tokens.clear();
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream out;
    out << name_ << ":" << lineno_ << ": " << msg;
    throw MeshFileError(out.str());
  }

  long integer(const std::string& tok) const {
    try {
      std::size_t pos = 0;
      const long v = std::stol(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail("expected an integer, got '" + tok + "'");
    }
  }
  double number(const std::string& tok) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail("expected a number, got '" + tok + "'");
    }
  }

 private:
  std::istringstream in_;
  std::string name_;
  int lineno_ = 0;
};

}  // namespace

MeshFile parse_mesh_text(const std::string& text, const std::string& name) {
  LineReader rd(text, name);
  std::vector<std::string> t;

  if (!rd.next(t) || t.size() != 2 || t[0] != "trimesh" || t[1] != "1")
    rd.fail("expected the header line 'trimesh 1'");

  MeshFile file;

  if (!rd.next(t) || t.size() != 2 || t[0] != "nodes")
    rd.fail("expected 'nodes <count>'");
  const long nnodes = rd.integer(t[1]);
  if (nnodes < 4) rd.fail("node count must be at least 4");
  file.nodes.reserve(nnodes);
  for (long i = 0; i < nnodes; ++i) {
    if (!rd.next(t) || t.size() != 3)
      rd.fail("expected 'x y z' coordinates of node " + std::to_string(i));
    file.nodes.push_back({rd.number(t[0]), rd.number(t[1]), rd.number(t[2])});
  }

  if (!rd.next(t) || t.size() != 4 || t[0] != "elements" || t[2] != "ngeo")
    rd.fail("expected 'elements <count> ngeo <order>'");
  const long nelem = rd.integer(t[1]);
  file.ngeo = static_cast<int>(rd.integer(t[3]));
  if (nelem < 1) rd.fail("element count must be positive");
  if (file.ngeo < 1) rd.fail("geometric order must be >= 1");
  file.elements.resize(nelem);
  for (long e = 0; e < nelem; ++e) {
    if (!rd.next(t) || t.size() != 8)
      rd.fail("expected 8 corner node ids of element " + std::to_string(e));
    for (int c = 0; c < 8; ++c) {
      const long id = rd.integer(t[c]);
      if (id < 0 || id >= nnodes)
        rd.fail("node id " + std::to_string(id) + " out of range");
      file.elements[e].corner_ids[c] = static_cast<int>(id);
      file.elements[e].corners[c] = file.nodes[id];
    }
  }

  if (!rd.next(t) || t.size() != 2 || t[0] != "boundary")
    rd.fail("expected 'boundary <count>'");
  const long nbnd = rd.integer(t[1]);
  file.boundary.resize(nbnd);
  for (long b = 0; b < nbnd; ++b) {
    if (!rd.next(t) || t.size() != 5)
      rd.fail("expected '<tag> id id id id' for boundary face " +
              std::to_string(b));
    file.boundary[b].tag = t[0];
    for (int c = 0; c < 4; ++c) {
      const long id = rd.integer(t[c + 1]);
      if (id < 0 || id >= nnodes)
        rd.fail("node id " + std::to_string(id) + " out of range");
      file.boundary[b].corner_ids[c] = static_cast<int>(id);
    }
  }

  const int nfp = (file.ngeo + 1) * (file.ngeo + 1);
  while (rd.next(t)) {
    if (t.size() == 1 && t[0] == "end") {
      if (rd.next(t)) rd.fail("unexpected content after 'end'");
      break;
    }
    if (t.size() != 3 || t[0] != "curved")
      rd.fail("expected 'curved <element> <side>' or 'end'");
    const long e = rd.integer(t[1]), side = rd.integer(t[2]);
    if (e < 0 || e >= nelem)
      rd.fail("element id " + std::to_string(e) + " out of range");
    if (side < 0 || side > 5) rd.fail("side must be in 0..5");
    if (file.ngeo < 2)
      rd.fail("curved faces require ngeo >= 2 in the header");
    auto [it, inserted] =
        file.elements[e].face_grids.emplace(static_cast<int>(side),
                                            std::vector<Vec3>());
    if (!inserted)
      rd.fail("duplicate curved block for element " + std::to_string(e) +
              " side " + std::to_string(side));
    it->second.reserve(nfp);
    for (int q = 0; q < nfp; ++q) {
      if (!rd.next(t) || t.size() != 3)
        rd.fail("expected 'x y z' point " + std::to_string(q) +
                " of the curved face");
      it->second.push_back(
          {rd.number(t[0]), rd.number(t[1]), rd.number(t[2])});
    }
  }
  return file;
}

MeshFile read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshFileError("cannot open mesh file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_mesh_text(text.str(), path);
}

Mesh build_mesh_from_file(const MeshFile& file, int order) {
  bool curved = false;
  for (const auto& e : file.elements)
    if (!e.face_grids.empty()) curved = true;
  if (curved && file.ngeo != order)
    throw MeshFileError(
        "curved mesh has geometric order " + std::to_string(file.ngeo) +
        " but the run uses N = " + std::to_string(order) +
        " (re-interpolation is not supported)");
  return build_mesh(file.elements, file.boundary, order);
}

}  // namespace triflow
