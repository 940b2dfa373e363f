#include "triflow/case_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace triflow {

namespace {

struct Entry {
  std::vector<std::string> vals;
  int line = 0;
  mutable bool used = false;
};

using Section = std::map<std::string, Entry>;

struct RawConfig {
  std::string name;
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_lines;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    std::ostringstream out;
    out << name << ":" << line << ": " << msg;
    throw ConfigError(out.str());
  }
};

RawConfig tokenize(const std::string& text, const std::string& name) {
  RawConfig raw;
  raw.name = name;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first.front() == '[') {
      std::string head = first;
      std::string rest;
      if (ls >> rest) raw.fail(lineno, "unexpected text after section header");
      if (head.back() != ']')
        raw.fail(lineno, "malformed section header '" + head + "'");
      section = head.substr(1, head.size() - 2);
      if (section.empty()) raw.fail(lineno, "empty section name");
      raw.sections[section];  // sections may legitimately be empty
      raw.section_lines.emplace(section, lineno);
      continue;
    }
    if (section.empty())
      raw.fail(lineno, "key '" + first + "' appears before any [section]");
    std::string eq;
    if (!(ls >> eq) || eq != "=")
      raw.fail(lineno, "expected 'key = value...' syntax");
    Entry e;
    e.line = lineno;
    std::string tok;
    while (ls >> tok) e.vals.push_back(tok);
    if (e.vals.empty()) raw.fail(lineno, "key '" + first + "' has no value");
    if (!raw.sections[section].emplace(first, std::move(e)).second)
      raw.fail(lineno, "duplicate key '" + first + "' in [" + section + "]");
  }
  return raw;
}

/// Typed accessors over one section; every touched key is marked used so the
/// leftover keys can be reported as unknown.
class Reader {
 public:
  Reader(const RawConfig& raw, const std::string& section)
      : raw_(&raw), name_(section) {
    auto it = raw.sections.find(section);
    sec_ = it == raw.sections.end() ? nullptr : &it->second;
  }

  bool present() const { return sec_ != nullptr; }
  bool has(const std::string& key) const {
    return sec_ && sec_->count(key) > 0;
  }

  const Entry& require(const std::string& key) const {
    const Entry* e = find(key);
    if (!e)
      throw ConfigError(raw_->name + ": missing mandatory key '" + key +
                        "' in [" + name_ + "]");
    return *e;
  }

  double number(const std::string& key) const {
    return parse_number(require(key), 0, key);
  }
  double number_or(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    return e ? parse_number(*e, 0, key) : fallback;
  }
  int integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v))
      fail(key, "expected an integer, got '" + require(key).vals[0] + "'");
    return static_cast<int>(v);
  }
  int integer_or(const std::string& key, int fallback) const {
    return has(key) ? integer(key) : fallback;
  }
  bool flag_or(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    const std::string& s = e->vals[0];
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    fail(key, "expected a boolean (true/false/1/0), got '" + s + "'");
  }
  std::string word(const std::string& key) const {
    return require(key).vals[0];
  }
  std::string word_or(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->vals[0] : fallback;
  }
  Vec3 vec3(const std::string& key) const {
    const Entry& e = require(key);
    if (e.vals.size() != 3) fail(key, "expected 3 numbers");
    return {parse_number(e, 0, key), parse_number(e, 1, key),
            parse_number(e, 2, key)};
  }
  Vec3 vec3_or(const std::string& key, const Vec3& fallback) const {
    return has(key) ? vec3(key) : fallback;
  }
  std::vector<int> int_list(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<int> out;
    for (std::size_t i = 0; i < e.vals.size(); ++i) {
      const double v = parse_number(e, i, key);
      if (v != std::floor(v)) fail(key, "expected integers");
      out.push_back(static_cast<int>(v));
    }
    return out;
  }
  const std::vector<std::string>& words(const std::string& key) const {
    return require(key).vals;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const Entry* e = find(key);
    raw_->fail(e ? e->line : section_line(), "key '" + key + "': " + msg);
  }

  void check_no_unknown() const {
    if (!sec_) return;
    for (const auto& [key, e] : *sec_)
      if (!e.used)
        raw_->fail(e.line, "unknown key '" + key + "' in [" + name_ + "]");
  }

 private:
  const Entry* find(const std::string& key) const {
    if (!sec_) return nullptr;
    auto it = sec_->find(key);
    if (it == sec_->end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
  int section_line() const {
    auto it = raw_->section_lines.find(name_);
    return it == raw_->section_lines.end() ? 0 : it->second;
  }
  double parse_number(const Entry& e, std::size_t i,
                      const std::string& key) const {
    if (i >= e.vals.size())
      raw_->fail(e.line, "key '" + key + "': too few values");
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.vals[i], &pos);
      if (pos != e.vals[i].size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      raw_->fail(e.line,
                 "key '" + key + "': not a number: '" + e.vals[i] + "'");
    }
  }

  const RawConfig* raw_;
  std::string name_;
  const Section* sec_;
};

constexpr double kDeg = std::numbers::pi / 180.0;

BoundaryCondition parse_boundary(const Reader& r, const std::string& tag,
                                 const PhaseParams& params) {
  BoundaryCondition bc;
  const std::string kind = r.word("kind");
  if (kind == "wall") {
    bc.kind = BoundaryKind::Wall;
    // Angles in degrees, or in radians via the *_rad spelling (the config
    // echo uses radians so that reparsing is bit-exact).
    auto angle = [&](const char* deg_key, const char* rad_key) {
      if (r.has(rad_key)) {
        if (r.has(deg_key))
          r.fail(rad_key, std::string("conflicts with '") + deg_key + "'");
        return r.number(rad_key);
      }
      return r.number_or(deg_key, 90.0) * kDeg;
    };
    bc.wall.theta12 = angle("theta12", "theta12_rad");
    bc.wall.theta13 = angle("theta13", "theta13_rad");
    bc.wall.theta23 = angle("theta23", "theta23_rad");
    try {
      validate_wall_spec(bc.wall, params);
    } catch (const BoundaryConfigError& err) {
      r.fail("kind", "wall '" + tag + "': " + err.what());
    }
  } else if (kind == "outflow") {
    bc.kind = BoundaryKind::Outflow;
    bc.outflow.ambient_pressure = r.number_or("pressure", 0.0);
  } else if (kind == "inflow") {
    bc.kind = BoundaryKind::Inflow;
    InflowSpec& in = bc.inflow;
    const std::string sec = r.word_or("section", "circular");
    if (sec == "circular")
      in.section = InflowSpec::Section::Circular;
    else if (sec == "channel")
      in.section = InflowSpec::Section::Channel;
    else
      r.fail("section", "expected 'circular' or 'channel'");
    in.radius = r.number_or("radius", 1.0);
    in.center = r.vec3_or("center", {0.0, 0.0, 0.0});
    in.axis = r.vec3_or("axis", {1.0, 0.0, 0.0});
    in.up = r.vec3_or("up", {0.0, 1.0, 0.0});
    in.superficial = r.vec3_or("superficial", {0.0, 0.0, 0.0});
    in.slip12 = r.number_or("slip12", 0.0);
    in.slip23 = r.number_or("slip23", 0.0);
    in.prescribed = r.flag_or("prescribed", false);
    in.vmax = r.vec3_or("vmax", {0.0, 0.0, 0.0});
    in.y12 = r.number_or("y12", 0.0);
    in.y23 = r.number_or("y23", 0.0);
    in.layer_eps = r.number_or("layer_eps", 0.0);
  } else {
    r.fail("kind", "expected 'wall', 'inflow' or 'outflow'");
  }
  return bc;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string fmt3(const Vec3& v) {
  return fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]);
}

}  // namespace

CaseConfig parse_config_text(const std::string& text, const std::string& name) {
  const RawConfig raw = tokenize(text, name);
  CaseConfig cfg;

  const Reader phys(raw, "physics");
  if (!phys.present())
    throw ConfigError(name + ": missing mandatory section [physics]");
  {
    const Vec3 rho = phys.vec3("rho"), eta = phys.vec3("eta");
    const double s12 = phys.number("sigma12"), s13 = phys.number("sigma13"),
                 s23 = phys.number("sigma23");
    const double eps = phys.number("eps"), M0 = phys.number("M0"),
                 c0 = phys.number("c0");
    const Vec3 g = phys.vec3_or("gravity", {0.0, 0.0, 0.0});
    try {
      cfg.params = derive_params(rho, eta, s12, s13, s23, eps, M0, c0, g);
    } catch (const std::exception& err) {
      phys.fail("rho", std::string("invalid physics: ") + err.what());
    }
    cfg.params.density_floor = phys.number_or("density_floor", 0.0);
    if (cfg.params.density_floor < 0.0)
      phys.fail("density_floor", "must be non-negative");
  }
  phys.check_no_unknown();

  const Reader run(raw, "run");
  if (!run.present())
    throw ConfigError(name + ": missing mandatory section [run]");
  {
    const std::string mode = run.word_or("mode", "simulate");
    if (mode == "simulate")
      cfg.mode = RunMode::Simulate;
    else if (mode == "mms")
      cfg.mode = RunMode::MmsConvergence;
    else if (mode == "smoke")
      cfg.mode = RunMode::Smoke;
    else
      run.fail("mode", "expected 'simulate', 'mms' or 'smoke'");
    cfg.order = run.integer("N");
    if (cfg.order < 1) run.fail("N", "polynomial order must be >= 1");
    cfg.dt = run.number("dt");
    if (cfg.dt <= 0.0) run.fail("dt", "must be positive");
    cfg.t_final = run.number("t_final");
    if (cfg.t_final < 0.0) run.fail("t_final", "must be non-negative");
    cfg.S0 = run.number_or("S0", 8.0);
    if (cfg.S0 < 0.0) run.fail("S0", "must be non-negative");
    cfg.checkpoint_cadence = run.integer_or("checkpoint_cadence", 100);
    if (cfg.checkpoint_cadence < 1)
      run.fail("checkpoint_cadence", "must be >= 1");
    cfg.output_prefix = run.word_or("output_prefix", "out");
  }
  run.check_no_unknown();

  const Reader mesh(raw, "mesh");
  if (cfg.mode != RunMode::MmsConvergence) {
    if (!mesh.present())
      throw ConfigError(name + ": missing mandatory section [mesh]");
    const bool has_file = mesh.has("file"), has_box = mesh.has("box");
    if (has_file == has_box)
      throw ConfigError(name + ": [mesh] needs exactly one of 'file' or 'box'");
    if (has_file) {
      cfg.mesh.is_box = false;
      cfg.mesh.path = mesh.word("file");
    } else {
      cfg.mesh.is_box = true;
      const std::vector<int> n = mesh.int_list("box");
      if (n.size() != 3 || n[0] < 1 || n[1] < 1 || n[2] < 1)
        mesh.fail("box", "expected 3 positive element counts");
      cfg.mesh.box.nx = n[0];
      cfg.mesh.box.ny = n[1];
      cfg.mesh.box.nz = n[2];
      if (mesh.has("extent")) {
        const Entry& e = mesh.require("extent");
        if (e.vals.size() != 6) mesh.fail("extent", "expected 6 numbers");
        double v[6];
        for (int i = 0; i < 6; ++i) v[i] = std::stod(e.vals[i]);
        cfg.mesh.box.x0 = v[0];
        cfg.mesh.box.x1 = v[1];
        cfg.mesh.box.y0 = v[2];
        cfg.mesh.box.y1 = v[3];
        cfg.mesh.box.z0 = v[4];
        cfg.mesh.box.z1 = v[5];
      }
      if (mesh.has("periodic")) {
        const std::vector<int> p = mesh.int_list("periodic");
        if (p.size() != 3) mesh.fail("periodic", "expected 3 flags (0/1)");
        for (int d = 0; d < 3; ++d) cfg.mesh.box.periodic[d] = p[d] != 0;
      }
      if (mesh.has("tags")) {
        const auto& t = mesh.words("tags");
        if (t.size() != 6)
          mesh.fail("tags", "expected 6 names (xmin xmax ymin ymax zmin zmax)");
        for (int i = 0; i < 6; ++i) cfg.mesh.box.tags[i] = t[i];
      }
    }
    mesh.check_no_unknown();
  } else if (mesh.present()) {
    throw ConfigError(name + ": [mesh] is not used in mms mode");
  }

  const Reader init(raw, "initial");
  if (cfg.mode != RunMode::MmsConvergence && init.present()) {
    const std::string kind = init.word("kind");
    if (kind == "uniform") {
      cfg.initial.kind = InitialKind::Uniform;
      if (init.has("c")) {
        const Entry& e = init.require("c");
        if (e.vals.size() != 2) init.fail("c", "expected 2 concentrations");
        cfg.initial.c1 = std::stod(e.vals[0]);
        cfg.initial.c2 = std::stod(e.vals[1]);
      }
      cfg.initial.velocity = init.vec3_or("velocity", {0.0, 0.0, 0.0});
      cfg.initial.pressure = init.number_or("pressure", 0.0);
    } else if (kind == "channel") {
      cfg.initial.kind = InitialKind::Channel;
      if (init.has("c")) {
        const Entry& e = init.require("c");
        if (e.vals.size() != 2) init.fail("c", "expected 2 concentrations");
        cfg.initial.c1 = std::stod(e.vals[0]);
        cfg.initial.c2 = std::stod(e.vals[1]);
      }
      cfg.initial.vmax = init.number_or("vmax", 1.0);
      cfg.initial.pressure = init.number_or("pressure", 0.0);
    } else if (kind == "manufactured") {
      cfg.initial.kind = InitialKind::Manufactured;
      cfg.initial.two_phase = init.flag_or("two_phase", true);
    } else if (kind == "checkpoint") {
      cfg.initial.kind = InitialKind::Checkpoint;
      cfg.initial.checkpoint_path = init.word("file");
    } else {
      init.fail("kind",
                "expected 'uniform', 'channel', 'manufactured' or 'checkpoint'");
    }
    init.check_no_unknown();
  }

  const Reader mms(raw, "mms");
  if (cfg.mode == RunMode::MmsConvergence) {
    if (!mms.present())
      throw ConfigError(name + ": mms mode needs a [mms] section");
    cfg.mms.two_phase = mms.flag_or("two_phase", true);
    cfg.mms.meshes = mms.int_list("meshes");
    cfg.mms.orders = mms.int_list("orders");
    for (int m : cfg.mms.meshes)
      if (m < 1) mms.fail("meshes", "element counts must be positive");
    for (int N : cfg.mms.orders)
      if (N < 1) mms.fail("orders", "orders must be >= 1");
    mms.check_no_unknown();
  } else if (mms.present()) {
    throw ConfigError(name + ": [mms] is only used in mms mode");
  }

  for (const auto& [sec, entries] : raw.sections) {
    if (sec == "physics" || sec == "run" || sec == "mesh" ||
        sec == "initial" || sec == "mms")
      continue;
    if (sec.rfind("boundary.", 0) != 0) {
      auto it = raw.section_lines.find(sec);
      raw.fail(it == raw.section_lines.end() ? 0 : it->second,
               "unknown section [" + sec + "]");
    }
    const std::string tag = sec.substr(9);
    if (tag.empty()) raw.fail(raw.section_lines.at(sec), "empty boundary tag");
    const Reader r(raw, sec);
    cfg.boundary.emplace(tag, parse_boundary(r, tag, cfg.params));
    r.check_no_unknown();
  }
  return cfg;
}

CaseConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path);
}

std::string CaseConfig::echo() const {
  std::ostringstream out;
  out << "[physics]\n";
  out << "rho = " << fmt3(params.rho) << "\n";
  out << "eta = " << fmt3(params.eta) << "\n";
  out << "sigma12 = " << fmt(params.sigma12) << "\n";
  out << "sigma13 = " << fmt(params.sigma13) << "\n";
  out << "sigma23 = " << fmt(params.sigma23) << "\n";
  out << "eps = " << fmt(params.eps) << "\n";
  out << "M0 = " << fmt(params.M0) << "\n";
  out << "c0 = " << fmt(params.c0) << "\n";
  out << "gravity = " << fmt3(params.gravity) << "\n";
  out << "density_floor = " << fmt(params.density_floor) << "\n";

  out << "\n[run]\n";
  out << "mode = "
      << (mode == RunMode::Simulate
              ? "simulate"
              : mode == RunMode::MmsConvergence ? "mms" : "smoke")
      << "\n";
  out << "N = " << order << "\n";
  out << "dt = " << fmt(dt) << "\n";
  out << "t_final = " << fmt(t_final) << "\n";
  out << "S0 = " << fmt(S0) << "\n";
  out << "checkpoint_cadence = " << checkpoint_cadence << "\n";
  out << "output_prefix = " << output_prefix << "\n";

  if (mode != RunMode::MmsConvergence) {
    out << "\n[mesh]\n";
    if (mesh.is_box) {
      const BoxSpec& b = mesh.box;
      out << "box = " << b.nx << " " << b.ny << " " << b.nz << "\n";
      out << "extent = " << fmt(b.x0) << " " << fmt(b.x1) << " " << fmt(b.y0)
          << " " << fmt(b.y1) << " " << fmt(b.z0) << " " << fmt(b.z1) << "\n";
      out << "periodic = " << b.periodic[0] << " " << b.periodic[1] << " "
          << b.periodic[2] << "\n";
      out << "tags =";
      for (const auto& t : b.tags) out << " " << t;
      out << "\n";
    } else {
      out << "file = " << mesh.path << "\n";
    }

    out << "\n[initial]\n";
    switch (initial.kind) {
      case InitialKind::Uniform:
        out << "kind = uniform\n";
        out << "c = " << fmt(initial.c1) << " " << fmt(initial.c2) << "\n";
        out << "velocity = " << fmt3(initial.velocity) << "\n";
        out << "pressure = " << fmt(initial.pressure) << "\n";
        break;
      case InitialKind::Channel:
        out << "kind = channel\n";
        out << "c = " << fmt(initial.c1) << " " << fmt(initial.c2) << "\n";
        out << "vmax = " << fmt(initial.vmax) << "\n";
        out << "pressure = " << fmt(initial.pressure) << "\n";
        break;
      case InitialKind::Manufactured:
        out << "kind = manufactured\n";
        out << "two_phase = " << (initial.two_phase ? 1 : 0) << "\n";
        break;
      case InitialKind::Checkpoint:
        out << "kind = checkpoint\n";
        out << "file = " << initial.checkpoint_path << "\n";
        break;
    }
  } else {
    out << "\n[mms]\n";
    out << "two_phase = " << (mms.two_phase ? 1 : 0) << "\n";
    out << "meshes =";
    for (int m : mms.meshes) out << " " << m;
    out << "\n";
    out << "orders =";
    for (int N : mms.orders) out << " " << N;
    out << "\n";
  }

  for (const auto& [tag, bc] : boundary) {
    out << "\n[boundary." << tag << "]\n";
    switch (bc.kind) {
      case BoundaryKind::Wall:
        out << "kind = wall\n";
        out << "theta12_rad = " << fmt(bc.wall.theta12) << "\n";
        out << "theta13_rad = " << fmt(bc.wall.theta13) << "\n";
        out << "theta23_rad = " << fmt(bc.wall.theta23) << "\n";
        break;
      case BoundaryKind::Outflow:
        out << "kind = outflow\n";
        out << "pressure = " << fmt(bc.outflow.ambient_pressure) << "\n";
        break;
      case BoundaryKind::Inflow: {
        const InflowSpec& in = bc.inflow;
        out << "kind = inflow\n";
        out << "section = "
            << (in.section == InflowSpec::Section::Circular ? "circular"
                                                            : "channel")
            << "\n";
        out << "radius = " << fmt(in.radius) << "\n";
        out << "center = " << fmt3(in.center) << "\n";
        out << "axis = " << fmt3(in.axis) << "\n";
        out << "up = " << fmt3(in.up) << "\n";
        out << "superficial = " << fmt3(in.superficial) << "\n";
        out << "slip12 = " << fmt(in.slip12) << "\n";
        out << "slip23 = " << fmt(in.slip23) << "\n";
        out << "prescribed = " << (in.prescribed ? 1 : 0) << "\n";
        out << "vmax = " << fmt3(in.vmax) << "\n";
        out << "y12 = " << fmt(in.y12) << "\n";
        out << "y23 = " << fmt(in.y23) << "\n";
        out << "layer_eps = " << fmt(in.layer_eps) << "\n";
        break;
      }
    }
  }
  return out.str();
}

std::uint64_t CaseConfig::hash() const {
  const std::string text = echo();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

BoundarySet make_boundary_set(const CaseConfig& config, const Mesh& mesh) {
  BoundarySet set;
  std::set<std::string> mesh_tags(mesh.tag_names.begin(),
                                  mesh.tag_names.end());
  for (const auto& [tag, bc] : config.boundary) {
    if (!mesh_tags.count(tag))
      throw ConfigError("boundary tag '" + tag +
                        "' is configured but does not exist in the mesh");
    set.by_tag.emplace(mesh.tag_id(tag), bc);
  }
  for (const auto& tag : mesh.tag_names)
    if (!config.boundary.count(tag))
      throw ConfigError("mesh boundary tag '" + tag +
                        "' has no configured condition");
  return set;
}

}  // namespace triflow
