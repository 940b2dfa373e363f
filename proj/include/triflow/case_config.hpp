#ifndef TRIFLOW_CASE_CONFIG_HPP
#define TRIFLOW_CASE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "triflow/boundary_conditions.hpp"
#include "triflow/mesh.hpp"

namespace triflow {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { Simulate, MmsConvergence, Smoke };
enum class InitialKind { Uniform, Channel, Manufactured, Checkpoint };

/// Mesh origin: either a native mesh file or an inline structured box.
struct MeshSource {
  bool is_box = false;
  std::string path;
  BoxSpec box;
};

struct InitialCondition {
  InitialKind kind = InitialKind::Uniform;
  double c1 = 1.0, c2 = 0.0;        ///< uniform concentrations
  Vec3 velocity{0.0, 0.0, 0.0};     ///< uniform velocity
  double pressure = 0.0;
  double vmax = 1.0;                ///< channel centerline speed
  bool two_phase = true;            ///< manufactured-case selector
  std::string checkpoint_path;      ///< restart source
};

struct MmsOptions {
  bool two_phase = true;
  std::vector<int> meshes;  ///< elements per direction
  std::vector<int> orders;  ///< polynomial orders
};

/// Fully resolved case description; every field has its effective value
/// (defaults applied) after parse_config.
struct CaseConfig {
  PhaseParams params;
  RunMode mode = RunMode::Simulate;
  MeshSource mesh;
  int order = 0;
  double dt = 0.0;
  double t_final = 0.0;
  double S0 = 8.0;
  int checkpoint_cadence = 100;
  std::string output_prefix = "out";
  InitialCondition initial;
  MmsOptions mms;
  /// Boundary conditions by tag name; ids are resolved against a mesh later.
  std::map<std::string, BoundaryCondition> boundary;

  /// Canonical text with every effective value; reparsing it reproduces the
  /// configuration exactly.
  std::string echo() const;
  /// FNV-1a hash of the canonical echo (used to stamp checkpoints).
  std::uint64_t hash() const;
};

/// Parses and validates the sectioned key-value grammar (see FORMATS.md).
/// Errors carry "path:line:" prefixes.
CaseConfig parse_config(const std::string& path);
CaseConfig parse_config_text(const std::string& text, const std::string& name);

/// Resolves the config's named boundary conditions against the mesh tags.
/// Every mesh tag must be configured and every configured tag must exist.
BoundarySet make_boundary_set(const CaseConfig& config, const Mesh& mesh);

}  // namespace triflow

#endif
