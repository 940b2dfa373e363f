#ifndef TRIFLOW_SOLUTION_IO_HPP
#define TRIFLOW_SOLUTION_IO_HPP

#include <cstdint>
#include <string>

#include "triflow/dg_operators.hpp"

namespace triflow {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Binary restart record; write/read round-trips bit-exactly.
struct Checkpoint {
  std::int64_t step = 0;
  double time = 0.0;
  double monitor = 0.0;  ///< residual-monitor value at write time
  std::uint64_t config_hash = 0;
  GlobalField field;
};

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

/// Point-cloud CSV: one row per GL node with
/// x,y,z,c1,c2,c3,u,v,w,p,rho at full double precision.
void write_csv(const std::string& path, const Mesh& mesh,
               const GlobalField& Q, const PhaseParams& params);

/// Legacy plain-text unstructured visualization file: each element is split
/// into N^3 hexahedral cells on its GL nodes; point data carries the
/// concentrations, pressure, density and velocity.
void write_vtk(const std::string& path, const Mesh& mesh,
               const GlobalField& Q, const PhaseParams& params);

}  // namespace triflow

#endif
