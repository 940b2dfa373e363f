#include "triflow/solution_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace triflow {

namespace {

constexpr char kMagic[8] = {'T', 'R', 'I', 'F', 'C', 'K', 'P', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
void get(std::istream& in, T& v, const std::string& path) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError("truncated checkpoint file '" + path + "'");
}

double node_density(const GlobalField& Q, int e, int q,
                    const PhaseParams& params) {
  return mixture_density(Q.at(e, 0, q), Q.at(e, 1, q), params);
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof kMagic);
  put(out, ckpt.step);
  put(out, ckpt.time);
  put(out, ckpt.monitor);
  put(out, ckpt.config_hash);
  const std::int32_t dims[3] = {ckpt.field.nelem, ckpt.field.nvar,
                                ckpt.field.npts};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(ckpt.field.data.data()),
            static_cast<std::streamsize>(ckpt.field.data.size() *
                                         sizeof(double)));
  if (!out) throw IoError("write failure on '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint file '" + path + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw IoError("'" + path + "' is not a checkpoint file");
  Checkpoint ckpt;
  get(in, ckpt.step, path);
  get(in, ckpt.time, path);
  get(in, ckpt.monitor, path);
  get(in, ckpt.config_hash, path);
  std::int32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in) throw IoError("truncated checkpoint file '" + path + "'");
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
    throw IoError("corrupt dimensions in checkpoint file '" + path + "'");
  ckpt.field = GlobalField(dims[0], dims[1], dims[2]);
  in.read(reinterpret_cast<char*>(ckpt.field.data.data()),
          static_cast<std::streamsize>(ckpt.field.data.size() *
                                       sizeof(double)));
  if (!in) throw IoError("truncated checkpoint file '" + path + "'");
  char extra;
  if (in.read(&extra, 1))
    throw IoError("trailing bytes in checkpoint file '" + path + "'");
  return ckpt;
}

void write_csv(const std::string& path, const Mesh& mesh,
               const GlobalField& Q, const PhaseParams& params) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  std::fputs("x,y,z,c1,c2,c3,u,v,w,p,rho\n", f);
  for (int e = 0; e < mesh.nelem; ++e) {
    const auto& g = mesh.geom[e];
    for (int q = 0; q < mesh.npts; ++q) {
      const double c1 = Q.at(e, 0, q), c2 = Q.at(e, 1, q);
      const double rho = node_density(Q, e, q, params);
      std::fprintf(f,
                   "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                   "%.17g,%.17g\n",
                   g.x[q], g.y[q], g.z[q], c1, c2, 1.0 - c1 - c2,
                   Q.at(e, 2, q) / rho, Q.at(e, 3, q) / rho,
                   Q.at(e, 4, q) / rho, Q.at(e, 5, q), rho);
    }
  }
  const bool bad = std::ferror(f) != 0;
  std::fclose(f);
  if (bad) throw IoError("write failure on '" + path + "'");
}

void write_vtk(const std::string& path, const Mesh& mesh,
               const GlobalField& Q, const PhaseParams& params) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const int np = mesh.order + 1;
  const long npoints = static_cast<long>(mesh.nelem) * mesh.npts;
  const long ncells =
      static_cast<long>(mesh.nelem) * mesh.order * mesh.order * mesh.order;

  out << "# vtk DataFile Version 3.0\n"
      << "three-phase flow solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << npoints << " double\n";
  for (int e = 0; e < mesh.nelem; ++e) {
    const auto& g = mesh.geom[e];
    for (int q = 0; q < mesh.npts; ++q)
      out << g.x[q] << " " << g.y[q] << " " << g.z[q] << "\n";
  }

  out << "CELLS " << ncells << " " << 9 * ncells << "\n";
  for (int e = 0; e < mesh.nelem; ++e) {
    const long base = static_cast<long>(e) * mesh.npts;
    for (int k = 0; k < mesh.order; ++k)
      for (int j = 0; j < mesh.order; ++j)
        for (int i = 0; i < mesh.order; ++i) {
          // VTK hexahedron ordering: bottom quad counterclockwise, then top.
          const long c[8] = {base + node_index(i, j, k, np),
                             base + node_index(i + 1, j, k, np),
                             base + node_index(i + 1, j + 1, k, np),
                             base + node_index(i, j + 1, k, np),
                             base + node_index(i, j, k + 1, np),
                             base + node_index(i + 1, j, k + 1, np),
                             base + node_index(i + 1, j + 1, k + 1, np),
                             base + node_index(i, j + 1, k + 1, np)};
          out << 8;
          for (long id : c) out << " " << id;
          out << "\n";
        }
  }
  out << "CELL_TYPES " << ncells << "\n";
  for (long c = 0; c < ncells; ++c) out << 12 << "\n";

  out << "POINT_DATA " << npoints << "\n";
  const char* scalars[4] = {"c1", "c2", "c3", "pressure"};
  for (int s = 0; s < 4; ++s) {
    out << "SCALARS " << scalars[s] << " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < mesh.nelem; ++e)
      for (int q = 0; q < mesh.npts; ++q) {
        double v;
        if (s == 0)
          v = Q.at(e, 0, q);
        else if (s == 1)
          v = Q.at(e, 1, q);
        else if (s == 2)
          v = 1.0 - Q.at(e, 0, q) - Q.at(e, 1, q);
        else
          v = Q.at(e, 5, q);
        out << v << "\n";
      }
  }
  out << "SCALARS density double 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < mesh.nelem; ++e)
    for (int q = 0; q < mesh.npts; ++q)
      out << node_density(Q, e, q, params) << "\n";
  out << "VECTORS velocity double\n";
  for (int e = 0; e < mesh.nelem; ++e)
    for (int q = 0; q < mesh.npts; ++q) {
      const double rho = node_density(Q, e, q, params);
      out << Q.at(e, 2, q) / rho << " " << Q.at(e, 3, q) / rho << " "
          << Q.at(e, 4, q) / rho << "\n";
    }
  if (!out) throw IoError("write failure on '" + path + "'");
}

}  // namespace triflow
