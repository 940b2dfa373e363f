#include "triflow/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "triflow/case_config.hpp"
#include "triflow/mesh_io.hpp"
#include "triflow/solution_io.hpp"
#include "triflow/time_integration.hpp"
#include "triflow/verification.hpp"

namespace triflow {

namespace {

constexpr const char* kVersion = "triflow 1.0.0";

Mesh make_mesh(const CaseConfig& cfg) {
  if (cfg.mesh.is_box) return build_box_mesh(cfg.mesh.box, cfg.order);
  return build_mesh_from_file(read_mesh_file(cfg.mesh.path), cfg.order);
}

void fill_initial(const CaseConfig& cfg, const Mesh& mesh, GlobalField& Q,
                  double& t0) {
  t0 = 0.0;
  Q = GlobalField(mesh.nelem, kNumVars, mesh.npts);
  const InitialCondition& ic = cfg.initial;
  switch (ic.kind) {
    case InitialKind::Uniform: {
      const double rho = mixture_density(ic.c1, ic.c2, cfg.params);
      for (int e = 0; e < mesh.nelem; ++e)
        for (int q = 0; q < mesh.npts; ++q) {
          Q.at(e, 0, q) = ic.c1;
          Q.at(e, 1, q) = ic.c2;
          for (int d = 0; d < 3; ++d)
            Q.at(e, 2 + d, q) = rho * ic.velocity[d];
          Q.at(e, 5, q) = ic.pressure;
        }
      break;
    }
    case InitialKind::Channel: {
      // Axial Poiseuille parabola over the mesh's z extent.
      double zmin = mesh.geom[0].z[0], zmax = zmin;
      for (const auto& g : mesh.geom)
        for (double z : g.z) {
          zmin = std::min(zmin, z);
          zmax = std::max(zmax, z);
        }
      const double zm = 0.5 * (zmin + zmax), h = 0.5 * (zmax - zmin);
      const double rho = mixture_density(ic.c1, ic.c2, cfg.params);
      for (int e = 0; e < mesh.nelem; ++e) {
        const auto& g = mesh.geom[e];
        for (int q = 0; q < mesh.npts; ++q) {
          const double zeta = (g.z[q] - zm) / h;
          Q.at(e, 0, q) = ic.c1;
          Q.at(e, 1, q) = ic.c2;
          Q.at(e, 2, q) = rho * ic.vmax * (1.0 - zeta * zeta);
          Q.at(e, 3, q) = 0.0;
          Q.at(e, 4, q) = 0.0;
          Q.at(e, 5, q) = ic.pressure;
        }
      }
      break;
    }
    case InitialKind::Manufactured: {
      const ManufacturedCase mc(cfg.params, ic.two_phase);
      for (int e = 0; e < mesh.nelem; ++e) {
        const auto& g = mesh.geom[e];
        for (int q = 0; q < mesh.npts; ++q) {
          const State s = mc.exact({g.x[q], g.y[q], g.z[q]}, 0.0);
          for (int v = 0; v < kNumVars; ++v) Q.at(e, v, q) = s[v];
        }
      }
      break;
    }
    case InitialKind::Checkpoint: {
      const Checkpoint ckpt = read_checkpoint(ic.checkpoint_path);
      if (ckpt.field.nelem != mesh.nelem || ckpt.field.nvar != kNumVars ||
          ckpt.field.npts != mesh.npts)
        throw IoError("checkpoint '" + ic.checkpoint_path +
                      "' does not match the mesh/order of this case");
      if (ckpt.config_hash != cfg.hash())
        std::cerr << "warning: restarting from a checkpoint written by a "
                     "different configuration\n";
      Q = ckpt.field;
      t0 = ckpt.time;
      break;
    }
  }
}

std::string checkpoint_path(const std::string& prefix, int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06d.ckpt", step);
  return prefix + buf;
}

int cmd_run(const std::string& config_path) {
  const CaseConfig cfg = parse_config(config_path);
  if (cfg.mode == RunMode::MmsConvergence) {
    std::cerr << "error: this case has mode = mms; use the 'mms' subcommand\n";
    return 3;
  }
  std::cout << "# effective configuration\n" << cfg.echo() << std::flush;

  const Mesh mesh = make_mesh(cfg);
  const BoundarySet bcs = make_boundary_set(cfg, mesh);
  const SpatialOperator op(mesh, cfg.params, bcs);

  const ScalarLaplacian* lap = nullptr;
  const ImplicitOperator* imp = nullptr;
  ScalarLaplacian lap_store(mesh);
  std::unique_ptr<ImplicitOperator> imp_store;
  if (cfg.params.M0 > 0.0) {
    lap = &lap_store;
    imp_store = std::make_unique<ImplicitOperator>(*lap, cfg.params, cfg.dt,
                                                   cfg.S0);
    imp = imp_store.get();
  }

  ImexConfig icfg;
  icfg.dt = cfg.dt;
  icfg.S0 = cfg.S0;
  icfg.t_final = cfg.t_final;
  icfg.checkpoint_cadence = cfg.checkpoint_cadence;
  ImexIntegrator integ(op, imp, icfg);
  if (cfg.initial.kind == InitialKind::Manufactured) {
    const ManufacturedCase mc(cfg.params, cfg.initial.two_phase);
    integ.set_source(
        [mc](const Vec3& x, double t) { return mc.source(x, t); });
  }

  GlobalField Q;
  double t0 = 0.0;
  fill_initial(cfg, mesh, Q, t0);

  const std::uint64_t hash = cfg.hash();
  const auto writer = [&](const StepMonitor& mon, const GlobalField& field) {
    Checkpoint ckpt;
    ckpt.step = mon.step;
    ckpt.time = mon.time;
    ckpt.monitor = mon.max_c1_residual;
    ckpt.config_hash = hash;
    ckpt.field = field;
    const std::string path = checkpoint_path(cfg.output_prefix, mon.step);
    write_checkpoint(path, ckpt);
    std::cout << "checkpoint " << path << " (t = " << mon.time << ")\n";
  };
  const std::vector<StepMonitor> monitors = integ.run(Q, t0, writer);

  {
    const std::string path = cfg.output_prefix + "_monitor.csv";
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    std::fputs("step,time,max_c1_residual,advective_cfl,acoustic_cfl\n", f);
    for (const auto& m : monitors)
      std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g\n", m.step, m.time,
                   m.max_c1_residual, m.advective_cfl, m.acoustic_cfl);
    std::fclose(f);
  }
  write_csv(cfg.output_prefix + "_final.csv", mesh, Q, cfg.params);
  write_vtk(cfg.output_prefix + "_final.vtk", mesh, Q, cfg.params);

  double peak = 0.0;
  for (const auto& m : monitors) peak = std::max(peak, m.max_c1_residual);
  std::cout << "completed " << monitors.size() << " steps; peak residual "
            << "monitor " << peak << "\n";
  return 0;
}

int cmd_mms(const std::string& config_path) {
  const CaseConfig cfg = parse_config(config_path);
  if (cfg.mode != RunMode::MmsConvergence) {
    std::cerr << "error: this case does not have mode = mms\n";
    return 3;
  }
  std::cout << "# effective configuration\n" << cfg.echo() << std::flush;
  const ManufacturedCase mc(cfg.params, cfg.mms.two_phase);
  const ConvergenceReport report = convergence_study(
      mc, cfg.mms.meshes, cfg.mms.orders, cfg.dt, cfg.t_final, cfg.S0);
  std::cout << "\n" << report.to_text();
  const std::string path = cfg.output_prefix + "_mms.csv";
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  const std::string csv = report.to_csv();
  std::fwrite(csv.data(), 1, csv.size(), f);
  std::fclose(f);
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_check_mesh(const std::string& mesh_path, int order) {
  const MeshFile file = read_mesh_file(mesh_path);
  if (order <= 0) order = std::max(file.ngeo, 2);
  const Mesh mesh = build_mesh_from_file(file, order);
  std::cout << "mesh: " << mesh.nelem << " elements, "
            << file.nodes.size() << " corner nodes, geometric order "
            << file.ngeo << "\n";
  std::cout << "faces: " << mesh.num_interior_faces() << " interior, "
            << mesh.num_boundary_faces() << " boundary\n";
  std::cout << "boundary tags:";
  for (const auto& t : mesh.tag_names) std::cout << " " << t;
  std::cout << "\n";
  std::cout << "metric identity residual: " << mesh.metric_identity_residual()
            << "\n";
  std::cout << "watertightness residual:  " << mesh.watertightness_residual()
            << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"High-order DG solver for three-phase incompressible flow"};
  app.require_subcommand(1);

  std::string config_path, mesh_path;
  int order = 0;

  CLI::App* run = app.add_subcommand("run", "Integrate a case in time");
  run->add_option("config", config_path, "case configuration file")
      ->required();
  CLI::App* mms = app.add_subcommand(
      "mms", "Manufactured-solution convergence study");
  mms->add_option("config", config_path, "case configuration file")
      ->required();
  CLI::App* chk = app.add_subcommand("check-mesh",
                                     "Validate a native mesh file");
  chk->add_option("mesh", mesh_path, "native mesh file")->required();
  chk->add_option("-N,--order", order,
                  "polynomial order for the metric check");
  CLI::App* ver = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ver->parsed()) {
      std::cout << kVersion << "\n";
      return 0;
    }
    if (chk->parsed()) return cmd_check_mesh(mesh_path, order);
    if (mms->parsed()) return cmd_mms(config_path);
    if (run->parsed()) return cmd_run(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const BoundaryConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const MeshFileError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 4;
  } catch (const TopologyError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 4;
  } catch (const DegenerateElementError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 2;
}

}  // namespace triflow
