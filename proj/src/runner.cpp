#include "acoustolab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "acoustolab/config.hpp"
#include "acoustolab/csvio.hpp"
#include "acoustolab/errors.hpp"
#include "acoustolab/husimi.hpp"
#include "acoustolab/parallel.hpp"
#include "acoustolab/rays.hpp"
#include "acoustolab/semigroup.hpp"
#include "acoustolab/spectral.hpp"
#include "json.hpp"

namespace acoustolab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunContext {
  Config cfg;
  fs::path out;
  int workers = 1;
};

SystemOperator make_operator(const Config& cfg) {
  if (!cfg.resolution) {
    throw ConfigInvalid("resolution: required for this command");
  }
  return assemble(cfg.domain, *cfg.resolution, cfg.damping);
}

std::string path_str(const fs::path& dir, const char* name) {
  return (dir / name).string();
}

void write_summary(const RunContext& ctx, json& summary,
                   const std::string& command) {
  summary["command"] = command;
  summary["domain"] = ctx.cfg.domain.describe();
  summary["damping"] = ctx.cfg.damping.describe();
  if (ctx.cfg.resolution) {
    summary["resolution"] = {ctx.cfg.resolution->n1, ctx.cfg.resolution->n2};
  }
  std::ofstream out(ctx.out / "summary.json");
  out << summary.dump(2) << "\n";
}

const char* termination_name(RayTermination t) {
  switch (t) {
    case RayTermination::TimeLimit:
      return "time_limit";
    case RayTermination::CornerHit:
      return "corner_hit";
    case RayTermination::InfiniteOrderContact:
      return "infinite_order_contact";
  }
  return "?";
}

const char* contact_name(ContactKind k) {
  switch (k) {
    case ContactKind::Hyperbolic:
      return "hyperbolic";
    case ContactKind::Diffractive:
      return "diffractive";
    case ContactKind::Gliding:
      return "gliding";
    case ContactKind::HigherOrder:
      return "higher_order";
    case ContactKind::Corner:
      return "corner";
    case ContactKind::InfiniteOrder:
      return "infinite_order";
  }
  return "?";
}

int check_expectation(const RunOptions& opts, const std::string& actual,
                      std::initializer_list<const char*> allowed) {
  if (!opts.expect) return 0;
  bool known = false;
  for (const char* a : allowed) {
    if (*opts.expect == a) known = true;
  }
  if (!known) {
    std::string msg = "--expect '" + *opts.expect + "' not valid here (use";
    for (const char* a : allowed) msg += std::string(" ") + a;
    throw ConfigInvalid(msg + ")");
  }
  if (*opts.expect == actual) return 0;
  std::cout << "expectation FAILED: expected " << *opts.expect << ", got "
            << actual << "\n";
  return 1;
}

// -- simulate -----------------------------------------------------------------

int run_simulate(const RunContext& ctx, const RunOptions& opts) {
  if (!ctx.cfg.simulate) throw ConfigInvalid("simulate: section missing");
  const SimulateParams& p = *ctx.cfg.simulate;
  const SystemOperator op = make_operator(ctx.cfg);
  const KernelBasis kernel = kernel_basis(op);
  const VectorXd z0 = make_initial_state(op, p.seed);
  const Trajectory traj = evolve(op, z0, p.t_final, p.dt, &kernel);
  const DecayFit fit = fit_decay(traj);

  const double e0 = traj.energies.front();
  double defect_max = 0;
  CsvWriter csv(path_str(ctx.out, "trajectory.csv"),
                {"t", "energy", "damping_integral", "identity_defect",
                 "residual_norm"});
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double defect =
        std::abs(e0 - traj.energies[k] - traj.damping_integrals[k]);
    defect_max = std::max(defect_max, defect);
    csv.row({traj.times[k], traj.energies[k], traj.damping_integrals[k],
             defect, traj.residual_norms[k]});
  }

  json summary;
  summary["n_dof"] = op.n_dof;
  summary["kernel_dim"] = kernel.dim;
  summary["dt"] = p.dt;
  summary["t_final"] = p.t_final;
  summary["seed"] = p.seed;
  summary["energy_initial"] = e0;
  summary["energy_final"] = traj.energies.back();
  summary["identity_defect_max"] = defect_max;
  summary["identity_defect_max_rel"] = defect_max / e0;
  summary["residual_final"] = traj.residual_norms.back();
  summary["decay_fit"] = {{"C", fit.C},
                          {"c", fit.c},
                          {"r_squared", fit.r_squared},
                          {"degenerate", fit.degenerate}};
  write_summary(ctx, summary, "simulate");
  std::printf("simulate: E0=%.6g E(T)=%.6g identity_defect_max=%.3e "
              "kernel_dim=%d decay_c=%.4g (r2=%.4f)\n",
              e0, traj.energies.back(), defect_max, kernel.dim, fit.c,
              fit.r_squared);
  return check_expectation(opts, "", {});
}

// -- resolvent sweep ------------------------------------------------------------

std::vector<double> mu_grid_of(const SweepParams& p) {
  std::vector<double> mus;
  const long n = std::lround((p.mu_max - p.mu_min) / p.mu_step);
  for (long i = 0; i <= n; ++i) {
    const double mu = p.mu_min + double(i) * p.mu_step;
    if (mu > p.mu_max + 1e-12 * p.mu_step) break;
    mus.push_back(mu);
  }
  if (mus.empty()) mus.push_back(p.mu_min);
  return mus;
}

int run_sweep(const RunContext& ctx, const RunOptions& opts) {
  if (!ctx.cfg.sweep) throw ConfigInvalid("sweep: section missing");
  const SweepParams& p = *ctx.cfg.sweep;
  const SystemOperator op = make_operator(ctx.cfg);
  const KernelBasis kernel = kernel_basis(op);
  const ResolventSolver solver(op, kernel);
  const std::vector<double> mus = mu_grid_of(p);
  const SweepResult res =
      solver.sweep(mus, p.cap, p.strategy, ctx.workers, p.tol);

  CsvWriter csv(path_str(ctx.out, "sweep.csv"),
                {"mu", "resolvent_norm", "singular"});
  for (std::size_t i = 0; i < res.mus.size(); ++i) {
    csv.row_mixed({format_double(res.mus[i]),
                   res.singular[i] ? "inf" : format_double(res.norms[i]),
                   res.singular[i] ? "1" : "0"});
  }

  std::string verdict = "unbounded";
  if (!res.cap) {
    verdict = "no_cap";
  } else if (res.verdict_bounded && *res.verdict_bounded) {
    verdict = "bounded";
  }
  json summary;
  summary["n_dof"] = op.n_dof;
  summary["kernel_dim"] = kernel.dim;
  summary["mu_min"] = p.mu_min;
  summary["mu_max"] = p.mu_max;
  summary["mu_step"] = p.mu_step;
  summary["sup"] = res.sup;
  summary["argmax_mu"] = res.argmax_mu;
  summary["n_singular"] =
      int(std::count(res.singular.begin(), res.singular.end(), 1));
  if (res.cap) summary["cap"] = *res.cap;
  summary["verdict"] = verdict;
  write_summary(ctx, summary, "resolvent-sweep");
  std::printf("resolvent-sweep: sup=%.6g at mu=%.6g over %zu points (%s)\n",
              res.sup, res.argmax_mu, res.mus.size(), verdict.c_str());
  if (opts.expect && !res.cap) {
    throw ConfigInvalid("sweep.cap required when using --expect");
  }
  return check_expectation(opts, verdict, {"bounded", "unbounded"});
}

// -- quasimodes ------------------------------------------------------------------

int run_quasimode(const RunContext& ctx, const RunOptions& opts) {
  if (!ctx.cfg.quasimode_mus) throw ConfigInvalid("quasimode: section missing");
  const SystemOperator op = make_operator(ctx.cfg);
  const KernelBasis kernel = kernel_basis(op);
  const ResolventSolver solver(op, kernel);

  CsvWriter csv(path_str(ctx.out, "quasimodes.csv"),
                {"mu", "h", "sigma", "z_norm", "equipartition_defect",
                 "damping_overlap"});
  json modes = json::array();
  for (std::size_t i = 0; i < ctx.cfg.quasimode_mus->size(); ++i) {
    const double mu = (*ctx.cfg.quasimode_mus)[i];
    const Quasimode qm = solver.quasimode(mu);
    const double eq = equipartition_defect(op, qm);
    const double ov = damping_overlap(op, qm);
    csv.row({qm.mu, qm.h, qm.sigma, qm.z_norm, eq, ov});

    char name[64];
    std::snprintf(name, sizeof name, "quasimode_%03zu.csv", i);
    CsvWriter state(path_str(ctx.out, name),
                    {"dof", "kind", "x", "y", "re", "im"});
    for (int k = 0; k < op.n_dof; ++k) {
      const bool is_u = k < op.n_u;
      const Vec2 pos = is_u ? op.grid.faces[k].pos
                            : op.grid.cells[k - op.n_u].pos;
      state.row_mixed({std::to_string(k), is_u ? "u" : "r",
                       format_double(pos.x()), format_double(pos.y()),
                       format_double(qm.z[k].real()),
                       format_double(qm.z[k].imag())});
    }
    modes.push_back({{"mu", qm.mu},
                     {"h", qm.h},
                     {"sigma", qm.sigma},
                     {"equipartition_defect", eq},
                     {"damping_overlap", ov},
                     {"state_file", name}});
    std::printf("quasimode: mu=%.6g sigma=%.3e overlap=%.6g equipartition=%.6g\n",
                qm.mu, qm.sigma, ov, eq);
  }
  json summary;
  summary["n_dof"] = op.n_dof;
  summary["kernel_dim"] = kernel.dim;
  summary["modes"] = modes;
  write_summary(ctx, summary, "quasimode");
  return check_expectation(opts, "", {});
}

// -- rays --------------------------------------------------------------------

int run_rays(const RunContext& ctx, const RunOptions& opts) {
  if (!ctx.cfg.ray) throw ConfigInvalid("rays: section missing");
  RayParams p = *ctx.cfg.ray;
  const double nxi = p.xi.norm();
  if (nxi == 0) throw ConfigInvalid("rays.xi: must be nonzero");
  p.xi /= nxi;
  const GeneralizedRay ray =
      trace_generalized(ctx.cfg.domain, PhasePoint{p.x, p.xi}, p.s_max);

  CsvWriter arcs(path_str(ctx.out, "arcs.csv"),
                 {"type", "s0", "s_len", "x", "y", "xi_x", "xi_y", "radius",
                  "angle0", "direction"});
  for (const RayArc& a : ray.arcs) {
    arcs.row_mixed({a.type == ArcType::Interior ? "interior" : "gliding",
                    format_double(a.s0), format_double(a.s_len),
                    format_double(a.x.x()), format_double(a.x.y()),
                    format_double(a.xi.x()), format_double(a.xi.y()),
                    format_double(a.radius), format_double(a.angle0),
                    std::to_string(a.direction)});
  }
  CsvWriter events(path_str(ctx.out, "events.csv"),
                   {"s", "kind", "xi_d", "k", "alpha", "x", "y"});
  for (const RayEvent& e : ray.events) {
    events.row_mixed({format_double(e.s), contact_name(e.contact.kind),
                      format_double(e.contact.xi_d),
                      std::to_string(e.contact.k),
                      format_double(e.contact.alpha), format_double(e.x.x()),
                      format_double(e.x.y())});
  }
  if (p.sample_ds > 0) {
    CsvWriter samples(path_str(ctx.out, "ray_samples.csv"),
                      {"s", "x", "y", "xi_x", "xi_y"});
    for (double s = 0; s <= ray.s_end + 1e-12; s += p.sample_ds) {
      const PhasePoint q = ray_evaluate(ray, std::min(s, ray.s_end));
      samples.row({std::min(s, ray.s_end), q.x.x(), q.x.y(), q.xi.x(),
                   q.xi.y()});
    }
  }

  json summary;
  summary["s_max"] = ray.s_max;
  summary["s_end"] = ray.s_end;
  summary["termination"] = termination_name(ray.terminated_reason);
  summary["n_arcs"] = ray.arcs.size();
  summary["n_events"] = ray.events.size();
  write_summary(ctx, summary, "rays");
  std::printf("rays: %zu arcs, %zu events, s_end=%.6g (%s)\n", ray.arcs.size(),
              ray.events.size(), ray.s_end,
              termination_name(ray.terminated_reason));
  return check_expectation(opts, "", {});
}

// -- gcc --------------------------------------------------------------------

int run_gcc(const RunContext& ctx, const RunOptions& opts) {
  if (!ctx.cfg.gcc) throw ConfigInvalid("gcc: section missing");
  const GccParams& p = *ctx.cfg.gcc;
  const GccReport report = gcc_check(ctx.cfg.domain, p.region, p.n_samples,
                                     p.s_max, p.seed, ctx.workers);

  CsvWriter csv(path_str(ctx.out, "gcc_witnesses.csv"),
                {"x", "y", "xi_x", "xi_y"});
  for (const PhasePoint& w : report.violating_rays) {
    csv.row({w.x.x(), w.x.y(), w.xi.x(), w.xi.y()});
  }

  json summary;
  summary["region"] = p.region.describe();
  summary["verdict"] = to_string(report.verdict);
  summary["samples_total"] = report.samples_total;
  summary["n_violating"] = report.n_violating;
  summary["n_excluded_corner"] = report.n_excluded_corner;
  summary["n_excluded_infinite"] = report.n_excluded_infinite;
  summary["worst_escape_time"] = report.worst_escape_time;
  summary["s_max"] = report.s_max;
  summary["seed"] = report.seed;
  write_summary(ctx, summary, "gcc");
  std::printf(
      "gcc: %s (%d samples, %d violating, %d excluded, worst escape %.4g)\n",
      to_string(report.verdict), report.samples_total, report.n_violating,
      report.n_excluded_corner + report.n_excluded_infinite,
      report.worst_escape_time);
  return check_expectation(opts, to_string(report.verdict),
                           {"satisfied", "violated", "inconclusive"});
}

// -- husimi -------------------------------------------------------------------

int run_husimi(const RunContext& ctx, const RunOptions& opts) {
  if (!ctx.cfg.husimi) throw ConfigInvalid("husimi: section missing");
  const HusimiParams& p = *ctx.cfg.husimi;
  const SystemOperator op = make_operator(ctx.cfg);
  const KernelBasis kernel = kernel_basis(op);
  const std::vector<HusimiSummary> rows =
      measure_scan(op, kernel, p.mus, p.delta, ctx.workers);

  CsvWriter csv(path_str(ctx.out, "husimi.csv"),
                {"mu", "h", "shell_mass_defect", "damping_overlap",
                 "equipartition_defect", "total_mass"});
  json arr = json::array();
  for (const HusimiSummary& r : rows) {
    csv.row({r.mu, r.h, r.shell_mass_defect, r.damping_overlap,
             r.equipartition_defect, r.total_mass});
    arr.push_back({{"mu", r.mu},
                   {"h", r.h},
                   {"shell_mass_defect", r.shell_mass_defect},
                   {"damping_overlap", r.damping_overlap},
                   {"equipartition_defect", r.equipartition_defect},
                   {"total_mass", r.total_mass}});
    std::printf("husimi: mu=%.6g shell_defect=%.6g overlap=%.6g "
                "equipartition=%.6g mass=%.6g\n",
                r.mu, r.shell_mass_defect, r.damping_overlap,
                r.equipartition_defect, r.total_mass);
  }
  json summary;
  summary["n_dof"] = op.n_dof;
  summary["delta"] = p.delta;
  summary["scan"] = arr;
  write_summary(ctx, summary, "husimi");
  return check_expectation(opts, "", {});
}

// -- dump-matrix -----------------------------------------------------------------

void write_matrix_market(const fs::path& path, const SpMat& m) {
  std::ofstream out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      out << it.row() + 1 << " " << it.col() + 1 << " "
          << format_double(it.value()) << "\n";
    }
  }
}

int run_dump_matrix(const RunContext& ctx, const RunOptions& opts) {
  const SystemOperator op = make_operator(ctx.cfg);
  write_matrix_market(ctx.out / "ad.mtx", op.Ad);
  write_matrix_market(ctx.out / "ad_hat.mtx", op.Ad_hat);

  CsvWriter csv(path_str(ctx.out, "dofs.csv"),
                {"dof", "kind", "x", "y", "weight", "damping"});
  for (int k = 0; k < op.n_dof; ++k) {
    const bool is_u = k < op.n_u;
    const Vec2 pos =
        is_u ? op.grid.faces[k].pos : op.grid.cells[k - op.n_u].pos;
    csv.row_mixed({std::to_string(k), is_u ? "u" : "r",
                   format_double(pos.x()), format_double(pos.y()),
                   format_double(op.w[k]), format_double(op.d[k])});
  }
  json summary;
  summary["n_dof"] = op.n_dof;
  summary["n_u"] = op.n_u;
  summary["n_r"] = op.n_r;
  summary["nnz_ad"] = op.Ad.nonZeros();
  write_summary(ctx, summary, "dump-matrix");
  std::printf("dump-matrix: n_dof=%d nnz=%ld -> ad.mtx, ad_hat.mtx, dofs.csv\n",
              op.n_dof, long(op.Ad.nonZeros()));
  return check_expectation(opts, "", {});
}

}  // namespace

int run_command(const std::string& command, const RunOptions& opts) {
  RunContext ctx;
  ctx.cfg = load_config_file(opts.config_path);
  ctx.out = fs::path(opts.out_dir);
  fs::create_directories(ctx.out);
  ctx.workers = opts.workers > 0 ? opts.workers : default_workers();

  if (command == "simulate") return run_simulate(ctx, opts);
  if (command == "resolvent-sweep") return run_sweep(ctx, opts);
  if (command == "quasimode") return run_quasimode(ctx, opts);
  if (command == "rays") return run_rays(ctx, opts);
  if (command == "gcc") return run_gcc(ctx, opts);
  if (command == "husimi") return run_husimi(ctx, opts);
  if (command == "dump-matrix") return run_dump_matrix(ctx, opts);
  throw ConfigInvalid("unknown command '" + command + "'");
}

}  // namespace acoustolab
