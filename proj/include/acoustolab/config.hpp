#pragma once

// JSON run configuration.  A config file describes the physical setup
// (domain, damping) plus one optional section per command; the runner rejects
// a command whose section is missing.  All validation errors are reported as
// ConfigInvalid with the offending field path, e.g. "domain.lx".

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acoustolab/geometry.hpp"
#include "acoustolab/grid.hpp"
#include "acoustolab/spectral.hpp"

namespace acoustolab {

struct SimulateParams {
  double t_final = 10.0;
  double dt = 0.01;
  std::uint64_t seed = 1;
};

struct SweepParams {
  double mu_min = 5.0;
  double mu_max = 60.0;
  double mu_step = 0.25;
  std::optional<double> cap;  // declare "bounded" when sup stays below this
  ResolventStrategy strategy = ResolventStrategy::Auto;
  double tol = 1e-8;
};

struct RayParams {
  Vec2 x{0, 0};
  Vec2 xi{1, 0};
  double s_max = 20.0;
  double sample_ds = 0.0;  // optional CSV sampling step; 0 = arcs/events only
};

struct GccParams {
  ControlRegion region = ControlRegion::boundary_collar(0.1);
  int n_samples = 2000;
  double s_max = 20.0;
  std::uint64_t seed = 0;
};

struct HusimiParams {
  std::vector<double> mus;
  double delta = 0.25;
};

struct Config {
  Domain domain = Domain::rectangle(1, 1);
  std::optional<Resolution> resolution;
  DampingField damping = DampingField::zero();
  std::optional<SimulateParams> simulate;
  std::optional<SweepParams> sweep;
  std::optional<std::vector<double>> quasimode_mus;
  std::optional<RayParams> ray;
  std::optional<GccParams> gcc;
  std::optional<HusimiParams> husimi;
};

Config parse_config_text(const std::string& text);
Config load_config_file(const std::string& path);

}  // namespace acoustolab
