#include "acoustolab/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "acoustolab/errors.hpp"
#include "json.hpp"

namespace acoustolab {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigInvalid(path + ": " + what);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(path + "." + it.key(), "unknown field");
  }
}

const json& require(const json& j, const std::string& path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double positive_at(const json& j, const std::string& path) {
  const double v = number_at(j, path);
  if (!(v > 0)) fail(path, "expected a positive number");
  return v;
}

double positive_or(const json& j, const std::string& path, const char* key,
                   double fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : positive_at(*it, path + "." + key);
}

// like positive_or but admits zero (flat damping ramp)
double nonnegative_or(const json& j, const std::string& path, const char* key,
                      double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  const double v = number_at(*it, path + "." + key);
  if (v < 0) fail(path + "." + key, "expected a nonnegative number");
  return v;
}

std::uint64_t uint_or(const json& j, const std::string& path, const char* key,
                      std::uint64_t fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
    fail(path + "." + key, "expected a nonnegative integer");
  }
  return it->get<std::uint64_t>();
}

int int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Vec2 vec2_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [x, y]");
  return Vec2{number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
}

std::vector<double> numbers_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Domain parse_domain(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string kind = string_at(require(j, path, "kind"), path + ".kind");
  if (kind == "rectangle") {
    check_keys(j, path, {"kind", "lx", "ly"});
    return Domain::rectangle(positive_at(require(j, path, "lx"), path + ".lx"),
                             positive_at(require(j, path, "ly"), path + ".ly"));
  }
  if (kind == "disk") {
    check_keys(j, path, {"kind", "rout"});
    return Domain::disk(positive_at(require(j, path, "rout"), path + ".rout"));
  }
  if (kind == "annulus") {
    check_keys(j, path, {"kind", "rin", "rout"});
    const double rin = positive_at(require(j, path, "rin"), path + ".rin");
    const double rout = positive_at(require(j, path, "rout"), path + ".rout");
    if (rin >= rout) fail(path, "needs rin < rout");
    return Domain::annulus(rin, rout);
  }
  fail(path + ".kind", "expected rectangle|disk|annulus, got '" + kind + "'");
}

DampingField parse_damping(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string profile =
      string_at(require(j, path, "profile"), path + ".profile");
  if (profile == "zero") {
    check_keys(j, path, {"profile"});
    return DampingField::zero();
  }
  if (profile == "constant") {
    check_keys(j, path, {"profile", "amplitude"});
    return DampingField::constant(
        positive_at(require(j, path, "amplitude"), path + ".amplitude"));
  }
  if (profile == "boundary_collar") {
    check_keys(j, path, {"profile", "width", "amplitude", "exponent"});
    return DampingField::boundary_collar(
        positive_at(require(j, path, "width"), path + ".width"),
        positive_at(require(j, path, "amplitude"), path + ".amplitude"),
        nonnegative_or(j, path, "exponent", 2.0));
  }
  if (profile == "interior_ball") {
    check_keys(j, path, {"profile", "center", "radius", "amplitude", "exponent"});
    return DampingField::interior_ball(
        vec2_at(require(j, path, "center"), path + ".center"),
        positive_at(require(j, path, "radius"), path + ".radius"),
        positive_at(require(j, path, "amplitude"), path + ".amplitude"),
        nonnegative_or(j, path, "exponent", 2.0));
  }
  fail(path + ".profile",
       "expected zero|constant|boundary_collar|interior_ball, got '" + profile +
           "'");
}

ControlRegion parse_region(const json& j, const std::string& path,
                           const DampingField& damping) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string kind = string_at(require(j, path, "kind"), path + ".kind");
  if (kind == "ball") {
    check_keys(j, path, {"kind", "center", "radius"});
    return ControlRegion::ball(
        vec2_at(require(j, path, "center"), path + ".center"),
        positive_at(require(j, path, "radius"), path + ".radius"));
  }
  if (kind == "boundary_collar") {
    check_keys(j, path, {"kind", "width"});
    return ControlRegion::boundary_collar(
        positive_at(require(j, path, "width"), path + ".width"));
  }
  if (kind == "radial_band") {
    check_keys(j, path, {"kind", "r_lo", "r_hi"});
    const double lo = number_at(require(j, path, "r_lo"), path + ".r_lo");
    const double hi = positive_at(require(j, path, "r_hi"), path + ".r_hi");
    if (!(lo >= 0) || lo >= hi) fail(path, "needs 0 <= r_lo < r_hi");
    return ControlRegion::radial_band(lo, hi);
  }
  if (kind == "damping_support") {
    check_keys(j, path, {"kind"});
    return ControlRegion::damping_support(damping);
  }
  fail(path + ".kind",
       "expected ball|boundary_collar|radial_band|damping_support, got '" +
           kind + "'");
}

ResolventStrategy parse_strategy(const json& j, const std::string& path) {
  const std::string s = string_at(j, path);
  if (s == "auto") return ResolventStrategy::Auto;
  if (s == "dense") return ResolventStrategy::Dense;
  if (s == "iterative") return ResolventStrategy::Iterative;
  fail(path, "expected auto|dense|iterative, got '" + s + "'");
}

}  // namespace

Config parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigInvalid("top level: expected an object");
  check_keys(j, "config",
             {"domain", "resolution", "damping", "simulate", "sweep",
              "quasimode", "rays", "gcc", "husimi"});

  Config cfg;
  cfg.domain = parse_domain(require(j, "config", "domain"), "domain");

  if (const auto it = j.find("resolution"); it != j.end()) {
    const std::string path = "resolution";
    if (!it->is_object()) fail(path, "expected an object");
    check_keys(*it, path, {"n1", "n2"});
    Resolution res;
    res.n1 = int_at(require(*it, path, "n1"), path + ".n1");
    res.n2 = int_at(require(*it, path, "n2"), path + ".n2");
    if (res.n1 < 1 || res.n2 < 1) fail(path, "needs n1, n2 >= 1");
    cfg.resolution = res;
  }

  if (const auto it = j.find("damping"); it != j.end()) {
    cfg.damping = parse_damping(*it, "damping");
  }

  if (const auto it = j.find("simulate"); it != j.end()) {
    const std::string path = "simulate";
    if (!it->is_object()) fail(path, "expected an object");
    check_keys(*it, path, {"t_final", "dt", "seed"});
    SimulateParams p;
    p.t_final = positive_or(*it, path, "t_final", p.t_final);
    p.dt = positive_or(*it, path, "dt", p.dt);
    p.seed = uint_or(*it, path, "seed", p.seed);
    if (p.dt > p.t_final) fail(path + ".dt", "dt exceeds t_final");
    cfg.simulate = p;
  }

  if (const auto it = j.find("sweep"); it != j.end()) {
    const std::string path = "sweep";
    if (!it->is_object()) fail(path, "expected an object");
    check_keys(*it, path,
               {"mu_min", "mu_max", "mu_step", "cap", "strategy", "tol"});
    SweepParams p;
    p.mu_min = positive_or(*it, path, "mu_min", p.mu_min);
    p.mu_max = positive_or(*it, path, "mu_max", p.mu_max);
    p.mu_step = positive_or(*it, path, "mu_step", p.mu_step);
    if (p.mu_min > p.mu_max) fail(path, "needs mu_min <= mu_max");
    if (const auto c = it->find("cap"); c != it->end()) {
      p.cap = positive_at(*c, path + ".cap");
    }
    if (const auto s = it->find("strategy"); s != it->end()) {
      p.strategy = parse_strategy(*s, path + ".strategy");
    }
    p.tol = positive_or(*it, path, "tol", p.tol);
    cfg.sweep = p;
  }

  if (const auto it = j.find("quasimode"); it != j.end()) {
    const std::string path = "quasimode";
    if (!it->is_object()) fail(path, "expected an object");
    check_keys(*it, path, {"mu", "mus"});
    if (const auto m = it->find("mus"); m != it->end()) {
      cfg.quasimode_mus = numbers_at(*m, path + ".mus");
    } else {
      cfg.quasimode_mus = std::vector<double>{
          positive_at(require(*it, path, "mu"), path + ".mu")};
    }
    for (double mu : *cfg.quasimode_mus) {
      if (!(mu > 0)) fail(path, "frequencies must be positive");
    }
  }

  if (const auto it = j.find("rays"); it != j.end()) {
    const std::string path = "rays";
    if (!it->is_object()) fail(path, "expected an object");
    check_keys(*it, path, {"x", "xi", "s_max", "sample_ds"});
    RayParams p;
    p.x = vec2_at(require(*it, path, "x"), path + ".x");
    p.xi = vec2_at(require(*it, path, "xi"), path + ".xi");
    p.s_max = positive_or(*it, path, "s_max", p.s_max);
    p.sample_ds = positive_or(*it, path, "sample_ds", 0.0);
    cfg.ray = p;
  }

  if (const auto it = j.find("gcc"); it != j.end()) {
    const std::string path = "gcc";
    if (!it->is_object()) fail(path, "expected an object");
    check_keys(*it, path, {"region", "n_samples", "s_max", "seed"});
    GccParams p;
    p.region = parse_region(require(*it, path, "region"), path + ".region",
                            cfg.damping);
    if (const auto n = it->find("n_samples"); n != it->end()) {
      p.n_samples = int_at(*n, path + ".n_samples");
      if (p.n_samples < 1) fail(path + ".n_samples", "needs at least 1 sample");
    }
    p.s_max = positive_or(*it, path, "s_max", p.s_max);
    p.seed = uint_or(*it, path, "seed", p.seed);
    cfg.gcc = p;
  }

  if (const auto it = j.find("husimi"); it != j.end()) {
    const std::string path = "husimi";
    if (!it->is_object()) fail(path, "expected an object");
    check_keys(*it, path, {"mus", "delta"});
    HusimiParams p;
    p.mus = numbers_at(require(*it, path, "mus"), path + ".mus");
    for (double mu : p.mus) {
      if (!(mu > 0)) fail(path + ".mus", "frequencies must be positive");
    }
    p.delta = positive_or(*it, path, "delta", p.delta);
    cfg.husimi = p;
  }

  return cfg;
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigInvalid& e) {
    throw ConfigInvalid(path + ": " + e.what());
  }
}

}  // namespace acoustolab
