#include "ddiff/config.hpp"

#include "ddiff/errors.hpp"
#include "ddiff/presets.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string>

namespace ddiff {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where)
{
  if (!j.is_object())
    throw ConfigError(where + ": expected an object");
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known)
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const json& j, const char* key, const std::string& where)
{
  const json& v = j.at(key);
  if (!v.is_number())
    throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

template <class T>
void read_number(const json& j, const char* key, const std::string& where, T& out)
{
  if (!j.contains(key))
    return;
  const json& v = j.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ConfigError(where + "." + key + ": expected a nonnegative integer");
    out = v.get<T>();
  } else {
    if (!v.is_number())
      throw ConfigError(where + "." + key + ": expected a number");
    out = v.get<T>();
  }
}

std::vector<double> read_times(const json& j, const std::string& where)
{
  if (!j.is_array())
    throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const json& v : j) {
    if (!v.is_number())
      throw ConfigError(where + ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

IcSpec parse_ic(const json& j)
{
  require_object(j, "ic");
  if (j.contains("preset")) {
    reject_unknown(j, "ic", {"preset"});
    if (!j["preset"].is_string())
      throw ConfigError("ic.preset: expected a string");
    return preset_config(j["preset"].get<std::string>()).ic;
  }
  reject_unknown(j, "ic", {"gaussians", "rho_inf"});
  if (!j.contains("gaussians") || !j.contains("rho_inf"))
    throw ConfigError("ic: need either 'preset' or both 'gaussians' and 'rho_inf'");
  IcSpec ic;
  ic.rho_inf = get_number(j, "rho_inf", "ic");
  if (!(ic.rho_inf > 0.0))
    throw ConfigError("ic.rho_inf: must be positive");
  if (!j["gaussians"].is_array() || j["gaussians"].empty())
    throw ConfigError("ic.gaussians: expected a nonempty array");
  for (const json& g : j["gaussians"]) {
    require_object(g, "ic.gaussians[]");
    reject_unknown(g, "ic.gaussians[]", {"amplitude", "exponent", "center"});
    GaussianTerm t;
    t.amplitude = get_number(g, "amplitude", "ic.gaussians[]");
    t.exponent = get_number(g, "exponent", "ic.gaussians[]");
    const json& c = g.at("center");
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
      throw ConfigError("ic.gaussians[].center: expected [x, y]");
    t.center = {c[0].get<double>(), c[1].get<double>()};
    ic.gaussians.push_back(t);
  }
  return ic;
}

} // namespace

json stepper_to_json(const StepperConfig& s)
{
  return json{{"tau_init", s.tau_init},
              {"tau_min", s.tau_min},
              {"tau_max", s.tau_max},
              {"picard_tol", s.picard_tol},
              {"picard_max", s.picard_max},
              {"accept_tol", s.accept_tol},
              {"growth_iter_threshold", s.growth_iter_threshold},
              {"grow_factor", s.grow_factor},
              {"shrink_factor", s.shrink_factor},
              {"lin_tol", s.lin_tol},
              {"lin_max_iter", s.lin_max_iter},
              {"anderson_depth", s.anderson_depth},
              {"newton", s.newton}};
}

ExperimentConfig config_from_json(const json& j)
{
  try {
    require_object(j, "config");
    reject_unknown(j, "config",
                   {"flux", "grid", "ic", "stepper", "t_end", "snapshot_times", "outputs",
                    "segregation_threshold", "oracle"});
    if (!j.contains("ic"))
      throw ConfigError("config: missing 'ic'");

    ExperimentConfig c;
    if (j.contains("flux")) {
      const json& f = j["flux"];
      require_object(f, "flux");
      reject_unknown(f, "flux", {"rho_cr", "kappa", "scale"});
      read_number(f, "rho_cr", "flux", c.flux.rho_cr);
      read_number(f, "kappa", "flux", c.flux.kappa);
      read_number(f, "scale", "flux", c.flux.scale);
    }
    if (j.contains("grid")) {
      const json& g = j["grid"];
      require_object(g, "grid");
      reject_unknown(g, "grid", {"x_min", "x_max", "y_min", "y_max", "nx", "ny"});
      read_number(g, "x_min", "grid", c.grid.x_min);
      read_number(g, "x_max", "grid", c.grid.x_max);
      read_number(g, "y_min", "grid", c.grid.y_min);
      read_number(g, "y_max", "grid", c.grid.y_max);
      read_number(g, "nx", "grid", c.grid.nx);
      read_number(g, "ny", "grid", c.grid.ny);
    }
    c.ic = parse_ic(j["ic"]);
    if (j.contains("stepper")) {
      const json& s = j["stepper"];
      require_object(s, "stepper");
      reject_unknown(s, "stepper",
                     {"tau_init", "tau_min", "tau_max", "picard_tol", "picard_max", "accept_tol",
                      "growth_iter_threshold", "grow_factor", "shrink_factor", "lin_tol", "lin_max_iter",
                      "anderson_depth", "newton"});
      read_number(s, "tau_init", "stepper", c.stepper.tau_init);
      read_number(s, "tau_min", "stepper", c.stepper.tau_min);
      read_number(s, "tau_max", "stepper", c.stepper.tau_max);
      read_number(s, "picard_tol", "stepper", c.stepper.picard_tol);
      read_number(s, "picard_max", "stepper", c.stepper.picard_max);
      read_number(s, "accept_tol", "stepper", c.stepper.accept_tol);
      read_number(s, "growth_iter_threshold", "stepper", c.stepper.growth_iter_threshold);
      read_number(s, "grow_factor", "stepper", c.stepper.grow_factor);
      read_number(s, "shrink_factor", "stepper", c.stepper.shrink_factor);
      read_number(s, "lin_tol", "stepper", c.stepper.lin_tol);
      read_number(s, "lin_max_iter", "stepper", c.stepper.lin_max_iter);
      read_number(s, "anderson_depth", "stepper", c.stepper.anderson_depth);
      if (s.contains("newton")) {
        if (!s["newton"].is_boolean())
          throw ConfigError("stepper.newton: expected a boolean");
        c.stepper.newton = s["newton"].get<bool>();
      }
    }
    read_number(j, "t_end", "config", c.t_end);
    if (j.contains("snapshot_times"))
      c.snapshot_times = read_times(j["snapshot_times"], "snapshot_times");
    if (j.contains("outputs")) {
      if (!j["outputs"].is_string())
        throw ConfigError("outputs: expected a string");
      c.outputs = j["outputs"].get<std::string>();
    }
    if (j.contains("segregation_threshold") && !j["segregation_threshold"].is_null())
      c.segregation_threshold = get_number(j, "segregation_threshold", "config");
    if (j.contains("oracle")) {
      const json& o = j["oracle"];
      require_object(o, "oracle");
      reject_unknown(o, "oracle", {"n_cells", "times"});
      read_number(o, "n_cells", "oracle", c.oracle.n_cells);
      if (o.contains("times"))
        c.oracle.times = read_times(o["times"], "oracle.times");
    }

    // Semantic validation surfaces as ConfigError too.
    c.flux.make();
    c.grid.make();
    c.stepper.validate();
    if (!(c.t_end >= 0.0))
      throw ConfigError("t_end: must be nonnegative");
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& c)
{
  json ic;
  // A preset name only stands for the datum while it is left unmodified.
  if (!c.ic.preset.empty() && preset_config(c.ic.preset).ic == c.ic) {
    ic = json{{"preset", c.ic.preset}};
  } else {
    json gs = json::array();
    for (const GaussianTerm& g : c.ic.gaussians)
      gs.push_back(json{{"amplitude", g.amplitude},
                        {"exponent", g.exponent},
                        {"center", json::array({g.center[0], g.center[1]})}});
    ic = json{{"gaussians", gs}, {"rho_inf", c.ic.rho_inf}};
  }
  json j{{"flux", {{"rho_cr", c.flux.rho_cr}, {"kappa", c.flux.kappa}, {"scale", c.flux.scale}}},
         {"grid",
          {{"x_min", c.grid.x_min},
           {"x_max", c.grid.x_max},
           {"y_min", c.grid.y_min},
           {"y_max", c.grid.y_max},
           {"nx", c.grid.nx},
           {"ny", c.grid.ny}}},
         {"ic", ic},
         {"stepper", stepper_to_json(c.stepper)},
         {"t_end", c.t_end},
         {"snapshot_times", c.snapshot_times},
         {"outputs", c.outputs},
         {"oracle", {{"n_cells", c.oracle.n_cells}, {"times", c.oracle.times}}}};
  j["segregation_threshold"] = c.segregation_threshold ? json(*c.segregation_threshold) : json(nullptr);
  return j;
}

ExperimentConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

} // namespace ddiff
