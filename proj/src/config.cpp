#include "cos2q/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cos2q/error.hpp"
#include "cos2q/spectral.hpp"

namespace cos2q {

using nlohmann::json;

namespace {

const std::set<std::string> potential_models{"circuit", "beamsplitter", "sinsin", "sinsin-cos", "lowenergy",
                                             "lowenergy-corrected"};
const std::set<std::string> state_models{"circuit", "sinsin", "sinsin-cos", "lowenergy", "lowenergy-corrected"};

// Reads the keys of one JSON object and rejects whatever was not asked for.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw InvalidArgument(where() + "expected an object");
  }

  void read(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw InvalidArgument(where(key) + "expected a number");
      out = v->get<double>();
    }
  }
  void read(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw InvalidArgument(where(key) + "expected an integer");
      const auto wide = v->get<long long>();
      if (wide < -1000000000LL || wide > 1000000000LL) throw InvalidArgument(where(key) + "integer out of range");
      out = static_cast<int>(wide);
    }
  }
  void read(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw InvalidArgument(where(key) + "expected a string");
      out = v->get<std::string>();
    }
  }
  void read(const char* key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number()) throw InvalidArgument(where(key) + "expected a number or null");
      out = v->get<double>();
    }
  }
  void read(const char* key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw InvalidArgument(where(key) + "expected an array of numbers");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_number()) throw InvalidArgument(where(key) + "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  void read(const char* key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw InvalidArgument(where(key) + "expected an array of strings");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_string()) throw InvalidArgument(where(key) + "expected an array of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }

  template <class Body>
  void section(const char* key, Body body) {
    if (const json* v = find(key)) {
      Section child(*v, path_.empty() ? key : path_ + "." + key);
      body(child);
      child.finish();
    }
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) throw InvalidArgument(where(item.key().c_str()) + "unknown key");
    }
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }
  std::string where(const char* key = nullptr) const {
    std::string p = path_;
    if (key != nullptr) p = p.empty() ? key : p + "." + key;
    return p.empty() ? "config: " : "config key '" + p + "': ";
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw InvalidArgument("config key '" + key + "': " + what);
}

void require_finite(double v, const std::string& key) { require(std::isfinite(v), key, "must be finite"); }

void require_fractions(const std::vector<double>& values, const std::string& key) {
  for (double v : values) require(std::isfinite(v) && v >= 0.0 && v <= 1.0, key, "values must lie in [0, 1]");
}

}  // namespace

CircuitParams CircuitConfig::angular() const {
  CircuitParams p;
  p.alpha = angular_from_ghz(alpha_ghz);
  p.beta = angular_from_ghz(beta_ghz);
  p.zeta = angular_from_ghz(zeta_ghz);
  p.ec_theta = angular_from_ghz(ec_theta_ghz);
  p.ec_phi = angular_from_ghz(ec_phi_ghz);
  p.g = angular_from_ghz(g_ghz);
  if (alpha_g_ghz) p.alpha_g = angular_from_ghz(*alpha_g_ghz);
  p.beta_g = angular_from_ghz(beta_g_ghz);
  p.epsilon_g = angular_from_ghz(epsilon_g_ghz);
  p.epsilon_theta = angular_from_ghz(epsilon_theta_ghz);
  p.epsilon_phi = angular_from_ghz(epsilon_phi_ghz);
  return p;
}

std::vector<double> PhiGridConfig::angles() const { return angle_grid(start_over_pi * pi, stop_over_pi * pi, points); }

void ExperimentConfig::validate() const {
  const CircuitConfig& c = circuit;
  for (auto [v, key] : {std::pair{c.alpha_ghz, "circuit.alpha_ghz"}, {c.beta_ghz, "circuit.beta_ghz"},
                        {c.ec_theta_ghz, "circuit.ec_theta_ghz"}, {c.ec_phi_ghz, "circuit.ec_phi_ghz"}}) {
    require(std::isfinite(v) && v > 0.0, key, "must be positive");
  }
  require(std::isfinite(c.zeta_ghz) && c.zeta_ghz >= 0.0, "circuit.zeta_ghz", "must be non-negative");
  for (auto [v, key] : {std::pair{c.g_ghz, "circuit.g_ghz"}, {c.beta_g_ghz, "circuit.beta_g_ghz"},
                        {c.epsilon_g_ghz, "circuit.epsilon_g_ghz"}, {c.epsilon_theta_ghz, "circuit.epsilon_theta_ghz"},
                        {c.epsilon_phi_ghz, "circuit.epsilon_phi_ghz"}}) {
    require_finite(v, key);
  }
  if (c.alpha_g_ghz) require_finite(*c.alpha_g_ghz, "circuit.alpha_g_ghz");

  require(n_cut >= 1 && n_cut <= 100, "n_cut", "must lie in [1, 100]");
  const int dimension = (2 * n_cut + 1) * (2 * n_cut + 1);

  require(std::isfinite(phi_grid.start_over_pi) && std::isfinite(phi_grid.stop_over_pi) &&
              phi_grid.start_over_pi >= 0.0 && phi_grid.start_over_pi <= phi_grid.stop_over_pi &&
              phi_grid.stop_over_pi <= 1.0,
          "phi_grid", "need 0 <= start_over_pi <= stop_over_pi <= 1");
  require(phi_grid.points >= 1 && phi_grid.points <= 100000, "phi_grid.points", "must lie in [1, 100000]");

  require(spectrum.levels >= 2 && spectrum.levels < dimension, "spectrum.levels", "must lie in [2, dimension)");

  require(potential.grid_points >= 4 && potential.grid_points <= 4096, "potential.grid_points",
          "must lie in [4, 4096]");
  require_fractions(potential.phi_over_pi, "potential.phi_over_pi");
  for (const std::string& m : potential.models) {
    require(potential_models.count(m) == 1, "potential.models", "unknown model '" + m + "'");
  }

  require_fractions(eigenstates.phi_over_pi, "eigenstates.phi_over_pi");
  require(eigenstates.levels >= 1 && eigenstates.levels < dimension, "eigenstates.levels",
          "must lie in [1, dimension)");
  require(eigenstates.grid_points >= 4 && eigenstates.grid_points <= 1024, "eigenstates.grid_points",
          "must lie in [4, 1024]");
  require(eigenstates.basis == "phase" || eigenstates.basis == "charge", "eigenstates.basis",
          "must be 'phase' or 'charge'");
  require(state_models.count(eigenstates.model) == 1, "eigenstates.model", "unknown model '" + eigenstates.model + "'");

  require(std::isfinite(schedule.bound_factor) && schedule.bound_factor > 0.0, "schedule.bound_factor",
          "must be positive");
  require(schedule.resolution >= 64 && schedule.resolution <= 100000, "schedule.resolution", "must lie in [64, 100000]");
  require(schedule.m_count >= 3 && schedule.m_count < dimension, "schedule.m_count", "must lie in [3, dimension)");
  require(std::isfinite(schedule.rate_ceiling_rad_per_ns) && schedule.rate_ceiling_rad_per_ns > 0.0,
          "schedule.rate_ceiling_rad_per_ns", "must be positive");

  require(std::isfinite(gate.tolerance) && gate.tolerance > 0.0 && gate.tolerance <= 1.0, "gate.tolerance",
          "must lie in (0, 1]");
  require(gate.phase_samples >= 3 && gate.phase_samples % 2 == 1, "gate.phase_samples", "must be odd and >= 3");
  require(gate.snapshots == 0 || (gate.snapshots >= 2 && gate.snapshots <= 1000), "gate.snapshots",
          "must be 0 or lie in [2, 1000]");
  require(gate.grid_points >= 4 && gate.grid_points <= 1024, "gate.grid_points", "must lie in [4, 1024]");

  for (double r : sweep.zeta_over_ej) require(std::isfinite(r) && r >= 0.0, "sweep.zeta_over_ej", "must be >= 0");
  for (double e : sweep.ec_ghz) require(std::isfinite(e) && e > 0.0, "sweep.ec_ghz", "must be positive");
  require(std::isfinite(sweep.fidelity_threshold) && sweep.fidelity_threshold > 0.0 &&
              sweep.fidelity_threshold <= 1.0,
          "sweep.fidelity_threshold", "must lie in (0, 1]");

  require(std::isfinite(junction.gap_ghz) && junction.gap_ghz > 0.0, "junction.gap_ghz", "must be positive");
  require(!junction.transmissions_1.empty(), "junction.transmissions_1", "needs at least one channel");
  require(!junction.transmissions_2.empty(), "junction.transmissions_2", "needs at least one channel");
  require_fractions(junction.transmissions_1, "junction.transmissions_1");
  require_fractions(junction.transmissions_2, "junction.transmissions_2");
  require_fractions(junction.transmission_sweep, "junction.transmission_sweep");
  require_finite(junction.flux_over_pi, "junction.flux_over_pi");
  require(junction.m_max >= 2 && junction.m_max <= 64, "junction.m_max", "must lie in [2, 64]");
  require(junction.n_max >= 1, "junction.n_max", "must be positive");
  require(junction.grid_points >= 8 && junction.grid_points <= 100000, "junction.grid_points",
          "must lie in [8, 100000]");

  require_fractions(compare.dump_phi_over_pi, "compare.dump_phi_over_pi");
  require(compare.levels >= 3 && compare.levels < dimension, "compare.levels", "must lie in [3, dimension)");
  require(compare.grid_points >= 4 && compare.grid_points <= 1024, "compare.grid_points", "must lie in [4, 1024]");
}

ExperimentConfig parse_config(const json& document) {
  ExperimentConfig c;
  Section root(document, "");
  root.section("circuit", [&](Section& s) {
    s.read("alpha_ghz", c.circuit.alpha_ghz);
    s.read("beta_ghz", c.circuit.beta_ghz);
    s.read("zeta_ghz", c.circuit.zeta_ghz);
    s.read("ec_theta_ghz", c.circuit.ec_theta_ghz);
    s.read("ec_phi_ghz", c.circuit.ec_phi_ghz);
    s.read("g_ghz", c.circuit.g_ghz);
    s.read("alpha_g_ghz", c.circuit.alpha_g_ghz);
    s.read("beta_g_ghz", c.circuit.beta_g_ghz);
    s.read("epsilon_g_ghz", c.circuit.epsilon_g_ghz);
    s.read("epsilon_theta_ghz", c.circuit.epsilon_theta_ghz);
    s.read("epsilon_phi_ghz", c.circuit.epsilon_phi_ghz);
  });
  root.read("n_cut", c.n_cut);
  root.section("phi_grid", [&](Section& s) {
    s.read("start_over_pi", c.phi_grid.start_over_pi);
    s.read("stop_over_pi", c.phi_grid.stop_over_pi);
    s.read("points", c.phi_grid.points);
  });
  root.section("spectrum", [&](Section& s) { s.read("levels", c.spectrum.levels); });
  root.section("potential", [&](Section& s) {
    s.read("grid_points", c.potential.grid_points);
    s.read("phi_over_pi", c.potential.phi_over_pi);
    s.read("models", c.potential.models);
  });
  root.section("eigenstates", [&](Section& s) {
    s.read("phi_over_pi", c.eigenstates.phi_over_pi);
    s.read("levels", c.eigenstates.levels);
    s.read("grid_points", c.eigenstates.grid_points);
    s.read("basis", c.eigenstates.basis);
    s.read("model", c.eigenstates.model);
  });
  root.section("schedule", [&](Section& s) {
    s.read("bound_factor", c.schedule.bound_factor);
    s.read("resolution", c.schedule.resolution);
    s.read("m_count", c.schedule.m_count);
    s.read("rate_ceiling_rad_per_ns", c.schedule.rate_ceiling_rad_per_ns);
    s.read("file", c.schedule.file);
  });
  root.section("gate", [&](Section& s) {
    s.read("tolerance", c.gate.tolerance);
    s.read("phase_samples", c.gate.phase_samples);
    s.read("snapshots", c.gate.snapshots);
    s.read("grid_points", c.gate.grid_points);
  });
  root.section("sweep", [&](Section& s) {
    s.read("zeta_over_ej", c.sweep.zeta_over_ej);
    s.read("ec_ghz", c.sweep.ec_ghz);
    s.read("fidelity_threshold", c.sweep.fidelity_threshold);
  });
  root.section("junction", [&](Section& s) {
    s.read("gap_ghz", c.junction.gap_ghz);
    s.read("transmissions_1", c.junction.transmissions_1);
    s.read("transmissions_2", c.junction.transmissions_2);
    s.read("flux_over_pi", c.junction.flux_over_pi);
    s.read("m_max", c.junction.m_max);
    s.read("n_max", c.junction.n_max);
    s.read("transmission_sweep", c.junction.transmission_sweep);
    s.read("grid_points", c.junction.grid_points);
  });
  root.section("compare", [&](Section& s) {
    s.read("dump_phi_over_pi", c.compare.dump_phi_over_pi);
    s.read("levels", c.compare.levels);
    s.read("grid_points", c.compare.grid_points);
  });
  root.read("output_dir", c.output_dir);
  root.finish();
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json out;
  const CircuitConfig& k = c.circuit;
  out["circuit"] = {{"alpha_ghz", k.alpha_ghz},
                    {"beta_ghz", k.beta_ghz},
                    {"zeta_ghz", k.zeta_ghz},
                    {"ec_theta_ghz", k.ec_theta_ghz},
                    {"ec_phi_ghz", k.ec_phi_ghz},
                    {"g_ghz", k.g_ghz},
                    {"alpha_g_ghz", k.alpha_g_ghz ? json(*k.alpha_g_ghz) : json(nullptr)},
                    {"beta_g_ghz", k.beta_g_ghz},
                    {"epsilon_g_ghz", k.epsilon_g_ghz},
                    {"epsilon_theta_ghz", k.epsilon_theta_ghz},
                    {"epsilon_phi_ghz", k.epsilon_phi_ghz}};
  out["n_cut"] = c.n_cut;
  out["phi_grid"] = {{"start_over_pi", c.phi_grid.start_over_pi},
                     {"stop_over_pi", c.phi_grid.stop_over_pi},
                     {"points", c.phi_grid.points}};
  out["spectrum"] = {{"levels", c.spectrum.levels}};
  out["potential"] = {{"grid_points", c.potential.grid_points},
                      {"phi_over_pi", c.potential.phi_over_pi},
                      {"models", c.potential.models}};
  out["eigenstates"] = {{"phi_over_pi", c.eigenstates.phi_over_pi},
                        {"levels", c.eigenstates.levels},
                        {"grid_points", c.eigenstates.grid_points},
                        {"basis", c.eigenstates.basis},
                        {"model", c.eigenstates.model}};
  out["schedule"] = {{"bound_factor", c.schedule.bound_factor},
                     {"resolution", c.schedule.resolution},
                     {"m_count", c.schedule.m_count},
                     {"rate_ceiling_rad_per_ns", c.schedule.rate_ceiling_rad_per_ns},
                     {"file", c.schedule.file}};
  out["gate"] = {{"tolerance", c.gate.tolerance},
                 {"phase_samples", c.gate.phase_samples},
                 {"snapshots", c.gate.snapshots},
                 {"grid_points", c.gate.grid_points}};
  out["sweep"] = {{"zeta_over_ej", c.sweep.zeta_over_ej},
                  {"ec_ghz", c.sweep.ec_ghz},
                  {"fidelity_threshold", c.sweep.fidelity_threshold}};
  out["junction"] = {{"gap_ghz", c.junction.gap_ghz},
                     {"transmissions_1", c.junction.transmissions_1},
                     {"transmissions_2", c.junction.transmissions_2},
                     {"flux_over_pi", c.junction.flux_over_pi},
                     {"m_max", c.junction.m_max},
                     {"n_max", c.junction.n_max},
                     {"transmission_sweep", c.junction.transmission_sweep},
                     {"grid_points", c.junction.grid_points}};
  out["compare"] = {{"dump_phi_over_pi", c.compare.dump_phi_over_pi},
                    {"levels", c.compare.levels},
                    {"grid_points", c.compare.grid_points}};
  out["output_dir"] = c.output_dir;
  return out;
}

void apply_override(json& document, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidArgument("override '" + assignment + "': expected key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  if (!document.is_object()) throw InvalidArgument("override '" + assignment + "': config root is not an object");
  json* node = &document;
  std::size_t begin = 0;
  while (true) {
    const auto dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (key.empty()) throw InvalidArgument("override '" + assignment + "': empty path component");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    json& next = (*node)[key];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw InvalidArgument("override '" + assignment + "': '" + key + "' is not a section");
    node = &next;
    begin = dot + 1;
  }
}

json load_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path.string() + "'");
  std::stringstream text;
  text << in.rdbuf();
  json document = json::parse(text.str(), nullptr, false);
  if (document.is_discarded()) throw InvalidArgument("config file '" + path.string() + "' is not valid JSON");
  if (!document.is_object()) throw InvalidArgument("config file '" + path.string() + "' must hold a JSON object");
  return document;
}

}  // namespace cos2q
