#include "cfsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cfsim {

using nlohmann::json;

ConfigError::ConfigError(std::string field, const std::string& constraint)
    : std::invalid_argument("config field '" + field + "': " + constraint),
      field_(std::move(field)) {}

namespace {

void require(bool ok, const char* field, const std::string& constraint) {
  if (!ok) throw ConfigError(field, constraint);
}

bool plain_label(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') return false;
  }
  return true;
}

}  // namespace

void validate_config(SimConfig& c) {
  const GeometryConfig& g = c.geometry;
  require(g.num_aps >= 1, "L", "must be >= 1");
  require(g.antennas_per_ap >= 1, "M", "must be >= 1");
  require(g.num_ues >= 1, "K", "must be >= 1");
  require(static_cast<long long>(g.num_aps) * g.antennas_per_ap > g.num_ues,
          "M", "L*M must exceed K");
  require(g.urllc_fraction >= 0.0 && g.urllc_fraction <= 1.0, "alpha",
          "must lie in [0, 1]");
  require(g.side_km > 0.0, "D_km", "must be > 0");
  require(g.ap_height_m > g.ue_height_m && g.ue_height_m >= 0.0, "ap_height_m",
          "must exceed ue_height_m >= 0");
  require(g.asd_deg >= 0.0, "asd_deg", "must be >= 0");
  require(g.angle_samples >= 1, "angle_samples", "must be >= 1");

  require(c.tau_p >= 1, "tau_p", "must be >= 1");
  require(c.tau_c > c.tau_p, "tau_p", "must be smaller than tau_c");
  require(c.num_slots >= 1, "T", "must be >= 1");
  c.tau_d = c.tau_c - c.tau_p;
  c.n_d = c.tau_d / c.num_slots;
  require(c.n_d >= 1, "T", "floor((tau_c - tau_p) / T) must be >= 1");

  require(c.bandwidth_hz > 0.0, "B_Hz", "must be > 0");
  require(c.sigma2_d_w > 0.0, "sigma2_d_W", "must be > 0");
  require(c.sigma2_ul_w > 0.0, "sigma2_ul_W", "must be > 0");
  require(c.rho_max_w > 0.0, "rho_max_W", "must be > 0");
  require(c.p_ul_w > 0.0, "p_ul_W", "must be > 0");
  require(c.a_u >= 0.0 && c.a_u <= 1.0, "a_u", "must lie in [0, 1]");

  require(!c.policies.empty(), "policies", "must not be empty");
  std::set<std::string> names;
  for (const PowerPolicy& p : c.policies) {
    require(plain_label(p.name), "policies", "names must be non-empty plain labels");
    require(names.insert(p.name).second, "policies", "duplicate name " + p.name);
    require(p.omega > 0.0 && p.omega < 1.0, "omega", "must lie in (0, 1)");
    require(std::isfinite(p.nu), "nu", "must be finite");
  }

  require(c.b_bits >= 0 && c.b_bits <= 1000, "b_bits", "must lie in [0, 1000]");
  require(c.eps_target > 0.0 && c.eps_target <= 1.0, "eps_target",
          "must lie in (0, 1]");

  require(!c.strategies.empty(), "strategies", "must not be empty");
  require(std::set<Strategy>(c.strategies.begin(), c.strategies.end()).size() ==
              c.strategies.size(),
          "strategies", "duplicates");
  require(!c.precoders.empty(), "precoders", "must not be empty");
  require(std::set<PrecoderScheme>(c.precoders.begin(), c.precoders.end())
                  .size() == c.precoders.size(),
          "precoders", "duplicates");

  require(c.n_drops >= 1, "n_drops", "must be >= 1");
  require(c.n_blocks >= 2, "n_blocks", "must be >= 2");
  require(c.n_norm_blocks >= 1, "n_norm_blocks", "must be >= 1");
  require(c.n_mc_trials >= 1000, "n_mc_trials", "must be >= 1000");

  c.num_urllc =
      static_cast<int>(std::lround(g.urllc_fraction * g.num_ues));
}

SimConfig preset(std::string_view name) {
  SimConfig c;
  c.strategies.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
  c.precoders = {PrecoderScheme::kLpMmse, PrecoderScheme::kMr};
  c.policies = {{"FPA", 0.2, 0.5}, {"EPA", 0.5, 0.0}};
  if (name == "fig1") {
  } else if (name == "fig2") {
    c.precoders = {PrecoderScheme::kLpMmse};
  } else if (name == "fig3") {
    c.geometry.antennas_per_ap = 16;
    c.num_slots = 2;
    c.policies = {{"FPA", 0.8, 0.5}};
  } else {
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
  }
  validate_config(c);
  return c;
}

namespace {

template <typename T>
void read(const json& doc, const char* key, T& out) {
  auto it = doc.find(key);
  if (it == doc.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "has the wrong type");
  }
}

template <typename T>
std::vector<T> read_names(const json& doc, const char* key,
                          T (*parse)(std::string_view)) {
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw ConfigError(key, "must be an array of names");
  std::vector<T> out;
  for (const json& item : arr) {
    if (!item.is_string()) throw ConfigError(key, "must be an array of names");
    try {
      out.push_back(parse(item.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "preset",      "L",           "M",          "K",
      "alpha",       "D_km",        "ap_height_m", "ue_height_m",
      "asd_deg",     "angle_samples", "tau_c",    "tau_p",
      "T",           "B_Hz",        "sigma2_d_W", "sigma2_ul_W",
      "rho_max_W",   "p_ul_W",      "a_u",        "omega",
      "nu",          "policies",    "b_bits",     "eps_target",
      "strategies",  "precoders",   "n_drops",    "n_blocks",
      "n_norm_blocks", "n_mc_trials", "master_seed"};
  return keys;
}

}  // namespace

SimConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().contains(key)) throw ConfigError(key, "unknown key");
  }

  std::string base = "fig1";
  read(doc, "preset", base);
  SimConfig c = preset(base);
  GeometryConfig& g = c.geometry;
  read(doc, "L", g.num_aps);
  read(doc, "M", g.antennas_per_ap);
  read(doc, "K", g.num_ues);
  read(doc, "alpha", g.urllc_fraction);
  read(doc, "D_km", g.side_km);
  read(doc, "ap_height_m", g.ap_height_m);
  read(doc, "ue_height_m", g.ue_height_m);
  read(doc, "asd_deg", g.asd_deg);
  read(doc, "angle_samples", g.angle_samples);
  read(doc, "tau_c", c.tau_c);
  read(doc, "tau_p", c.tau_p);
  read(doc, "T", c.num_slots);
  read(doc, "B_Hz", c.bandwidth_hz);
  read(doc, "sigma2_d_W", c.sigma2_d_w);
  read(doc, "sigma2_ul_W", c.sigma2_ul_w);
  read(doc, "rho_max_W", c.rho_max_w);
  read(doc, "p_ul_W", c.p_ul_w);
  read(doc, "a_u", c.a_u);
  read(doc, "b_bits", c.b_bits);
  read(doc, "eps_target", c.eps_target);
  read(doc, "n_drops", c.n_drops);
  read(doc, "n_blocks", c.n_blocks);
  read(doc, "n_norm_blocks", c.n_norm_blocks);
  read(doc, "n_mc_trials", c.n_mc_trials);
  read(doc, "master_seed", c.master_seed);

  if (doc.contains("strategies")) {
    c.strategies = read_names<Strategy>(doc, "strategies", parse_strategy);
  }
  if (doc.contains("precoders")) {
    c.precoders = read_names<PrecoderScheme>(doc, "precoders", parse_precoder);
  }

  if (doc.contains("policies")) {
    if (doc.contains("omega") || doc.contains("nu")) {
      throw ConfigError("policies", "cannot be combined with omega/nu");
    }
    const json& arr = doc.at("policies");
    if (!arr.is_array()) throw ConfigError("policies", "must be an array");
    c.policies.clear();
    for (const json& item : arr) {
      if (!item.is_object()) throw ConfigError("policies", "entries must be objects");
      for (const auto& [key, value] : item.items()) {
        if (key != "name" && key != "omega" && key != "nu") {
          throw ConfigError("policies." + key, "unknown key");
        }
      }
      PowerPolicy p;
      p.name = "FPA";
      read(item, "name", p.name);
      read(item, "omega", p.omega);
      read(item, "nu", p.nu);
      c.policies.push_back(p);
    }
  } else if (doc.contains("omega") || doc.contains("nu")) {
    PowerPolicy p = c.policies.front();
    p.name = "FPA";
    read(doc, "omega", p.omega);
    read(doc, "nu", p.nu);
    c.policies = {p};
  }

  validate_config(c);
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<document>", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const SimConfig& c) {
  json doc;
  const GeometryConfig& g = c.geometry;
  doc["L"] = g.num_aps;
  doc["M"] = g.antennas_per_ap;
  doc["K"] = g.num_ues;
  doc["alpha"] = g.urllc_fraction;
  doc["D_km"] = g.side_km;
  doc["ap_height_m"] = g.ap_height_m;
  doc["ue_height_m"] = g.ue_height_m;
  doc["asd_deg"] = g.asd_deg;
  doc["angle_samples"] = g.angle_samples;
  doc["tau_c"] = c.tau_c;
  doc["tau_p"] = c.tau_p;
  doc["T"] = c.num_slots;
  doc["B_Hz"] = c.bandwidth_hz;
  doc["sigma2_d_W"] = c.sigma2_d_w;
  doc["sigma2_ul_W"] = c.sigma2_ul_w;
  doc["rho_max_W"] = c.rho_max_w;
  doc["p_ul_W"] = c.p_ul_w;
  doc["a_u"] = c.a_u;
  json policies = json::array();
  for (const PowerPolicy& p : c.policies) {
    policies.push_back({{"name", p.name}, {"omega", p.omega}, {"nu", p.nu}});
  }
  doc["policies"] = policies;
  doc["b_bits"] = c.b_bits;
  doc["eps_target"] = c.eps_target;
  json strategies = json::array();
  for (Strategy s : c.strategies) strategies.push_back(to_string(s));
  doc["strategies"] = strategies;
  json precoders = json::array();
  for (PrecoderScheme p : c.precoders) precoders.push_back(to_string(p));
  doc["precoders"] = precoders;
  doc["n_drops"] = c.n_drops;
  doc["n_blocks"] = c.n_blocks;
  doc["n_norm_blocks"] = c.n_norm_blocks;
  doc["n_mc_trials"] = c.n_mc_trials;
  doc["master_seed"] = c.master_seed;
  return doc.dump(2);
}

}  // namespace cfsim
