#include "catdesign/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace catdesign {

namespace {

using Json = nlohmann::ordered_json;

void check_keys(const Json& obj, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(fmt::format("'{}' must be an object", section));
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError(fmt::format("unknown key '{}' in '{}'", key, section));
  }
}

template <typename T>
void read(const Json& obj, std::string_view section, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw ConfigError("expected a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError("expected an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (it->template get<long long>() < 0) throw ConfigError("expected a non-negative integer");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError("expected a string");
    }
    out = it->template get<T>();
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("{}.{}: {}", section, key, e.what()));
  }
}

CompositionVector read_composition(const Json& v, std::string_view where) {
  try {
    if (v.is_string()) return parse_formula(v.get<std::string>());
    if (v.is_object()) {
      CompositionVector c;
      for (const auto& [el, n] : v.items()) {
        if (!n.is_number_integer() || n.get<int>() <= 0)
          throw ConfigError(fmt::format("count for '{}' must be a positive integer", el));
        c[el] = n.get<int>();
      }
      if (c.empty()) throw ConfigError("empty composition");
      return c;
    }
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
  throw ConfigError(fmt::format("{}: expected a formula string or an element-count object", where));
}

Json composition_json(const CompositionVector& c) {
  Json j = Json::object();
  for (const auto& el : hill_order(c)) j[el] = c.at(el);
  return j;
}

}  // namespace

AppConfig AppConfig::from_json(const Json& j, const std::filesystem::path& base_dir) {
  AppConfig cfg;
  check_keys(j, "config", {"reward", "phys", "geometry", "grpo", "mmtg", "textify", "validate", "search"});

  if (auto it = j.find("reward"); it != j.end()) {
    check_keys(*it, "reward", {"w_comp", "w_parse", "w_valid", "w_phys"});
    read(*it, "reward", "w_comp", cfg.reward.comp);
    read(*it, "reward", "w_parse", cfg.reward.parse);
    read(*it, "reward", "w_valid", cfg.reward.valid);
    read(*it, "reward", "w_phys", cfg.reward.phys);
  }
  if (auto it = j.find("phys"); it != j.end()) {
    check_keys(*it, "phys", {"hard_overlap_fraction", "full_credit_fraction", "vpa_min", "vpa_max"});
    read(*it, "phys", "hard_overlap_fraction", cfg.phys.hard_overlap_fraction);
    read(*it, "phys", "full_credit_fraction", cfg.phys.full_credit_fraction);
    read(*it, "phys", "vpa_min", cfg.phys.vpa_min);
    read(*it, "phys", "vpa_max", cfg.phys.vpa_max);
  }
  if (auto it = j.find("geometry"); it != j.end()) {
    check_keys(*it, "geometry", {"neighbor_scale"});
    read(*it, "geometry", "neighbor_scale", cfg.neighbor_scale);
  }
  if (auto it = j.find("grpo"); it != j.end()) {
    check_keys(*it, "grpo", {"beta", "epsilon"});
    read(*it, "grpo", "beta", cfg.grpo.beta);
    read(*it, "grpo", "epsilon", cfg.grpo.epsilon);
  }
  if (auto it = j.find("mmtg"); it != j.end()) {
    check_keys(*it, "mmtg", {"lambda"});
    read(*it, "mmtg", "lambda", cfg.mmtg.lambda);
  }
  if (auto it = j.find("textify"); it != j.end()) {
    check_keys(*it, "textify", {"separator", "no_contact", "none"});
    read(*it, "textify", "separator", cfg.textify.separator);
    read(*it, "textify", "no_contact", cfg.textify.no_contact);
    read(*it, "textify", "none", cfg.textify.none);
  }
  if (auto it = j.find("validate"); it != j.end()) {
    check_keys(*it, "validate", {"target"});
    if (auto t = it->find("target"); t != it->end()) cfg.validate_target = read_composition(*t, "validate.target");
  }
  if (auto it = j.find("search"); it != j.end()) {
    const Json& s = *it;
    check_keys(s, "search",
               {"target_energy", "seed_structure", "target_composition", "lambda_energy", "energy_weight",
                "pvcp_weight", "iterations", "candidates_per_iteration", "pool_capacity", "initial_candidates",
                "init_retry_budget", "success_tolerance", "coord_jitter", "lattice_jitter", "defect_rates",
                "surrogate"});
    SearchConfig& p = cfg.search.params;
    cfg.search.target_energy_set = s.contains("target_energy");
    read(s, "search", "target_energy", p.target_energy);
    if (auto t = s.find("seed_structure"); t != s.end()) {
      if (!t->is_string()) throw ConfigError("search.seed_structure: expected a path string");
      std::filesystem::path path = t->get<std::string>();
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      cfg.search.seed_structure = path.string();
    }
    if (auto t = s.find("target_composition"); t != s.end())
      p.target_composition = read_composition(*t, "search.target_composition");
    read(s, "search", "lambda_energy", p.lambda_energy);
    read(s, "search", "energy_weight", p.energy_weight);
    read(s, "search", "pvcp_weight", p.pvcp_weight);
    read(s, "search", "iterations", p.iterations);
    read(s, "search", "candidates_per_iteration", p.candidates_per_iteration);
    read(s, "search", "pool_capacity", p.pool_capacity);
    read(s, "search", "initial_candidates", p.initial_candidates);
    read(s, "search", "init_retry_budget", p.init_retry_budget);
    read(s, "search", "success_tolerance", p.success_tolerance);
    read(s, "search", "coord_jitter", cfg.search.mutation.coord_jitter);
    read(s, "search", "lattice_jitter", cfg.search.mutation.lattice_jitter);
    if (auto d = s.find("defect_rates"); d != s.end()) {
      check_keys(*d, "search.defect_rates", {"syntax", "missing_field", "composition", "overlap"});
      DefectRates& r = cfg.search.mutation.defects;
      read(*d, "search.defect_rates", "syntax", r.syntax);
      read(*d, "search.defect_rates", "missing_field", r.missing_field);
      read(*d, "search.defect_rates", "composition", r.composition);
      read(*d, "search.defect_rates", "overlap", r.overlap);
    }
    if (auto d = s.find("surrogate"); d != s.end()) {
      check_keys(*d, "search.surrogate", {"depth_scale", "cutoff", "pair_cap"});
      read(*d, "search.surrogate", "depth_scale", cfg.search.surrogate.depth_scale);
      read(*d, "search.surrogate", "cutoff", cfg.search.surrogate.cutoff);
      read(*d, "search.surrogate", "pair_cap", cfg.search.surrogate.pair_cap);
    }
  }

  try {
    cfg.reward.validate();
    cfg.phys.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.neighbor_scale > 0)) throw ConfigError("geometry.neighbor_scale must be positive");
  if (!(cfg.grpo.beta >= 0)) throw ConfigError("grpo.beta must be >= 0");
  if (!(cfg.grpo.epsilon >= 0)) throw ConfigError("grpo.epsilon must be >= 0");
  if (!(cfg.mmtg.lambda > 0 && cfg.mmtg.lambda <= 1)) throw ConfigError("mmtg.lambda must lie in (0, 1]");
  cfg.search.params.reward = cfg.reward;
  cfg.search.params.phys = cfg.phys;
  return cfg;
}

AppConfig AppConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return from_json(j, path.parent_path());
}

Json AppConfig::to_json() const {
  Json j;
  j["reward"] = {{"w_comp", reward.comp}, {"w_parse", reward.parse}, {"w_valid", reward.valid},
                 {"w_phys", reward.phys}};
  j["phys"] = {{"hard_overlap_fraction", phys.hard_overlap_fraction},
               {"full_credit_fraction", phys.full_credit_fraction},
               {"vpa_min", phys.vpa_min},
               {"vpa_max", phys.vpa_max}};
  j["geometry"] = {{"neighbor_scale", neighbor_scale}};
  j["grpo"] = {{"beta", grpo.beta}, {"epsilon", grpo.epsilon}};
  j["mmtg"] = {{"lambda", mmtg.lambda}};
  j["textify"] = {{"separator", textify.separator}, {"no_contact", textify.no_contact}, {"none", textify.none}};
  j["validate"] = Json::object();
  if (validate_target) j["validate"]["target"] = composition_json(*validate_target);

  const SearchConfig& p = search.params;
  Json s;
  if (search.target_energy_set) s["target_energy"] = p.target_energy;
  if (search.seed_structure) s["seed_structure"] = *search.seed_structure;
  if (!p.target_composition.empty()) s["target_composition"] = composition_json(p.target_composition);
  s["lambda_energy"] = p.lambda_energy;
  s["energy_weight"] = p.energy_weight;
  s["pvcp_weight"] = p.pvcp_weight;
  s["iterations"] = p.iterations;
  s["candidates_per_iteration"] = p.candidates_per_iteration;
  s["pool_capacity"] = p.pool_capacity;
  s["initial_candidates"] = p.initial_candidates;
  s["init_retry_budget"] = p.init_retry_budget;
  s["success_tolerance"] = p.success_tolerance;
  s["coord_jitter"] = search.mutation.coord_jitter;
  s["lattice_jitter"] = search.mutation.lattice_jitter;
  s["defect_rates"] = {{"syntax", search.mutation.defects.syntax},
                       {"missing_field", search.mutation.defects.missing_field},
                       {"composition", search.mutation.defects.composition},
                       {"overlap", search.mutation.defects.overlap}};
  s["surrogate"] = {{"depth_scale", search.surrogate.depth_scale},
                    {"cutoff", search.surrogate.cutoff},
                    {"pair_cap", search.surrogate.pair_cap}};
  j["search"] = s;
  return j;
}

}  // namespace catdesign
