#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "catdesign/policy_math.hpp"
#include "catdesign/pvcp.hpp"
#include "catdesign/search.hpp"
#include "catdesign/structure.hpp"
#include "catdesign/textify.hpp"

namespace catdesign {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SearchSection {
  SearchConfig params;  // reward/phys/seed/jobs are filled from the top level
  bool target_energy_set = false;
  std::optional<std::string> seed_structure;  // CIF path; relative to the config file
  MutationConfig mutation;
  PairPotentialParams surrogate;
};

/// One file shared by every command. Sections:
///   reward   {w_comp, w_parse, w_valid, w_phys}
///   phys     {hard_overlap_fraction, full_credit_fraction, vpa_min, vpa_max}
///   geometry {neighbor_scale}
///   grpo     {beta, epsilon}
///   mmtg     {lambda}
///   textify  {separator, no_contact, none}
///   validate {target}
///   search   {target_energy | seed_structure, target_composition, iterations, ...}
/// Unknown keys are rejected.
struct AppConfig {
  RewardWeights reward;
  PhysConfig phys;
  double neighbor_scale = 1.2;
  GrpoConfig grpo;
  MmtgConfig mmtg;
  TextTemplate textify;
  std::optional<CompositionVector> validate_target;
  SearchSection search;

  static AppConfig from_json(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir = {});
  static AppConfig load(const std::filesystem::path& path);

  /// Fully resolved values, defaults included.
  nlohmann::ordered_json to_json() const;
};

}  // namespace catdesign
