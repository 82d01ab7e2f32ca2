#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "catdesign/cif.hpp"
#include "catdesign/elements.hpp"
#include "catdesign/structure.hpp"

namespace catdesign {

/// Weights of the parse / valid / composition / physical sub-scores.
/// Defaults are (comp, parse, valid, phys) = (0.6, 0.2, 0.1, 0.1).
struct RewardWeights {
  double comp = 0.6;
  double parse = 0.2;
  double valid = 0.1;
  double phys = 0.1;

  /// Throws std::invalid_argument unless all weights are >= 0 and sum to 1 (1e-12).
  void validate() const;
};

struct PhysConfig {
  double hard_overlap_fraction = 0.5;   // of r_i + r_j; at or below scores 0
  double full_credit_fraction = 0.75;   // at or above scores 1
  double vpa_min = 3.0;                 // A^3 / atom
  double vpa_max = 200.0;

  void validate() const;
};

struct FailureFlags {
  bool parse_fail = false;            // PF
  bool valid_fail = false;            // VF
  bool composition_mismatch = false;  // CM
  bool physical_violation = false;    // PV

  bool any() const { return parse_fail || valid_fail || composition_mismatch || physical_violation; }
  /// Subset of {"PF", "VF", "CM", "PV"} in that order.
  std::vector<std::string> names() const;
};

struct RewardBreakdown {
  double s_parse = 0;
  double s_valid = 0;
  double s_comp = 0;
  double s_phys = 0;
  double total = 0;
  FailureFlags flags;
  std::vector<std::string> diagnostics;
};

/// 1 when a structure was produced, else 0.
double score_parse(const ParseOutcome& outcome);

/// Fraction of the field-completeness checklist satisfied; 0 without a structure.
/// Failed checks are appended to `diagnostics` when given.
double score_valid(const ParseOutcome& outcome, std::vector<std::string>* diagnostics = nullptr);
inline constexpr int kValidityChecklistSize = 6;

/// 1 - sum|t_e - a_e| / (sum t + sum a), clamped to [0, 1].
/// Throws std::invalid_argument for an empty target or negative counts.
double score_composition(const CompositionVector& target, const CompositionVector& actual);

/// distance_factor * volume_factor. Degenerate cells score 0 with a diagnostic.
double score_physical(const Structure& s, const CovalentRadiusTable& radii, const PhysConfig& cfg,
                      std::vector<std::string>* diagnostics = nullptr);

RewardBreakdown pvcp(const ParseOutcome& outcome, const CompositionVector& target,
                     const RewardWeights& weights, const PhysConfig& cfg,
                     const CovalentRadiusTable& radii = CovalentRadiusTable::standard());

RewardBreakdown pvcp(std::string_view text, const CompositionVector& target,
                     const RewardWeights& weights, const PhysConfig& cfg,
                     const CovalentRadiusTable& radii = CovalentRadiusTable::standard());

/// Percentages of reports carrying each flag. Flags may co-occur.
struct FailureRates {
  double pf = 0;
  double vf = 0;
  double cm = 0;
  double pv = 0;
  std::size_t corpus_size = 0;
  std::array<std::size_t, 4> counts{};  // PF, VF, CM, PV
};

/// Throws std::invalid_argument on an empty corpus.
FailureRates corpus_failure_rates(std::span<const RewardBreakdown> reports);

nlohmann::ordered_json to_json(const RewardBreakdown& r, std::string_view candidate_id);
nlohmann::ordered_json to_json(const FailureRates& rates);

}  // namespace catdesign
