#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "catdesign/elements.hpp"
#include "catdesign/structure.hpp"

namespace catdesign {

/// Adsorbate/surface annotation that travels next to a structure file.
struct SystemMetadata {
  std::vector<std::size_t> adsorbate;
  std::vector<std::size_t> surface_top;
  CompositionVector catalyst_composition;
  std::array<int, 3> miller{};

  /// Throws std::invalid_argument on out-of-range, repeated or overlapping
  /// indices, an empty adsorbate or catalyst, or a (0 0 0) Miller index.
  void validate(std::size_t site_count) const;

  /// {"adsorbate": [...], "surface_top": [...], "catalyst_composition": {el: n}, "miller": [h, k, l]}
  static SystemMetadata from_json(const nlohmann::ordered_json& j);
};

/// Copy of `s` with role tags taken from the metadata; other sites become unspecified.
Structure apply_role_tags(const Structure& s, const SystemMetadata& meta);

struct InteractionAtoms {
  std::vector<std::size_t> primary;    // ascending site index
  std::vector<std::size_t> secondary;  // ascending site index
};

/// Primary: non-adsorbate sites bonded to any adsorbate site. Secondary:
/// surface-top sites bonded to a primary site that are neither adsorbate nor
/// primary. Bonds come from build_neighbor_list with the given scale.
InteractionAtoms find_interaction_atoms(const Structure& s, const SystemMetadata& meta,
                                        const CovalentRadiusTable& radii, double scale = 1.2);

struct TextTemplate {
  std::string separator = "</s>";
  std::string no_contact = "no direct contact";
  std::string none = "none";
};

struct SystemText {
  std::string adsorbate_part;
  std::string surface_part;
  std::string configuration_part;
  std::string joined;
};

/// Three-part description: adsorbate symbols, catalyst formula with Miller
/// index, and the primary/secondary contact atoms as element@label.
SystemText to_system_text(const Structure& s, const SystemMetadata& meta, const CovalentRadiusTable& radii,
                          double scale = 1.2, const TextTemplate& tmpl = {});

/// Natural ordering for labels: "Cu2" < "Cu10".
bool natural_less(const std::string& a, const std::string& b);

}  // namespace catdesign
