#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace catdesign {

/// Number of known elements (H through Og).
inline constexpr int kElementCount = 118;

/// Atomic number (1-based) for an exact, case-sensitive symbol such as "Cu".
std::optional<int> atomic_number(std::string_view symbol);

/// Symbol for atomic number z in [1, 118].
std::string_view element_symbol(int z);

bool is_element(std::string_view symbol);

/// Normalize a CIF type symbol or label ("CU1", "Fe3+", "o2-") to a known
/// element symbol. Tries a two-letter match before a one-letter one.
std::optional<std::string> element_from_token(std::string_view token);

/// Single-bond covalent radii in Angstrom, indexed by element.
/// The default table is Cordero et al. (2008) for Z <= 96; heavier elements
/// have no published value there and share kHeavyElementRadius.
class CovalentRadiusTable {
public:
  static constexpr double kHeavyElementRadius = 1.70;

  CovalentRadiusTable();

  static const CovalentRadiusTable& standard();

  /// Throws std::out_of_range for unknown symbols.
  double radius(std::string_view symbol) const;
  std::optional<double> find(std::string_view symbol) const;

  /// Override one entry; throws std::invalid_argument outside (0.2, 3.0) A.
  void set_radius(std::string_view symbol, double r);

private:
  std::array<double, kElementCount> radii_{};
};

}  // namespace catdesign
