#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace catdesign {

/// Element symbol -> atom count.
using CompositionVector = std::map<std::string, int>;

/// Parse "Cu4O", "CuO2", "C O" style formulas (no brackets). Throws
/// std::invalid_argument on unknown symbols or malformed counts.
CompositionVector parse_formula(std::string_view formula);

/// Hill-like order: C, then H, then the rest alphabetically.
std::vector<std::string> hill_order(const CompositionVector& comp);

/// Formula in hill order with unit counts omitted, e.g. {O:1,Cu:4} -> "Cu4O".
std::string format_formula(const CompositionVector& comp);

/// Wrap into [0, 1).
double wrap_unit(double x);

class Lattice {
public:
  /// Lengths in Angstrom, angles in degrees. Throws std::invalid_argument on
  /// non-positive lengths, angles outside (0, 180) or a non-positive metric
  /// determinant.
  static Lattice from_parameters(double a, double b, double c,
                                 double alpha, double beta, double gamma);

  /// Columns are the lattice vectors in Cartesian Angstrom.
  static Lattice from_matrix(const Eigen::Matrix3d& cell);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  const Eigen::Matrix3d& matrix() const { return cell_; }
  double volume() const;

  /// Spacing between adjacent lattice planes spanned by the other two vectors.
  Eigen::Vector3d plane_spacings() const;

  Eigen::Vector3d to_cartesian(const Eigen::Vector3d& frac) const { return cell_ * frac; }

private:
  Lattice() = default;
  double a_ = 0, b_ = 0, c_ = 0, alpha_ = 0, beta_ = 0, gamma_ = 0;
  Eigen::Matrix3d cell_ = Eigen::Matrix3d::Zero();
};

enum class RoleTag { unspecified, adsorbate, surface_top, subsurface };

std::string_view to_string(RoleTag tag);

struct AtomSite {
  std::string label;
  std::string element;
  Eigen::Vector3d frac = Eigen::Vector3d::Zero();
  RoleTag role = RoleTag::unspecified;
};

/// Periodic crystal structure. Immutable once built; fractional coordinates
/// are stored wrapped into [0, 1).
class Structure {
public:
  /// Throws std::invalid_argument for an empty site list, unknown element,
  /// empty label, non-finite coordinate or space-group number outside 1..230.
  Structure(Lattice lattice, std::vector<AtomSite> sites,
            std::optional<std::string> space_group_name = std::nullopt,
            std::optional<int> space_group_number = std::nullopt);

  const Lattice& lattice() const { return lattice_; }
  const std::vector<AtomSite>& sites() const { return sites_; }
  const AtomSite& site(std::size_t i) const { return sites_.at(i); }
  std::size_t size() const { return sites_.size(); }

  const std::optional<std::string>& space_group_name() const { return sg_name_; }
  const std::optional<int>& space_group_number() const { return sg_number_; }

  Eigen::Vector3d cartesian(std::size_t i) const { return lattice_.to_cartesian(sites_.at(i).frac); }

  Structure with_sites(std::vector<AtomSite> sites) const;
  Structure with_lattice(Lattice lattice) const;

private:
  Lattice lattice_;
  std::vector<AtomSite> sites_;
  std::optional<std::string> sg_name_;
  std::optional<int> sg_number_;
};

CompositionVector composition_of(const Structure& s);

}  // namespace catdesign
