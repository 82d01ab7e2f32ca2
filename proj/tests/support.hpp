// Shared fixtures and independent oracles for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "catdesign/rng.hpp"
#include "catdesign/structure.hpp"
#include "catdesign/textify.hpp"

namespace fixtures {

using namespace catdesign;

inline const char* kMinimalCif = R"(data_Cu
_cell_length_a 3.6
_cell_length_b 3.6
_cell_length_c 3.6
_cell_angle_alpha 90
_cell_angle_beta 90
_cell_angle_gamma 90
_symmetry_space_group_name_H-M 'P 1'
_symmetry_Int_Tables_number 1
loop_
_atom_site_label
_atom_site_type_symbol
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
Cu1 Cu 0.0 0.0 0.0
)";

inline std::string replace_line(std::string text, const std::string& starts_with, const std::string& with) {
  const auto pos = text.find(starts_with);
  if (pos == std::string::npos) return text;
  const auto end = text.find('\n', pos);
  text.replace(pos, end - pos + 1, with);
  return text;
}

inline Structure cubic(double a, std::vector<AtomSite> sites) {
  return Structure(Lattice::from_parameters(a, a, a, 90, 90, 90), std::move(sites), "P 1", 1);
}

inline AtomSite site(std::string label, std::string element, double x, double y, double z) {
  return AtomSite{std::move(label), std::move(element), Eigen::Vector3d(x, y, z), RoleTag::unspecified};
}

struct Slab {
  Structure structure;
  SystemMetadata meta;
};

// 3x3 Cu top layer (4.0 A apart in x, 2.6 A in y), one subsurface Cu under
// the centre atom, CO standing on Cu5.
inline Slab hand_built_slab() {
  const double a = 12.0, b = 7.8, c = 20.0, z0 = 10.0;
  std::vector<AtomSite> sites;
  SystemMetadata meta;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) {
      const int k = 3 * row + col + 1;
      sites.push_back(site("Cu" + std::to_string(k), "Cu", (2.0 + 4.0 * col) / a, (1.3 + 2.6 * row) / b, z0 / c));
      meta.surface_top.push_back(sites.size() - 1);
    }
  const double cx = 6.0 / a, cy = 3.9 / b;
  sites.push_back(site("Cu10", "Cu", cx, cy, (z0 - 2.5) / c));
  sites.push_back(site("C1", "C", cx, cy, (z0 + 1.85) / c));
  sites.push_back(site("O1", "O", cx, cy, (z0 + 1.85 + 1.15) / c));
  meta.adsorbate = {10, 11};
  meta.catalyst_composition = {{"Cu", 12}};
  meta.miller = {1, 1, 1};
  return {Structure(Lattice::from_parameters(a, b, c, 90, 90, 90), std::move(sites)), meta};
}

// CO over a small Cu cell, slightly away from the surrogate's minimum so that
// jittered copies land on both sides of its energy.
inline Structure seed_structure() {
  const double a = 5.2;
  return Structure(Lattice::from_parameters(a, a, 1.6 * a, 90, 90, 90),
                   {site("Cu1", "Cu", 0, 0, 0), site("Cu2", "Cu", 0.5, 0.5, 0), site("Cu3", "Cu", 0.5, 0, 0.3),
                    site("Cu4", "Cu", 0, 0.5, 0.3), site("C1", "C", 0.25, 0.25, 0.55),
                    site("O1", "O", 0.25, 0.25, 0.70)},
                   "P 1", 1);
}

inline const char* kSlabText = "C O</s>Cu (1 1 1)</s>primary: Cu@Cu5; secondary: Cu@Cu2, Cu@Cu8";

// Moderately skewed random cell with up to `max_sites` sites.
inline Structure random_structure(Rng& rng, std::size_t max_sites, bool unique_labels = true) {
  static const char* kElements[] = {"H", "C", "N", "O", "Cu", "Pt", "Fe", "Ni", "Zn", "Ag", "Au", "Pd"};
  for (;;) {
    const double a = rng.uniform(2.0, 8.0), b = rng.uniform(2.0, 8.0), c = rng.uniform(2.0, 8.0);
    const double al = rng.uniform(55, 125), be = rng.uniform(55, 125), ga = rng.uniform(55, 125);
    std::optional<Lattice> lat;
    try {
      lat = Lattice::from_parameters(a, b, c, al, be, ga);
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (lat->volume() < 1.0) continue;
    const std::size_t n = 1 + rng.index(max_sites);
    std::vector<AtomSite> sites;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string el = kElements[rng.index(std::size(kElements))];
      sites.push_back(site(unique_labels ? el + std::to_string(i + 1) : el, el, rng.uniform01(), rng.uniform01(),
                           rng.uniform01()));
    }
    return Structure(*lat, std::move(sites), "P 1", 1);
  }
}

// Exhaustive image scan over a box large enough to contain every image closer
// than a known upper bound. Deliberately independent of the library's pruning.
inline double oracle_min_image(const Structure& s, std::size_t i, std::size_t j) {
  const Eigen::Matrix3d& L = s.lattice().matrix();
  const Eigen::Vector3d d = s.site(j).frac - s.site(i).frac;
  // Any single image is an upper bound on the minimum.
  double bound = std::numeric_limits<double>::infinity();
  if (i == j) {
    for (int k = 0; k < 3; ++k) bound = std::min(bound, L.col(k).norm());
  } else {
    const Eigen::Vector3d shifted(d[0] - std::round(d[0]), d[1] - std::round(d[1]), d[2] - std::round(d[2]));
    bound = (L * shifted).norm();
  }
  const double vol = std::abs(L.determinant());
  int m[3];
  for (int k = 0; k < 3; ++k) {
    const double h = vol / L.col((k + 1) % 3).cross(L.col((k + 2) % 3)).norm();
    m[k] = static_cast<int>(std::ceil(bound / h)) + 1;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int x = -m[0]; x <= m[0]; ++x)
    for (int y = -m[1]; y <= m[1]; ++y)
      for (int z = -m[2]; z <= m[2]; ++z) {
        if (i == j && x == 0 && y == 0 && z == 0) continue;
        best = std::min(best, (L * (d + Eigen::Vector3d(x, y, z))).norm());
      }
  return best;
}

inline double oracle_min_pair(const Structure& s) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i; j < s.size(); ++j) best = std::min(best, oracle_min_image(s, i, j));
  return best;
}

}  // namespace fixtures
