#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "catdesign/elements.hpp"
#include "catdesign/structure.hpp"

namespace catdesign {

/// Cells below this volume (A^3) are rejected by every periodic query.
inline constexpr double kMinCellVolume = 1e-6;

class DegenerateCellError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using ImageOffset = std::array<int, 3>;

struct Neighbor {
  std::size_t site = 0;   // neighbor index j
  ImageOffset image{};    // j sits at frac_j + image
  double distance = 0;    // Angstrom
};

/// Per-site neighbors, ordered by j then by image (lexicographic).
using NeighborList = std::vector<std::vector<Neighbor>>;

/// Shortest |r_j - r_i + L n| over all lattice translations n. For i == j the
/// n = 0 term is skipped, giving the nearest periodic self-image.
double min_image_distance(const Structure& s, std::size_t i, std::size_t j);

/// Pairs (i, j, n) with distance <= scale * (r_i + r_j). Zero-distance
/// self-terms are never listed.
NeighborList build_neighbor_list(const Structure& s, const CovalentRadiusTable& radii, double scale = 1.2);

/// Same enumeration with one cutoff for every pair.
NeighborList neighbors_within(const Structure& s, double cutoff);

/// Minimum over all pairs and self-images.
double min_pair_distance(const Structure& s);

/// |det(cell)| / number of sites.
double volume_per_atom(const Structure& s);

/// The pair minimizing distance / (r_i + r_j), self-images included.
struct Contact {
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0;
  double radius_sum = 0;
  double ratio() const { return distance / radius_sum; }
};
Contact tightest_contact(const Structure& s, const CovalentRadiusTable& radii);

/// [{"site_i", "site_j", "image", "distance"}, ...]
nlohmann::ordered_json neighbor_list_to_json(const NeighborList& list);

}  // namespace catdesign
