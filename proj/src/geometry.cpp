#include "catdesign/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace catdesign {

namespace {

// Image scans beyond this many offsets mean a pathological cell, not a crystal.
constexpr double kMaxImageScan = 2.0e7;

void require_cell(const Lattice& lat) {
  if (!(lat.volume() >= kMinCellVolume))
    throw DegenerateCellError("degenerate cell: volume below 1e-6 A^3");
}

Eigen::Vector3d reduced_delta(const Structure& s, std::size_t i, std::size_t j) {
  Eigen::Vector3d d = s.site(j).frac - s.site(i).frac;
  for (int k = 0; k < 3; ++k) d[k] -= std::round(d[k]);
  return d;
}

// Minimum of |M (delta + n)| over n != 0 when skip_origin is set. The search
// box grows until every image outside it is provably farther away than the
// current best: an image with |n_k| > N_k lies at least (N_k + 1/2) h_k away,
// h_k being the lattice-plane spacing and |delta_k| <= 1/2.
double min_over_images(const Eigen::Matrix3d& cell, const Eigen::Vector3d& spacing,
                       const Eigen::Vector3d& delta, bool skip_origin) {
  std::array<int, 3> box = {2, 2, 2};
  double best = std::numeric_limits<double>::infinity();
  std::array<int, 3> scanned = {-1, -1, -1};
  for (;;) {
    for (int a = -box[0]; a <= box[0]; ++a)
      for (int b = -box[1]; b <= box[1]; ++b)
        for (int c = -box[2]; c <= box[2]; ++c) {
          if (std::abs(a) <= scanned[0] && std::abs(b) <= scanned[1] && std::abs(c) <= scanned[2]) continue;
          if (skip_origin && a == 0 && b == 0 && c == 0) continue;
          const double d = (cell * (delta + Eigen::Vector3d(a, b, c))).norm();
          best = std::min(best, d);
        }
    scanned = box;
    bool closed = true;
    double volume = 1;
    for (int k = 0; k < 3; ++k) {
      const double need = std::ceil(best / spacing[k] - 0.5);
      if (need > box[k]) {
        if (need > kMaxImageScan) throw DegenerateCellError("cell too skewed for an image search");
        box[k] = static_cast<int>(need);
        closed = false;
      }
      volume *= 2.0 * box[k] + 1;
    }
    if (closed) return best;
    if (volume > kMaxImageScan) throw DegenerateCellError("cell too skewed for an image search");
  }
}

// All (j, n) within the cutoff of site i. For pair (i, j) the raw delta
// f_j - f_i lies in (-1, 1); image n_k is feasible only when
// |delta_k + n_k| h_k <= cutoff.
template <typename CutoffFn>
NeighborList enumerate_neighbors(const Structure& s, CutoffFn cutoff_for) {
  require_cell(s.lattice());
  const Eigen::Matrix3d& cell = s.lattice().matrix();
  const Eigen::Vector3d h = s.lattice().plane_spacings();
  const std::size_t n = s.size();
  NeighborList list(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double cutoff = cutoff_for(i, j);
      if (!(cutoff >= 0)) continue;
      const Eigen::Vector3d delta = s.site(j).frac - s.site(i).frac;
      std::array<int, 3> lo{}, hi{};
      double span = 1;
      for (int k = 0; k < 3; ++k) {
        span *= 2.0 * (cutoff / h[k] + 1.0);
        if (span > kMaxImageScan) throw DegenerateCellError("cutoff spans too many periodic images");
        lo[static_cast<std::size_t>(k)] = static_cast<int>(std::ceil(-cutoff / h[k] - delta[k]));
        hi[static_cast<std::size_t>(k)] = static_cast<int>(std::floor(cutoff / h[k] - delta[k]));
      }
      for (int a = lo[0]; a <= hi[0]; ++a)
        for (int b = lo[1]; b <= hi[1]; ++b)
          for (int c = lo[2]; c <= hi[2]; ++c) {
            if (i == j && a == 0 && b == 0 && c == 0) continue;
            const double d = (cell * (delta + Eigen::Vector3d(a, b, c))).norm();
            if (d <= cutoff) list[i].push_back({j, {a, b, c}, d});
          }
    }
  }
  return list;
}

}  // namespace

double min_image_distance(const Structure& s, std::size_t i, std::size_t j) {
  if (i >= s.size() || j >= s.size()) throw std::out_of_range("site index out of range");
  require_cell(s.lattice());
  const Eigen::Vector3d delta = i == j ? Eigen::Vector3d::Zero() : reduced_delta(s, i, j);
  return min_over_images(s.lattice().matrix(), s.lattice().plane_spacings(), delta, i == j);
}

NeighborList build_neighbor_list(const Structure& s, const CovalentRadiusTable& radii, double scale) {
  if (!(scale > 0)) throw std::invalid_argument("neighbor scale must be positive");
  std::vector<double> r(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) r[i] = radii.radius(s.site(i).element);
  return enumerate_neighbors(s, [&](std::size_t i, std::size_t j) { return scale * (r[i] + r[j]); });
}

NeighborList neighbors_within(const Structure& s, double cutoff) {
  if (!(cutoff >= 0)) throw std::invalid_argument("cutoff must be non-negative");
  return enumerate_neighbors(s, [cutoff](std::size_t, std::size_t) { return cutoff; });
}

double min_pair_distance(const Structure& s) {
  require_cell(s.lattice());
  const Eigen::Matrix3d& cell = s.lattice().matrix();
  const Eigen::Vector3d h = s.lattice().plane_spacings();
  double best = min_over_images(cell, h, Eigen::Vector3d::Zero(), true);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      best = std::min(best, min_over_images(cell, h, reduced_delta(s, i, j), false));
  return best;
}

double volume_per_atom(const Structure& s) {
  return s.lattice().volume() / static_cast<double>(s.size());
}

Contact tightest_contact(const Structure& s, const CovalentRadiusTable& radii) {
  require_cell(s.lattice());
  const Eigen::Matrix3d& cell = s.lattice().matrix();
  const Eigen::Vector3d h = s.lattice().plane_spacings();
  std::vector<double> r(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) r[i] = radii.radius(s.site(i).element);

  // Every site has the same self-image distance; the largest radius is worst.
  const double self = min_over_images(cell, h, Eigen::Vector3d::Zero(), true);
  const auto widest = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
  Contact worst{widest, widest, self, 2 * r[widest]};
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      Contact c{i, j, min_over_images(cell, h, reduced_delta(s, i, j), false), r[i] + r[j]};
      if (c.ratio() < worst.ratio()) worst = c;
    }
  return worst;
}

nlohmann::ordered_json neighbor_list_to_json(const NeighborList& list) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < list.size(); ++i)
    for (const auto& nb : list[i]) {
      nlohmann::ordered_json e;
      e["site_i"] = i;
      e["site_j"] = nb.site;
      e["image"] = nb.image;
      e["distance"] = nb.distance;
      out.push_back(e);
    }
  return out;
}

}  // namespace catdesign
