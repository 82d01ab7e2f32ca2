#include "catdesign/structure.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "catdesign/elements.hpp"

namespace catdesign {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double angle_between(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  double cosine = std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0);
  return std::acos(cosine) / kDeg;
}

}  // namespace

CompositionVector parse_formula(std::string_view formula) {
  CompositionVector comp;
  std::size_t i = 0;
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (i < formula.size()) {
    if (is_space(formula[i])) {
      ++i;
      continue;
    }
    if (!std::isupper(static_cast<unsigned char>(formula[i])))
      throw std::invalid_argument("malformed formula '" + std::string(formula) + "'");
    std::string symbol(1, formula[i++]);
    while (i < formula.size() && std::islower(static_cast<unsigned char>(formula[i])))
      symbol += formula[i++];
    if (!is_element(symbol))
      throw std::invalid_argument("unknown element '" + symbol + "' in formula");
    int count = 0;
    bool has_digits = false;
    while (i < formula.size() && std::isdigit(static_cast<unsigned char>(formula[i]))) {
      count = count * 10 + (formula[i++] - '0');
      has_digits = true;
      if (count > 1'000'000) throw std::invalid_argument("formula count too large");
    }
    if (!has_digits) count = 1;
    comp[symbol] += count;
  }
  std::erase_if(comp, [](const auto& kv) { return kv.second == 0; });
  return comp;
}

std::vector<std::string> hill_order(const CompositionVector& comp) {
  std::vector<std::string> order;
  if (comp.contains("C")) order.push_back("C");
  if (comp.contains("H")) order.push_back("H");
  for (const auto& [el, n] : comp)
    if (el != "C" && el != "H") order.push_back(el);
  return order;
}

std::string format_formula(const CompositionVector& comp) {
  std::string out;
  for (const auto& el : hill_order(comp)) {
    int n = comp.at(el);
    if (n <= 0) continue;
    out += el;
    if (n != 1) out += std::to_string(n);
  }
  return out;
}

double wrap_unit(double x) {
  double w = x - std::floor(x);
  return w >= 1.0 ? 0.0 : w;
}

Lattice Lattice::from_parameters(double a, double b, double c,
                                 double alpha, double beta, double gamma) {
  for (double len : {a, b, c})
    if (!std::isfinite(len) || len <= 0) throw std::invalid_argument("cell lengths must be positive");
  for (double ang : {alpha, beta, gamma})
    if (!std::isfinite(ang) || ang <= 0 || ang >= 180)
      throw std::invalid_argument("cell angles must lie in (0, 180) degrees");

  const double ca = std::cos(alpha * kDeg), cb = std::cos(beta * kDeg), cg = std::cos(gamma * kDeg);
  const double sg = std::sin(gamma * kDeg);
  const double metric = 1 - ca * ca - cb * cb - cg * cg + 2 * ca * cb * cg;
  if (!(metric > 0)) throw std::invalid_argument("cell angles give a non-positive volume");

  const double cy = (ca - cb * cg) / sg;
  const double cz = std::sqrt(metric) / sg;

  Lattice lat;
  lat.a_ = a;
  lat.b_ = b;
  lat.c_ = c;
  lat.alpha_ = alpha;
  lat.beta_ = beta;
  lat.gamma_ = gamma;
  lat.cell_.col(0) = Eigen::Vector3d(a, 0, 0);
  lat.cell_.col(1) = Eigen::Vector3d(b * cg, b * sg, 0);
  lat.cell_.col(2) = Eigen::Vector3d(c * cb, c * cy, c * cz);
  return lat;
}

Lattice Lattice::from_matrix(const Eigen::Matrix3d& cell) {
  if (!cell.allFinite() || !(cell.determinant() > 0))
    throw std::invalid_argument("cell matrix must be finite and right-handed with positive volume");
  Lattice lat;
  lat.cell_ = cell;
  lat.a_ = cell.col(0).norm();
  lat.b_ = cell.col(1).norm();
  lat.c_ = cell.col(2).norm();
  lat.alpha_ = angle_between(cell.col(1), cell.col(2));
  lat.beta_ = angle_between(cell.col(0), cell.col(2));
  lat.gamma_ = angle_between(cell.col(0), cell.col(1));
  return lat;
}

double Lattice::volume() const { return std::abs(cell_.determinant()); }

Eigen::Vector3d Lattice::plane_spacings() const {
  const double v = volume();
  return {v / cell_.col(1).cross(cell_.col(2)).norm(),
          v / cell_.col(2).cross(cell_.col(0)).norm(),
          v / cell_.col(0).cross(cell_.col(1)).norm()};
}

std::string_view to_string(RoleTag tag) {
  switch (tag) {
    case RoleTag::adsorbate: return "adsorbate";
    case RoleTag::surface_top: return "surface_top";
    case RoleTag::subsurface: return "subsurface";
    case RoleTag::unspecified: break;
  }
  return "unspecified";
}

Structure::Structure(Lattice lattice, std::vector<AtomSite> sites,
                     std::optional<std::string> space_group_name,
                     std::optional<int> space_group_number)
    : lattice_(std::move(lattice)),
      sites_(std::move(sites)),
      sg_name_(std::move(space_group_name)),
      sg_number_(space_group_number) {
  if (sites_.empty()) throw std::invalid_argument("structure has no sites");
  if (sg_number_ && (*sg_number_ < 1 || *sg_number_ > 230))
    throw std::invalid_argument("space group number outside 1..230");
  for (auto& site : sites_) {
    if (site.label.empty()) throw std::invalid_argument("site with empty label");
    if (!is_element(site.element))
      throw std::invalid_argument("unknown element '" + site.element + "'");
    if (!site.frac.allFinite())
      throw std::invalid_argument("non-finite fractional coordinate at " + site.label);
    for (int k = 0; k < 3; ++k) site.frac[k] = wrap_unit(site.frac[k]);
  }
}

Structure Structure::with_sites(std::vector<AtomSite> sites) const {
  return Structure(lattice_, std::move(sites), sg_name_, sg_number_);
}

Structure Structure::with_lattice(Lattice lattice) const {
  return Structure(std::move(lattice), sites_, sg_name_, sg_number_);
}

CompositionVector composition_of(const Structure& s) {
  CompositionVector comp;
  for (const auto& site : s.sites()) ++comp[site.element];
  return comp;
}

}  // namespace catdesign
