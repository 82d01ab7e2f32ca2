#include "catdesign/elements.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace catdesign {

namespace {

constexpr std::array<std::string_view, kElementCount> kSymbols = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
    "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
    "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
    "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
    "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
    "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
    "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

// Cordero et al., Dalton Trans. 2008, 2832. Mn, Fe, Co use the low-spin values.
constexpr std::array<double, 96> kCorderoRadii = {
    0.31, 0.28, 1.28, 0.96, 0.84, 0.76, 0.71, 0.66, 0.57, 0.58, 1.66, 1.41,
    1.21, 1.11, 1.07, 1.05, 1.02, 1.06, 2.03, 1.76, 1.70, 1.60, 1.53, 1.39,
    1.39, 1.32, 1.26, 1.24, 1.32, 1.22, 1.22, 1.20, 1.19, 1.20, 1.20, 1.16,
    2.20, 1.95, 1.90, 1.75, 1.64, 1.54, 1.47, 1.46, 1.42, 1.39, 1.45, 1.44,
    1.42, 1.39, 1.39, 1.38, 1.39, 1.40, 2.44, 2.15, 2.07, 2.04, 2.03, 2.01,
    1.99, 1.98, 1.98, 1.96, 1.94, 1.92, 1.92, 1.89, 1.90, 1.87, 1.87, 1.75,
    1.70, 1.62, 1.51, 1.44, 1.41, 1.36, 1.36, 1.32, 1.45, 1.46, 1.48, 1.40,
    1.50, 1.50, 2.60, 2.21, 2.15, 2.06, 2.00, 1.96, 1.90, 1.87, 1.80, 1.69};

}  // namespace

std::optional<int> atomic_number(std::string_view symbol) {
  for (int i = 0; i < kElementCount; ++i)
    if (kSymbols[static_cast<std::size_t>(i)] == symbol) return i + 1;
  return std::nullopt;
}

std::string_view element_symbol(int z) {
  if (z < 1 || z > kElementCount)
    throw std::out_of_range("atomic number out of range: " + std::to_string(z));
  return kSymbols[static_cast<std::size_t>(z - 1)];
}

bool is_element(std::string_view symbol) { return atomic_number(symbol).has_value(); }

std::optional<std::string> element_from_token(std::string_view token) {
  auto alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
  if (token.empty() || !alpha(token[0])) return std::nullopt;
  std::string one(1, static_cast<char>(std::toupper(static_cast<unsigned char>(token[0]))));
  if (token.size() > 1 && alpha(token[1])) {
    std::string two = one + static_cast<char>(std::tolower(static_cast<unsigned char>(token[1])));
    if (is_element(two)) return two;
  }
  if (is_element(one)) return one;
  return std::nullopt;
}

CovalentRadiusTable::CovalentRadiusTable() {
  radii_.fill(kHeavyElementRadius);
  for (std::size_t i = 0; i < kCorderoRadii.size(); ++i) radii_[i] = kCorderoRadii[i];
}

const CovalentRadiusTable& CovalentRadiusTable::standard() {
  static const CovalentRadiusTable table;
  return table;
}

std::optional<double> CovalentRadiusTable::find(std::string_view symbol) const {
  auto z = atomic_number(symbol);
  if (!z) return std::nullopt;
  return radii_[static_cast<std::size_t>(*z - 1)];
}

double CovalentRadiusTable::radius(std::string_view symbol) const {
  auto r = find(symbol);
  if (!r) throw std::out_of_range("no covalent radius for '" + std::string(symbol) + "'");
  return *r;
}

void CovalentRadiusTable::set_radius(std::string_view symbol, double r) {
  auto z = atomic_number(symbol);
  if (!z) throw std::invalid_argument("unknown element '" + std::string(symbol) + "'");
  if (!(r > 0.2 && r < 3.0))
    throw std::invalid_argument("covalent radius must lie in (0.2, 3.0) A");
  radii_[static_cast<std::size_t>(*z - 1)] = r;
}

}  // namespace catdesign
