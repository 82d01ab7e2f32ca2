#include "catdesign/textify.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "catdesign/geometry.hpp"

namespace catdesign {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

CompositionVector reduced(const CompositionVector& comp) {
  int g = 0;
  for (const auto& [el, n] : comp) g = std::gcd(g, n);
  CompositionVector out;
  for (const auto& [el, n] : comp)
    if (n > 0) out[el] = n / g;
  return out;
}

}  // namespace

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t i2 = i, j2 = j;
      while (i2 < a.size() && is_digit(a[i2])) ++i2;
      while (j2 < b.size() && is_digit(b[j2])) ++j2;
      std::string_view na(a.data() + i, i2 - i), nb(b.data() + j, j2 - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = i2;
      j = j2;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  return a < b;
}

void SystemMetadata::validate(std::size_t site_count) const {
  std::set<std::size_t> ads;
  for (auto i : adsorbate) {
    if (i >= site_count) throw std::invalid_argument(fmt::format("adsorbate index {} out of range", i));
    if (!ads.insert(i).second) throw std::invalid_argument(fmt::format("adsorbate index {} repeated", i));
  }
  std::set<std::size_t> top;
  for (auto i : surface_top) {
    if (i >= site_count) throw std::invalid_argument(fmt::format("surface_top index {} out of range", i));
    if (!top.insert(i).second) throw std::invalid_argument(fmt::format("surface_top index {} repeated", i));
    if (ads.contains(i)) throw std::invalid_argument(fmt::format("site {} is both adsorbate and surface_top", i));
  }
  if (adsorbate.empty()) throw std::invalid_argument("metadata lists no adsorbate sites");
  if (catalyst_composition.empty() ||
      std::all_of(catalyst_composition.begin(), catalyst_composition.end(), [](const auto& kv) { return kv.second <= 0; }))
    throw std::invalid_argument("catalyst composition is empty");
  for (const auto& [el, n] : catalyst_composition) {
    if (!is_element(el)) throw std::invalid_argument("unknown element '" + el + "' in catalyst composition");
    if (n < 0) throw std::invalid_argument("negative count in catalyst composition");
  }
  if (miller == std::array<int, 3>{0, 0, 0}) throw std::invalid_argument("Miller index (0 0 0)");
}

SystemMetadata SystemMetadata::from_json(const nlohmann::ordered_json& j) {
  SystemMetadata m;
  try {
    m.adsorbate = j.at("adsorbate").get<std::vector<std::size_t>>();
    m.surface_top = j.at("surface_top").get<std::vector<std::size_t>>();
    for (const auto& [el, n] : j.at("catalyst_composition").items()) m.catalyst_composition[el] = n.get<int>();
    const auto miller = j.at("miller").get<std::vector<int>>();
    if (miller.size() != 3) throw std::invalid_argument("miller must have three integers");
    m.miller = {miller[0], miller[1], miller[2]};
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad metadata: ") + e.what());
  }
  return m;
}

Structure apply_role_tags(const Structure& s, const SystemMetadata& meta) {
  meta.validate(s.size());
  auto sites = s.sites();
  for (auto& site : sites) site.role = RoleTag::unspecified;
  for (auto i : meta.adsorbate) sites[i].role = RoleTag::adsorbate;
  for (auto i : meta.surface_top) sites[i].role = RoleTag::surface_top;
  return s.with_sites(std::move(sites));
}

InteractionAtoms find_interaction_atoms(const Structure& s, const SystemMetadata& meta,
                                        const CovalentRadiusTable& radii, double scale) {
  meta.validate(s.size());
  const NeighborList bonds = build_neighbor_list(s, radii, scale);
  const std::set<std::size_t> ads(meta.adsorbate.begin(), meta.adsorbate.end());
  const std::set<std::size_t> top(meta.surface_top.begin(), meta.surface_top.end());

  std::set<std::size_t> primary;
  for (auto a : ads)
    for (const auto& nb : bonds[a])
      if (!ads.contains(nb.site)) primary.insert(nb.site);

  std::set<std::size_t> secondary;
  for (auto p : primary)
    for (const auto& nb : bonds[p])
      if (top.contains(nb.site) && !ads.contains(nb.site) && !primary.contains(nb.site))
        secondary.insert(nb.site);

  return {{primary.begin(), primary.end()}, {secondary.begin(), secondary.end()}};
}

SystemText to_system_text(const Structure& s, const SystemMetadata& meta, const CovalentRadiusTable& radii,
                          double scale, const TextTemplate& tmpl) {
  const InteractionAtoms contacts = find_interaction_atoms(s, meta, radii, scale);

  CompositionVector ads_comp;
  for (auto i : meta.adsorbate) ++ads_comp[s.site(i).element];
  std::vector<std::string> symbols;
  for (const auto& el : hill_order(ads_comp))
    for (int k = 0; k < ads_comp[el]; ++k) symbols.push_back(el);

  SystemText text;
  text.adsorbate_part = join(symbols, " ");
  text.surface_part = fmt::format("{} ({} {} {})", format_formula(reduced(meta.catalyst_composition)),
                                  meta.miller[0], meta.miller[1], meta.miller[2]);

  auto describe = [&](std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
      const auto& a = s.site(x);
      const auto& b = s.site(y);
      if (a.label != b.label) return natural_less(a.label, b.label);
      if (a.element != b.element) return a.element < b.element;
      return x < y;
    });
    std::vector<std::string> parts;
    for (auto i : idx) parts.push_back(s.site(i).element + "@" + s.site(i).label);
    return parts.empty() ? tmpl.none : join(parts, ", ");
  };

  if (contacts.primary.empty()) {
    text.configuration_part = tmpl.no_contact;
  } else {
    text.configuration_part =
        fmt::format("primary: {}; secondary: {}", describe(contacts.primary), describe(contacts.secondary));
  }
  text.joined = text.adsorbate_part + tmpl.separator + text.surface_part + tmpl.separator + text.configuration_part;
  return text;
}

}  // namespace catdesign
