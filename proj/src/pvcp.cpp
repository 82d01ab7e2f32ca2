#include "catdesign/pvcp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "catdesign/geometry.hpp"

namespace catdesign {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Linear in log10 over one decade outside [lo, hi].
double volume_factor(double vpa, const PhysConfig& cfg) {
  if (!(vpa > 0)) return 0.0;
  if (vpa < cfg.vpa_min) return clamp01(1.0 - std::log10(cfg.vpa_min / vpa));
  if (vpa > cfg.vpa_max) return clamp01(1.0 - std::log10(vpa / cfg.vpa_max));
  return 1.0;
}

}  // namespace

void RewardWeights::validate() const {
  for (double w : {comp, parse, valid, phys})
    if (!(w >= 0) || !std::isfinite(w)) throw std::invalid_argument("reward weights must be finite and >= 0");
  if (std::abs(comp + parse + valid + phys - 1.0) > 1e-12)
    throw std::invalid_argument("reward weights must sum to 1");
}

void PhysConfig::validate() const {
  if (!(hard_overlap_fraction > 0 && hard_overlap_fraction < full_credit_fraction && full_credit_fraction <= 1))
    throw std::invalid_argument("require 0 < hard_overlap_fraction < full_credit_fraction <= 1");
  if (!(vpa_min > 0 && vpa_min < vpa_max)) throw std::invalid_argument("require 0 < vpa_min < vpa_max");
}

std::vector<std::string> FailureFlags::names() const {
  std::vector<std::string> out;
  if (parse_fail) out.emplace_back("PF");
  if (valid_fail) out.emplace_back("VF");
  if (composition_mismatch) out.emplace_back("CM");
  if (physical_violation) out.emplace_back("PV");
  return out;
}

double score_parse(const ParseOutcome& outcome) { return outcome.ok() ? 1.0 : 0.0; }

double score_valid(const ParseOutcome& outcome, std::vector<std::string>* diagnostics) {
  if (!outcome.ok() || !outcome.document) return 0.0;
  const CifDocument& doc = *outcome.document;
  int violations = 0;
  auto fail = [&](std::string why) {
    ++violations;
    if (diagnostics) diagnostics->push_back("valid: " + std::move(why));
  };

  if (outcome.has(DefectCode::missing_space_group)) fail("space group missing");

  for (auto group : {std::span<const std::string_view>(cif_tags::kCellLength),
                     std::span<const std::string_view>(cif_tags::kCellAngle)}) {
    bool explicit_tags = true;
    for (auto tag : group) {
      const std::string* v = doc.scalar(tag);
      if (!v || !parse_cif_number(*v)) explicit_tags = false;
    }
    if (!explicit_tags) {
      fail("cell parameters incomplete");
      break;
    }
  }

  const CifLoop* sites = doc.loop_with(cif_tags::kFract[0]);
  if (!sites || !sites->column(cif_tags::kLabel) || !sites->column(cif_tags::kTypeSymbol) ||
      !sites->column(cif_tags::kFract[1]) || !sites->column(cif_tags::kFract[2]))
    fail("atom_site loop lacks label, type_symbol or fract columns");

  if (outcome.has(DefectCode::duplicate_label)) fail("duplicate site labels");
  if (outcome.has(DefectCode::inconsistent_loop)) fail("loop row count inconsistent");

  const bool in_range = std::all_of(outcome.raw_fractional.begin(), outcome.raw_fractional.end(),
                                    [](const Eigen::Vector3d& f) {
                                      return (f.array() >= -0.5).all() && (f.array() < 1.5).all();
                                    });
  if (!in_range) fail("fractional coordinates outside [-0.5, 1.5)");

  return clamp01(1.0 - static_cast<double>(violations) / kValidityChecklistSize);
}

double score_composition(const CompositionVector& target, const CompositionVector& actual) {
  long long t_sum = 0, a_sum = 0, diff = 0;
  std::set<std::string> keys;
  for (const auto& [el, n] : target) {
    if (n < 0) throw std::invalid_argument("negative count in target composition");
    t_sum += n;
    keys.insert(el);
  }
  if (t_sum == 0) throw std::invalid_argument("target composition is empty");
  for (const auto& [el, n] : actual) {
    if (n < 0) throw std::invalid_argument("negative count in composition");
    a_sum += n;
    keys.insert(el);
  }
  for (const auto& el : keys) {
    auto t = target.find(el);
    auto a = actual.find(el);
    const long long tn = t == target.end() ? 0 : t->second;
    const long long an = a == actual.end() ? 0 : a->second;
    diff += std::llabs(tn - an);
  }
  return clamp01(1.0 - static_cast<double>(diff) / static_cast<double>(t_sum + a_sum));
}

double score_physical(const Structure& s, const CovalentRadiusTable& radii, const PhysConfig& cfg,
                      std::vector<std::string>* diagnostics) {
  auto note = [&](std::string why) {
    if (diagnostics) diagnostics->push_back("phys: " + std::move(why));
  };
  Contact contact;
  try {
    contact = tightest_contact(s, radii);
  } catch (const DegenerateCellError& e) {
    note(e.what());
    return 0.0;
  }

  const double ratio = contact.ratio();
  double distance_factor = 1.0;
  if (ratio <= cfg.hard_overlap_fraction) distance_factor = 0.0;
  else if (ratio < cfg.full_credit_fraction)
    distance_factor = (ratio - cfg.hard_overlap_fraction) / (cfg.full_credit_fraction - cfg.hard_overlap_fraction);
  if (distance_factor < 1.0)
    note(fmt::format("{}-{} at {:.4f} A is {:.3f} of the covalent sum", s.site(contact.i).label,
                     s.site(contact.j).label, contact.distance, ratio));

  const double vpa = volume_per_atom(s);
  const double vf = volume_factor(vpa, cfg);
  if (vf < 1.0)
    note(fmt::format("volume per atom {:.4f} A^3 outside [{}, {}]", vpa, cfg.vpa_min, cfg.vpa_max));

  return clamp01(distance_factor * vf);
}

RewardBreakdown pvcp(const ParseOutcome& outcome, const CompositionVector& target,
                     const RewardWeights& weights, const PhysConfig& cfg, const CovalentRadiusTable& radii) {
  weights.validate();
  cfg.validate();
  if (target.empty() || std::all_of(target.begin(), target.end(), [](const auto& kv) { return kv.second == 0; }))
    throw std::invalid_argument("target composition is empty");

  RewardBreakdown r;
  for (const auto& d : outcome.defects)
    r.diagnostics.push_back(fmt::format("parse: {} line {}: {}", to_string(d.code), d.line, d.message));

  r.s_parse = score_parse(outcome);
  if (r.s_parse == 0.0) {
    r.flags.parse_fail = true;
    return r;
  }
  const Structure& s = *outcome.structure;
  r.s_valid = score_valid(outcome, &r.diagnostics);
  r.s_comp = score_composition(target, composition_of(s));
  if (r.s_comp < 1.0)
    r.diagnostics.push_back(fmt::format("comp: expected {}, found {}", format_formula(target),
                                        format_formula(composition_of(s))));
  r.s_phys = score_physical(s, radii, cfg, &r.diagnostics);

  r.total = weights.comp * r.s_comp + weights.parse * r.s_parse + weights.valid * r.s_valid +
            weights.phys * r.s_phys;
  r.flags.valid_fail = r.s_valid < 1.0;
  r.flags.composition_mismatch = r.s_comp < 1.0;
  r.flags.physical_violation = r.s_phys < 1.0;
  return r;
}

RewardBreakdown pvcp(std::string_view text, const CompositionVector& target, const RewardWeights& weights,
                     const PhysConfig& cfg, const CovalentRadiusTable& radii) {
  return pvcp(parse_cif(text), target, weights, cfg, radii);
}

FailureRates corpus_failure_rates(std::span<const RewardBreakdown> reports) {
  if (reports.empty()) throw std::invalid_argument("empty corpus");
  std::size_t pf = 0, vf = 0, cm = 0, pv = 0;
  for (const auto& r : reports) {
    pf += r.flags.parse_fail;
    vf += r.flags.valid_fail;
    cm += r.flags.composition_mismatch;
    pv += r.flags.physical_violation;
  }
  const double n = static_cast<double>(reports.size());
  return {100.0 * static_cast<double>(pf) / n, 100.0 * static_cast<double>(vf) / n,
          100.0 * static_cast<double>(cm) / n, 100.0 * static_cast<double>(pv) / n, reports.size(),
          {pf, vf, cm, pv}};
}

nlohmann::ordered_json to_json(const RewardBreakdown& r, std::string_view candidate_id) {
  nlohmann::ordered_json j;
  j["candidate_id"] = candidate_id;
  j["s_parse"] = r.s_parse;
  j["s_valid"] = r.s_valid;
  j["s_comp"] = r.s_comp;
  j["s_phys"] = r.s_phys;
  j["total"] = r.total;
  j["flags"] = r.flags.names();
  j["diagnostics"] = r.diagnostics;
  return j;
}

nlohmann::ordered_json to_json(const FailureRates& rates) {
  nlohmann::ordered_json j;
  j["corpus_size"] = rates.corpus_size;
  j["PF"] = rates.pf;
  j["VF"] = rates.vf;
  j["CM"] = rates.cm;
  j["PV"] = rates.pv;
  j["counts"] = {{"PF", rates.counts[0]}, {"VF", rates.counts[1]}, {"CM", rates.counts[2]}, {"PV", rates.counts[3]}};
  return j;
}

}  // namespace catdesign
