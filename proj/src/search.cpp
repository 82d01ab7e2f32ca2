#include "catdesign/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "catdesign/cif.hpp"
#include "catdesign/geometry.hpp"
#include "parallel.hpp"

namespace catdesign {

// ---------------------------------------------------------------------------
// Surrogate predictor

PairPotentialSurrogate::PairPotentialSurrogate(PairPotentialParams params, const CovalentRadiusTable& radii)
    : params_(params), radii_(radii) {
  if (!(params_.cutoff > 0) || !(params_.depth_scale > 0) || !(params_.pair_cap > 0))
    throw std::invalid_argument("surrogate parameters must be positive");
}

double PairPotentialSurrogate::pair_energy(std::string_view el_i, std::string_view el_j, double r) const {
  if (r > params_.cutoff) return 0.0;
  const double ri = radii_.radius(el_i), rj = radii_.radius(el_j);
  const double sigma = (ri + rj) / std::pow(2.0, 1.0 / 6.0);
  const double eps = params_.depth_scale * std::sqrt(ri * rj);
  auto lj = [&](double x) {
    const double s6 = std::pow(sigma / x, 6);
    return 4 * eps * (s6 * s6 - s6);
  };
  if (r <= 0) return params_.pair_cap;
  return std::min(lj(r) - lj(params_.cutoff), params_.pair_cap);
}

double PairPotentialSurrogate::predict(const Structure& s) const {
  const NeighborList nl = neighbors_within(s, params_.cutoff);
  double e = 0;
  for (std::size_t i = 0; i < nl.size(); ++i)
    for (const auto& nb : nl[i]) e += pair_energy(s.site(i).element, s.site(nb.site).element, nb.distance);
  // Each pair is listed from both ends.
  return 0.5 * e;
}

// ---------------------------------------------------------------------------
// Generator

MutationGenerator::MutationGenerator(MutationConfig cfg, std::optional<Structure> base)
    : cfg_(cfg), base_(std::move(base)) {
  if (!(cfg_.coord_jitter >= 0) || !(cfg_.lattice_jitter >= 0) || cfg_.lattice_jitter >= 1)
    throw std::invalid_argument("jitter amplitudes must be >= 0 (lattice < 1)");
  for (double p : {cfg_.defects.syntax, cfg_.defects.missing_field, cfg_.defects.composition, cfg_.defects.overlap})
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("defect probabilities must lie in [0, 1]");
}

Structure MutationGenerator::jitter(const Structure& s, Rng& rng) const {
  const Lattice& lat = s.lattice();
  auto scale = [&] { return 1.0 + cfg_.lattice_jitter * rng.uniform(-1, 1); };
  const double a = lat.a() * scale(), b = lat.b() * scale(), c = lat.c() * scale();
  auto sites = s.sites();
  for (auto& site : sites)
    for (int k = 0; k < 3; ++k) site.frac[k] += cfg_.coord_jitter * rng.uniform(-1, 1);
  return Structure(Lattice::from_parameters(a, b, c, lat.alpha(), lat.beta(), lat.gamma()), std::move(sites),
                   s.space_group_name(), s.space_group_number());
}

Structure MutationGenerator::random_structure(const CompositionVector& target, Rng& rng) const {
  const auto& radii = CovalentRadiusTable::standard();
  std::vector<std::string> elements;
  double volume = 0;
  for (const auto& el : hill_order(target)) {
    for (int k = 0; k < target.at(el); ++k) {
      elements.push_back(el);
      volume += 1.5 * std::pow(2.0 * radii.radius(el), 3);
    }
  }
  if (elements.empty()) throw std::invalid_argument("cannot generate from an empty composition");
  const double edge = std::cbrt(volume);

  std::vector<AtomSite> sites;
  std::map<std::string, int> counters;
  for (const auto& el : elements) {
    AtomSite site;
    site.element = el;
    site.label = el + std::to_string(++counters[el]);
    const double ri = radii.radius(el);
    for (int attempt = 0; attempt < 200; ++attempt) {
      site.frac = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
      bool clear = true;
      for (const auto& other : sites) {
        Eigen::Vector3d d = site.frac - other.frac;
        for (int k = 0; k < 3; ++k) d[k] -= std::round(d[k]);
        if (edge * d.norm() < 0.8 * (ri + radii.radius(other.element))) {
          clear = false;
          break;
        }
      }
      if (clear) break;
    }
    sites.push_back(site);
  }
  return Structure(Lattice::from_parameters(edge, edge, edge, 90, 90, 90), std::move(sites), "P 1", 1);
}

MutationGenerator::Proposal MutationGenerator::propose_with_ledger(const Structure* exemplar,
                                                                   const CompositionVector& target,
                                                                   std::uint64_t seed) const {
  Rng rng(seed);
  Structure s = exemplar ? jitter(*exemplar, rng) : base_ ? jitter(*base_, rng) : random_structure(target, rng);

  InjectedDefects inj;
  inj.syntax = rng.bernoulli(cfg_.defects.syntax);
  inj.missing_field = rng.bernoulli(cfg_.defects.missing_field);
  inj.composition = rng.bernoulli(cfg_.defects.composition) && s.size() >= 2;
  inj.overlap = rng.bernoulli(cfg_.defects.overlap) && s.size() >= (inj.composition ? 3u : 2u);

  if (inj.composition || inj.overlap) {
    auto sites = s.sites();
    if (inj.composition) sites.pop_back();
    if (inj.overlap) sites[1].frac = sites[0].frac;
    s = s.with_sites(std::move(sites));
  }

  std::string text = serialize_cif(s);
  if (inj.missing_field) {
    std::string kept;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      end = end == std::string::npos ? text.size() : end + 1;
      std::string_view line(text.data() + pos, end - pos);
      if (!line.starts_with("_symmetry_space_group_name_H-M") && !line.starts_with("_symmetry_Int_Tables_number"))
        kept += line;
      pos = end;
    }
    text = std::move(kept);
  }
  if (inj.syntax) text += "_generator_note 'unterminated\n";
  return {std::move(text), inj};
}

std::string MutationGenerator::propose(const Structure* exemplar, const CompositionVector& target,
                                       std::uint64_t seed) const {
  return propose_with_ledger(exemplar, target, seed).cif;
}

// ---------------------------------------------------------------------------
// Scoring

double energy_reward(double e_pred, double e_target, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  return std::exp(-lambda * std::abs(e_pred - e_target));
}

void SearchConfig::validate() const {
  if (!(energy_weight >= 0 && pvcp_weight >= 0) || std::abs(energy_weight + pvcp_weight - 1.0) > 1e-12)
    throw std::invalid_argument("energy and pvcp weights must be >= 0 and sum to 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (candidates_per_iteration < 1) throw std::invalid_argument("candidates_per_iteration must be >= 1");
  if (pool_capacity < 1) throw std::invalid_argument("pool_capacity must be >= 1");
  if (initial_candidates < 0 || static_cast<std::size_t>(initial_candidates) < pool_capacity)
    throw std::invalid_argument("initial_candidates must be >= pool_capacity");
  if (init_retry_budget < 0) throw std::invalid_argument("init_retry_budget must be >= 0");
  if (!(lambda_energy > 0)) throw std::invalid_argument("lambda_energy must be positive");
  if (!(success_tolerance >= 0)) throw std::invalid_argument("success_tolerance must be >= 0");
  if (!std::isfinite(target_energy)) throw std::invalid_argument("target_energy must be finite");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (target_composition.empty()) throw std::invalid_argument("target composition is empty");
  reward.validate();
  phys.validate();
}

CandidateScore combined_reward(const std::string& candidate_text, const SearchConfig& cfg,
                               const EnergyPredictor& predictor, const CovalentRadiusTable& radii) {
  CandidateScore out;
  ParseOutcome parsed = parse_cif(candidate_text);
  out.pvcp = pvcp(parsed, cfg.target_composition, cfg.reward, cfg.phys, radii);
  if (!parsed.ok()) {
    out.diagnostics.emplace_back("unparseable candidate scores 0");
    return out;
  }
  const Structure& s = *parsed.structure;
  out.structure = s;
  try {
    out.hard_ok = tightest_contact(s, radii).ratio() > cfg.phys.hard_overlap_fraction;
  } catch (const DegenerateCellError& e) {
    out.diagnostics.emplace_back(e.what());
  }

  double e = 0;
  try {
    e = predictor.predict(s);
    if (!std::isfinite(e)) throw std::runtime_error("predictor returned a non-finite energy");
  } catch (const std::exception& ex) {
    out.diagnostics.emplace_back(fmt::format("predictor failed: {}", ex.what()));
    out.hard_ok = false;
    return out;
  }
  out.energy = e;
  out.abs_delta = std::abs(e - cfg.target_energy);
  out.energy_reward = energy_reward(e, cfg.target_energy, cfg.lambda_energy);
  out.score = cfg.energy_weight * out.energy_reward + cfg.pvcp_weight * out.pvcp.total;
  return out;
}

// ---------------------------------------------------------------------------
// Pool

ExemplarPool::ExemplarPool(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 1) throw std::invalid_argument("pool capacity must be >= 1");
}

double ExemplarPool::min_score() const {
  if (entries_.empty()) throw std::logic_error("empty pool");
  return entries_.back().score;
}

double ExemplarPool::max_score() const {
  if (entries_.empty()) throw std::logic_error("empty pool");
  return entries_.front().score;
}

ExemplarPool::OfferResult ExemplarPool::offer(PoolEntry e) {
  OfferResult result;
  if (full()) {
    if (!(e.score > entries_.back().score)) return result;
    result.evicted_id = entries_.back().id;
    entries_.pop_back();
  }
  // After existing entries of equal score, so older entries rank first.
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), e.score,
                              [](double s, const PoolEntry& x) { return s > x.score; });
  entries_.insert(pos, std::move(e));
  result.accepted = true;
  return result;
}

// ---------------------------------------------------------------------------
// Search

namespace {

constexpr std::uint64_t kInitStream = 0x1a17;
constexpr std::uint64_t kRefineStream = 0x5eed;

std::vector<CandidateScore> generate_and_score(const CandidateGenerator& gen, const EnergyPredictor& predictor,
                                               const SearchConfig& cfg, const Structure* exemplar,
                                               const std::vector<std::uint64_t>& seeds,
                                               std::vector<std::string>& texts) {
  std::vector<CandidateScore> scores(seeds.size());
  texts.assign(seeds.size(), {});
  detail::parallel_for(seeds.size(), cfg.jobs, [&](std::size_t k) {
    texts[k] = gen.propose(exemplar, cfg.target_composition, seeds[k]);
    scores[k] = combined_reward(texts[k], cfg, predictor);
  });
  return scores;
}

PoolEntry make_entry(CandidateScore& c, std::string cif, int iteration, std::size_t id) {
  return PoolEntry{std::move(*c.structure), std::move(cif), c.score, *c.energy, *c.abs_delta, iteration, id};
}

}  // namespace

ExemplarPool initialize_pool(const CandidateGenerator& gen, const EnergyPredictor& predictor,
                             const SearchConfig& cfg, SearchState& state, std::vector<CandidateScore>* scored) {
  cfg.validate();
  ExemplarPool pool(cfg.pool_capacity);
  Rng rng(mix_seed(cfg.seed, kInitStream));
  int passed = 0;
  for (int batch = 0; batch <= cfg.init_retry_budget && !pool.full(); ++batch) {
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.initial_candidates));
    for (auto& s : seeds) s = rng.next_u64();
    std::vector<std::string> texts;
    auto scores = generate_and_score(gen, predictor, cfg, nullptr, seeds, texts);
    state.generated += static_cast<int>(seeds.size());

    // Top-K over passing candidates: offer() keeps the K best, earliest first on ties.
    for (std::size_t k = 0; k < scores.size(); ++k) {
      if (!scores[k].hard_ok) continue;
      ++passed;
      PoolEntry entry = make_entry(scores[k], texts[k], 0, state.next_id);
      if (pool.offer(std::move(entry)).accepted) ++state.next_id;
    }
    if (scored) std::move(scores.begin(), scores.end(), std::back_inserter(*scored));
  }
  if (!pool.full())
    throw InitializationError(fmt::format("pool initialization failed: {} of {} candidates passed the hard "
                                          "constraints, {} needed",
                                          passed, state.generated, cfg.pool_capacity),
                              state.generated, passed);
  return pool;
}

IterationLog refine_step(ExemplarPool& pool, const CandidateGenerator& gen, const EnergyPredictor& predictor,
                         const SearchConfig& cfg, Rng& rng, int iteration, SearchState& state) {
  if (!pool.full()) throw std::logic_error("refine_step requires a full pool");
  IterationLog log;
  log.iteration = iteration;
  const PoolEntry& picked = pool.entry(rng.index(pool.size()));
  log.exemplar_id = picked.id;
  const Structure exemplar = picked.structure;

  const std::uint64_t step_seed = rng.next_u64();
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.candidates_per_iteration));
  for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = mix_seed(step_seed, k);
  std::vector<std::string> texts;
  auto scores = generate_and_score(gen, predictor, cfg, &exemplar, seeds, texts);
  state.generated += static_cast<int>(seeds.size());

  for (std::size_t k = 0; k < scores.size(); ++k) {
    CandidateScore& c = scores[k];
    log.candidate_scores.push_back(c.score);
    log.candidate_abs_delta.push_back(c.hard_ok ? c.abs_delta : std::nullopt);
    log.candidate_hard_ok.push_back(c.hard_ok);
    if (!c.hard_ok || !(c.score > pool.min_score())) continue;
    const double abs_delta = *c.abs_delta;
    const double energy = *c.energy;
    const std::size_t id = state.next_id++;
    auto result = pool.offer(make_entry(c, texts[k], iteration, id));
    log.replacements.push_back({k, id, *result.evicted_id, c.score, abs_delta, energy, texts[k]});
  }
  log.pool_min = pool.min_score();
  log.pool_max = pool.max_score();
  return log;
}

SearchReport run_search(const SearchConfig& cfg, const CandidateGenerator& gen, const EnergyPredictor& predictor) {
  cfg.validate();
  SearchReport report;
  report.config = cfg;
  SearchState state;
  ExemplarPool pool = initialize_pool(gen, predictor, cfg, state);

  report.best_abs_delta_e = std::numeric_limits<double>::infinity();
  auto consider = [&](double abs_delta, double energy, const std::string& cif) {
    if (abs_delta < report.best_abs_delta_e) {
      report.best_abs_delta_e = abs_delta;
      report.best_energy = energy;
      report.best_cif = cif;
    }
  };
  for (const auto& e : pool.entries()) consider(e.abs_delta, e.energy, e.cif);
  report.initial_best_abs_delta_e = report.best_abs_delta_e;
  report.initial_pool_min = pool.min_score();
  report.initial_pool_max = pool.max_score();

  Rng rng(mix_seed(cfg.seed, kRefineStream));
  for (int it = 1; it <= cfg.iterations; ++it) {
    IterationLog log = refine_step(pool, gen, predictor, cfg, rng, it, state);
    IterationSummary summary;
    for (std::size_t k = 0; k < log.candidate_abs_delta.size(); ++k) {
      const auto& d = log.candidate_abs_delta[k];
      if (d && (!summary.iteration_best_abs_delta_e || *d < *summary.iteration_best_abs_delta_e))
        summary.iteration_best_abs_delta_e = d;
    }
    for (const auto& r : log.replacements) consider(r.abs_delta, r.energy, r.cif);
    summary.best_abs_delta_e = report.best_abs_delta_e;
    summary.pool_min = log.pool_min;
    summary.pool_max = log.pool_max;
    summary.replacements = log.replacements.size();
    summary.exemplar_id = log.exemplar_id;
    report.per_iteration.push_back(summary);
    report.logs.push_back(std::move(log));
  }
  report.success = report.best_abs_delta_e <= cfg.success_tolerance;
  return report;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::ordered_json to_json(const SearchConfig& cfg) {
  nlohmann::ordered_json j;
  j["target_energy"] = cfg.target_energy;
  j["lambda_energy"] = cfg.lambda_energy;
  j["energy_weight"] = cfg.energy_weight;
  j["pvcp_weight"] = cfg.pvcp_weight;
  j["iterations"] = cfg.iterations;
  j["candidates_per_iteration"] = cfg.candidates_per_iteration;
  j["pool_capacity"] = cfg.pool_capacity;
  j["initial_candidates"] = cfg.initial_candidates;
  j["init_retry_budget"] = cfg.init_retry_budget;
  j["success_tolerance"] = cfg.success_tolerance;
  j["seed"] = cfg.seed;
  j["target_composition"] = format_formula(cfg.target_composition);
  j["reward"] = {{"w_comp", cfg.reward.comp}, {"w_parse", cfg.reward.parse},
                 {"w_valid", cfg.reward.valid}, {"w_phys", cfg.reward.phys}};
  j["phys"] = {{"hard_overlap_fraction", cfg.phys.hard_overlap_fraction},
               {"full_credit_fraction", cfg.phys.full_credit_fraction},
               {"vpa_min", cfg.phys.vpa_min},
               {"vpa_max", cfg.phys.vpa_max}};
  return j;
}

nlohmann::ordered_json to_json(const IterationLog& log) {
  nlohmann::ordered_json j;
  j["iteration"] = log.iteration;
  j["exemplar_id"] = log.exemplar_id;
  j["candidate_scores"] = log.candidate_scores;
  auto deltas = nlohmann::ordered_json::array();
  for (const auto& d : log.candidate_abs_delta) deltas.push_back(d ? nlohmann::ordered_json(*d) : nlohmann::ordered_json());
  j["candidate_abs_delta_e"] = deltas;
  j["candidate_hard_ok"] = log.candidate_hard_ok;
  auto reps = nlohmann::ordered_json::array();
  for (const auto& r : log.replacements)
    reps.push_back({{"candidate", r.candidate}, {"new_id", r.new_id}, {"evicted_id", r.evicted_id},
                    {"score", r.score}, {"abs_delta_e", r.abs_delta}});
  j["replacements"] = reps;
  j["pool_min"] = log.pool_min;
  j["pool_max"] = log.pool_max;
  return j;
}

nlohmann::ordered_json to_json(const SearchReport& report) {
  nlohmann::ordered_json j;
  j["config"] = to_json(report.config);
  j["seed"] = report.config.seed;
  j["initial"] = {{"best_abs_delta_e", report.initial_best_abs_delta_e},
                  {"pool_min", report.initial_pool_min},
                  {"pool_max", report.initial_pool_max}};
  auto per = nlohmann::ordered_json::array();
  for (const auto& s : report.per_iteration) {
    nlohmann::ordered_json e;
    e["best_abs_delta_e"] = s.best_abs_delta_e;
    e["iteration_best_abs_delta_e"] =
        s.iteration_best_abs_delta_e ? nlohmann::ordered_json(*s.iteration_best_abs_delta_e) : nlohmann::ordered_json();
    e["pool_min"] = s.pool_min;
    e["pool_max"] = s.pool_max;
    e["replacements"] = s.replacements;
    e["exemplar_id"] = s.exemplar_id;
    per.push_back(e);
  }
  j["per_iteration"] = per;
  j["success"] = report.success;
  j["best_abs_delta_e"] = report.best_abs_delta_e;
  j["best_energy"] = report.best_energy;
  j["best_cif"] = report.best_cif;
  return j;
}

}  // namespace catdesign
