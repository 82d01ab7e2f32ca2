#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "catdesign/elements.hpp"
#include "catdesign/pvcp.hpp"
#include "catdesign/rng.hpp"
#include "catdesign/structure.hpp"

namespace catdesign {

/// Frozen property predictor. Implementations must be deterministic and
/// safe to call concurrently.
class EnergyPredictor {
public:
  virtual ~EnergyPredictor() = default;
  /// Energy in eV. May throw for structures it cannot handle.
  virtual double predict(const Structure& s) const = 0;
};

struct PairPotentialParams {
  double depth_scale = 0.5;  // eV per A of sqrt(r_i r_j)
  double cutoff = 6.0;       // A
  double pair_cap = 10.0;    // eV; upper clamp for one pair term
};

/// Shifted Lennard-Jones pair sum. For elements i, j:
///   sigma = (r_i + r_j) / 2^(1/6)   (minimum at the covalent-radius sum)
///   eps   = depth_scale * sqrt(r_i r_j)
/// Each pair term is shifted to vanish at the cutoff and clamped at pair_cap.
class PairPotentialSurrogate final : public EnergyPredictor {
public:
  explicit PairPotentialSurrogate(PairPotentialParams params = {},
                                  const CovalentRadiusTable& radii = CovalentRadiusTable::standard());

  double predict(const Structure& s) const override;
  double pair_energy(std::string_view el_i, std::string_view el_j, double r) const;
  const PairPotentialParams& params() const { return params_; }

private:
  PairPotentialParams params_;
  CovalentRadiusTable radii_;
};

/// Produces CIF text, optionally conditioned on an exemplar. Must be a pure
/// function of its arguments and safe to call concurrently.
class CandidateGenerator {
public:
  virtual ~CandidateGenerator() = default;
  virtual std::string propose(const Structure* exemplar, const CompositionVector& target,
                              std::uint64_t seed) const = 0;
};

struct DefectRates {
  double syntax = 0;         // unterminated quote -> PF
  double missing_field = 0;  // space group omitted -> VF
  double composition = 0;    // last site dropped -> CM
  double overlap = 0;        // second site moved onto the first -> PV
};

struct InjectedDefects {
  bool syntax = false;
  bool missing_field = false;
  bool composition = false;
  bool overlap = false;
};

struct MutationConfig {
  double coord_jitter = 0.05;    // fractional units, uniform in [-a, a]
  double lattice_jitter = 0.02;  // relative, applied to a, b, c
  DefectRates defects;
};

/// Local-neighborhood generator: jitters the exemplar (or the base structure
/// when unconditioned) and optionally injects defects. Without a base
/// structure, unconditioned proposals place the target composition randomly
/// in a cubic cell.
class MutationGenerator final : public CandidateGenerator {
public:
  explicit MutationGenerator(MutationConfig cfg = {}, std::optional<Structure> base = std::nullopt);

  std::string propose(const Structure* exemplar, const CompositionVector& target,
                      std::uint64_t seed) const override;

  struct Proposal {
    std::string cif;
    InjectedDefects injected;
  };
  Proposal propose_with_ledger(const Structure* exemplar, const CompositionVector& target,
                               std::uint64_t seed) const;

  const MutationConfig& config() const { return cfg_; }

private:
  Structure jitter(const Structure& s, Rng& rng) const;
  Structure random_structure(const CompositionVector& target, Rng& rng) const;

  MutationConfig cfg_;
  std::optional<Structure> base_;
};

/// exp(-lambda |e_pred - e_target|). Throws std::invalid_argument for lambda <= 0.
double energy_reward(double e_pred, double e_target, double lambda);

struct SearchConfig {
  double target_energy = 0;           // eV
  double lambda_energy = 1.0;         // 1/eV
  double energy_weight = 0.7;
  double pvcp_weight = 0.3;
  int iterations = 10;
  int candidates_per_iteration = 16;  // n
  std::size_t pool_capacity = 8;      // K
  int initial_candidates = 32;        // n_init, >= K
  int init_retry_budget = 5;          // extra n_init batches before giving up
  double success_tolerance = 0.1;     // eV
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  CompositionVector target_composition;
  RewardWeights reward;
  PhysConfig phys;

  void validate() const;
};

struct CandidateScore {
  double score = 0;
  double energy_reward = 0;
  std::optional<double> energy;
  std::optional<double> abs_delta;
  bool hard_ok = false;  // parsed and every pair above the hard-overlap bound
  RewardBreakdown pvcp;
  std::optional<Structure> structure;
  std::vector<std::string> diagnostics;
};

/// energy_weight * energy_reward + pvcp_weight * pvcp. Unparseable text and
/// predictor failures score 0.
CandidateScore combined_reward(const std::string& candidate_text, const SearchConfig& cfg,
                               const EnergyPredictor& predictor,
                               const CovalentRadiusTable& radii = CovalentRadiusTable::standard());

struct PoolEntry {
  Structure structure;
  std::string cif;
  double score = 0;
  double energy = 0;
  double abs_delta = 0;
  int iteration = 0;      // 0 = initialization
  std::size_t id = 0;     // unique within a run
};

/// Fixed-capacity exemplar set kept in descending score order.
class ExemplarPool {
public:
  explicit ExemplarPool(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool full() const { return entries_.size() == capacity_; }
  const std::vector<PoolEntry>& entries() const { return entries_; }
  const PoolEntry& entry(std::size_t i) const { return entries_.at(i); }
  double min_score() const;
  double max_score() const;

  /// Inserts while not full; once full, replaces the minimum only when the
  /// score is strictly greater.
  struct OfferResult {
    bool accepted = false;
    std::optional<std::size_t> evicted_id;
  };
  OfferResult offer(PoolEntry e);

private:
  std::size_t capacity_;
  std::vector<PoolEntry> entries_;
};

class InitializationError : public std::runtime_error {
public:
  InitializationError(const std::string& what, int generated, int passed)
      : std::runtime_error(what), generated(generated), passed(passed) {}
  int generated;
  int passed;
};

struct Replacement {
  std::size_t candidate = 0;  // index within the step
  std::size_t new_id = 0;
  std::size_t evicted_id = 0;
  double score = 0;
  double abs_delta = 0;
  double energy = 0;
  std::string cif;
};

struct IterationLog {
  int iteration = 0;
  std::size_t exemplar_id = 0;
  std::vector<double> candidate_scores;
  std::vector<std::optional<double>> candidate_abs_delta;
  std::vector<bool> candidate_hard_ok;
  std::vector<Replacement> replacements;
  double pool_min = 0;
  double pool_max = 0;
};

/// Running id source shared by initialization and refinement.
struct SearchState {
  std::size_t next_id = 0;
  int generated = 0;
};

/// Generate n_init unconditioned candidates (repeating within the retry
/// budget) and keep the K best that satisfy the hard constraints.
ExemplarPool initialize_pool(const CandidateGenerator& gen, const EnergyPredictor& predictor,
                             const SearchConfig& cfg, SearchState& state,
                             std::vector<CandidateScore>* scored = nullptr);

/// One refinement round: sample an exemplar uniformly, generate n candidates
/// from it, and let each candidate that beats the current pool minimum (and
/// passes the hard constraints) replace that minimum, in candidate order.
IterationLog refine_step(ExemplarPool& pool, const CandidateGenerator& gen, const EnergyPredictor& predictor,
                         const SearchConfig& cfg, Rng& rng, int iteration, SearchState& state);

struct IterationSummary {
  double best_abs_delta_e = 0;                     // running best over admitted entries
  std::optional<double> iteration_best_abs_delta_e;  // best hard-ok candidate this round
  double pool_min = 0;
  double pool_max = 0;
  std::size_t replacements = 0;
  std::size_t exemplar_id = 0;
};

struct SearchReport {
  SearchConfig config;
  double initial_best_abs_delta_e = 0;
  double initial_pool_min = 0;
  double initial_pool_max = 0;
  std::vector<IterationSummary> per_iteration;
  std::vector<IterationLog> logs;
  bool success = false;
  double best_abs_delta_e = 0;
  double best_energy = 0;
  std::string best_cif;
};

SearchReport run_search(const SearchConfig& cfg, const CandidateGenerator& gen, const EnergyPredictor& predictor);

nlohmann::ordered_json to_json(const SearchConfig& cfg);
nlohmann::ordered_json to_json(const SearchReport& report);
nlohmann::ordered_json to_json(const IterationLog& log);

}  // namespace catdesign
