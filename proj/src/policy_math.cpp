#include "catdesign/policy_math.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace catdesign {

void SequenceLogProbs::validate() const {
  if (logp_current.empty()) throw std::invalid_argument("sequence has no tokens");
  if (logp_current.size() != logp_reference.size())
    throw std::invalid_argument("current and reference log-probabilities differ in length");
  auto bad = [](double x) { return !std::isfinite(x) || x > 0; };
  if (std::any_of(logp_current.begin(), logp_current.end(), bad) ||
      std::any_of(logp_reference.begin(), logp_reference.end(), bad))
    throw std::invalid_argument("log-probabilities must be finite and <= 0");
}

void CandidateGroup::validate() const {
  if (rewards.size() < 2) throw std::invalid_argument("a group needs at least two members");
  if (sequences.size() != rewards.size()) throw std::invalid_argument("one sequence per reward required");
  if (!std::all_of(rewards.begin(), rewards.end(), [](double r) { return std::isfinite(r); }))
    throw std::invalid_argument("rewards must be finite");
  for (const auto& s : sequences) s.validate();
}

double normalized_logprob(const SequenceLogProbs& seq, Policy which) {
  seq.validate();
  const auto& lp = which == Policy::current ? seq.logp_current : seq.logp_reference;
  return std::accumulate(lp.begin(), lp.end(), 0.0) / static_cast<double>(lp.size());
}

double kl_estimate(const SequenceLogProbs& seq) {
  seq.validate();
  double sum = 0;
  for (std::size_t t = 0; t < seq.logp_current.size(); ++t) sum += seq.logp_current[t] - seq.logp_reference[t];
  return sum / static_cast<double>(seq.logp_current.size());
}

std::vector<double> group_advantages(std::span<const double> rewards, double epsilon) {
  if (rewards.size() < 2) throw std::invalid_argument("a group needs at least two members");
  if (!(epsilon >= 0)) throw std::invalid_argument("epsilon must be >= 0");
  const double k = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / k;
  double ss = 0;
  for (double r : rewards) ss += (r - mean) * (r - mean);
  const double sigma = std::sqrt(ss / k) + epsilon;

  std::vector<double> adv(rewards.size(), 0.0);
  // Identical rewards: the rounded mean can differ from them by an ulp, which
  // epsilon would otherwise amplify into a spurious nonzero signal.
  const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  if (*lo == *hi || sigma == 0) return adv;
  for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / sigma;
  return adv;
}

std::vector<double> group_advantages(const CandidateGroup& g, double epsilon) {
  return group_advantages(std::span<const double>(g.rewards), epsilon);
}

GrpoLoss grpo_loss(const CandidateGroup& g, const GrpoConfig& cfg) {
  g.validate();
  if (!(cfg.beta >= 0)) throw std::invalid_argument("beta must be >= 0");
  GrpoLoss out;
  out.advantages = group_advantages(g, cfg.epsilon);
  out.per_member.reserve(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double ell = normalized_logprob(g.sequences[k], Policy::current);
    out.per_member.push_back(-out.advantages[k] * ell + cfg.beta * kl_estimate(g.sequences[k]));
  }
  out.total = std::accumulate(out.per_member.begin(), out.per_member.end(), 0.0) / static_cast<double>(g.size());
  return out;
}

std::vector<double> grpo_gradient_weights(const CandidateGroup& g, const GrpoConfig& cfg) {
  g.validate();
  // KL = l_cur - l_ref and l_ref is frozen, so d KL = d l_cur.
  const auto adv = group_advantages(g, cfg.epsilon);
  std::vector<double> w(adv.size());
  for (std::size_t k = 0; k < adv.size(); ++k) w[k] = (cfg.beta - adv[k]) / static_cast<double>(adv.size());
  return w;
}

namespace {

void check_mmtg(double l_mae, double l_ce, const MmtgConfig& cfg) {
  if (!(l_mae >= 0) || !(l_ce >= 0)) throw std::invalid_argument("losses must be >= 0");
  if (!(cfg.lambda > 0 && cfg.lambda <= 1)) throw std::invalid_argument("lambda must lie in (0, 1]");
}

}  // namespace

double mmtg_loss(double l_mae, double l_ce, const MmtgConfig& cfg) {
  check_mmtg(l_mae, l_ce, cfg);
  const double hi = std::max(l_mae, l_ce);
  const double lo = std::min(l_mae, l_ce);
  return hi * (2.0 - cfg.lambda * std::tanh(lo));
}

double mmtg_loss_additive(double l_mae, double l_ce, const MmtgConfig& cfg) {
  check_mmtg(l_mae, l_ce, cfg);
  const double hi = std::max(l_mae, l_ce);
  const double lo = std::min(l_mae, l_ce);
  return hi + hi * (1.0 - cfg.lambda * std::tanh(lo));
}

}  // namespace catdesign
