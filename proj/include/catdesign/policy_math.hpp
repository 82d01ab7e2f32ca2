#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace catdesign {

/// Per-token log-probabilities of one sampled sequence under the trainable
/// policy and the frozen reference policy.
struct SequenceLogProbs {
  std::vector<double> logp_current;
  std::vector<double> logp_reference;

  std::size_t length() const { return logp_current.size(); }
  /// Throws std::invalid_argument unless both are non-empty, equal length,
  /// finite and <= 0.
  void validate() const;
};

enum class Policy { current, reference };

struct CandidateGroup {
  std::string prompt_id;
  std::vector<SequenceLogProbs> sequences;
  std::vector<double> rewards;

  std::size_t size() const { return rewards.size(); }
  /// K >= 2, one sequence per reward, finite rewards.
  void validate() const;
};

struct GrpoConfig {
  double beta = 0.1;      // KL coefficient
  double epsilon = 1e-8;  // added to the group standard deviation
};

struct MmtgConfig {
  double lambda = 1.0;  // gating strength in (0, 1]
};

/// (1/T) sum_t log pi(y_t).
double normalized_logprob(const SequenceLogProbs& seq, Policy which);

/// (1/T) sum_t [log pi_cur(y_t) - log pi_ref(y_t)]; single-sample estimator,
/// may be negative.
double kl_estimate(const SequenceLogProbs& seq);

/// A_k = (r_k - mean) / (population std + epsilon).
std::vector<double> group_advantages(std::span<const double> rewards, double epsilon);
std::vector<double> group_advantages(const CandidateGroup& g, double epsilon);

struct GrpoLoss {
  double total = 0;                 // mean of per_member
  std::vector<double> per_member;   // -A_k * l_cur(y_k) + beta * KL(y_k)
  std::vector<double> advantages;
};

GrpoLoss grpo_loss(const CandidateGroup& g, const GrpoConfig& cfg);

/// Coefficients c_k such that dL/dtheta = sum_k c_k * d l_cur(y_k)/dtheta,
/// with advantages held constant: c_k = (beta - A_k) / K.
std::vector<double> grpo_gradient_weights(const CandidateGroup& g, const GrpoConfig& cfg);

/// L_max * (2 - lambda * tanh(L_min)). Throws std::invalid_argument for
/// negative losses or lambda outside (0, 1].
double mmtg_loss(double l_mae, double l_ce, const MmtgConfig& cfg);

/// L_max + L_max * (1 - lambda * tanh(L_min)), same contract.
double mmtg_loss_additive(double l_mae, double l_ce, const MmtgConfig& cfg);

}  // namespace catdesign
