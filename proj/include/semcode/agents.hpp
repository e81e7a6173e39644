#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semcode/environment.hpp"
#include "semcode/error.hpp"
#include "semcode/mode_space.hpp"
#include "semcode/model.hpp"
#include "semcode/net.hpp"
#include "semcode/rng.hpp"

namespace semcode {

enum class Role { parent, child, flat };

inline const char* role_name(Role r) {
  switch (r) {
    case Role::parent: return "parent";
    case Role::child: return "child";
    case Role::flat: return "flat";
  }
  return "unknown";
}

inline Role role_from_name(const std::string& s) {
  if (s == "parent") return Role::parent;
  if (s == "child") return Role::child;
  if (s == "flat") return Role::flat;
  fail(ErrorClass::parse, "unknown role '" + s + "'");
}

using StateVector = std::vector<double>;

// State layout, per role:
//   [0..5]   aggregates over the 3-frame window starting at decided frame 0
//   [6..11]  aggregates over the 3-frame window starting at decided frame 1
//            (windows clip at the sequence end)
//   next     one-hot of the decision position (width = steps per episode)
//   next     lambda_s mapped to [0,1) via l / (1 + l)
//   last 2   child only: the parent's chosen frame QPs, divided by 51
// Each aggregate block is: mean mask ratio, max mask ratio, mean complexity
// normalized by ref_rate, mean rate sensitivity, mean degrade midpoint
// divided by 51, related-CTU fraction.
struct StateLayout {
  Role role = Role::parent;
  int num_steps = 2;
  bool with_parent_qps = false;

  static constexpr int kBlocks = 2;
  static constexpr int kWindow = 3;
  static constexpr int kBlockFeatures = 6;

  int dim() const {
    return kBlocks * kBlockFeatures + num_steps + 1 + (with_parent_qps ? 2 : 0);
  }

  std::string descriptor() const {
    std::string s = "state-v1;role=";
    s += role_name(role);
    s += ";blocks=2;window=3;features=mean_mask,max_mask,"
         "mean_complexity_over_ref,mean_rate_sensitivity,"
         "mean_midpoint_over_51,related_fraction;onehot=";
    s += std::to_string(num_steps);
    s += ";lambda=l_over_1pl;parent_qps=";
    s += with_parent_qps ? "2" : "0";
    return s;
  }

  std::uint64_t hash() const { return fnv1a64(descriptor()); }
};

inline StateLayout state_layout_for(Role role, const ModeSpace& space) {
  switch (role) {
    case Role::parent:
      return StateLayout{Role::parent, 2, false};
    case Role::child:
      return StateLayout{Role::child,
                         space.per_frame_deltas ? 2 * space.gop_size() : 2,
                         true};
    case Role::flat:
      return StateLayout{Role::flat, 1, false};
  }
  fail(ErrorClass::contract, "bad role");
}

inline StateVector build_state(const VideoModel& model, const ModeSpace& space,
                               Role role, int position, double lambda_s,
                               std::span<const int> parent_qps = {}) {
  StateLayout layout = state_layout_for(role, space);
  require(position >= 0 && position < layout.num_steps, ErrorClass::contract,
          "decision position out of range");
  require(lambda_s >= 0.0, ErrorClass::contract, "lambda_s must be >= 0");
  require(parent_qps.size() == (layout.with_parent_qps ? 2u : 0u),
          ErrorClass::contract,
          "parent_qps must be given exactly for the child role");

  StateVector s;
  s.reserve(layout.dim());
  double ref = model.ref_rate();
  int last = model.frame_count() - 1;
  for (int block = 0; block < StateLayout::kBlocks; ++block) {
    int lo = std::min(block, last);
    int hi = std::min(block + StateLayout::kWindow - 1, last);
    double sum_mask = 0, max_mask = 0, sum_c = 0, sum_kappa = 0, sum_mu = 0;
    double related = 0;
    double count = 0;
    for (int t = lo; t <= hi; ++t) {
      for (const CtuModel& ctu : model.frames[t].ctus) {
        sum_mask += ctu.mask_ratio;
        max_mask = std::max(max_mask, ctu.mask_ratio);
        sum_c += ctu.complexity;
        sum_kappa += ctu.rate_sensitivity;
        sum_mu += ctu.degrade_midpoint;
        if (ctu.mask_ratio >= space.region_threshold) related += 1.0;
        count += 1.0;
      }
    }
    s.push_back(sum_mask / count);
    s.push_back(max_mask);
    s.push_back(sum_c / count / ref);
    s.push_back(sum_kappa / count);
    s.push_back(sum_mu / count / 51.0);
    s.push_back(related / count);
  }
  for (int k = 0; k < layout.num_steps; ++k)
    s.push_back(k == position ? 1.0 : 0.0);
  s.push_back(lambda_s / (1.0 + lambda_s));
  for (int qp : parent_qps) s.push_back(double(qp) / 51.0);
  return s;
}

// ---------------------------------------------------------------------------
// Policies

struct AgentPolicy {
  Role role = Role::parent;
  std::vector<int> alphabet;  // QPs (parent) or deltas (child); empty for flat
  Mlp actor;
  Mlp critic;
  StateLayout layout;

  int action_count() const { return actor.output_dim(); }
};

inline std::size_t flat_action_count(const ModeSpace& space) {
  return space.frame_qp_set.size() * space.frame_qp_set.size() *
         space.delta_qp_set.size() * space.delta_qp_set.size();
}

inline AgentPolicy make_policy(Role role, const ModeSpace& space,
                               std::uint64_t seed, int hidden = 64) {
  AgentPolicy p;
  p.role = role;
  p.layout = state_layout_for(role, space);
  int actions = 0;
  switch (role) {
    case Role::parent:
      p.alphabet = space.frame_qp_set;
      actions = static_cast<int>(p.alphabet.size());
      break;
    case Role::child:
      p.alphabet = space.delta_qp_set;
      actions = static_cast<int>(p.alphabet.size());
      break;
    case Role::flat:
      actions = static_cast<int>(flat_action_count(space));
      break;
  }
  auto actor_rng = make_rng(derive_seed(
      seed, {fnv1a64("init"), static_cast<std::uint64_t>(role), 0}));
  auto critic_rng = make_rng(derive_seed(
      seed, {fnv1a64("init"), static_cast<std::uint64_t>(role), 1}));
  p.actor = make_mlp({p.layout.dim(), hidden, hidden, actions}, actor_rng);
  p.critic = make_mlp({p.layout.dim(), hidden, hidden, 1}, critic_rng);
  return p;
}

struct PolicyOutput {
  std::vector<double> probs;
  double value = 0.0;
};

inline PolicyOutput policy_forward(const AgentPolicy& policy,
                                   std::span<const double> state) {
  PolicyOutput out;
  out.probs = softmax(mlp_forward(policy.actor, state));
  out.value = mlp_forward(policy.critic, state)[0];
  return out;
}

// ---------------------------------------------------------------------------
// Rewards

inline double reward_frame(const EncodeOutcome& outcome, double lambda_s,
                           double alpha_f) {
  return outcome.fidelity - lambda_s * outcome.normalized_rate - alpha_f;
}

inline double reward_ctu(const EncodeOutcome& outcome, double lambda_s,
                         double alpha_c) {
  return outcome.fidelity - lambda_s * outcome.normalized_rate - alpha_c;
}

// Counting decorator: serves repeated mode encodes from a cache while
// accounting every logical request. Single-run scratch state, not shareable.
class CountingEnv final : public Environment {
 public:
  explicit CountingEnv(const Environment& base) : base_(base) {}

  EncodeOutcome encode_full(const FullMode& mode) const override {
    ++count_;
    std::string key = mode_key(mode);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(std::move(key), base_.encode_full(mode)).first;
    return it->second;
  }

  double ref_rate() const override { return base_.ref_rate(); }
  std::size_t count() const { return count_; }

 private:
  const Environment& base_;
  mutable std::unordered_map<std::string, EncodeOutcome> cache_;
  mutable std::size_t count_ = 0;
};

// Mean pre-alpha reward over uniformly random modes. Draw order per sample:
// parent role draws qp1, qp2; child draws each delta pair (related then
// unrelated); flat draws qp1, qp2, related, unrelated.
inline double calibrate_alpha(const Environment& env, const ModeSpace& space,
                              Role role, double lambda_s, int samples,
                              std::uint64_t seed,
                              const ModeSelection* parent_mode = nullptr) {
  require(samples >= 1, ErrorClass::contract, "samples must be >= 1");
  require((role == Role::child) == (parent_mode != nullptr),
          ErrorClass::contract,
          "parent_mode must be given exactly for the child role");
  space.validate();
  bool has_zero_delta = std::find(space.delta_qp_set.begin(),
                                  space.delta_qp_set.end(),
                                  0) != space.delta_qp_set.end();
  require(role != Role::parent || has_zero_delta, ErrorClass::contract,
          "identity child action requires 0 in delta_qp_set");

  auto rng = make_rng(derive_seed(
      seed, {fnv1a64("calibrate"), static_cast<std::uint64_t>(role)}));
  auto pick = [&](const std::vector<int>& a) {
    return a[uniform_index(rng, a.size())];
  };
  int pairs = space.per_frame_deltas ? space.gop_size() : 1;

  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    FullMode mode;
    switch (role) {
      case Role::parent:
        mode.qp_frame1 = pick(space.frame_qp_set);
        mode.qp_frame2 = pick(space.frame_qp_set);
        mode.deltas = {{0, 0}};
        break;
      case Role::child: {
        mode.qp_frame1 = parent_mode->qp_frame1;
        mode.qp_frame2 = parent_mode->qp_frame2;
        mode.deltas.clear();
        for (int k = 0; k < pairs; ++k) {
          int dr = pick(space.delta_qp_set);
          int du = pick(space.delta_qp_set);
          mode.deltas.emplace_back(dr, du);
        }
        break;
      }
      case Role::flat:
        mode.qp_frame1 = pick(space.frame_qp_set);
        mode.qp_frame2 = pick(space.frame_qp_set);
        mode.deltas = {
            {pick(space.delta_qp_set), pick(space.delta_qp_set)}};
        break;
    }
    EncodeOutcome outcome = env.encode_full(mode);
    sum += outcome.fidelity - lambda_s * outcome.normalized_rate;
  }
  return sum / samples;
}

// ---------------------------------------------------------------------------
// A2C

struct TrajectoryStep {
  int state_id = -1;  // steps with equal non-negative ids share a state
  StateVector state;
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double reward = 0.0;  // terminal
};

// G_t = gamma^(K-1-t) * terminal reward.
inline std::vector<double> episode_returns(const Trajectory& traj,
                                           double gamma) {
  std::size_t n = traj.steps.size();
  std::vector<double> g(n);
  double acc = traj.reward;
  for (std::size_t t = n; t-- > 0;) {
    g[t] = acc;
    acc *= gamma;
  }
  return g;
}

namespace detail {

// Forward caches shared across steps with the same state_id.
struct StateGroup {
  const StateVector* state = nullptr;
  MlpCache actor_cache;
  MlpCache critic_cache;
  std::vector<double> logits;
  std::vector<double> probs;
  double log_z = 0.0;
  double value = 0.0;
  double ent = 0.0;
  std::vector<double> dlogits;
  double dvalue = 0.0;
};

template <typename Fn>
inline void group_steps(const AgentPolicy& policy,
                        std::span<const Trajectory> batch,
                        std::vector<StateGroup>& groups,
                        std::vector<std::size_t>& step_group, Fn&& forward) {
  std::unordered_map<int, std::size_t> by_id;
  for (const Trajectory& traj : batch) {
    for (const TrajectoryStep& step : traj.steps) {
      std::size_t gi;
      if (step.state_id >= 0) {
        auto it = by_id.find(step.state_id);
        if (it != by_id.end()) {
          gi = it->second;
        } else {
          gi = groups.size();
          groups.emplace_back();
          groups.back().state = &step.state;
          by_id.emplace(step.state_id, gi);
          forward(groups.back());
        }
      } else {
        gi = groups.size();
        groups.emplace_back();
        groups.back().state = &step.state;
        forward(groups.back());
      }
      step_group.push_back(gi);
    }
  }
}

}  // namespace detail

// Critic values under the current parameters; advantages A = G - V(s).
inline std::vector<double> compute_advantages(const AgentPolicy& policy,
                                              std::span<const Trajectory> batch,
                                              double gamma) {
  std::vector<detail::StateGroup> groups;
  std::vector<std::size_t> step_group;
  detail::group_steps(policy, batch, groups, step_group,
                      [&](detail::StateGroup& g) {
                        g.value = mlp_forward(policy.critic, *g.state)[0];
                      });
  std::vector<double> adv;
  std::size_t k = 0;
  for (const Trajectory& traj : batch) {
    std::vector<double> g = episode_returns(traj, gamma);
    for (std::size_t t = 0; t < traj.steps.size(); ++t, ++k)
      adv.push_back(g[t] - groups[step_group[k]].value);
  }
  return adv;
}

struct A2cEval {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  MlpGrad actor_grad;
  MlpGrad critic_grad;
};

// Mean over steps of  -log pi(a|s) * A  +  1/2 (G - V(s))^2  -  beta * H(pi).
// Advantages enter as constants, so the gradient of this exact scalar is what
// backpropagation returns (and what the finite-difference check probes).
inline A2cEval a2c_loss(const AgentPolicy& policy,
                        std::span<const Trajectory> batch, double gamma,
                        double entropy_coef,
                        std::span<const double> advantages) {
  require(!batch.empty(), ErrorClass::contract, "empty batch");

  std::vector<detail::StateGroup> groups;
  std::vector<std::size_t> step_group;
  detail::group_steps(policy, batch, groups, step_group,
                      [&](detail::StateGroup& g) {
                        g.logits = mlp_forward(policy.actor, *g.state,
                                               &g.actor_cache);
                        g.log_z = log_sum_exp(g.logits);
                        g.probs.resize(g.logits.size());
                        for (std::size_t i = 0; i < g.logits.size(); ++i)
                          g.probs[i] = std::exp(g.logits[i] - g.log_z);
                        g.ent = entropy(g.probs);
                        g.value = mlp_forward(policy.critic, *g.state,
                                              &g.critic_cache)[0];
                        g.dlogits.assign(g.logits.size(), 0.0);
                      });

  std::size_t total_steps = step_group.size();
  require(advantages.size() == total_steps, ErrorClass::contract,
          "advantage count does not match step count");
  double inv_n = 1.0 / static_cast<double>(total_steps);

  A2cEval eval;
  eval.actor_grad = MlpGrad::zeros_like(policy.actor);
  eval.critic_grad = MlpGrad::zeros_like(policy.critic);

  std::size_t k = 0;
  for (const Trajectory& traj : batch) {
    std::vector<double> returns = episode_returns(traj, gamma);
    for (std::size_t t = 0; t < traj.steps.size(); ++t, ++k) {
      const TrajectoryStep& step = traj.steps[t];
      detail::StateGroup& g = groups[step_group[k]];
      require(step.action >= 0 &&
                  step.action < static_cast<int>(g.probs.size()),
              ErrorClass::contract, "action index out of range");

      double G = returns[t];
      double A = advantages[k];
      double log_pi = g.logits[step.action] - g.log_z;
      double v_err = g.value - G;

      eval.policy_loss += -log_pi * A;
      eval.value_loss += 0.5 * v_err * v_err;
      eval.entropy += g.ent;

      // d/dz_j of the step loss:
      //   A (p_j - [j == a])  +  beta * p_j (log p_j + H)
      for (std::size_t j = 0; j < g.probs.size(); ++j) {
        double d = A * (g.probs[j] - (static_cast<int>(j) == step.action));
        if (entropy_coef != 0.0 && g.probs[j] > 0.0)
          d += entropy_coef * g.probs[j] * (std::log(g.probs[j]) + g.ent);
        g.dlogits[j] += inv_n * d;
      }
      g.dvalue += inv_n * v_err;
    }
  }

  for (detail::StateGroup& g : groups) {
    mlp_backward(policy.actor, *g.state, g.actor_cache, g.dlogits,
                 eval.actor_grad);
    double dv[1] = {g.dvalue};
    mlp_backward(policy.critic, *g.state, g.critic_cache, dv,
                 eval.critic_grad);
  }

  eval.policy_loss *= inv_n;
  eval.value_loss *= inv_n;
  eval.entropy *= inv_n;
  eval.loss = eval.policy_loss + eval.value_loss - entropy_coef * eval.entropy;
  return eval;
}

struct UpdateStats {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_return = 0.0;
};

inline UpdateStats a2c_update(AgentPolicy& policy,
                              std::span<const Trajectory> batch, double lr,
                              double gamma, double entropy_coef) {
  std::vector<double> adv = compute_advantages(policy, batch, gamma);
  A2cEval eval = a2c_loss(policy, batch, gamma, entropy_coef, adv);
  if (!std::isfinite(eval.loss))
    fail(ErrorClass::numeric,
         "non-finite loss (policy_loss=" + fmt_double_short(eval.policy_loss) +
             ", value_loss=" + fmt_double_short(eval.value_loss) + ")");
  sgd_step(policy.actor, eval.actor_grad, lr);
  sgd_step(policy.critic, eval.critic_grad, lr);

  UpdateStats stats;
  stats.loss = eval.loss;
  stats.policy_loss = eval.policy_loss;
  stats.value_loss = eval.value_loss;
  stats.entropy = eval.entropy;
  double sum = 0.0;
  for (const Trajectory& traj : batch) sum += traj.reward;
  stats.mean_return = sum / static_cast<double>(batch.size());
  return stats;
}

// ---------------------------------------------------------------------------
// Staged training

struct TrainConfig {
  int iterations = 10000;
  int batch_size = 30;
  double lr_parent = 1e-3;
  double lr_child = 1e-4;
  double discount = 1.0;  // within-episode gamma
  double entropy_coef = 0.01;
  double lambda_s = 0.0;
  int alpha_samples = 256;
  std::uint64_t seed = 0;
  int hidden = 64;

  void validate() const {
    require(iterations >= 0, ErrorClass::contract, "iterations must be >= 0");
    require(batch_size >= 1, ErrorClass::contract, "batch_size must be >= 1");
    require(lr_parent > 0 && lr_child > 0, ErrorClass::contract,
            "learning rates must be positive");
    require(discount > 0.0 && discount <= 1.0, ErrorClass::contract,
            "discount must be in (0,1]");
    require(entropy_coef >= 0.0, ErrorClass::contract,
            "entropy_coef must be >= 0");
    require(lambda_s >= 0.0, ErrorClass::contract, "lambda_s must be >= 0");
    require(alpha_samples >= 1, ErrorClass::contract,
            "alpha_samples must be >= 1");
    require(hidden >= 1, ErrorClass::contract, "hidden width must be >= 1");
  }
};

struct TrainLogRow {
  int stage = 0;  // 1 = frame level, 2 = ctu level, 0 = flat
  int iteration = 0;
  double mean_reward = 0.0;
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct TrainLog {
  std::vector<TrainLogRow> rows;
  std::size_t env_encodes = 0;
  double alpha_f = 0.0;
  double alpha_c = 0.0;
};

namespace detail {

// One policy-gradient stage over a fixed decision sequence. Episode e of
// iteration it draws from the stream (seed, "rollout", stage, it*batch+e),
// so collection order cannot change the batch.
inline void run_stage(const CountingEnv& env, const TrainConfig& cfg,
                      AgentPolicy& policy, int stage, double lr, double alpha,
                      const std::vector<StateVector>& states,
                      const std::function<FullMode(std::span<const int>)>& to_mode,
                      TrainLog& log) {
  int steps = static_cast<int>(states.size());
  std::vector<Trajectory> batch(cfg.batch_size);
  std::vector<int> actions(steps);

  for (int it = 0; it < cfg.iterations; ++it) {
    // Policy is fixed within an iteration: forward each decision state once.
    std::vector<std::vector<double>> probs(steps);
    std::vector<std::vector<double>> logp(steps);
    std::vector<double> values(steps);
    for (int k = 0; k < steps; ++k) {
      std::vector<double> logits = mlp_forward(policy.actor, states[k]);
      double lz = log_sum_exp(logits);
      logp[k].resize(logits.size());
      probs[k].resize(logits.size());
      for (std::size_t j = 0; j < logits.size(); ++j) {
        logp[k][j] = logits[j] - lz;
        probs[k][j] = std::exp(logp[k][j]);
      }
      values[k] = mlp_forward(policy.critic, states[k])[0];
    }

    for (int e = 0; e < cfg.batch_size; ++e) {
      std::uint64_t episode =
          static_cast<std::uint64_t>(it) * cfg.batch_size + e;
      auto rng = make_rng(derive_seed(
          cfg.seed, {fnv1a64("rollout"), static_cast<std::uint64_t>(stage),
                     episode}));
      Trajectory& traj = batch[e];
      traj.steps.assign(steps, {});
      for (int k = 0; k < steps; ++k) {
        int a = sample_categorical(probs[k], uniform_unit(rng));
        actions[k] = a;
        TrajectoryStep& st = traj.steps[k];
        st.state_id = k;
        st.state = states[k];
        st.action = a;
        st.log_prob = logp[k][a];
        st.value = values[k];
      }
      EncodeOutcome outcome = env.encode_full(to_mode(actions));
      traj.reward = outcome.fidelity - cfg.lambda_s * outcome.normalized_rate -
                    alpha;
    }

    UpdateStats stats =
        a2c_update(policy, batch, lr, cfg.discount, cfg.entropy_coef);
    log.rows.push_back(TrainLogRow{stage, it, stats.mean_return, stats.loss,
                                   stats.policy_loss, stats.value_loss,
                                   stats.entropy});
  }
}

}  // namespace detail

inline std::vector<int> greedy_actions(const AgentPolicy& policy,
                                       const std::vector<StateVector>& states) {
  std::vector<int> actions;
  actions.reserve(states.size());
  for (const StateVector& s : states)
    actions.push_back(argmax_index(softmax(mlp_forward(policy.actor, s))));
  return actions;
}

inline std::vector<StateVector> parent_states(const VideoModel& model,
                                              const ModeSpace& space,
                                              double lambda_s) {
  std::vector<StateVector> states;
  for (int k = 0; k < 2; ++k)
    states.push_back(build_state(model, space, Role::parent, k, lambda_s));
  return states;
}

inline std::vector<StateVector> child_states(const VideoModel& model,
                                             const ModeSpace& space,
                                             double lambda_s,
                                             std::span<const int> parent_qps) {
  StateLayout layout = state_layout_for(Role::child, space);
  std::vector<StateVector> states;
  for (int k = 0; k < layout.num_steps; ++k)
    states.push_back(
        build_state(model, space, Role::child, k, lambda_s, parent_qps));
  return states;
}

// Child actions -> delta pairs. Step 2p decides the related delta of GOP
// position p, step 2p+1 its unrelated delta (one shared pair by default).
inline FullMode child_mode(const ModeSpace& space, int qp1, int qp2,
                           std::span<const int> actions) {
  require(actions.size() % 2 == 0, ErrorClass::contract,
          "child actions come in related/unrelated pairs");
  FullMode mode;
  mode.qp_frame1 = qp1;
  mode.qp_frame2 = qp2;
  mode.deltas.clear();
  for (std::size_t k = 0; k + 1 < actions.size(); k += 2)
    mode.deltas.emplace_back(space.delta_qp_set[actions[k]],
                             space.delta_qp_set[actions[k + 1]]);
  return mode;
}

struct HrlResult {
  AgentPolicy parent;
  AgentPolicy child;
  TrainLog log;
  FullMode greedy;
};

inline FullMode greedy_full_mode(const AgentPolicy& parent,
                                 const AgentPolicy& child,
                                 const VideoModel& model,
                                 const ModeSpace& space, double lambda_s) {
  std::vector<int> pa =
      greedy_actions(parent, parent_states(model, space, lambda_s));
  int qp1 = parent.alphabet[pa[0]];
  int qp2 = parent.alphabet[pa[1]];
  std::array<int, 2> qps = {qp1, qp2};
  std::vector<int> ca =
      greedy_actions(child, child_states(model, space, lambda_s, qps));
  return child_mode(space, qp1, qp2, ca);
}

inline ModeSelection greedy_mode(const AgentPolicy& parent,
                                 const AgentPolicy& child,
                                 const VideoModel& model,
                                 const ModeSpace& space, double lambda_s) {
  return greedy_full_mode(parent, child, model, space, lambda_s).simple();
}

// Stage 1 trains the frame-level agent with the identity child action; stage
// 2 freezes the parent at its greedy choice and trains the ctu-level agent
// conditioned on it.
inline HrlResult train_hierarchical(const Environment& base_env,
                                    const VideoModel& model,
                                    const ModeSpace& space,
                                    const TrainConfig& cfg) {
  cfg.validate();
  space.validate();
  require(model.gop_size == space.gop_size(), ErrorClass::contract,
          "model gop_size does not match mode space");
  bool has_zero = std::find(space.delta_qp_set.begin(),
                            space.delta_qp_set.end(),
                            0) != space.delta_qp_set.end();
  require(has_zero, ErrorClass::contract,
          "stage 1 needs the identity delta 0 in delta_qp_set");

  CountingEnv env(base_env);
  HrlResult result;
  result.parent = make_policy(Role::parent, space, cfg.seed, cfg.hidden);
  result.child = make_policy(Role::child, space, cfg.seed, cfg.hidden);

  // Stage 1: frame-level agent, child fixed at identity.
  result.log.alpha_f = calibrate_alpha(env, space, Role::parent, cfg.lambda_s,
                                       cfg.alpha_samples, cfg.seed);
  std::vector<StateVector> p_states =
      parent_states(model, space, cfg.lambda_s);
  const auto& qp_set = space.frame_qp_set;
  detail::run_stage(
      env, cfg, result.parent, 1, cfg.lr_parent, result.log.alpha_f, p_states,
      [&](std::span<const int> a) {
        return FullMode{qp_set[a[0]], qp_set[a[1]], {{0, 0}}};
      },
      result.log);

  // Stage 2: freeze the parent at its greedy decision.
  std::vector<int> pa = greedy_actions(result.parent, p_states);
  int qp1 = qp_set[pa[0]];
  int qp2 = qp_set[pa[1]];
  ModeSelection frozen{qp1, qp2, 0, 0};
  result.log.alpha_c =
      calibrate_alpha(env, space, Role::child, cfg.lambda_s, cfg.alpha_samples,
                      cfg.seed, &frozen);
  std::array<int, 2> qps = {qp1, qp2};
  std::vector<StateVector> c_states =
      child_states(model, space, cfg.lambda_s, qps);
  detail::run_stage(
      env, cfg, result.child, 2, cfg.lr_child, result.log.alpha_c, c_states,
      [&](std::span<const int> a) { return child_mode(space, qp1, qp2, a); },
      result.log);

  result.greedy =
      greedy_full_mode(result.parent, result.child, model, space, cfg.lambda_s);
  result.log.env_encodes = env.count();
  return result;
}

}  // namespace semcode
