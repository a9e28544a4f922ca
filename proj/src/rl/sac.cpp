// Copyright 2026 The sarkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sarkit/rl/sac.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sarkit/error.hpp"

namespace sarkit::rl {

namespace {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;
constexpr double kHalfLog2Pi = 0.91893853320467274;  // ½·log(2π)
constexpr double kTanhEpsilon = 1e-6;  // keeps the squash correction finite

double final_layer_scale() { return 1e-2; }

// Per-dimension pieces of one squashed-Gaussian draw, kept so the backward
// pass can rebuild every local derivative.
struct DrawParts {
  double mean, log_std_raw, log_std, sigma, eps, action;
  bool clamped;
};

DrawParts draw_dimension(double mean, double log_std_raw, double eps) {
  DrawParts p;
  p.mean = mean;
  p.log_std_raw = log_std_raw;
  p.log_std = std::clamp(log_std_raw, kLogStdMin, kLogStdMax);
  p.clamped = log_std_raw < kLogStdMin || log_std_raw > kLogStdMax;
  p.sigma = std::exp(p.log_std);
  p.eps = eps;
  p.action = std::tanh(p.mean + p.sigma * p.eps);
  return p;
}

// log π(a|s) contribution of one dimension: Gaussian density of the
// pre-squash sample plus the tanh change-of-variables term.
double draw_log_prob(const DrawParts& p) {
  return -p.log_std - 0.5 * p.eps * p.eps - kHalfLog2Pi -
         std::log(1.0 - p.action * p.action + kTanhEpsilon);
}

Matrix concat_columns(const Matrix& left, const Matrix& right) {
  Matrix out(left.rows(), left.cols() + right.cols());
  for (std::size_t r = 0; r < left.rows(); ++r) {
    double* row = out.row_ptr(r);
    const double* l = left.row_ptr(r);
    const double* rr = right.row_ptr(r);
    std::copy(l, l + left.cols(), row);
    std::copy(rr, rr + right.cols(), row + left.cols());
  }
  return out;
}

}  // namespace

void SacConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw_error(ErrorKind::kConfiguration, "discount must lie in [0, 1)");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw_error(ErrorKind::kConfiguration, "target update rate must lie in (0, 1]");
  }
  if (batch_size < 1) {
    throw_error(ErrorKind::kConfiguration, "batch size must be at least 1");
  }
  if (hidden.empty()) {
    throw_error(ErrorKind::kConfiguration, "at least one hidden layer is required");
  }
  for (std::size_t h : hidden) {
    if (h == 0) throw_error(ErrorKind::kConfiguration, "hidden sizes must be positive");
  }
  if (!(lr0 > 0.0)) {
    throw_error(ErrorKind::kConfiguration, "learning rate must be positive");
  }
  if (replay_capacity < batch_size) {
    throw_error(ErrorKind::kConfiguration,
                "replay capacity must hold at least one batch");
  }
}

PolicySample gaussian_policy_sample(const Mlp& net, const std::vector<double>& obs,
                                    Rng& rng) {
  if (obs.size() != net.input_dim()) {
    throw_error(ErrorKind::kArgument, "observation length does not match the policy");
  }
  const std::size_t dim = net.output_dim() / 2;
  Matrix x(1, obs.size());
  std::copy(obs.begin(), obs.end(), x.row_ptr(0));
  const Matrix out = net.forward(x);

  PolicySample sample;
  sample.action.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const DrawParts p = draw_dimension(out(0, d), out(0, dim + d), rng.normal());
    sample.action[d] = p.action;
    sample.log_prob += draw_log_prob(p);
  }
  return sample;
}

std::vector<double> gaussian_policy_mean(const Mlp& net,
                                         const std::vector<double>& obs) {
  if (obs.size() != net.input_dim()) {
    throw_error(ErrorKind::kArgument, "observation length does not match the policy");
  }
  const std::size_t dim = net.output_dim() / 2;
  Matrix x(1, obs.size());
  std::copy(obs.begin(), obs.end(), x.row_ptr(0));
  const Matrix out = net.forward(x);
  std::vector<double> action(dim);
  for (std::size_t d = 0; d < dim; ++d) action[d] = std::tanh(out(0, d));
  return action;
}

SacAgent::SacAgent(std::size_t obs_dim, std::size_t act_dim, SacConfig config,
                   std::uint64_t seed)
    : obs_dim_(obs_dim), act_dim_(act_dim), config_(std::move(config)),
      update_rng_(0) {
  if (obs_dim == 0 || act_dim == 0) {
    throw_error(ErrorKind::kArgument, "agent dimensions must be positive");
  }
  config_.validate();

  Rng init(seed);
  Rng actor_rng = init.fork(1);
  Rng critic1_rng = init.fork(2);
  Rng critic2_rng = init.fork(3);
  update_rng_ = init.fork(4);

  std::vector<std::size_t> actor_sizes;
  actor_sizes.push_back(obs_dim_);
  for (std::size_t h : config_.hidden) actor_sizes.push_back(h);
  actor_sizes.push_back(2 * act_dim_);
  actor_ = Mlp(actor_sizes, actor_rng, final_layer_scale());

  std::vector<std::size_t> critic_sizes;
  critic_sizes.push_back(obs_dim_ + act_dim_);
  for (std::size_t h : config_.hidden) critic_sizes.push_back(h);
  critic_sizes.push_back(1);
  critic1_ = Mlp(critic_sizes, critic1_rng);
  critic2_ = Mlp(critic_sizes, critic2_rng);
  target1_ = critic1_;
  target2_ = critic2_;

  actor_opt_ = Adam(actor_.parameters().size());
  critic1_opt_ = Adam(critic1_.parameters().size());
  critic2_opt_ = Adam(critic2_.parameters().size());
  alpha_opt_ = Adam(1);

  log_alpha_ = 0.0;
  target_entropy_ = -static_cast<double>(act_dim_);
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

std::vector<double> SacAgent::act_stochastic(const std::vector<double>& obs,
                                             Rng& rng) const {
  return gaussian_policy_sample(actor_, obs, rng).action;
}

std::vector<double> SacAgent::act_deterministic(const std::vector<double>& obs) const {
  return gaussian_policy_mean(actor_, obs);
}

std::vector<double> SacAgent::td_targets(const ReplayBuffer::Batch& batch,
                                         Rng& rng) const {
  const std::size_t B = batch.obs.rows();
  const double alpha_now = alpha();

  // Fresh next actions from the current policy (reparameterized draws).
  const Matrix next_out = actor_.forward(batch.next_obs);
  Matrix next_actions(B, act_dim_);
  std::vector<double> next_log_prob(B, 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t d = 0; d < act_dim_; ++d) {
      const DrawParts p =
          draw_dimension(next_out(b, d), next_out(b, act_dim_ + d), rng.normal());
      next_actions(b, d) = p.action;
      next_log_prob[b] += draw_log_prob(p);
    }
  }

  const Matrix next_in = concat_columns(batch.next_obs, next_actions);
  const Matrix q1 = target1_.forward(next_in);
  const Matrix q2 = target2_.forward(next_in);

  std::vector<double> targets(B);
  for (std::size_t b = 0; b < B; ++b) {
    const double q_min = std::min(q1(b, 0), q2(b, 0));
    targets[b] = batch.rewards[b] +
                 config_.gamma * batch.not_terminal[b] *
                     (q_min - alpha_now * next_log_prob[b]);
  }
  return targets;
}

SacAgent::Losses SacAgent::update(ReplayBuffer& buffer, double lr) {
  if (buffer.size() < config_.start_learning) {
    throw_error(ErrorKind::kSequencing,
                "update requested before the start-learning threshold");
  }
  const auto batch = buffer.sample(config_.batch_size, update_rng_);
  return update_batch(batch, lr);
}

SacAgent::Losses SacAgent::update_batch(const ReplayBuffer::Batch& batch, double lr) {
  const std::size_t B = batch.obs.rows();
  if (B != config_.batch_size) {
    throw_error(ErrorKind::kArgument, "batch size does not match the configuration");
  }
  if (batch.obs.cols() != obs_dim_ || batch.actions.cols() != act_dim_) {
    throw_error(ErrorKind::kArgument, "batch shapes do not match the agent");
  }
  const double alpha_now = alpha();
  const double inv_b = 1.0 / static_cast<double>(B);
  Losses losses;

  // ---- Critic regression toward the Bellman backup ----
  const std::vector<double> targets = td_targets(batch, update_rng_);
  const Matrix critic_in = concat_columns(batch.obs, batch.actions);

  Mlp::Workspace ws1, ws2;
  const Matrix q1 = critic1_.forward(critic_in, &ws1);
  const Matrix q2 = critic2_.forward(critic_in, &ws2);

  Matrix dq1(B, 1), dq2(B, 1);
  for (std::size_t b = 0; b < B; ++b) {
    const double e1 = q1(b, 0) - targets[b];
    const double e2 = q2(b, 0) - targets[b];
    losses.critic1 += e1 * e1 * inv_b;
    losses.critic2 += e2 * e2 * inv_b;
    dq1(b, 0) = 2.0 * e1 * inv_b;
    dq2(b, 0) = 2.0 * e2 * inv_b;
  }

  std::vector<double> grad1(critic1_.parameters().size(), 0.0);
  std::vector<double> grad2(critic2_.parameters().size(), 0.0);
  critic1_.backward(ws1, dq1, grad1);
  critic2_.backward(ws2, dq2, grad2);
  critic1_opt_.step(critic1_.parameters(), grad1, lr);
  critic2_opt_.step(critic2_.parameters(), grad2, lr);

  // ---- Actor: maximize min-critic value plus entropy ----
  Mlp::Workspace ws_actor;
  const Matrix actor_out = actor_.forward(batch.obs, &ws_actor);
  std::vector<DrawParts> draws(B * act_dim_);
  Matrix fresh_actions(B, act_dim_);
  std::vector<double> log_prob(B, 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t d = 0; d < act_dim_; ++d) {
      DrawParts& p = draws[b * act_dim_ + d];
      p = draw_dimension(actor_out(b, d), actor_out(b, act_dim_ + d),
                         update_rng_.normal());
      fresh_actions(b, d) = p.action;
      log_prob[b] += draw_log_prob(p);
    }
  }

  const Matrix policy_in = concat_columns(batch.obs, fresh_actions);
  Mlp::Workspace ws_q1, ws_q2;
  const Matrix q1_pi = critic1_.forward(policy_in, &ws_q1);
  const Matrix q2_pi = critic2_.forward(policy_in, &ws_q2);

  Matrix dq1_pi(B, 1), dq2_pi(B, 1);
  for (std::size_t b = 0; b < B; ++b) {
    const double q_min = std::min(q1_pi(b, 0), q2_pi(b, 0));
    losses.actor += (alpha_now * log_prob[b] - q_min) * inv_b;
    losses.mean_log_prob += log_prob[b] * inv_b;
    // Subgradient of the min: route through the smaller critic.
    const bool first = q1_pi(b, 0) <= q2_pi(b, 0);
    dq1_pi(b, 0) = first ? -inv_b : 0.0;
    dq2_pi(b, 0) = first ? 0.0 : -inv_b;
  }

  // Critic parameters stay frozen here: their gradients land in scratch
  // buffers that are dropped; only the input gradient flows to the actor.
  std::vector<double> scratch1(critic1_.parameters().size(), 0.0);
  std::vector<double> scratch2(critic2_.parameters().size(), 0.0);
  const Matrix din1 = critic1_.backward(ws_q1, dq1_pi, scratch1);
  const Matrix din2 = critic2_.backward(ws_q2, dq2_pi, scratch2);

  Matrix dactor_out(B, 2 * act_dim_);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t d = 0; d < act_dim_; ++d) {
      const DrawParts& p = draws[b * act_dim_ + d];
      const double a = p.action;
      const double one_minus_a2 = 1.0 - a * a;
      // d(actor loss)/d(action): the frozen-critic path plus the squash
      // correction term of the entropy bonus.
      const double dl_da = din1(b, obs_dim_ + d) + din2(b, obs_dim_ + d) +
                           alpha_now * inv_b * (2.0 * a / (one_minus_a2 + kTanhEpsilon));
      const double dl_du = dl_da * one_minus_a2;
      dactor_out(b, d) = dl_du;  // mean head: du/dmean = 1
      // log-std head: u = mean + exp(log_std)·eps, plus the direct -log_std
      // term of the Gaussian entropy; a hard clamp blocks both.
      dactor_out(b, act_dim_ + d) =
          p.clamped ? 0.0 : dl_du * p.sigma * p.eps - alpha_now * inv_b;
    }
  }

  std::vector<double> actor_grad(actor_.parameters().size(), 0.0);
  actor_.backward(ws_actor, dactor_out, actor_grad);
  actor_opt_.step(actor_.parameters(), actor_grad, lr);

  // ---- Temperature: pull log π toward the entropy target ----
  double alpha_grad = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    losses.alpha += -log_alpha_ * (log_prob[b] + target_entropy_) * inv_b;
    alpha_grad += -(log_prob[b] + target_entropy_) * inv_b;
  }
  std::vector<double> alpha_param = {log_alpha_};
  alpha_opt_.step(alpha_param, {alpha_grad}, lr);
  log_alpha_ = alpha_param[0];

  // ---- Slow target tracking ----
  sync_targets(config_.tau);

  if (!std::isfinite(losses.critic1) || !std::isfinite(losses.critic2) ||
      !std::isfinite(losses.actor) || !std::isfinite(losses.alpha)) {
    throw_error(ErrorKind::kConvergence,
                "non-finite training loss (critic1=" + std::to_string(losses.critic1) +
                    " critic2=" + std::to_string(losses.critic2) +
                    " actor=" + std::to_string(losses.actor) +
                    " alpha-loss=" + std::to_string(losses.alpha) +
                    " alpha=" + std::to_string(alpha_now) + ")");
  }
  return losses;
}

void SacAgent::sync_targets(double rate) {
  Mlp::polyak_update(target1_, critic1_, rate);
  Mlp::polyak_update(target2_, critic2_, rate);
}

namespace {

nlohmann::json net_to_json(const Mlp& net) {
  return {{"sizes", net.sizes()}, {"parameters", net.parameters()}};
}

Mlp net_from_json(const nlohmann::json& j) {
  const auto sizes = j.at("sizes").get<std::vector<std::size_t>>();
  Rng dummy(0);
  Mlp net(sizes, dummy);
  auto params = j.at("parameters").get<std::vector<double>>();
  if (params.size() != net.parameters().size()) {
    throw_error(ErrorKind::kIo, "checkpoint parameter count mismatch");
  }
  net.parameters() = std::move(params);
  return net;
}

nlohmann::json adam_to_json(const Adam& opt) {
  return {{"m", opt.first_moment()},
          {"v", opt.second_moment()},
          {"t", opt.updates()}};
}

void adam_from_json(const nlohmann::json& j, Adam& opt) {
  opt.restore(j.at("m").get<std::vector<double>>(),
              j.at("v").get<std::vector<double>>(),
              j.at("t").get<std::uint64_t>());
}

}  // namespace

nlohmann::json sac_config_to_json(const SacConfig& config) {
  return {{"hidden", config.hidden},
          {"lr0", config.lr0},
          {"linear_schedule", config.linear_schedule},
          {"total_steps", config.total_steps},
          {"start_learning", config.start_learning},
          {"batch_size", config.batch_size},
          {"tau", config.tau},
          {"gamma", config.gamma},
          {"replay_capacity", config.replay_capacity}};
}

SacConfig sac_config_from_json(const nlohmann::json& j) {
  SacConfig config;
  try {
    config.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    config.lr0 = j.at("lr0").get<double>();
    config.linear_schedule = j.at("linear_schedule").get<bool>();
    config.total_steps = j.at("total_steps").get<std::uint64_t>();
    config.start_learning = j.at("start_learning").get<std::size_t>();
    config.batch_size = j.at("batch_size").get<std::size_t>();
    config.tau = j.at("tau").get<double>();
    config.gamma = j.at("gamma").get<double>();
    config.replay_capacity = j.at("replay_capacity").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorKind::kIo,
                "malformed agent settings (" + std::string(e.what()) + ")");
  }
  config.validate();
  return config;
}

nlohmann::json SacAgent::to_json() const {
  nlohmann::json j;
  j["format"] = "sac-agent";
  j["version"] = 1;
  j["obs_dim"] = obs_dim_;
  j["act_dim"] = act_dim_;
  j["config"] = sac_config_to_json(config_);
  j["actor"] = net_to_json(actor_);
  j["critic1"] = net_to_json(critic1_);
  j["critic2"] = net_to_json(critic2_);
  j["target1"] = net_to_json(target1_);
  j["target2"] = net_to_json(target2_);
  j["actor_opt"] = adam_to_json(actor_opt_);
  j["critic1_opt"] = adam_to_json(critic1_opt_);
  j["critic2_opt"] = adam_to_json(critic2_opt_);
  j["alpha_opt"] = adam_to_json(alpha_opt_);
  j["log_alpha"] = log_alpha_;
  j["target_entropy"] = target_entropy_;
  // A deterministic reseed for the update stream; resuming from the file is
  // reproducible even though the generator state itself is not serialized.
  j["update_rng_reseed"] = Rng::split_mix64(update_rng_.seed() + 0x632be59bd9b4e019ULL);
  return j;
}

SacAgent SacAgent::from_json(const nlohmann::json& j) {
  SacAgent agent;
  try {
    if (j.at("format").get<std::string>() != "sac-agent") {
      throw_error(ErrorKind::kIo, "not an agent checkpoint");
    }
    agent.obs_dim_ = j.at("obs_dim").get<std::size_t>();
    agent.act_dim_ = j.at("act_dim").get<std::size_t>();
    agent.config_ = sac_config_from_json(j.at("config"));

    agent.actor_ = net_from_json(j.at("actor"));
    agent.critic1_ = net_from_json(j.at("critic1"));
    agent.critic2_ = net_from_json(j.at("critic2"));
    agent.target1_ = net_from_json(j.at("target1"));
    agent.target2_ = net_from_json(j.at("target2"));

    agent.actor_opt_ = Adam(agent.actor_.parameters().size());
    agent.critic1_opt_ = Adam(agent.critic1_.parameters().size());
    agent.critic2_opt_ = Adam(agent.critic2_.parameters().size());
    agent.alpha_opt_ = Adam(1);
    adam_from_json(j.at("actor_opt"), agent.actor_opt_);
    adam_from_json(j.at("critic1_opt"), agent.critic1_opt_);
    adam_from_json(j.at("critic2_opt"), agent.critic2_opt_);
    adam_from_json(j.at("alpha_opt"), agent.alpha_opt_);

    agent.log_alpha_ = j.at("log_alpha").get<double>();
    agent.target_entropy_ = j.at("target_entropy").get<double>();
    agent.update_rng_ = Rng(j.at("update_rng_reseed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorKind::kIo,
                "malformed agent checkpoint (" + std::string(e.what()) + ")");
  }

  if (agent.actor_.input_dim() != agent.obs_dim_ ||
      agent.actor_.output_dim() != 2 * agent.act_dim_ ||
      agent.critic1_.input_dim() != agent.obs_dim_ + agent.act_dim_) {
    throw_error(ErrorKind::kContract, "checkpoint network shapes are inconsistent");
  }
  return agent;
}

}  // namespace sarkit::rl
