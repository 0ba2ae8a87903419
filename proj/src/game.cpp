#include "airsim/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "airsim/error.hpp"

namespace airsim::game {

double payoff(std::size_t ncp, const PayoffParams& params, Action s) {
  if (params.n == 0) throw DomainError("payoff: group size must be >= 1");
  if (ncp > params.n) throw DomainError("payoff: ncp exceeds group size");
  const double share = params.b * static_cast<double>(ncp) / static_cast<double>(params.n);
  return s == Action::Cooperate ? share - params.c : share;
}

std::vector<double> memory_weights(std::size_t length) {
  if (length == 0) throw DomainError("memory length must be >= 1");
  const double total = static_cast<double>(length * (length + 1)) / 2.0;
  std::vector<double> w(length);
  for (std::size_t i = 0; i < length; ++i) w[i] = static_cast<double>(length - i) / total;
  return w;
}

double weighted_payoff(std::span<const double> payoffs, std::span<const double> weights) {
  if (payoffs.size() != weights.size() || weights.empty())
    throw DomainError("weighted payoff: one weight per remembered payoff");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("weighted payoff: weights must sum to 1");
  for (std::size_t i = 1; i < weights.size(); ++i) {
    if (!(weights[i] < weights[i - 1])) throw DomainError("weighted payoff: weights must decrease with age");
  }
  double wp = 0.0;
  for (std::size_t i = 0; i < payoffs.size(); ++i) wp += weights[i] * payoffs[i];
  return wp;
}

Probabilities update_probabilities(Probabilities p, Action played, double wp, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("learning rate must lie in [0, 1]");
  double& q = played == Action::Cooperate ? p.cooperate : p.defect;
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("probability must lie in [0, 1]");
  q = wp > 0.0 ? q + (1.0 - q) * alpha : (1.0 - alpha) * q;
  return p;
}

int homogeneity(std::span<const Action> actions) {
  if (actions.size() < 2) throw DomainError("homogeneity needs at least two actions");
  int d = 0;
  for (std::size_t i = 1; i < actions.size(); ++i) d += actions[i] != actions[i - 1] ? 1 : 0;
  return d;
}

double update_learning_rate(double alpha, int d, std::size_t length) {
  double next;
  if (d == 0)
    next = alpha + 0.015;
  else if (d == static_cast<int>(length) - 1)
    next = alpha + 0.010;
  else
    next = alpha - 0.010;
  return std::clamp(next, kAlphaMin, kAlphaMax);
}

double neighbor_average(std::span<const double> rewards) {
  if (rewards.empty()) return 0.0;
  return std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
}

double average_np(std::span<const double> history) { return neighbor_average(history); }

Action choose_action(Action current, double wp, double avg_np, Probabilities updated) {
  if (!(wp < avg_np)) return current;
  if (current == Action::Cooperate) return updated.defect > updated.cooperate ? Action::Defect : current;
  return updated.cooperate > updated.defect ? Action::Cooperate : current;
}

double participation(double emission_rate, double level, double level_max) {
  if (!(level > level_max)) throw DomainError("participation is only defined while the level exceeds its maximum");
  if (!(emission_rate >= 0.0)) throw DomainError("emission rate must be >= 0");
  return emission_rate / (level - level_max);
}

double update_ecofactor(double prev, std::optional<double> sigma, PenaltyMode mode) {
  if (sigma && !(*sigma >= 0.0)) throw DomainError("participation must be >= 0");
  switch (mode) {
    case PenaltyMode::Cumulative:
      return sigma ? prev + (1.0 - std::exp(-*sigma)) : prev;
    case PenaltyMode::Instantaneous:
      return sigma ? 1.0 - std::exp(-*sigma) : 0.0;
    case PenaltyMode::None:
      break;
  }
  return 0.0;
}

double reward(std::size_t ncp, const PayoffParams& params, Action s, double eco_factor) {
  const double u = payoff(ncp, params, s);
  return s == Action::Cooperate ? u : u - eco_factor;
}

std::vector<Pollutant> responsible_groups(Pollutant p) {
  if (p == Pollutant::O3) return {Pollutant::O3, Pollutant::SOx, Pollutant::CO};
  return {p};
}

PerPollutant<Command> central_directive(const PerPollutant<double>& forecasts, int aq_index, const Goals& goals) {
  const auto& bands = AqBands::standard();
  PerPollutant<bool> offending{};
  for (Pollutant p : kAllPollutants) {
    const double f = forecasts[index_of(p)];
    const auto& goal = goals.levels[index_of(p)];
    bool over = goal && f > *goal;
    if (AqBands::is_classified(p)) over = over || bands.sub_index(p, f) > goals.aq_index;
    if (!over) continue;
    for (Pollutant g : responsible_groups(p)) offending[index_of(g)] = true;
  }
  const bool any = std::any_of(offending.begin(), offending.end(), [](bool b) { return b; });
  PerPollutant<Command> out{};
  for (Pollutant p : kAllPollutants) {
    if (offending[index_of(p)] || (!any && aq_index > goals.aq_index))
      out[index_of(p)] = Command::Decrease;
    else
      out[index_of(p)] = Command::Hold;
  }
  return out;
}

// --- population -------------------------------------------------------------

Population::Population(std::span<const AgentSpec> specs, double b, double c, std::size_t memory, PenaltyMode mode)
    : memory_(memory), mode_(mode), b_(b), c_(c), weights_(memory_weights(memory)) {
  if (memory < 2) throw DomainError("memory length must be >= 2");
  agents_.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    AgentState a;
    a.id = static_cast<std::uint32_t>(i);
    a.source = specs[i].source;
    a.group = specs[i].group;
    a.box = specs[i].box;
    a.action = specs[i].initial_action;
    a.memory.reserve(memory);
    agents_.push_back(std::move(a));
    ++group_size_[index_of(specs[i].group)];
  }
  for (auto& a : agents_) {
    for (const auto& o : agents_) {
      if (o.id != a.id && o.group == a.group && o.box == a.box) a.neighbours.push_back(o.id);
    }
  }
}

std::size_t Population::cooperators(Pollutant p) const {
  return static_cast<std::size_t>(std::count_if(agents_.begin(), agents_.end(), [p](const AgentState& a) {
    return a.group == p && a.action == Action::Cooperate;
  }));
}

void Population::resolve(std::span<const std::optional<double>> sigma,
                         const std::function<Action(const AgentState&)>& warmup) {
  if (sigma.size() != agents_.size()) throw DomainError("one participation entry per agent expected");
  PerPollutant<std::size_t> ncp{};
  for (Pollutant p : kAllPollutants) ncp[index_of(p)] = cooperators(p);

  std::vector<double> rewards(agents_.size());
  for (auto& a : agents_) {
    const auto s = a.action == Action::Defect ? sigma[a.id] : std::nullopt;
    a.eco_factor = update_ecofactor(a.eco_factor, s, mode_);
    const PayoffParams params{b_, c_, group_size_[index_of(a.group)]};
    rewards[a.id] = reward(ncp[index_of(a.group)], params, a.action, a.eco_factor);
  }

  std::vector<double> nbr(agents_.size());
  for (const auto& a : agents_) {
    std::vector<double> r;
    r.reserve(a.neighbours.size());
    for (auto j : a.neighbours) r.push_back(rewards[j]);
    nbr[a.id] = neighbor_average(r);
  }

  for (auto& a : agents_) {
    a.cumulative_reward += rewards[a.id];
    if (a.memory.size() == memory_) a.memory.erase(a.memory.begin());
    a.memory.push_back({a.action, rewards[a.id], nbr[a.id]});
    if (a.memory.size() < memory_) {
      a.action = warmup(a);
      continue;
    }
    std::vector<double> payoffs, history;
    std::vector<Action> actions;
    for (auto it = a.memory.rbegin(); it != a.memory.rend(); ++it) payoffs.push_back(it->reward);
    for (const auto& m : a.memory) {
      actions.push_back(m.action);
      history.push_back(m.neighbour_average);
    }
    const double wp = weighted_payoff(payoffs, weights_);
    const auto updated = update_probabilities(a.probabilities, a.action, wp, a.alpha);
    a.alpha = update_learning_rate(a.alpha, homogeneity(actions), memory_);
    a.probabilities = updated;
    a.action = choose_action(a.action, wp, average_np(history), updated);
  }
}

}  // namespace airsim::game
