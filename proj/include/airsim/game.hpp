#pragma once

// Agent decision machinery: N-person prisoner's dilemma payoffs, Pavlovian
// reinforcement of the played action, neighbour comparison and the
// exceedance penalty.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "airsim/core.hpp"

namespace airsim::game {

// Cooperate decreases the emission rate, defect increases it.
enum class Action : std::uint8_t { Cooperate = 0, Defect = 1 };

// Central-strategy orders.
enum class Command : std::uint8_t { Decrease, Hold, Increase };

struct PayoffParams {
  double b = 2.0;
  double c = -0.5;
  std::size_t n = 1;  // agents in the pollutant group
};

// b*ncp/N - c for cooperators, b*ncp/N for defectors. Throws DomainError if
// ncp > N or N == 0.
double payoff(std::size_t ncp, const PayoffParams& params, Action s);

// Linearly decaying weights, newest first: w_i = (L - i + 1) / sum.
std::vector<double> memory_weights(std::size_t length);

// Sum of w_i * M_i with M_1 the newest payoff. Throws DomainError when the
// weights do not sum to 1, are not strictly decreasing, or lengths differ.
double weighted_payoff(std::span<const double> payoffs, std::span<const double> weights);

struct Probabilities {
  double cooperate = 0.5;
  double defect = 0.5;
};

// Reinforces the played action when wp > 0, weakens it otherwise. The other
// probability is untouched.
Probabilities update_probabilities(Probabilities p, Action played, double wp, double alpha);

// Number of adjacent pairs that differ. Throws DomainError for fewer than two
// actions.
int homogeneity(std::span<const Action> actions);

inline constexpr double kAlphaMin = 0.01;
inline constexpr double kAlphaMax = 0.5;
inline constexpr double kInitialAlpha = 0.1;

double update_learning_rate(double alpha, int d, std::size_t length);

// Mean of the neighbours' rewards; 0 without neighbours.
double neighbor_average(std::span<const double> rewards);
// Mean of the stored neighbour averages.
double average_np(std::span<const double> history);

Action choose_action(Action current, double wp, double avg_np, Probabilities updated);

// ER / (PL - PL_max). Throws DomainError unless PL > PL_max and ER >= 0.
double participation(double emission_rate, double level, double level_max);

enum class PenaltyMode : std::uint8_t { Cumulative, Instantaneous, None };

// `sigma` is empty when the agent took no part in an exceedance this step.
double update_ecofactor(double prev, std::optional<double> sigma, PenaltyMode mode);

// Payoff, less the EcoFactor for defectors.
double reward(std::size_t ncp, const PayoffParams& params, Action s, double eco_factor);

struct Goals {
  PerPollutant<std::optional<double>> levels{};
  int aq_index = 1;
};

// Orders for each pollutant group. A group offends when its forecast exceeds
// its goal level or its sub-index exceeds the goal index; an O3 offence also
// flags the SOx and CO groups. An AQ index over the goal with no offending
// group sends every group a decrease.
PerPollutant<Command> central_directive(const PerPollutant<double>& forecasts, int aq_index, const Goals& goals);

// Groups whose emissions feed `p` in the forecasting chain: p itself, and
// SOx and CO for O3.
std::vector<Pollutant> responsible_groups(Pollutant p);

struct MemoryRecord {
  Action action = Action::Cooperate;
  double reward = 0.0;
  double neighbour_average = 0.0;
};

struct AgentState {
  std::uint32_t id = 0;
  std::uint32_t source = 0;
  Pollutant group = Pollutant::PM10;
  std::uint32_t box = 0;
  Action action = Action::Cooperate;
  Probabilities probabilities;
  double alpha = kInitialAlpha;
  double eco_factor = 0.0;
  double cumulative_reward = 0.0;
  std::vector<MemoryRecord> memory;  // oldest first, at most L records
  std::vector<std::uint32_t> neighbours;
};

struct AgentSpec {
  std::uint32_t source = 0;
  Pollutant group = Pollutant::PM10;
  std::uint32_t box = 0;
  Action initial_action = Action::Cooperate;
};

// Agents of the evolutionary strategies. Neighbours share box and group.
class Population {
 public:
  Population(std::span<const AgentSpec> specs, double b, double c, std::size_t memory, PenaltyMode mode);

  std::span<const AgentState> agents() const { return agents_; }
  std::size_t memory_length() const { return memory_; }
  std::size_t group_size(Pollutant p) const { return group_size_[index_of(p)]; }
  std::size_t cooperators(Pollutant p) const;

  // Plays one round on the current actions. `sigma[i]` is agent i's
  // participation when its box exceeds a goal it is responsible for. Agents
  // whose memory is not yet full take their next action from `warmup`; the
  // rest learn and choose by the Pavlovian rule.
  void resolve(std::span<const std::optional<double>> sigma, const std::function<Action(const AgentState&)>& warmup);

 private:
  std::vector<AgentState> agents_;
  PerPollutant<std::size_t> group_size_{};
  std::size_t memory_;
  PenaltyMode mode_;
  double b_;
  double c_;
  std::vector<double> weights_;
};

}  // namespace airsim::game
