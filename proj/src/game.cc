#include "commitment_games/game.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

namespace cgames {

Game::Game(std::vector<int> action_counts, std::vector<double> payoffs,
           std::vector<std::vector<std::string>> action_names)
    : action_counts_(std::move(action_counts)),
      payoffs_(std::move(payoffs)),
      action_names_(std::move(action_names)) {
  const int n = num_players();
  if (n < 2) throw GameError("a game needs at least 2 players");
  strides_.assign(n, 1);
  num_profiles_ = 1;
  for (int i = n - 1; i >= 0; --i) {
    if (action_counts_[i] < 1)
      throw GameError("player " + std::to_string(i + 1) +
                      " must have at least one action");
    strides_[i] = num_profiles_;
    num_profiles_ *= action_counts_[i];
  }
  if (static_cast<std::int64_t>(payoffs_.size()) != num_profiles_ * n)
    throw GameError("payoff tensor has " + std::to_string(payoffs_.size()) +
                    " entries, expected " +
                    std::to_string(num_profiles_ * n));
  for (double v : payoffs_)
    if (!std::isfinite(v)) throw GameError("payoffs must be finite");
  if (!action_names_.empty()) {
    if (static_cast<int>(action_names_.size()) != n)
      throw GameError("action_names must list every player");
    for (int i = 0; i < n; ++i)
      if (static_cast<int>(action_names_[i].size()) != action_counts_[i])
        throw GameError("action_names for player " + std::to_string(i + 1) +
                        " has the wrong length");
  }
}

Game Game::Zero(std::vector<int> action_counts) {
  std::int64_t profiles = 1;
  for (int c : action_counts) profiles *= std::max(c, 0);
  const auto n = static_cast<std::int64_t>(action_counts.size());
  return Game(std::move(action_counts),
              std::vector<double>(profiles * n, 0.0));
}

int Game::max_actions() const {
  return *std::max_element(action_counts_.begin(), action_counts_.end());
}

bool Game::ValidProfile(const Profile& profile) const {
  if (static_cast<int>(profile.size()) != num_players()) return false;
  for (int i = 0; i < num_players(); ++i)
    if (profile[i] < 0 || profile[i] >= action_counts_[i]) return false;
  return true;
}

std::int64_t Game::ProfileIndex(const Profile& profile) const {
  if (!ValidProfile(profile)) throw GameError("profile out of range");
  std::int64_t index = 0;
  for (int i = 0; i < num_players(); ++i) index += profile[i] * strides_[i];
  return index;
}

Profile Game::ProfileAt(std::int64_t index) const {
  Profile profile(num_players());
  for (int i = 0; i < num_players(); ++i) {
    profile[i] = static_cast<int>(index / strides_[i]);
    index %= strides_[i];
  }
  return profile;
}

void Game::set_utility(int player, const Profile& profile, double value) {
  payoffs_[ProfileIndex(profile) * num_players() + player] = value;
}

void Game::add_utility(int player, const Profile& profile, double delta) {
  payoffs_[ProfileIndex(profile) * num_players() + player] += delta;
}

std::string Game::ActionName(int player, int action) const {
  if (!action_names_.empty()) return action_names_[player][action];
  return "a" + std::to_string(action + 1);
}

int Game::ActionIndex(int player, const std::string& token) const {
  if (player < 0 || player >= num_players())
    throw GameError("player index out of range");
  for (int a = 0; a < action_counts_[player]; ++a)
    if (ActionName(player, a) == token) return a;
  try {
    size_t used = 0;
    int value = std::stoi(token, &used);
    if (used == token.size() && value >= 1 && value <= action_counts_[player])
      return value - 1;
  } catch (const std::exception&) {
  }
  throw GameError("unknown action '" + token + "' for player " +
                  std::to_string(player + 1));
}

std::string Game::ProfileName(const Profile& profile) const {
  std::string out = "(";
  for (int i = 0; i < num_players(); ++i) {
    if (i) out += ",";
    out += ActionName(i, profile[i]);
  }
  return out + ")";
}

double Game::MinPayoff() const {
  return *std::min_element(payoffs_.begin(), payoffs_.end());
}

double Game::MaxPayoff() const {
  return *std::max_element(payoffs_.begin(), payoffs_.end());
}

std::uint64_t Game::ContentHash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t k = 0; k < len; ++k) {
      h ^= bytes[k];
      h *= 1099511628211ULL;
    }
  };
  for (int c : action_counts_) {
    std::int64_t v = c;
    mix(&v, sizeof v);
  }
  for (double v : payoffs_) {
    if (v == 0.0) v = 0.0;  // fold -0 into +0
    mix(&v, sizeof v);
  }
  return h;
}

bool NextProfile(const std::vector<int>& action_counts, Profile& profile) {
  for (int i = static_cast<int>(action_counts.size()) - 1; i >= 0; --i) {
    if (++profile[i] < action_counts[i]) return true;
    profile[i] = 0;
  }
  return false;
}

MixedProfile PureProfile(const Game& game, const Profile& profile) {
  if (!game.ValidProfile(profile)) throw GameError("profile out of range");
  MixedProfile sigma(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    sigma[i].assign(game.num_actions(i), 0.0);
    sigma[i][profile[i]] = 1.0;
  }
  return sigma;
}

MixedProfile UniformOver(const Game& game,
                         const std::vector<std::vector<int>>& supports) {
  if (static_cast<int>(supports.size()) != game.num_players())
    throw GameError("one support per player required");
  MixedProfile sigma(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    if (supports[i].empty()) throw GameError("empty support");
    sigma[i].assign(game.num_actions(i), 0.0);
    for (int a : supports[i]) {
      if (a < 0 || a >= game.num_actions(i))
        throw GameError("support action out of range");
      sigma[i][a] = 1.0 / static_cast<double>(supports[i].size());
    }
  }
  return sigma;
}

void ValidateProfile(const Game& game, const MixedProfile& sigma, double tol) {
  if (static_cast<int>(sigma.size()) != game.num_players())
    throw GameError("profile has " + std::to_string(sigma.size()) +
                    " players, game has " +
                    std::to_string(game.num_players()));
  for (int i = 0; i < game.num_players(); ++i) {
    if (static_cast<int>(sigma[i].size()) != game.num_actions(i))
      throw GameError("profile for player " + std::to_string(i + 1) +
                      " has the wrong length");
    double total = 0.0;
    for (double p : sigma[i]) {
      if (!(p >= -tol && p <= 1.0 + tol))
        throw GameError("probability outside [0,1]");
      total += p;
    }
    if (std::abs(total - 1.0) > tol)
      throw GameError("probabilities of player " + std::to_string(i + 1) +
                      " do not sum to 1");
  }
}

std::vector<std::vector<int>> Support(const MixedProfile& sigma, double eps) {
  std::vector<std::vector<int>> support(sigma.size());
  for (size_t i = 0; i < sigma.size(); ++i)
    for (size_t a = 0; a < sigma[i].size(); ++a)
      if (sigma[i][a] > eps) support[i].push_back(static_cast<int>(a));
  return support;
}

bool HasFullSupport(const Game& game, const MixedProfile& sigma, double eps) {
  auto support = Support(sigma, eps);
  for (int i = 0; i < game.num_players(); ++i)
    if (static_cast<int>(support[i].size()) != game.num_actions(i))
      return false;
  return true;
}

double ProfileProbability(const MixedProfile& sigma, const Profile& profile,
                          int skip_player) {
  double p = 1.0;
  for (size_t i = 0; i < profile.size(); ++i)
    if (static_cast<int>(i) != skip_player) p *= sigma[i][profile[i]];
  return p;
}

double ExpectedUtility(const Game& game, const MixedProfile& sigma,
                       int player) {
  ValidateProfile(game, sigma);
  if (player < 0 || player >= game.num_players())
    throw GameError("player index out of range");
  double total = 0.0;
  Profile a(game.num_players(), 0);
  std::int64_t index = 0;
  do {
    const double p = ProfileProbability(sigma, a);
    if (p != 0.0) total += p * game.utility_at(player, index);
    ++index;
  } while (NextProfile(game.action_counts(), a));
  return total;
}

std::vector<double> ExpectedUtilities(const Game& game,
                                      const MixedProfile& sigma) {
  std::vector<double> out(game.num_players());
  for (int i = 0; i < game.num_players(); ++i)
    out[i] = ExpectedUtility(game, sigma, i);
  return out;
}

double DeviationUtility(const Game& game, const MixedProfile& sigma,
                        int player, int action) {
  double total = 0.0;
  Profile a(game.num_players(), 0);
  do {
    if (a[player] != action) continue;
    const double p = ProfileProbability(sigma, a, player);
    if (p != 0.0) total += p * game.utility(player, a);
  } while (NextProfile(game.action_counts(), a));
  return total;
}

double SocialWelfare(const Game& game, const Profile& profile) {
  double w = 0.0;
  for (int i = 0; i < game.num_players(); ++i) w += game.utility(i, profile);
  return w;
}

double SocialWelfare(const Game& game, const MixedProfile& sigma) {
  double w = 0.0;
  for (int i = 0; i < game.num_players(); ++i)
    w += ExpectedUtility(game, sigma, i);
  return w;
}

std::pair<double, Profile> WelfareMax(const Game& game) {
  Profile a(game.num_players(), 0);
  Profile best = a;
  double best_w = -std::numeric_limits<double>::infinity();
  do {
    const double w = SocialWelfare(game, a);
    if (w > best_w) {
      best_w = w;
      best = a;
    }
  } while (NextProfile(game.action_counts(), a));
  return {best_w, best};
}

double GameDistance(const Game& a, const Game& b) {
  if (a.num_players() != b.num_players() || !a.SameShape(b))
    return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (size_t k = 0; k < a.payoffs().size(); ++k)
    d = std::max(d, std::abs(a.payoffs()[k] - b.payoffs()[k]));
  return d;
}

ParetoResult ParetoImproves(const Game& game, const Profile& target,
                            const MixedProfile& baseline) {
  ParetoResult result;
  result.margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < game.num_players(); ++i)
    result.margin = std::min(result.margin, game.utility(i, target) -
                                                ExpectedUtility(game, baseline, i));
  result.improves = result.margin > 0.0;
  return result;
}

void CheckPledgeShape(const Game& game, const Pledge& pledge) {
  if (pledge.payer < 0 || pledge.payer >= game.num_players())
    throw GameError("pledge payer out of range");
  if (!game.ValidProfile(pledge.outcome))
    throw GameError("pledge outcome out of range");
  if (pledge.recipient != kBurn &&
      (pledge.recipient < 0 || pledge.recipient >= game.num_players()))
    throw GameError("pledge recipient out of range");
  if (pledge.recipient == pledge.payer)
    throw GameError("a player cannot pay itself");
  if (!(pledge.amount >= 0.0) || !std::isfinite(pledge.amount))
    throw GameError("pledge amounts must be nonnegative");
}

Game ApplyTransfers(const Game& game, const CommitmentRound& round) {
  Game out = game;
  for (const Pledge& pledge : round.pledges) {
    CheckPledgeShape(game, pledge);
    const std::int64_t index = game.ProfileIndex(pledge.outcome);
    out.add_utility_at(pledge.payer, index, -pledge.amount);
    if (pledge.recipient != kBurn)
      out.add_utility_at(pledge.recipient, index, pledge.amount);
  }
  return out;
}

}  // namespace cgames
