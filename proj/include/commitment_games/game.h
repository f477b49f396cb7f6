#ifndef COMMITMENT_GAMES_GAME_H_
#define COMMITMENT_GAMES_GAME_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cgames {

constexpr double kDefaultTolerance = 1e-9;
constexpr double kSupportEpsilon = 1e-9;

// Raised for malformed shapes, out-of-range indices and illegal pledges.
class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Profile = std::vector<int>;  // one 0-based action index per player

// Per-player probability vectors.
using MixedProfile = std::vector<std::vector<double>>;

// Finite normal-form game with a dense payoff tensor. Payoffs are stored
// profile-major in lexicographic order (last player varies fastest), with the
// n player payoffs of one profile contiguous.
class Game {
 public:
  Game() = default;
  Game(std::vector<int> action_counts, std::vector<double> payoffs,
       std::vector<std::vector<std::string>> action_names = {});

  // All-zero game of the given shape.
  static Game Zero(std::vector<int> action_counts);

  int num_players() const { return static_cast<int>(action_counts_.size()); }
  const std::vector<int>& action_counts() const { return action_counts_; }
  int num_actions(int player) const { return action_counts_.at(player); }
  std::int64_t num_profiles() const { return num_profiles_; }
  int max_actions() const;

  std::int64_t ProfileIndex(const Profile& profile) const;
  Profile ProfileAt(std::int64_t index) const;
  bool ValidProfile(const Profile& profile) const;

  double utility(int player, const Profile& profile) const {
    return payoffs_[ProfileIndex(profile) * num_players() + player];
  }
  double utility_at(int player, std::int64_t profile_index) const {
    return payoffs_[profile_index * num_players() + player];
  }
  void set_utility(int player, const Profile& profile, double value);
  void add_utility(int player, const Profile& profile, double delta);
  void add_utility_at(int player, std::int64_t profile_index, double delta) {
    payoffs_[profile_index * num_players() + player] += delta;
  }

  const std::vector<double>& payoffs() const { return payoffs_; }
  const std::vector<std::vector<std::string>>& action_names() const {
    return action_names_;
  }
  std::string ActionName(int player, int action) const;
  // Parses a name or a 1-based number.
  int ActionIndex(int player, const std::string& token) const;
  std::string ProfileName(const Profile& profile) const;

  bool SameShape(const Game& other) const {
    return action_counts_ == other.action_counts_;
  }
  double MinPayoff() const;
  double MaxPayoff() const;
  double UtilityRange() const { return MaxPayoff() - MinPayoff(); }

  // 64-bit FNV-1a over shape and payoff bit patterns.
  std::uint64_t ContentHash() const;

 private:
  std::vector<int> action_counts_;
  std::vector<std::int64_t> strides_;
  std::int64_t num_profiles_ = 0;
  std::vector<double> payoffs_;
  std::vector<std::vector<std::string>> action_names_;
};

// Iterates over all pure profiles in lexicographic order.
bool NextProfile(const std::vector<int>& action_counts, Profile& profile);

MixedProfile PureProfile(const Game& game, const Profile& profile);
MixedProfile UniformOver(const Game& game,
                         const std::vector<std::vector<int>>& supports);
// Throws GameError unless every vector matches the game shape, lies in
// [0,1] and sums to 1 within tol.
void ValidateProfile(const Game& game, const MixedProfile& sigma,
                     double tol = kDefaultTolerance);
std::vector<std::vector<int>> Support(const MixedProfile& sigma,
                                      double eps = kSupportEpsilon);
bool HasFullSupport(const Game& game, const MixedProfile& sigma,
                    double eps = kSupportEpsilon);
// Probability that the pure profile is drawn, skipping `skip_player` if >= 0.
double ProfileProbability(const MixedProfile& sigma, const Profile& profile,
                          int skip_player = -1);

double ExpectedUtility(const Game& game, const MixedProfile& sigma,
                       int player);
std::vector<double> ExpectedUtilities(const Game& game,
                                      const MixedProfile& sigma);
// Utility of `player` playing pure `action` against the others' mixtures.
double DeviationUtility(const Game& game, const MixedProfile& sigma,
                        int player, int action);

double SocialWelfare(const Game& game, const Profile& profile);
double SocialWelfare(const Game& game, const MixedProfile& sigma);
// Maximum welfare over pure profiles; ties go to the lexicographically
// smallest profile.
std::pair<double, Profile> WelfareMax(const Game& game);

// +infinity when the shapes differ.
double GameDistance(const Game& a, const Game& b);

struct ParetoResult {
  bool improves = false;
  double margin = 0.0;  // min_i u_i(target) - u_i(sigma)
};
ParetoResult ParetoImproves(const Game& game, const Profile& target,
                            const MixedProfile& baseline);

// Pledges and rounds. Recipient kBurn destroys the amount.
constexpr int kBurn = -1;

struct Pledge {
  int payer = 0;
  Profile outcome;
  int recipient = kBurn;
  double amount = 0.0;
  bool operator==(const Pledge&) const = default;
};

struct CommitmentRound {
  std::vector<Pledge> pledges;
  bool operator==(const CommitmentRound&) const = default;
};

// Checks indices, nonnegativity and self-payment; does not know the cap.
void CheckPledgeShape(const Game& game, const Pledge& pledge);
Game ApplyTransfers(const Game& game, const CommitmentRound& round);

}  // namespace cgames

#endif  // COMMITMENT_GAMES_GAME_H_
