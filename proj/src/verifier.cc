#include "commitment_games/verifier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "commitment_games/parallel.h"

namespace cgames {

const char* PropertyStatusName(PropertyStatus status) {
  switch (status) {
    case PropertyStatus::kPass:
      return "pass";
    case PropertyStatus::kFail:
      return "fail";
    case PropertyStatus::kNotApplicable:
      return "not_applicable";
  }
  return "unknown";
}

const char* DeviationClassName(DeviationClass c) {
  switch (c) {
    case DeviationClass::kCommitment:
      return "commitment";
    case DeviationClass::kEarlyStop:
      return "early_stop";
    case DeviationClass::kContinueWhenStop:
      return "continue_when_stop";
    case DeviationClass::kTerminalAction:
      return "terminal_action";
  }
  return "unknown";
}

bool DeviationReport::ok(double tol) const {
  if (!structural_failures.empty()) return false;
  for (const DeviationOutcome& c : classes)
    if (c.evaluated && !(c.worst_gain <= tol)) return false;
  return true;
}

namespace {

constexpr double kMonotoneSlack = 1e-12;

std::string Num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string Describe(const Game& game, const std::vector<Pledge>& pledges) {
  if (pledges.empty()) return "no pledges";
  std::string out;
  for (const Pledge& p : pledges) {
    if (!out.empty()) out += "; ";
    out += "player " + std::to_string(p.payer + 1) + " ";
    out += p.recipient == kBurn
               ? "burns " + Num(p.amount)
               : "pays " + Num(p.amount) + " to player " +
                     std::to_string(p.recipient + 1);
    out += " on " + game.ProfileName(p.outcome);
  }
  return out;
}

std::optional<MixedProfile> Punish(const Game& game, const PlanStage& stage) {
  PunishmentOptions options;
  options.allow_fallback = stage.allow_fallback;
  return FindPunishmentEquilibrium(game, stage.reference_support,
                                   stage.baseline, stage.ceiling, options);
}

// Deviator payoff when no punishment within the ceiling exists: the
// harshest equilibrium the others could still coordinate on.
double FallbackDeviatorPayoff(const Game& game, int player) {
  double best = std::numeric_limits<double>::infinity();
  for (const MixedProfile& eq : EnumerateEquilibria(game))
    best = std::min(best, ExpectedUtility(game, eq, player));
  return best;
}

class PropertyTracker {
 public:
  void Touch(const std::string& name) {
    auto& p = Get(name);
    if (p.status == PropertyStatus::kNotApplicable)
      p.status = PropertyStatus::kPass;
  }
  bool Fail(const std::string& name, int prefix, const std::string& witness) {
    auto& p = Get(name);
    if (p.status == PropertyStatus::kFail) return false;
    p.status = PropertyStatus::kFail;
    p.prefix = prefix;
    p.witness = witness;
    return true;
  }
  void Declare(const std::string& name) { Get(name); }
  std::vector<PropertyResult> Results() const { return results_; }

 private:
  PropertyResult& Get(const std::string& name) {
    for (auto& p : results_)
      if (p.name == name) return p;
    results_.push_back({name, PropertyStatus::kNotApplicable, -1, {}});
    return results_.back();
  }
  std::vector<PropertyResult> results_;
};

Transcript PrefixTranscript(const ProtocolPlan& plan, int prefix, int n) {
  Transcript t;
  for (int k = 0; k < prefix && k < static_cast<int>(plan.rounds.size()); ++k) {
    t.rounds.push_back(plan.rounds[k]);
    t.votes.emplace_back(n, Vote::kContinue);
  }
  return t;
}

std::vector<int> SelectPrefixes(int count, int budget) {
  std::vector<int> out;
  if (budget <= 0 || budget >= count) {
    for (int k = 0; k < count; ++k) out.push_back(k);
    return out;
  }
  if (budget == 1) return {0};
  for (int j = 0; j < budget; ++j) {
    const int k = static_cast<int>(
        std::llround(static_cast<double>(j) * (count - 1) / (budget - 1)));
    if (out.empty() || out.back() != k) out.push_back(k);
  }
  return out;
}

}  // namespace

std::vector<std::vector<Pledge>> DeviationGrid(const Game& game, int player,
                                               double delta, Mode mode,
                                               const GridOptions& grid) {
  const int n = game.num_players();
  std::vector<std::vector<Pledge>> out;
  out.push_back({});
  std::vector<Profile> profiles;
  Profile a(n, 0);
  do profiles.push_back(a);
  while (NextProfile(game.action_counts(), a));

  for (double frac : grid.amount_fractions) {
    const double amount = frac * delta;
    for (const Profile& p : profiles) {
      out.push_back({{player, p, kBurn, amount}});
      if (mode == Mode::kTransfers)
        for (int r = 0; r < n; ++r)
          if (r != player) out.push_back({{player, p, r, amount}});
      std::vector<Pledge> m;
      for (int b = 0; b < game.num_actions(player); ++b) {
        if (b == p[player]) continue;
        Profile q = p;
        q[player] = b;
        m.push_back({player, q, kBurn, amount});
      }
      if (!m.empty()) out.push_back(std::move(m));
    }
    if (!grid.adversarial_pairs || mode != Mode::kTransfers) continue;
    for (const Profile& x : profiles)
      for (const Profile& y : profiles) {
        if (x == y || x[player] != y[player]) continue;
        for (int r = 0; r < n; ++r)
          if (r != player)
            out.push_back({{player, x, r, amount}, {player, y, kBurn, amount}});
      }
  }
  return out;
}

Transcript OnPathTranscript(const Game& base, const ProtocolPlan& plan) {
  const int n = base.num_players();
  SessionState s = OpenSession(base, plan.delta, plan.mode);
  std::vector<CommitmentRound> rounds = plan.rounds;
  if (rounds.empty()) rounds.emplace_back();
  for (size_t k = 0; k < rounds.size(); ++k) {
    s = SubmitRound(s, rounds[k]);
    const bool last = k + 1 == rounds.size();
    s = CastVotes(s, std::vector<Vote>(n, last ? Vote::kStop : Vote::kContinue));
  }
  s = PlayTerminal(s, plan.target.profile);
  return s.transcript;
}

OnPathReport CheckOnPath(const Game& base, const ProtocolPlan& plan,
                         const GridOptions& grid) {
  OnPathReport report;
  PropertyTracker props;
  for (const char* name : {"replay", "round_caps", "punishment", "baseline_equilibrium", "utilities_nonincreasing", "target_preserved", "non_degenerate",
                           "welfare_nonincreasing", "baseline_utility_nonincreasing", "terminal_payoffs", "terminal_equilibrium"})
    props.Declare(name);
  const int n = base.num_players();
  const int rounds = static_cast<int>(plan.rounds.size());
  auto fail = [&](const std::string& name, int prefix,
                  const std::string& witness) {
    if (props.Fail(name, prefix, witness) && !report.witness)
      report.witness = PrefixTranscript(plan, prefix, n);
    report.ok = false;
  };

  props.Touch("replay");
  if (plan.base_hash != base.ContentHash())
    fail("replay", 0, "plan was built for a different game");
  if (plan.stages.empty()) {
    fail("replay", 0, "plan has no stages");
    report.properties = props.Results();
    return report;
  }

  std::vector<Game> games{base};
  props.Touch("round_caps");
  for (int k = 0; k < rounds; ++k) {
    RoundViolation v =
        ValidateRound(games.back(), plan.delta, plan.mode, plan.rounds[k]);
    if (!v.ok()) {
      fail("round_caps", k + 1, "round " + std::to_string(k + 1) + ": " + v.message);
      report.properties = props.Results();
      return report;
    }
    games.push_back(ApplyTransfers(games.back(), plan.rounds[k]));
  }
  if (plan.checkpoints.size() != games.size()) {
    fail("replay", 0, "checkpoint count does not match the round count");
  } else {
    for (size_t k = 0; k < games.size(); ++k)
      if (plan.checkpoints[k] != games[k].ContentHash()) {
        fail("replay", static_cast<int>(k),
             "checkpoint hash mismatch after " + std::to_string(k) + " rounds");
        break;
      }
  }

  // Per-checkpoint work runs in parallel; results merge in prefix order.
  struct Local {
    std::vector<std::pair<std::string, std::string>> failures;
    std::vector<std::string> touched;
  };
  std::vector<Local> local(games.size());
  const Profile& target = plan.target.profile;
  ParallelFor(static_cast<int>(games.size()), [&](int k) {
    Local& out = local[k];
    const Game& g = games[k];
    const PlanStage& stage = plan.StageAt(k);
    const bool binary = stage.tag == CaseTag::kTwoByTwo;
    auto check = [&](const std::string& name, bool ok, std::string why) {
      out.touched.push_back(name);
      if (!ok) out.failures.emplace_back(name, std::move(why));
    };

    if (!binary) {
      NashCheck nash = IsNash(g, stage.baseline);
      check("baseline_equilibrium", nash.ok,
            "baseline is not Nash: player " + std::to_string(nash.player + 1) +
                " gains " + Num(nash.gain));
      if (nash.ok) {
        NonDegeneracy nd = IsNonDegenerate(g, stage.baseline);
        check("non_degenerate", nd.non_degenerate,
              "baseline is degenerate (det " + Num(nd.determinant) +
                  ", min residual " + Num(nd.min_residual) + ")");
      }
    }
    const auto punish = Punish(g, stage);
    check("punishment", punish.has_value(),
          "no punishment equilibrium within the ceiling");
    if (!binary && grid.probe_samples > 0 && punish) {
      std::mt19937_64 rng(grid.rng_seed + 0x9E3779B97F4A7C15ULL *
                                              static_cast<std::uint64_t>(k + 1));
      std::uniform_real_distribution<double> noise(-plan.delta, plan.delta);
      for (int s = 0; s < grid.probe_samples; ++s) {
        std::vector<double> pay = g.payoffs();
        for (double& v : pay) v += noise(rng);
        Game perturbed(g.action_counts(), std::move(pay));
        if (!Punish(perturbed, stage)) {
          check("punishment", false,
                "no punishment within the ceiling for perturbation sample " +
                    std::to_string(s));
          break;
        }
      }
    }
    if (stage.preserves_target && !stage.target_bound.empty()) {
      bool same = true;
      for (int i = 0; i < n; ++i)
        if (std::abs(g.utility(i, target) - stage.target_bound[i]) > 1e-12)
          same = false;
      check("target_preserved", same, "target payoffs changed");
    }
    if (k > 0) {
      const Game& prev = games[k - 1];
      const PlanStage& round_stage = plan.StageAt(k - 1);
      if (round_stage.monotonicity == Monotonicity::kUtilities) {
        bool down = true;
        for (size_t e = 0; e < g.payoffs().size(); ++e)
          if (g.payoffs()[e] > prev.payoffs()[e] + kMonotoneSlack) down = false;
        check("utilities_nonincreasing", down, "a utility increased in round " + std::to_string(k));
      } else {
        bool down = true;
        Profile a(n, 0);
        do {
          if (SocialWelfare(g, a) > SocialWelfare(prev, a) + kMonotoneSlack)
            down = false;
        } while (NextProfile(g.action_counts(), a));
        check("welfare_nonincreasing", down, "welfare increased in round " + std::to_string(k));
        bool sigma_down = true;
        for (int i = 0; i < n; ++i)
          if (ExpectedUtility(g, round_stage.baseline, i) >
              ExpectedUtility(prev, round_stage.baseline, i) + 1e-9)
            sigma_down = false;
        check("baseline_utility_nonincreasing", sigma_down,
              "baseline utility increased in round " + std::to_string(k));
      }
    }
  });
  for (size_t k = 0; k < local.size(); ++k) {
    for (const auto& name : local[k].touched) props.Touch(name);
    for (const auto& [name, why] : local[k].failures)
      fail(name, static_cast<int>(k),
           "after " + std::to_string(k) + " rounds: " + why);
  }

  const Game& last = games.back();
  props.Touch("terminal_equilibrium");
  if (!IsPureNash(last, target))
    fail("terminal_equilibrium", rounds, "target " + last.ProfileName(target) +
                          " is not a Nash equilibrium of the final game");
  props.Touch("terminal_payoffs");
  if (plan.expected_terminal_payoffs.size() != static_cast<size_t>(n)) {
    fail("terminal_payoffs", rounds, "missing expected terminal payoffs");
  } else {
    for (int i = 0; i < n; ++i)
      if (std::abs(last.utility(i, target) - plan.expected_terminal_payoffs[i]) >
          1e-12) {
        fail("terminal_payoffs", rounds, "terminal payoff of player " + std::to_string(i + 1) +
                               " differs from the recorded value");
        break;
      }
  }
  report.properties = props.Results();
  return report;
}

DeviationReport CheckDeviations(const Game& base, const ProtocolPlan& plan,
                                const GridOptions& grid) {
  DeviationReport report;
  const int n = base.num_players();
  const int rounds = static_cast<int>(plan.rounds.size());
  const std::vector<Game> games = Checkpoints(base, plan);
  const std::vector<double>& value = plan.expected_terminal_payoffs;
  if (static_cast<int>(value.size()) != n)
    throw GameError("plan lacks expected terminal payoffs");
  report.prefixes = SelectPrefixes(std::max(rounds, 1), grid.deviation_budget);

  struct Local {
    std::array<DeviationOutcome, 4> classes;
    std::vector<std::string> structural;
    std::optional<Transcript> structural_witness;
  };
  const int jobs = static_cast<int>(report.prefixes.size()) * n;
  std::vector<Local> local(jobs);

  auto record = [](DeviationOutcome& c, double gain, int prefix, int player,
                   std::string what, std::optional<Transcript> witness) {
    ++c.cases;
    if (!c.evaluated || gain > c.worst_gain) {
      c.evaluated = true;
      c.worst_gain = gain;
      c.prefix = prefix;
      c.player = player;
      c.description = std::move(what);
      c.witness = std::move(witness);
    }
  };

  ParallelFor(jobs, [&](int job) {
    const int k = report.prefixes[job / n];
    const int i = job % n;
    Local& out = local[job];
    const Game& g = games[k];
    const PlanStage& stage = plan.StageAt(k);
    const CommitmentRound on_path =
        k < rounds ? plan.rounds[k] : CommitmentRound{};
    std::vector<Pledge> others;
    for (const Pledge& p : on_path.pledges)
      if (p.payer != i) others.push_back(p);

    // (1) replace own pledges in round k+1, then face the punishment.
    for (const auto& element : DeviationGrid(g, i, plan.delta, plan.mode, grid)) {
      CommitmentRound r;
      r.pledges = others;
      r.pledges.insert(r.pledges.end(), element.begin(), element.end());
      if (!ValidateRound(g, plan.delta, plan.mode, r).ok()) continue;
      const Game dev = ApplyTransfers(g, r);
      auto witness = [&] {
        Transcript t = PrefixTranscript(plan, k, n);
        t.rounds.push_back(r);
        t.votes.emplace_back(n, Vote::kStop);
        return t;
      };
      const auto punish = Punish(dev, stage);
      double payoff;
      const std::string what = "after " + std::to_string(k) + " rounds, " +
                               Describe(g, element);
      if (punish) {
        payoff = ExpectedUtility(dev, *punish, i);
      } else {
        out.structural.push_back("no punishment equilibrium " + what);
        if (!out.structural_witness) out.structural_witness = witness();
        payoff = FallbackDeviatorPayoff(dev, i);
      }
      const double gain = payoff - value[i];
      record(out.classes[0], gain, k, i, what,
             gain > grid.gain_tolerance ? std::optional(witness())
                                        : std::nullopt);
    }

    // (2) stop vote after round k while the plan wants to continue.
    if (k >= 1 && k < rounds) {
      const auto punish = Punish(g, stage);
      double payoff;
      const std::string what = "stop vote after " + std::to_string(k) + " rounds";
      if (punish) {
        payoff = ExpectedUtility(g, *punish, i);
      } else {
        out.structural.push_back("no punishment equilibrium on " + what);
        payoff = FallbackDeviatorPayoff(g, i);
      }
      Transcript t = PrefixTranscript(plan, k, n);
      t.votes.back()[i] = Vote::kStop;
      const double gain = payoff - value[i];
      record(out.classes[1], gain, k, i, what,
             gain > grid.gain_tolerance ? std::optional(t) : std::nullopt);
    }
  });

  // (3) and (4) concern the end of the plan only.
  std::vector<CommitmentRound> path = plan.rounds;
  if (path.empty()) path.emplace_back();
  const Game& final_game = games.back();
  const Profile& target = plan.target.profile;
  std::array<DeviationOutcome, 4> tail;
  for (int i = 0; i < n; ++i) {
    SessionState s = OpenSession(base, plan.delta, plan.mode);
    for (size_t k = 0; k < path.size(); ++k) {
      s = SubmitRound(s, path[k]);
      std::vector<Vote> votes(n, Vote::kContinue);
      if (k + 1 == path.size()) {
        votes.assign(n, Vote::kStop);
        votes[i] = Vote::kContinue;
      }
      s = CastVotes(s, votes);
    }
    if (s.phase != Phase::kPlaying)
      throw EngineError("a lone continue vote reopened the commitment phase");
    s = PlayTerminal(s, target);
    const double gain = (*s.transcript.final_payoffs)[i] - value[i];
    record(tail[2], gain, rounds, i, "continue vote at the end", std::nullopt);

    Profile dev = target;
    for (int a = 0; a < final_game.num_actions(i); ++a) {
      if (a == target[i]) continue;
      dev[i] = a;
      const double g = final_game.utility(i, dev) - final_game.utility(i, target);
      Transcript t = OnPathTranscript(base, plan);
      t.terminal_actions = dev;
      t.final_payoffs.reset();
      record(tail[3], g, rounds, i,
             "plays " + final_game.ActionName(i, a) + " instead of " +
                 final_game.ActionName(i, target[i]),
             g > grid.gain_tolerance ? std::optional(t) : std::nullopt);
    }
  }

  for (const Local& l : local) {
    for (int c = 0; c < 2; ++c) {
      const DeviationOutcome& src = l.classes[c];
      DeviationOutcome& dst = report.classes[c];
      if (!src.evaluated) continue;
      const int cases = dst.cases + src.cases;
      if (!dst.evaluated || src.worst_gain > dst.worst_gain) dst = src;
      dst.cases = cases;
    }
    report.structural_failures.insert(report.structural_failures.end(),
                                      l.structural.begin(), l.structural.end());
    if (!report.structural_witness && l.structural_witness)
      report.structural_witness = l.structural_witness;
  }
  report.classes[2] = tail[2];
  report.classes[3] = tail[3];
  return report;
}

RoundBound RoundBoundCheck(const Game& base, const ProtocolPlan& plan,
                           double constant) {
  RoundBound out;
  out.rounds = static_cast<int>(plan.rounds.size());
  out.constant = constant;
  out.bound = constant * base.num_players() / plan.delta *
              base.UtilityRange() * base.max_actions();
  out.ok = out.rounds <= out.bound;
  return out;
}

VerificationReport VerifyPlan(const Game& base, const ProtocolPlan& plan,
                              const GridOptions& grid) {
  VerificationReport report;
  report.grid = grid;
  report.on_path = CheckOnPath(base, plan, grid);
  report.round_bound = RoundBoundCheck(base, plan, plan.round_bound_constant);
  // Deviation analysis needs a plan that replays.
  bool replayable = true;
  for (const auto& p : report.on_path.properties)
    if ((p.name == "replay" || p.name == "round_caps") &&
        p.status == PropertyStatus::kFail)
      replayable = false;
  if (replayable) report.deviations = CheckDeviations(base, plan, grid);
  report.accepted = replayable && report.on_path.ok &&
                    report.deviations.ok(grid.gain_tolerance) &&
                    report.round_bound.ok;
  if (report.on_path.witness) {
    report.witness = report.on_path.witness;
  } else if (report.deviations.structural_witness) {
    report.witness = report.deviations.structural_witness;
  } else {
    for (const auto& c : report.deviations.classes)
      if (c.witness) {
        report.witness = c.witness;
        break;
      }
  }
  return report;
}

}  // namespace cgames
