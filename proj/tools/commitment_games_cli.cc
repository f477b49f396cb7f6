#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commitment_games/corpus.h"
#include "commitment_games/equilibria.h"
#include "commitment_games/io.h"
#include "commitment_games/protocols.h"
#include "commitment_games/verifier.h"

namespace {

using namespace cgames;

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;

std::vector<std::string> Split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

// Decimal or p/q.
double ParseNumber(const std::string& token) {
  try {
    size_t used = 0;
    const auto slash = token.find('/');
    if (slash != std::string::npos) {
      const double p = std::stod(token.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument(token);
      const std::string q_text = token.substr(slash + 1);
      const double q = std::stod(q_text, &used);
      if (used != q_text.size() || q == 0.0) throw std::invalid_argument(token);
      return p / q;
    }
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw InputError("not a number: '" + token + "'");
  }
}

std::vector<double> ParseNumbers(const std::string& text) {
  std::vector<double> out;
  for (const auto& t : Split(text, ',')) out.push_back(ParseNumber(t));
  return out;
}

// "1,2x1,2": per-player 1-based action lists joined by 'x'.
Supports ParseSupport(const Game& game, const std::string& text) {
  const auto parts = Split(text, 'x');
  if (static_cast<int>(parts.size()) != game.num_players())
    throw InputError("support '" + text + "' needs one list per player");
  Supports out;
  for (int i = 0; i < game.num_players(); ++i) {
    std::vector<int> list;
    for (const auto& t : Split(parts[i], ','))
      try {
        list.push_back(game.ActionIndex(i, t));
      } catch (const GameError& e) {
        throw InputError(e.what());
      }
    std::sort(list.begin(), list.end());
    out.push_back(std::move(list));
  }
  return out;
}

// "1/2,1/2,0;1/2,1/2,0": per-player probability lists joined by ';'.
MixedProfile ParseSigma(const Game& game, const std::string& text) {
  MixedProfile sigma;
  for (const auto& part : Split(text, ';')) sigma.push_back(ParseNumbers(part));
  try {
    ValidateProfile(game, sigma);
  } catch (const GameError& e) {
    throw InputError(std::string("sigma: ") + e.what());
  }
  return sigma;
}

Profile ParseProfile(const Game& game, const std::string& text) {
  const auto parts = Split(text, ',');
  if (static_cast<int>(parts.size()) != game.num_players())
    throw InputError("profile '" + text + "' needs one action per player");
  Profile p;
  try {
    for (int i = 0; i < game.num_players(); ++i)
      p.push_back(game.ActionIndex(i, parts[i]));
  } catch (const GameError& e) {
    throw InputError(e.what());
  }
  return p;
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string FmtVec(const std::vector<double>& v) {
  std::string s = "(";
  for (size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + Fmt(v[k]);
  return s + ")";
}

std::string FmtSigma(const MixedProfile& sigma) {
  std::string s;
  for (size_t i = 0; i < sigma.size(); ++i)
    s += (i ? " x " : "") + FmtVec(sigma[i]);
  return s;
}

MixedProfile ResolveSigma(const Game& game, const std::string& sigma_text,
                          const std::string& support_text) {
  if (!sigma_text.empty()) return ParseSigma(game, sigma_text);
  if (!support_text.empty()) {
    const SolveResult r = SolveOnSupport(game, ParseSupport(game, support_text));
    if (!r.profile)
      throw InfeasibleError("no equilibrium on support " + support_text + ": " +
                            r.reason);
    return *r.profile;
  }
  const auto pure = EnumeratePureNash(game);
  if (pure.size() != 1)
    throw InputError("game has " + std::to_string(pure.size()) +
                     " pure equilibria; pass --sigma or --sigma-support");
  return PureProfile(game, pure[0]);
}

void PrintSchedule(const Game& game, const ProtocolPlan& plan, int show) {
  const int rounds = static_cast<int>(plan.rounds.size());
  std::cout << "schedule (" << rounds << " rounds, delta " << Fmt(plan.delta)
            << ", " << ModeName(plan.mode) << "):\n";
  for (int k = 0; k < rounds && k < show; ++k) {
    std::cout << "  round " << k + 1 << " [" << CaseTagName(plan.StageAt(k).tag)
              << "]:";
    for (const Pledge& p : plan.rounds[k].pledges) {
      std::cout << " P" << p.payer + 1
                << (p.recipient == kBurn ? " burns "
                                         : " pays P" + std::to_string(p.recipient + 1) + " ")
                << Fmt(p.amount) << " at " << game.ProfileName(p.outcome) << ";";
    }
    std::cout << "\n";
  }
  if (rounds > show) std::cout << "  ... " << rounds - show << " more rounds\n";
  std::cout << "then play " << game.ProfileName(plan.target.profile)
            << " for payoffs " << FmtVec(plan.expected_terminal_payoffs) << "\n";
}

void PrintReport(const VerificationReport& report) {
  for (const auto& p : report.on_path.properties) {
    std::cout << "  " << p.name << ": " << PropertyStatusName(p.status);
    if (p.status == PropertyStatus::kFail)
      std::cout << " at prefix " << p.prefix << " (" << p.witness << ")";
    std::cout << "\n";
  }
  for (int c = 0; c < 4; ++c) {
    const auto& d = report.deviations.classes[c];
    std::cout << "  deviation " << DeviationClassName(static_cast<DeviationClass>(c))
              << ": ";
    if (!d.evaluated) {
      std::cout << "not evaluated\n";
      continue;
    }
    std::cout << "worst gain " << Fmt(d.worst_gain) << " over " << d.cases
              << " cases (player " << d.player + 1 << ", " << d.description
              << ")\n";
  }
  if (!report.deviations.structural_failures.empty())
    std::cout << "  structural failures: "
              << report.deviations.structural_failures.size() << " (first: "
              << report.deviations.structural_failures.front() << ")\n";
  std::cout << "  round bound: " << report.round_bound.rounds << " <= "
            << Fmt(report.round_bound.bound)
            << (report.round_bound.ok ? "" : " VIOLATED") << "\n";
  std::cout << (report.accepted ? "accepted" : "rejected") << " ("
            << report.label << ")\n";
}

GridOptions MakeGrid(const std::string& fractions, int budget, int probe,
                     std::uint64_t seed) {
  GridOptions grid;
  if (!fractions.empty()) grid.amount_fractions = ParseNumbers(fractions);
  for (double f : grid.amount_fractions)
    if (!(f > 0.0 && f <= 1.0))
      throw InputError("grid fractions must lie in (0, 1]");
  grid.deviation_budget = budget;
  grid.probe_samples = probe;
  grid.rng_seed = seed;
  return grid;
}

Json InputsJson(const Game& game, std::uint64_t seed) {
  return {{"game_hash", HashHex(game.ContentHash())}, {"rng_seed", seed}};
}

struct AnalyzeArgs {
  std::string game;
  std::vector<std::string> supports;
  std::string probe_sigma;
  double probe_epsilon = 1.0;
  double probe_delta = 0.05;
  int probe_samples = 100;
  std::uint64_t seed = 1;
  std::string out;
};

int Analyze(const AnalyzeArgs& a) {
  const Game game = LoadGame(a.game);
  Json doc = {{"tool_version", kToolVersion}, {"inputs", InputsJson(game, a.seed)}};
  const auto pure = EnumeratePureNash(game);
  std::cout << "pure equilibria:";
  Json pure_json = Json::array();
  for (const auto& p : pure) {
    std::cout << " " << game.ProfileName(p);
    pure_json.push_back(ProfileToJson(p));
  }
  std::cout << (pure.empty() ? " none" : "") << "\n";
  const auto [w, sw] = WelfareMax(game);
  std::cout << "welfare max " << Fmt(w) << " at " << game.ProfileName(sw) << "\n";
  doc["pure_nash"] = std::move(pure_json);
  doc["welfare_max"] = {{"value", w}, {"profile", ProfileToJson(sw)}};
  Json supports = Json::array();
  for (const auto& text : a.supports) {
    const Supports support = ParseSupport(game, text);
    const SolveResult r = SolveOnSupport(game, support);
    Json entry = {{"support", text}};
    std::cout << "support " << text << ": ";
    if (!r.profile) {
      std::cout << "no equilibrium (" << r.reason << ")\n";
      entry["solution"] = nullptr;
      entry["reason"] = r.reason;
    } else {
      NonDegeneracy nd;
      try {
        nd = IsNonDegenerate(game, *r.profile);
      } catch (const GameError& e) {
        std::cout << "sigma = " << FmtSigma(*r.profile) << ", " << e.what() << "\n";
        entry["solution"] = MixedToJson(*r.profile);
        entry["reason"] = e.what();
        supports.push_back(std::move(entry));
        continue;
      }
      std::cout << "sigma = " << FmtSigma(*r.profile) << ", "
                << (nd.non_degenerate ? "non-degenerate" : "degenerate")
                << ", det " << Fmt(nd.determinant) << " (tol " << Fmt(nd.det_tol)
                << "), min residual " << Fmt(nd.min_residual) << "\n";
      entry["solution"] = MixedToJson(*r.profile);
      entry["non_degenerate"] = nd.non_degenerate;
      entry["determinant"] = nd.determinant;
      entry["min_residual"] =
          std::isfinite(nd.min_residual) ? Json(nd.min_residual) : Json(nullptr);
    }
    supports.push_back(std::move(entry));
  }
  doc["supports"] = std::move(supports);
  if (!a.probe_sigma.empty()) {
    const MixedProfile sigma = ParseSigma(game, a.probe_sigma);
    const PunishabilityReport p = ProbeStrongPunishability(
        game, sigma, a.probe_epsilon, a.probe_delta, a.probe_samples, a.seed);
    std::cout << "punishability probe: " << p.failures.size() << " failures in "
              << p.samples << " samples, worst excess " << Fmt(p.worst_excess)
              << "\n";
    doc["punishability"] = PunishabilityToJson(p);
  }
  if (!a.out.empty()) WriteJsonFile(a.out, doc);
  return kExitOk;
}

struct PlanArgs {
  std::string game;
  std::string sigma;
  std::string sigma_support;
  std::string target;
  std::string payoffs;
  std::string delta = "auto";
  std::string mode;  // default: burn for targets, transfers for payoffs
  std::string out;
  int budget = 0;
  int probe_samples = 4;
  std::uint64_t seed = 1;
  int show = 20;
};

int Plan(const PlanArgs& a) {
  const Game game = LoadGame(a.game);
  if (a.target.empty() == a.payoffs.empty())
    throw InputError("pass exactly one of --target and --payoffs");
  if (!a.mode.empty() && a.mode != "burn" && a.mode != "transfers")
    throw InputError("mode must be 'burn' or 'transfers'");
  const MixedProfile sigma = ResolveSigma(game, a.sigma, a.sigma_support);
  std::optional<Profile> target;
  std::optional<std::vector<double>> payoffs;
  if (!a.target.empty()) target = ParseProfile(game, a.target);
  if (!a.payoffs.empty()) {
    payoffs = ParseNumbers(a.payoffs);
    if (static_cast<int>(payoffs->size()) != game.num_players())
      throw InputError("--payoffs needs one value per player");
    if (a.mode == "burn")
      throw InfeasibleError(
          "payoff targets move utility between players and need transfers mode");
  }
  std::cout << "sigma = " << FmtSigma(sigma) << "\n";

  double delta = 0.0;
  if (a.delta == "auto") {
    DeltaSearchOptions options;
    options.probe_samples = a.probe_samples;
    const DeltaChoice choice =
        target ? ChooseDeltaForTarget(game, sigma, *target, options)
               : ChooseDeltaForPayoffs(game, sigma, *payoffs, options);
    if (!choice.found) throw InfeasibleError(choice.failure);
    delta = choice.delta;
    std::cout << "chose delta " << Fmt(delta) << " after " << choice.tried.size()
              << " candidates (" << choice.rounds << " rounds)\n";
  } else {
    delta = ParseNumber(a.delta);
    if (!(delta > 0.0)) throw InputError("delta must be positive");
  }

  ProtocolPlan plan = target ? BuildParetoPlan(game, sigma, *target, delta)
                             : BuildWelfarePlan(game, sigma, *payoffs, delta);
  if (target && a.mode == "transfers") plan.mode = Mode::kTransfers;
  PrintSchedule(game, plan, a.show);

  const GridOptions grid = MakeGrid("", a.budget, a.probe_samples, a.seed);
  const VerificationReport report = VerifyPlan(game, plan, grid);
  PrintReport(report);
  if (!a.out.empty()) {
    Json doc = PlanToJson(plan);
    doc["inputs"] = InputsJson(game, a.seed);
    doc["verified"] = report.accepted;
    WriteJsonFile(a.out, doc);
    std::cout << "wrote " << a.out << "\n";
  }
  return report.accepted ? kExitOk : kExitRejected;
}

ProtocolPlan LoadPlan(const Game& game, const std::string& path) {
  const Json doc = LoadJsonFile(path);
  ProtocolPlan plan;
  try {
    plan = PlanFromJson(game, doc);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
  if (plan.base_hash != game.ContentHash())
    throw InputError("plan " + path + " was built for game " +
                     HashHex(plan.base_hash) + ", not " +
                     HashHex(game.ContentHash()) + "; refusing");
  return plan;
}

struct SimulateArgs {
  std::string game;
  std::string plan;
  std::string script;
  std::string out;
};

int Simulate(const SimulateArgs& a) {
  const Game game = LoadGame(a.game);
  if (a.plan.empty() == a.script.empty())
    throw InputError("pass exactly one of a plan file and --script");
  SessionState state;
  double delta = 0.0;
  Mode mode = Mode::kTransfers;
  if (!a.plan.empty()) {
    const ProtocolPlan plan = LoadPlan(game, a.plan);
    delta = plan.delta;
    mode = plan.mode;
    state = Replay(game, delta, mode, OnPathTranscript(game, plan));
  } else {
    const TranscriptFile file = TranscriptFromJson(LoadJsonFile(a.script), &game);
    if (file.base.ContentHash() != game.ContentHash())
      throw InputError("script was recorded for a different game; refusing");
    delta = file.delta;
    mode = file.mode;
    state = Replay(game, delta, mode, file.transcript);
  }
  const Transcript& t = state.transcript;
  std::cout << t.rounds.size() << " rounds replayed, phase "
            << PhaseName(state.phase) << "\n";
  if (t.terminal_actions)
    std::cout << "played " << game.ProfileName(*t.terminal_actions)
              << ", payoffs " << FmtVec(*t.final_payoffs) << "\n";
  if (!a.out.empty()) WriteJsonFile(a.out, TranscriptToJson(game, delta, mode, t));
  return kExitOk;
}

struct VerifyArgs {
  std::string game;
  std::string plan;
  std::string grid;
  int budget = 0;
  int probe_samples = 4;
  std::uint64_t seed = 1;
  std::string out;
  std::string witness;
};

int Verify(const VerifyArgs& a) {
  const Game game = LoadGame(a.game);
  const ProtocolPlan plan = LoadPlan(game, a.plan);
  const GridOptions grid = MakeGrid(a.grid, a.budget, a.probe_samples, a.seed);
  const VerificationReport report = VerifyPlan(game, plan, grid);
  PrintReport(report);
  if (!a.out.empty()) WriteJsonFile(a.out, VerificationToJson(game, plan, report));
  if (!a.witness.empty() && report.witness)
    WriteJsonFile(a.witness,
                  TranscriptToJson(game, plan.delta, plan.mode, *report.witness));
  return report.accepted ? kExitOk : kExitRejected;
}

int ReproduceCmd(const std::string& id) {
  std::vector<corpus::ReproduceRow> rows;
  try {
    rows = corpus::Reproduce(id);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  bool all = true;
  std::printf("%-14s %-5s %s\n", "example", "pass", "detail");
  for (const auto& r : rows) {
    std::printf("%-14s %-5s %s: %s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL",
                r.description.c_str(), r.detail.c_str());
    all = all && r.pass;
  }
  return all ? kExitOk : kExitRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Staged commitment protocols for normal-form games"};
  app.set_version_flag("--version", std::string(cgames::kToolVersion));
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "Equilibria, welfare and support diagnostics");
  an->add_option("game", analyze.game, "Game JSON file")->required();
  an->add_option("--support", analyze.supports,
                 "Support to solve on, e.g. 1,2x1,2 (repeatable)");
  an->add_option("--probe-sigma", analyze.probe_sigma,
                 "Run the punishability probe for this profile");
  an->add_option("--probe-epsilon", analyze.probe_epsilon,
                 "Perturbation radius of the probe");
  an->add_option("--probe-delta", analyze.probe_delta,
                 "Allowed payoff excess of a punishment");
  an->add_option("--probe-samples", analyze.probe_samples,
                 "Random perturbations per probe");
  an->add_option("--seed", analyze.seed, "Random seed");
  an->add_option("--out", analyze.out, "Write a JSON report");

  PlanArgs plan;
  auto* pl = app.add_subcommand("plan", "Build and verify a commitment plan");
  pl->add_option("game", plan.game, "Game JSON file")->required();
  pl->add_option("--sigma", plan.sigma, "Baseline profile, e.g. 1/2,1/2;1/2,1/2");
  pl->add_option("--sigma-support", plan.sigma_support,
                 "Solve the baseline on this support");
  pl->add_option("--target", plan.target, "Target outcome, names or 1-based");
  pl->add_option("--payoffs", plan.payoffs, "Target payoff vector");
  pl->add_option("--delta", plan.delta, "Per-round cap or 'auto'");
  pl->add_option("--mode", plan.mode, "burn or transfers");
  pl->add_option("--budget", plan.budget, "Prefixes checked for deviations (0 = all)");
  pl->add_option("--probe-samples", plan.probe_samples,
                 "Random perturbations per probe");
  pl->add_option("--seed", plan.seed, "Random seed");
  pl->add_option("--show", plan.show, "Rounds printed in the schedule");
  pl->add_option("--out", plan.out, "Write the plan JSON");

  SimulateArgs sim;
  auto* si = app.add_subcommand("simulate", "Replay a plan or a scripted session");
  si->add_option("game", sim.game, "Game JSON file")->required();
  si->add_option("plan", sim.plan, "Plan JSON file");
  si->add_option("--script", sim.script, "Transcript JSON to replay");
  si->add_option("--out", sim.out, "Write the transcript JSON");

  VerifyArgs ver;
  auto* ve = app.add_subcommand("verify", "Check a plan against the deviation grid");
  ve->add_option("game", ver.game, "Game JSON file")->required();
  ve->add_option("plan", ver.plan, "Plan JSON file")->required();
  ve->add_option("--grid", ver.grid, "Deviation amounts as fractions of delta");
  ve->add_option("--budget", ver.budget, "Prefixes checked for deviations (0 = all)");
  ve->add_option("--probe-samples", ver.probe_samples,
                 "Random perturbations per probe");
  ve->add_option("--seed", ver.seed, "Random seed");
  ve->add_option("--out", ver.out, "Write the verification report JSON");
  ve->add_option("--witness", ver.witness, "Write the first counterexample transcript");

  std::string example;
  auto* re = app.add_subcommand("reproduce", "Run the example corpus");
  re->add_option("example", example, "Example id or 'all'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*an) return Analyze(analyze);
    if (*pl) return Plan(plan);
    if (*si) return Simulate(sim);
    if (*ve) return Verify(ver);
    if (*re) return ReproduceCmd(example);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ReplayError& e) {
    std::cerr << "replay error: " << e.what() << "\n";
    return kExitInput;
  } catch (const GameError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
