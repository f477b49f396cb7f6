#include "commitment_games/io.h"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cgames {
namespace {

std::string Where(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const Json& Field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key))
    throw InputError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

double Number(const Json& v, const char* what) {
  if (!v.is_number()) throw InputError(std::string(what) + " must be a number");
  return v.get<double>();
}

int Integer(const Json& v, const char* what) {
  if (!v.is_number_integer())
    throw InputError(std::string(what) + " must be an integer");
  return v.get<int>();
}

const char* StatusName(PropertyStatus s) { return PropertyStatusName(s); }

}  // namespace

std::string HashHex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
  return buf;
}

std::uint64_t ParseHashHex(const std::string& text) {
  if (text.empty() || text.size() > 16)
    throw InputError("malformed hash '" + text + "'");
  std::uint64_t v = 0;
  for (char c : text) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= c - '0';
    else if (c >= 'a' && c <= 'f') v |= c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v |= c - 'A' + 10;
    else throw InputError("malformed hash '" + text + "'");
  }
  return v;
}

Json ParseJson(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(": ", msg.find("column"));
    throw InputError(source + ": parse error at " +
                     Where(text, e.byte ? e.byte - 1 : 0) + ": " +
                     (colon == std::string::npos ? msg : msg.substr(colon + 2)));
  }
}

Json LoadJsonFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseJson(ss.str(), path);
}

void WriteJsonFile(const std::string& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw InputError("failed writing " + path);
}

Json GameToJson(const Game& game) {
  Json doc;
  doc["players"] = game.num_players();
  doc["actions"] = game.action_counts();
  if (!game.action_names().empty()) doc["action_names"] = game.action_names();
  Json payoffs = Json::array();
  for (std::int64_t p = 0; p < game.num_profiles(); ++p) {
    Json row = Json::array();
    for (int i = 0; i < game.num_players(); ++i)
      row.push_back(game.utility_at(i, p));
    payoffs.push_back(std::move(row));
  }
  doc["payoffs"] = std::move(payoffs);
  return doc;
}

Game GameFromJson(const Json& doc) {
  try {
    const int n = Integer(Field(doc, "players"), "players");
    if (n < 2) throw InputError("a game needs at least two players");
    std::vector<int> counts;
    std::vector<std::vector<std::string>> names;
    if (doc.contains("action_names")) {
      const Json& an = doc.at("action_names");
      if (!an.is_array() || static_cast<int>(an.size()) != n)
        throw InputError("action_names must list one array per player");
      for (const Json& list : an) {
        if (!list.is_array()) throw InputError("action_names entries must be arrays");
        std::vector<std::string> row;
        for (const Json& s : list) {
          if (!s.is_string()) throw InputError("action names must be strings");
          row.push_back(s.get<std::string>());
        }
        counts.push_back(static_cast<int>(row.size()));
        names.push_back(std::move(row));
      }
    }
    if (doc.contains("actions")) {
      const Json& ac = doc.at("actions");
      if (!ac.is_array() || static_cast<int>(ac.size()) != n)
        throw InputError("actions must list one count per player");
      std::vector<int> given;
      for (const Json& c : ac) given.push_back(Integer(c, "action count"));
      if (!counts.empty() && counts != given)
        throw InputError("actions disagree with action_names");
      counts = given;
    }
    if (counts.empty())
      throw InputError("either actions or action_names is required");
    const Json& pay = Field(doc, "payoffs");
    if (!pay.is_array()) throw InputError("payoffs must be an array");
    std::vector<double> flat;
    for (const Json& row : pay) {
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw InputError("each payoff row must hold one value per player");
      for (const Json& v : row) flat.push_back(Number(v, "payoff"));
    }
    return Game(counts, std::move(flat), std::move(names));
  } catch (const GameError& e) {
    throw InputError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(e.what());
  }
}

Game LoadGame(const std::string& path) {
  Json doc = LoadJsonFile(path);
  try {
    return GameFromJson(doc);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Json ProfileToJson(const Profile& profile) {
  Json out = Json::array();
  for (int a : profile) out.push_back(a + 1);
  return out;
}

Profile ProfileFromJson(const Game& game, const Json& doc) {
  if (!doc.is_array() || static_cast<int>(doc.size()) != game.num_players())
    throw InputError("profile must list one action per player");
  Profile p;
  for (int i = 0; i < game.num_players(); ++i) {
    const Json& v = doc[i];
    if (v.is_string()) {
      try {
        p.push_back(game.ActionIndex(i, v.get<std::string>()));
      } catch (const GameError& e) {
        throw InputError(e.what());
      }
    } else {
      const int a = Integer(v, "action index") - 1;
      if (a < 0 || a >= game.num_actions(i))
        throw InputError("action index out of range");
      p.push_back(a);
    }
  }
  return p;
}

Json MixedToJson(const MixedProfile& sigma) { return Json(sigma); }

MixedProfile MixedFromJson(const Game& game, const Json& doc) {
  if (!doc.is_array()) throw InputError("mixed profile must be an array");
  MixedProfile sigma;
  for (const Json& row : doc) {
    if (!row.is_array()) throw InputError("mixed profile rows must be arrays");
    std::vector<double> v;
    for (const Json& x : row) v.push_back(Number(x, "probability"));
    sigma.push_back(std::move(v));
  }
  try {
    ValidateProfile(game, sigma);
  } catch (const GameError& e) {
    throw InputError(e.what());
  }
  return sigma;
}

Json PledgeToJson(const Pledge& pledge) {
  Json doc;
  doc["payer"] = pledge.payer + 1;
  doc["outcome"] = ProfileToJson(pledge.outcome);
  if (pledge.recipient == kBurn) doc["recipient"] = "BURN";
  else doc["recipient"] = pledge.recipient + 1;
  doc["amount"] = pledge.amount;
  return doc;
}

Pledge PledgeFromJson(const Game& game, const Json& doc) {
  Pledge p;
  p.payer = Integer(Field(doc, "payer"), "payer") - 1;
  if (p.payer < 0 || p.payer >= game.num_players())
    throw InputError("payer out of range");
  p.outcome = ProfileFromJson(game, Field(doc, "outcome"));
  const Json& r = Field(doc, "recipient");
  if (r.is_string()) {
    if (r.get<std::string>() != "BURN")
      throw InputError("recipient must be a player number or \"BURN\"");
    p.recipient = kBurn;
  } else {
    p.recipient = Integer(r, "recipient") - 1;
    if (p.recipient < 0 || p.recipient >= game.num_players())
      throw InputError("recipient out of range");
  }
  p.amount = Number(Field(doc, "amount"), "amount");
  return p;
}

Json RoundToJson(const CommitmentRound& round) {
  Json pledges = Json::array();
  for (const Pledge& p : round.pledges) pledges.push_back(PledgeToJson(p));
  Json doc;
  doc["pledges"] = std::move(pledges);
  return doc;
}

CommitmentRound RoundFromJson(const Game& game, const Json& doc) {
  CommitmentRound r;
  const Json& pledges = Field(doc, "pledges");
  if (!pledges.is_array()) throw InputError("pledges must be an array");
  for (const Json& p : pledges) r.pledges.push_back(PledgeFromJson(game, p));
  return r;
}

Json TranscriptToJson(const Game& base, double delta, Mode mode,
                      const Transcript& transcript) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool_version"] = kToolVersion;
  doc["base_game"] = GameToJson(base);
  doc["base_hash"] = HashHex(base.ContentHash());
  doc["delta"] = delta;
  doc["mode"] = ModeName(mode);
  Json rounds = Json::array();
  for (const auto& r : transcript.rounds) rounds.push_back(RoundToJson(r));
  doc["rounds"] = std::move(rounds);
  Json votes = Json::array();
  for (const auto& v : transcript.votes) {
    Json row = Json::array();
    for (Vote x : v) row.push_back(x == Vote::kContinue ? "continue" : "stop");
    votes.push_back(std::move(row));
  }
  doc["votes"] = std::move(votes);
  doc["terminal_actions"] = transcript.terminal_actions
                                ? ProfileToJson(*transcript.terminal_actions)
                                : Json();
  doc["final_payoffs"] = transcript.final_payoffs
                             ? Json(*transcript.final_payoffs)
                             : Json();
  return doc;
}

TranscriptFile TranscriptFromJson(const Json& doc, const Game* base) {
  TranscriptFile out;
  try {
    if (doc.contains("base_game")) {
      out.base = GameFromJson(doc.at("base_game"));
    } else if (base) {
      out.base = *base;
    } else {
      throw InputError("transcript has no inline game and none was supplied");
    }
    if (doc.contains("base_hash") &&
        ParseHashHex(doc.at("base_hash").get<std::string>()) !=
            out.base.ContentHash())
      throw InputError("transcript base_hash does not match the game");
    if (base && base->ContentHash() != out.base.ContentHash())
      throw InputError("transcript game does not match the supplied game");
    out.delta = Number(Field(doc, "delta"), "delta");
    const std::string mode = Field(doc, "mode").get<std::string>();
    if (mode == "transfers") out.mode = Mode::kTransfers;
    else if (mode == "burn_only") out.mode = Mode::kBurnOnly;
    else throw InputError("unknown mode '" + mode + "'");
    for (const Json& r : Field(doc, "rounds"))
      out.transcript.rounds.push_back(RoundFromJson(out.base, r));
    for (const Json& row : Field(doc, "votes")) {
      std::vector<Vote> v;
      for (const Json& x : row) {
        const std::string s = x.get<std::string>();
        if (s == "continue") v.push_back(Vote::kContinue);
        else if (s == "stop") v.push_back(Vote::kStop);
        else throw InputError("unknown vote '" + s + "'");
      }
      out.transcript.votes.push_back(std::move(v));
    }
    if (doc.contains("terminal_actions") && !doc.at("terminal_actions").is_null())
      out.transcript.terminal_actions =
          ProfileFromJson(out.base, doc.at("terminal_actions"));
    if (doc.contains("final_payoffs") && !doc.at("final_payoffs").is_null())
      out.transcript.final_payoffs =
          doc.at("final_payoffs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(e.what());
  }
  return out;
}

namespace {

Json StageToJson(const PlanStage& s) {
  Json doc;
  doc["tag"] = CaseTagName(s.tag);
  doc["first_round"] = s.first_round;
  doc["end_round"] = s.end_round;
  doc["baseline"] = MixedToJson(s.baseline);
  Json support = Json::array();
  for (const auto& list : s.reference_support) {
    Json row = Json::array();
    for (int a : list) row.push_back(a + 1);
    support.push_back(std::move(row));
  }
  doc["reference_support"] = std::move(support);
  doc["ceiling"] = s.ceiling;
  doc["target_bound"] = s.target_bound;
  doc["target"] = ProfileToJson(s.target);
  doc["monotonicity"] =
      s.monotonicity == Monotonicity::kUtilities ? "utilities" : "welfare";
  doc["allow_fallback"] = s.allow_fallback;
  doc["preserves_target"] = s.preserves_target;
  return doc;
}

PlanStage StageFromJson(const Game& game, const Json& doc) {
  PlanStage s;
  s.tag = ParseCaseTag(Field(doc, "tag").get<std::string>());
  s.first_round = Integer(Field(doc, "first_round"), "first_round");
  s.end_round = Integer(Field(doc, "end_round"), "end_round");
  s.baseline = MixedFromJson(game, Field(doc, "baseline"));
  for (const Json& row : Field(doc, "reference_support")) {
    std::vector<int> list;
    for (const Json& a : row) list.push_back(Integer(a, "support action") - 1);
    s.reference_support.push_back(std::move(list));
  }
  s.ceiling = Field(doc, "ceiling").get<std::vector<double>>();
  s.target_bound = Field(doc, "target_bound").get<std::vector<double>>();
  s.target = ProfileFromJson(game, Field(doc, "target"));
  const std::string mono = Field(doc, "monotonicity").get<std::string>();
  s.monotonicity =
      mono == "welfare" ? Monotonicity::kWelfare : Monotonicity::kUtilities;
  s.allow_fallback = Field(doc, "allow_fallback").get<bool>();
  s.preserves_target = Field(doc, "preserves_target").get<bool>();
  return s;
}

}  // namespace

Json PlanToJson(const ProtocolPlan& plan) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool_version"] = kToolVersion;
  doc["case_tag"] = CaseTagName(plan.case_tag);
  doc["delta"] = plan.delta;
  doc["mode"] = ModeName(plan.mode);
  Json perm = Json::array();
  for (const auto& order : plan.permutation) {
    Json row = Json::array();
    for (int a : order) row.push_back(a + 1);
    perm.push_back(std::move(row));
  }
  doc["permutation"] = std::move(perm);
  doc["target"] = {
      {"profile", ProfileToJson(plan.target.profile)},
      {"role", plan.target.role == TargetRole::kParetoImprover
                   ? "pareto_improver"
                   : "welfare_maximizer"}};
  doc["baseline"] = MixedToJson(plan.baseline);
  Json stages = Json::array();
  for (const auto& s : plan.stages) stages.push_back(StageToJson(s));
  doc["punishment_spec"] = std::move(stages);
  doc["base_hash"] = HashHex(plan.base_hash);
  Json cps = Json::array();
  for (auto h : plan.checkpoints) cps.push_back(HashHex(h));
  doc["checkpoints"] = std::move(cps);
  doc["checkpoint_lambda"] = plan.checkpoint_lambda;
  doc["expected_terminal_payoffs"] = plan.expected_terminal_payoffs;
  doc["round_bound_constant"] = plan.round_bound_constant;
  Json rounds = Json::array();
  for (const auto& r : plan.rounds) rounds.push_back(RoundToJson(r));
  doc["rounds"] = std::move(rounds);
  return doc;
}

ProtocolPlan PlanFromJson(const Game& game, const Json& doc) {
  ProtocolPlan plan;
  try {
    plan.case_tag = ParseCaseTag(Field(doc, "case_tag").get<std::string>());
    plan.delta = Number(Field(doc, "delta"), "delta");
    const std::string mode = Field(doc, "mode").get<std::string>();
    plan.mode = mode == "burn_only" ? Mode::kBurnOnly : Mode::kTransfers;
    for (const Json& row : Field(doc, "permutation")) {
      std::vector<int> order;
      for (const Json& a : row) order.push_back(Integer(a, "action") - 1);
      plan.permutation.push_back(std::move(order));
    }
    const Json& target = Field(doc, "target");
    plan.target.profile = ProfileFromJson(game, Field(target, "profile"));
    plan.target.role = Field(target, "role").get<std::string>() == "welfare_maximizer"
                           ? TargetRole::kWelfareMaximizer
                           : TargetRole::kParetoImprover;
    plan.baseline = MixedFromJson(game, Field(doc, "baseline"));
    for (const Json& s : Field(doc, "punishment_spec"))
      plan.stages.push_back(StageFromJson(game, s));
    plan.base_hash = ParseHashHex(Field(doc, "base_hash").get<std::string>());
    for (const Json& h : Field(doc, "checkpoints"))
      plan.checkpoints.push_back(ParseHashHex(h.get<std::string>()));
    plan.checkpoint_lambda =
        Field(doc, "checkpoint_lambda").get<std::vector<double>>();
    plan.expected_terminal_payoffs =
        Field(doc, "expected_terminal_payoffs").get<std::vector<double>>();
    plan.round_bound_constant =
        Number(Field(doc, "round_bound_constant"), "round_bound_constant");
    for (const Json& r : Field(doc, "rounds"))
      plan.rounds.push_back(RoundFromJson(game, r));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(e.what());
  } catch (const GameError& e) {
    throw InputError(e.what());
  }
  return plan;
}

Json PunishabilityToJson(const PunishabilityReport& report) {
  Json doc;
  doc["tool_version"] = kToolVersion;
  doc["epsilon"] = report.epsilon;
  doc["delta"] = report.delta;
  doc["samples"] = report.samples;
  doc["rng_seed"] = report.rng_seed;
  Json failures = Json::array();
  for (const auto& f : report.failures)
    failures.push_back({{"sample", f.sample},
                        {"reason", f.reason},
                        {"perturbed", GameToJson(f.perturbed)}});
  doc["failures"] = std::move(failures);
  doc["worst_excess"] = report.worst_excess;
  doc["passed"] = report.passed();
  return doc;
}

Json VerificationToJson(const Game& base, const ProtocolPlan& plan,
                        const VerificationReport& report) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool_version"] = kToolVersion;
  doc["label"] = report.label;
  doc["accepted"] = report.accepted;
  doc["base_hash"] = HashHex(base.ContentHash());
  doc["plan_checkpoint_final"] =
      plan.checkpoints.empty() ? "" : HashHex(plan.checkpoints.back());
  doc["grid"] = {{"amount_fractions", report.grid.amount_fractions},
                 {"deviation_budget", report.grid.deviation_budget},
                 {"adversarial_pairs", report.grid.adversarial_pairs},
                 {"probe_samples", report.grid.probe_samples},
                 {"rng_seed", report.grid.rng_seed},
                 {"gain_tolerance", report.grid.gain_tolerance}};
  Json props = Json::object();
  for (const auto& p : report.on_path.properties) {
    Json entry = {{"status", StatusName(p.status)}};
    if (p.status == PropertyStatus::kFail) {
      entry["prefix"] = p.prefix;
      entry["witness"] = p.witness;
    }
    props[p.name] = std::move(entry);
  }
  doc["properties"] = std::move(props);
  Json devs = Json::object();
  for (int c = 0; c < 4; ++c) {
    const auto& d = report.deviations.classes[c];
    Json entry = {{"evaluated", d.evaluated}, {"cases", d.cases}};
    if (d.evaluated) {
      entry["worst_gain"] = d.worst_gain;
      entry["prefix"] = d.prefix;
      entry["player"] = d.player + 1;
      entry["description"] = d.description;
    }
    devs[DeviationClassName(static_cast<DeviationClass>(c))] = std::move(entry);
  }
  doc["deviations"] = std::move(devs);
  doc["checked_prefixes"] = report.deviations.prefixes;
  doc["structural_failures"] = report.deviations.structural_failures;
  doc["round_bound"] = {{"rounds", report.round_bound.rounds},
                        {"bound", report.round_bound.bound},
                        {"constant", report.round_bound.constant},
                        {"ok", report.round_bound.ok}};
  if (report.witness)
    doc["witness"] = TranscriptToJson(base, plan.delta, plan.mode, *report.witness);
  return doc;
}

}  // namespace cgames
