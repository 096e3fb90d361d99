// Command-line front end: validate and rewrite architectures, plan
// reconfigurations, check diamond closure, and run or audit distributions.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rla/harness.hpp"
#include "rla/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kSemanticError = 1;
constexpr int kParseError = 2;

using namespace rla;

int cmd_validate(const std::string& path) {
  const auto [universe, tca] = tca_from_string(read_file(path));
  const ValidationReport report = validate_tca(tca);
  for (const TcaViolation& v : report.violations)
    std::cout << v.to_string(universe.processes, universe.channels) << "\n";
  return report.ok() ? kOk : kSemanticError;
}

int cmd_apply(const std::string& path, const std::vector<std::string>& action_texts,
              const std::string& out_path) {
  auto [universe, tca] = tca_from_string(read_file(path));
  for (const std::string& text : action_texts) {
    const Action a = parse_action(universe, text);
    if (auto why = check_valid(tca, a)) {
      std::cerr << "invalid action '" << text << "': " << *why << "\n";
      return kSemanticError;
    }
    tca = apply(tca, a);
  }
  const std::string output = tca_to_string(universe, tca);
  if (out_path.empty()) std::cout << output;
  else write_file(out_path, output);
  return kOk;
}

int cmd_plan(const std::string& from_path, const std::string& to_path,
             const std::string& out_path) {
  const auto [u1, from] = tca_from_string(read_file(from_path));
  const auto [u2, to] = tca_from_string(read_file(to_path));
  if (!(u1 == u2)) throw ParseError("plan: the two files use different universes");
  const std::vector<Action> actions = plan(from, to);
  const std::string output = word_to_string(u1, actions);
  if (out_path.empty()) std::cout << output;
  else write_file(out_path, output);
  return kOk;
}

int cmd_check_diamond(const std::string& path) {
  const auto [universe, dfa] = dfa_from_string(read_file(path));
  const auto cex = check_diamond(*dfa);
  if (!cex) {
    std::cout << "diamond closed\n";
    return kOk;
  }
  std::cout << "counterexample state=" << dfa->state_name(cex->config.state)
            << " first=\"" << action_to_string(universe, cex->first) << "\" second=\""
            << action_to_string(universe, cex->second) << "\" (" << cex->detail << ")\n";
  return kSemanticError;
}

int cmd_distribute_run(const std::string& dfa_path, const std::string& word_path) {
  const auto [universe, dfa] = dfa_from_string(read_file(dfa_path));
  const auto [word_universe, word] = word_from_string(read_file(word_path));
  if (!(universe == word_universe))
    throw ParseError("distribute-run: word and automaton use different universes");
  const Distributed dist = distribute(dfa);
  const auto rr = raa_run(dist.raa, word);
  for (std::size_t i = 0; i + 1 < rr.globals.size(); ++i)
    std::cout << "step " << i << " ok \"" << action_to_string(universe, word[i]) << "\"\n";
  if (!rr.defined()) {
    std::cout << "undefined step=" << *rr.undefined_at << " \""
              << action_to_string(universe, word[*rr.undefined_at]) << "\"\n";
    return kSemanticError;
  }
  std::cout << (raa_accepts(dist.raa, rr.final_global()) ? "accepted" : "rejected") << "\n";
  return kOk;
}

int cmd_compare(const std::string& dfa_path, const std::string& word_path) {
  const auto [universe, dfa] = dfa_from_string(read_file(dfa_path));
  const auto [word_universe, word] = word_from_string(read_file(word_path));
  if (!(universe == word_universe))
    throw ParseError("compare: word and automaton use different universes");
  const Distributed dist = distribute(dfa);
  const LockstepResult result = lockstep(dist, word);
  for (const std::string& line : result.lines) std::cout << line << "\n";
  if (!result.ok) {
    std::cout << "FAIL " << result.failure << "\n";
    return kSemanticError;
  }
  return kOk;
}

int cmd_gen_tca(int n, int k, std::uint64_t seed, const std::string& out_path) {
  const Tca tca = gen_tca(n, k, seed);
  const std::string output = tca_to_string(Universe::defaults(n, k), tca);
  if (out_path.empty()) std::cout << output;
  else write_file(out_path, output);
  return kOk;
}

int cmd_gen_dfa(const std::string& family, int n, int k, std::uint64_t seed,
                std::size_t max_states, const std::string& out_path) {
  GenSpec spec;
  spec.n = n;
  spec.k = k;
  spec.seed = seed;
  if (family == "tracker") spec.family = GenSpec::Family::Tracker;
  else if (family == "parity") spec.family = GenSpec::Family::TrackerParity;
  else if (family == "custom") spec.family = GenSpec::Family::TrackerCustom;
  else throw CLI::ValidationError("--family must be tracker, parity or custom");
  const auto dfa = gen_dfa(spec);
  const auto explicit_dfa = materialize(*dfa, max_states);
  const std::string output = dfa_to_string(Universe::defaults(n, k), *explicit_dfa);
  if (out_path.empty()) std::cout << output;
  else write_file(out_path, output);
  return kOk;
}

int cmd_gen_word(const std::string& dfa_path, int max_len, std::uint64_t seed,
                 int undefined_percent, const std::string& out_path) {
  const auto [universe, dfa] = dfa_from_string(read_file(dfa_path));
  const auto words = gen_words(*dfa, 1, max_len, seed, undefined_percent);
  const std::string output = word_to_string(universe, words.at(0).actions);
  if (out_path.empty()) std::cout << output;
  else write_file(out_path, output);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tree-like communication architectures: reconfiguration, "
               "diamond checking, and distribution"};
  app.require_subcommand(1);

  std::string path, second_path, out_path;
  std::vector<std::string> action_texts;
  int n = 3, k = 2, max_len = 8, undefined_percent = 0;
  std::uint64_t seed = 0;
  std::size_t max_states = 20000;
  std::string family = "tracker";

  auto* validate = app.add_subcommand("validate", "check a TCA file");
  validate->add_option("tca", path)->required();

  auto* apply_cmd = app.add_subcommand("apply", "apply actions to a TCA");
  apply_cmd->add_option("tca", path)->required();
  apply_cmd->add_option("action", action_texts, "e.g. \"c1 swap 1\"")->required();
  apply_cmd->add_option("--out", out_path);

  auto* plan_cmd = app.add_subcommand("plan", "plan a reconfiguration sequence");
  plan_cmd->add_option("from", path)->required();
  plan_cmd->add_option("to", second_path)->required();
  plan_cmd->add_option("--out", out_path);

  auto* diamond = app.add_subcommand("check-diamond", "check diamond closure");
  diamond->add_option("rldfa", path)->required();

  auto* drun = app.add_subcommand("distribute-run", "run a word on the distribution");
  drun->add_option("rldfa", path)->required();
  drun->add_option("word", second_path)->required();

  auto* compare = app.add_subcommand("compare", "lockstep audit of a word");
  compare->add_option("rldfa", path)->required();
  compare->add_option("word", second_path)->required();

  auto* gen = app.add_subcommand("gen", "seeded generators");
  gen->require_subcommand(1);
  auto* gen_tca_cmd = gen->add_subcommand("tca");
  gen_tca_cmd->add_option("--n", n);
  gen_tca_cmd->add_option("--k", k);
  gen_tca_cmd->add_option("--seed", seed);
  gen_tca_cmd->add_option("--out", out_path);
  auto* gen_dfa_cmd = gen->add_subcommand("dfa");
  gen_dfa_cmd->add_option("--family", family, "tracker|parity|custom");
  gen_dfa_cmd->add_option("--n", n);
  gen_dfa_cmd->add_option("--k", k);
  gen_dfa_cmd->add_option("--seed", seed);
  gen_dfa_cmd->add_option("--max-states", max_states);
  gen_dfa_cmd->add_option("--out", out_path);
  auto* gen_word_cmd = gen->add_subcommand("word");
  gen_word_cmd->add_option("--dfa", path)->required();
  gen_word_cmd->add_option("--max-len", max_len);
  gen_word_cmd->add_option("--seed", seed);
  gen_word_cmd->add_option("--undefined-percent", undefined_percent);
  gen_word_cmd->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return cmd_validate(path);
    if (app.got_subcommand(apply_cmd)) return cmd_apply(path, action_texts, out_path);
    if (app.got_subcommand(plan_cmd)) return cmd_plan(path, second_path, out_path);
    if (app.got_subcommand(diamond)) return cmd_check_diamond(path);
    if (app.got_subcommand(drun)) return cmd_distribute_run(path, second_path);
    if (app.got_subcommand(compare)) return cmd_compare(path, second_path);
    if (gen->got_subcommand(gen_tca_cmd)) return cmd_gen_tca(n, k, seed, out_path);
    if (gen->got_subcommand(gen_dfa_cmd))
      return cmd_gen_dfa(family, n, k, seed, max_states, out_path);
    if (gen->got_subcommand(gen_word_cmd))
      return cmd_gen_word(path, max_len, seed, undefined_percent, out_path);
  } catch (const rla::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSemanticError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSemanticError;
  }
  return kOk;
}
