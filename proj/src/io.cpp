#include "rla/io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace rla {

using nlohmann::json;

Universe Universe::defaults(int n, int k) {
  Universe u;
  for (int p = 1; p <= n; ++p) u.processes.push_back("p" + std::to_string(p));
  for (int c = 1; c <= k; ++c) u.channels.push_back("c" + std::to_string(c));
  return u;
}

ProcessId Universe::process(const std::string& name) const {
  for (std::size_t i = 0; i < processes.size(); ++i)
    if (processes[i] == name) return static_cast<ProcessId>(i);
  throw ParseError("unknown process: " + name);
}

ChannelId Universe::channel(const std::string& name) const {
  for (std::size_t i = 0; i < channels.size(); ++i)
    if (channels[i] == name) return static_cast<ChannelId>(i);
  throw ParseError("unknown channel: " + name);
}

std::string action_to_string(const Universe& u, const Action& a) {
  const std::string chan = u.channels.at(a.channel);
  switch (a.op.kind) {
    case OpKind::Nop: return chan + " nop";
    case OpKind::Swap: return chan + " swap " + std::to_string(a.op.edge);
    case OpKind::Move:
      return chan + " move " + std::to_string(a.op.edge) + " " +
             std::to_string(a.op.target);
    case OpKind::Connect:
      return chan + " conn " + std::to_string(a.op.edge) + " " +
             u.channels.at(a.op.channel);
    case OpKind::Disconnect: return chan + " disc " + std::to_string(a.op.edge);
  }
  throw std::logic_error("unknown operation kind");
}

namespace {

std::vector<std::string> tokens_of(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

int parse_int(const std::string& t) {
  std::size_t used = 0;
  int v;
  try {
    v = std::stoi(t, &used);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + t + "'");
  }
  if (used != t.size()) throw ParseError("expected an integer, got '" + t + "'");
  return v;
}

}  // namespace

Action parse_action(const Universe& u, const std::string& text) {
  const auto toks = tokens_of(text);
  if (toks.size() < 2) throw ParseError("action needs a channel and a verb: '" + text + "'");
  Action a;
  a.channel = u.channel(toks[0]);
  const std::string& verb = toks[1];
  auto arity = [&](std::size_t want) {
    if (toks.size() != want)
      throw ParseError("wrong number of arguments in action '" + text + "'");
  };
  if (verb == "nop") {
    arity(2);
    a.op = Op::nop();
  } else if (verb == "swap") {
    arity(3);
    const int e = parse_int(toks[2]);
    if (e < 1) throw ParseError("swap needs an edge label >= 1");
    a.op = Op::swap(e);
  } else if (verb == "move") {
    arity(4);
    const int e = parse_int(toks[2]);
    const int t = parse_int(toks[3]);
    if (e < 1) throw ParseError("move needs an edge label >= 1");
    if (t == e || t < 0) throw ParseError("move target must differ from the moved edge");
    a.op = Op::move(e, t);
  } else if (verb == "conn") {
    arity(4);
    const int e = parse_int(toks[2]);
    if (e < 0) throw ParseError("conn needs an edge label >= 0");
    a.op = Op::connect(e, u.channel(toks[3]));
  } else if (verb == "disc") {
    arity(3);
    const int e = parse_int(toks[2]);
    if (e < 0) throw ParseError("disc needs an edge label >= 0");
    a.op = Op::disconnect(e);
  } else {
    throw ParseError("unknown verb '" + verb + "'");
  }
  return a;
}

namespace {

json universe_to_json(const Universe& u) {
  return {{"processes", u.processes}, {"channels", u.channels}};
}

Universe universe_from_json(const json& j) {
  Universe u;
  u.processes = j.at("processes").get<std::vector<std::string>>();
  u.channels = j.at("channels").get<std::vector<std::string>>();
  if (u.processes.empty()) throw ParseError("empty process list");
  std::unordered_set<std::string> seen;
  for (const auto& name : u.processes)
    if (!seen.insert(name).second) throw ParseError("duplicate process name: " + name);
  for (const auto& name : u.channels)
    if (!seen.insert(name).second) throw ParseError("duplicate channel name: " + name);
  return u;
}

json tree_to_json(const Universe& u, const Tree& t) {
  json edges = json::array();
  for (EdgeLabel e = 1; e < t.size(); ++e) {
    const ProcessId p = t.proc_from_label(e);
    edges.push_back({{"parent", u.processes.at(t.parent(p))},
                     {"child", u.processes.at(p)},
                     {"label", e}});
  }
  return {{"root", u.processes.at(t.root())}, {"edges", edges}};
}

Tree tree_from_json(const Universe& u, const json& j) {
  const int n = static_cast<int>(u.processes.size());
  std::vector<ProcessId> parent(n, -1);
  std::vector<EdgeLabel> label(n, 0);
  const ProcessId root = u.process(j.at("root").get<std::string>());
  std::vector<char> seted(n, 0);
  seted[root] = 1;
  for (const json& edge : j.at("edges")) {
    const ProcessId p = u.process(edge.at("child").get<std::string>());
    const ProcessId q = u.process(edge.at("parent").get<std::string>());
    const int lab = edge.at("label").get<int>();
    if (seted[p]) throw ParseError("process has two parent edges: " + u.processes[p]);
    seted[p] = 1;
    parent[p] = q;
    label[p] = lab;
  }
  try {
    return Tree(std::move(parent), std::move(label));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

json members_to_json(const Universe& u, const CommArch& arch) {
  json members = json::object();
  for (std::size_t c = 0; c < u.channels.size(); ++c) {
    json names = json::array();
    for (int p : arch.members[c]) names.push_back(u.processes.at(p));
    members[u.channels[c]] = names;
  }
  return members;
}

CommArch members_from_json(const Universe& u, const json& j) {
  CommArch arch;
  arch.members.resize(u.channels.size());
  for (std::size_t c = 0; c < u.channels.size(); ++c) {
    const json& names = j.at(u.channels[c]);
    for (const json& name : names)
      arch.members[c].set(u.process(name.get<std::string>()));
  }
  return arch;
}

json parse_document(const std::string& text, const std::string& kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!j.is_object()) throw ParseError("expected a JSON object");
  if (j.value("format-version", -1) != 1) throw ParseError("unsupported format-version");
  if (j.value("kind", "") != kind)
    throw ParseError("expected kind '" + kind + "', got '" + j.value("kind", "") + "'");
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string tca_to_string(const Universe& u, const Tca& t) {
  json j = universe_to_json(u);
  j["format-version"] = 1;
  j["kind"] = "tca";
  j["tree"] = tree_to_json(u, t.tree);
  j["members"] = members_to_json(u, t.arch);
  return dump(j);
}

std::pair<Universe, Tca> tca_from_string(const std::string& text) {
  const json j = parse_document(text, "tca");
  Universe u = universe_from_json(j);
  Tca t{members_from_json(u, j.at("members")), tree_from_json(u, j.at("tree"))};
  return {std::move(u), std::move(t)};
}

std::string word_to_string(const Universe& u, std::span<const Action> word) {
  json j = universe_to_json(u);
  j["format-version"] = 1;
  j["kind"] = "word";
  json actions = json::array();
  for (const Action& a : word) actions.push_back(action_to_string(u, a));
  j["actions"] = actions;
  return dump(j);
}

std::pair<Universe, std::vector<Action>> word_from_string(const std::string& text) {
  const json j = parse_document(text, "word");
  Universe u = universe_from_json(j);
  std::vector<Action> word;
  for (const json& a : j.at("actions")) word.push_back(parse_action(u, a.get<std::string>()));
  return {std::move(u), std::move(word)};
}

std::string dfa_to_string(const Universe& u, const ExplicitRlDfa& dfa) {
  json j = universe_to_json(u);
  j["format-version"] = 1;
  j["kind"] = "rldfa";
  j["states"] = dfa.state_names();
  j["initial"] = dfa.state_name(dfa.initial());
  json accepting = json::array();
  for (int s = 0; s < dfa.state_count(); ++s)
    if (dfa.accepting(s)) accepting.push_back(dfa.state_name(s));
  j["accepting"] = accepting;
  j["arch0"] = {{"tree", tree_to_json(u, dfa.arch0().tree)},
                {"members", members_to_json(u, dfa.arch0().arch)}};
  json transitions = json::array();
  for (int s = 0; s < dfa.state_count(); ++s)
    for (const auto& [a, to] : dfa.transitions()[s])
      transitions.push_back({{"from", dfa.state_name(s)},
                             {"on", action_to_string(u, a)},
                             {"to", dfa.state_name(to)}});
  j["transitions"] = transitions;
  return dump(j);
}

std::pair<Universe, std::shared_ptr<ExplicitRlDfa>> dfa_from_string(const std::string& text) {
  const json j = parse_document(text, "rldfa");
  Universe u = universe_from_json(j);
  const auto names = j.at("states").get<std::vector<std::string>>();
  std::unordered_map<std::string, StateId> ids;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!ids.emplace(names[i], static_cast<StateId>(i)).second)
      throw ParseError("duplicate state name: " + names[i]);
  }
  auto id_of = [&](const std::string& name) {
    auto it = ids.find(name);
    if (it == ids.end()) throw ParseError("unknown state name: " + name);
    return it->second;
  };
  std::vector<StateId> accepting;
  for (const json& s : j.at("accepting")) accepting.push_back(id_of(s.get<std::string>()));
  const json& a0 = j.at("arch0");
  Tca arch0{members_from_json(u, a0.at("members")), tree_from_json(u, a0.at("tree"))};
  const ValidationReport report = validate_tca(arch0);
  if (!report.ok()) throw ParseError("arch0 is not a tree-like communication architecture");

  auto dfa = std::make_shared<ExplicitRlDfa>(names, id_of(j.at("initial").get<std::string>()),
                                             std::move(accepting), std::move(arch0));
  for (const json& t : j.at("transitions")) {
    try {
      dfa->add_transition(id_of(t.at("from").get<std::string>()),
                          parse_action(u, t.at("on").get<std::string>()),
                          id_of(t.at("to").get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
  return {std::move(u), std::move(dfa)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
}

std::shared_ptr<ExplicitRlDfa> materialize(const RlDfa& dfa, std::size_t max_states) {
  ConfigSpace space(dfa);
  std::vector<StateId> order;
  std::unordered_map<StateId, StateId> index;
  for (const Config& cfg : space.configs())
    if (index.emplace(cfg.state, static_cast<StateId>(order.size())).second)
      order.push_back(cfg.state);
  if (order.size() > max_states)
    throw std::runtime_error("materialize: too many states (" +
                             std::to_string(order.size()) + ")");

  std::vector<std::string> names;
  std::vector<StateId> accepting;
  names.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    names.push_back(dfa.state_name(order[i]));
    if (dfa.accepting(order[i])) accepting.push_back(static_cast<StateId>(i));
  }
  auto out = std::make_shared<ExplicitRlDfa>(std::move(names), index.at(dfa.initial()),
                                             std::move(accepting), dfa.arch0());
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const Action& a : dfa.delta_actions(order[i])) {
      const auto to = dfa.delta(order[i], a);
      if (!to) continue;
      const auto target = index.find(*to);
      // Transitions into states never reached as configurations can never
      // fire; dropping them keeps the language intact.
      if (target == index.end()) continue;
      out->add_transition(static_cast<StateId>(i), a, target->second);
    }
  }
  return out;
}

}  // namespace rla
