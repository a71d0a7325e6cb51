#include "proofagent/proof_tree.hpp"

#include <algorithm>
#include <sstream>

#include "proofagent/sanitize.hpp"
#include "proofagent/text.hpp"

namespace proofagent {

std::string node_label(const NodeId& id) {
  std::string out = "0";
  for (auto i : id) out += "." + std::to_string(i);
  return out;
}

std::optional<NodeId> parse_node_label(std::string_view label) {
  if (label.empty() || label.front() != '0') return std::nullopt;
  NodeId id;
  std::size_t i = 1;
  while (i < label.size()) {
    if (label[i] != '.' || i + 1 >= label.size()) return std::nullopt;
    ++i;
    std::size_t v = 0;
    std::size_t start = i;
    while (i < label.size() && std::isdigit(static_cast<unsigned char>(label[i]))) {
      v = v * 10 + static_cast<std::size_t>(label[i] - '0');
      ++i;
    }
    if (i == start) return std::nullopt;
    id.push_back(v);
  }
  return id;
}

std::string_view to_string(ApplicationOutcome::Kind k) {
  switch (k) {
    case ApplicationOutcome::Kind::LeafClosed: return "LeafClosed";
    case ApplicationOutcome::Kind::Branched: return "Branched";
    case ApplicationOutcome::Kind::SubgoalReplaced: return "SubgoalReplaced";
    case ApplicationOutcome::Kind::Stayed: return "Stayed";
  }
  return "?";
}

std::vector<std::string> ProofScript::sentences() const {
  std::vector<std::string> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(l.text);
  return out;
}

std::size_t ProofScript::tactic_count() const {
  return static_cast<std::size_t>(std::count_if(
      lines.begin(), lines.end(), [](const ScriptLine& l) { return l.kind == ScriptLine::Kind::Tactic; }));
}

std::string ProofScript::text() const {
  std::string out;
  std::size_t depth = 0;
  for (const auto& l : lines) {
    if (l.kind == ScriptLine::Kind::Close && depth > 0) --depth;
    out += std::string(2 * depth, ' ') + l.text + "\n";
    if (l.kind == ScriptLine::Kind::Open) ++depth;
  }
  return out;
}

std::vector<std::string> parse_certificate(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t == "Proof." || t == "Qed.") continue;
    out.push_back(t);
  }
  return out;
}

ProofTree::ProofTree(GoalState root_goal) {
  ProofNode root;
  root.goal = std::move(root_goal);
  nodes_.emplace(NodeId{}, std::move(root));
  focus_ = NodeId{};
}

const ProofNode& ProofTree::node(const NodeId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw TreeError(TreeErrorKind::UnknownNode, "no node " + node_label(id));
  return it->second;
}

ProofNode& ProofTree::mutable_node(const NodeId& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw TreeError(TreeErrorKind::UnknownNode, "no node " + node_label(id));
  return it->second;
}

ApplicationOutcome ProofTree::record_application(const NodeId& id, const std::string& tactic,
                                                 const ProverReply& reply) {
  auto& n = mutable_node(id);
  if (n.status == NodeStatus::Closed) {
    throw TreeError(TreeErrorKind::AlreadyClosed, "node " + node_label(id) + " is closed");
  }
  if (!focus_ || *focus_ != id) {
    throw TreeError(TreeErrorKind::NotFocused, "node " + node_label(id) + " is not the focus");
  }
  if (std::holds_alternative<Failure>(reply)) return {ApplicationOutcome::Kind::Stayed, {}};

  // the focused branch's goal is replaced by k new goals
  std::vector<GoalState> fresh;
  if (const auto* adv = std::get_if<Advanced>(&reply)) {
    const std::size_t before = open_leaves().size();
    const std::size_t after = adv->open_goals.size();
    if (after + 1 > before) {
      const std::size_t k = after + 1 - before;
      fresh.assign(adv->open_goals.begin(), adv->open_goals.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }

  ApplicationOutcome out;
  if (fresh.empty()) {
    n.status = NodeStatus::Closed;
    n.closing_tactic = tactic;
    out.kind = ApplicationOutcome::Kind::LeafClosed;
    propagate_closure(id);
  } else {
    out.kind = fresh.size() == 1 ? ApplicationOutcome::Kind::SubgoalReplaced : ApplicationOutcome::Kind::Branched;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      ProofNode child;
      child.id = id;
      child.id.push_back(i);
      child.goal = std::move(fresh[i]);
      child.incoming_tactic = tactic;
      n.children.push_back(child.id);
      out.children.push_back(child.id);
      nodes_.emplace(child.id, std::move(child));
    }
  }
  focus_ = next_open_goal();
  return out;
}

void ProofTree::propagate_closure(NodeId id) {
  while (!id.empty()) {
    id.pop_back();
    auto& parent = mutable_node(id);
    bool all = std::all_of(parent.children.begin(), parent.children.end(),
                           [this](const NodeId& c) { return node(c).status == NodeStatus::Closed; });
    if (!all) return;
    parent.status = NodeStatus::Closed;
  }
}

std::optional<NodeId> ProofTree::next_open_goal() const {
  for (const auto& [id, n] : nodes_) {
    if (n.status == NodeStatus::Open && n.is_leaf()) return id;
  }
  return std::nullopt;
}

std::vector<NodeId> ProofTree::open_leaves() const {
  std::vector<NodeId> out;
  for (const auto& [id, n] : nodes_) {
    if (n.status == NodeStatus::Open && n.is_leaf()) out.push_back(id);
  }
  return out;
}

bool ProofTree::is_complete() const {
  return !nodes_.empty() && std::all_of(nodes_.begin(), nodes_.end(), [](const auto& kv) {
    return kv.second.status == NodeStatus::Closed;
  });
}

void ProofTree::emit(const ProofNode& n, ProofScript& out) const {
  if (n.closing_tactic) {
    out.lines.push_back({ScriptLine::Kind::Tactic, *n.closing_tactic});
    return;
  }
  if (n.children.empty()) return;
  out.lines.push_back({ScriptLine::Kind::Tactic, *node(n.children.front()).incoming_tactic});
  const bool braces = n.children.size() >= 2;
  for (const auto& c : n.children) {
    if (braces) out.lines.push_back({ScriptLine::Kind::Open, "{"});
    emit(node(c), out);
    if (braces) out.lines.push_back({ScriptLine::Kind::Close, "}"});
  }
}

ProofScript ProofTree::linearize() const {
  if (!is_complete()) throw TreeError(TreeErrorKind::TreeIncomplete, "proof tree has open goals");
  ProofScript out;
  emit(root(), out);
  return out;
}

std::string ProofTree::render(std::size_t budget) const {
  std::vector<std::string> lines;
  for (const auto& [id, n] : nodes_) {
    std::string line(2 * id.size(), ' ');
    line += "[" + node_label(id) + "] ";
    line += n.status == NodeStatus::Open ? "OPEN" : "CLOSED";
    if (focus_ && *focus_ == id) line += " <focus>";
    if (n.incoming_tactic) line += " via `" + *n.incoming_tactic + "`";
    if (n.closing_tactic) line += " closed by `" + *n.closing_tactic + "`";
    line += " | " + n.goal.conclusion;
    lines.push_back(midline_truncate(line, kRenderLineWidth));
  }
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t remaining = lines.size() - i;
    std::string notice = "... (" + std::to_string(remaining) + " more node" + (remaining == 1 ? "" : "s") +
                         " not shown)";
    // keep room for the notice unless this is the last line
    std::size_t need = out.size() + lines[i].size() + 1;
    std::size_t reserve = i + 1 < lines.size() ? notice.size() + 16 : 0;
    if (need + reserve > budget) {
      if (out.size() + notice.size() <= budget) return out + notice;
      return (out + notice).substr(0, budget);
    }
    out += lines[i] + "\n";
  }
  return out;
}

namespace {

nlohmann::json goal_to_json(const GoalState& g) {
  nlohmann::json hyps = nlohmann::json::array();
  for (const auto& h : g.hypotheses) hyps.push_back({{"names", h.names}, {"statement", h.statement}});
  return {{"goal-id", g.goal_id}, {"hypotheses", hyps}, {"conclusion", g.conclusion}};
}

[[noreturn]] void schema(const std::string& what) { throw TreeError(TreeErrorKind::SchemaViolation, what); }

GoalState goal_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("conclusion") || !j["conclusion"].is_string()) {
    schema("goal lacks a conclusion string");
  }
  GoalState g;
  g.conclusion = j["conclusion"].get<std::string>();
  if (j.contains("goal-id")) {
    if (!j["goal-id"].is_string()) schema("goal-id must be a string");
    g.goal_id = j["goal-id"].get<std::string>();
  }
  if (j.contains("hypotheses")) {
    if (!j["hypotheses"].is_array()) schema("hypotheses must be an array");
    for (const auto& h : j["hypotheses"]) {
      if (!h.is_object() || !h.contains("names") || !h["names"].is_array() || !h.contains("statement") ||
          !h["statement"].is_string()) {
        schema("malformed hypothesis");
      }
      Hypothesis hyp;
      for (const auto& n : h["names"]) {
        if (!n.is_string()) schema("hypothesis name must be a string");
        hyp.names.push_back(n.get<std::string>());
      }
      hyp.statement = h["statement"].get<std::string>();
      g.hypotheses.push_back(std::move(hyp));
    }
  }
  return g;
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) schema(std::string(key) + " must be a string or null");
  return j[key].get<std::string>();
}

NodeId label_or_throw(const nlohmann::json& j) {
  if (!j.is_string()) schema("node id must be a string");
  auto id = parse_node_label(j.get<std::string>());
  if (!id) schema("malformed node id '" + j.get<std::string>() + "'");
  return *id;
}

}  // namespace

nlohmann::json ProofTree::serialize() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [id, n] : nodes_) {
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : n.children) children.push_back(node_label(c));
    nodes.push_back({
        {"id", node_label(id)},
        {"status", n.status == NodeStatus::Open ? "open" : "closed"},
        {"incoming-tactic", n.incoming_tactic ? nlohmann::json(*n.incoming_tactic) : nlohmann::json()},
        {"closing-tactic", n.closing_tactic ? nlohmann::json(*n.closing_tactic) : nlohmann::json()},
        {"children", children},
        {"goal", goal_to_json(n.goal)},
    });
  }
  return {{"root", "0"},
          {"focus", focus_ ? nlohmann::json(node_label(*focus_)) : nlohmann::json()},
          {"nodes", nodes}};
}

ProofTree ProofTree::deserialize(const nlohmann::json& doc) {
  if (!doc.is_object()) schema("tree document must be an object");
  if (!doc.contains("root")) schema("missing root");
  if (label_or_throw(doc["root"]) != NodeId{}) schema("root id must be \"0\"");
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) schema("missing nodes array");

  ProofTree t;
  for (const auto& jn : doc["nodes"]) {
    if (!jn.is_object() || !jn.contains("id")) schema("node without id");
    ProofNode n;
    n.id = label_or_throw(jn["id"]);
    if (!jn.contains("status") || !jn["status"].is_string()) schema("node status missing");
    auto status = jn["status"].get<std::string>();
    if (status != "open" && status != "closed") schema("unknown status '" + status + "'");
    n.status = status == "open" ? NodeStatus::Open : NodeStatus::Closed;
    n.incoming_tactic = optional_string(jn, "incoming-tactic");
    n.closing_tactic = optional_string(jn, "closing-tactic");
    if (!jn.contains("children") || !jn["children"].is_array()) schema("node children missing");
    for (const auto& c : jn["children"]) n.children.push_back(label_or_throw(c));
    if (!jn.contains("goal")) schema("node goal missing");
    n.goal = goal_from_json(jn["goal"]);
    auto id = n.id;
    if (!t.nodes_.emplace(id, std::move(n)).second) schema("duplicate node " + node_label(id));
  }
  if (t.nodes_.count(NodeId{}) == 0) schema("root node absent");
  for (const auto& [id, n] : t.nodes_) {
    if (!id.empty()) {
      NodeId parent(id.begin(), id.end() - 1);
      auto p = t.nodes_.find(parent);
      if (p == t.nodes_.end() ||
          std::find(p->second.children.begin(), p->second.children.end(), id) == p->second.children.end()) {
        schema("node " + node_label(id) + " is not listed by its parent");
      }
      if (!n.incoming_tactic) schema("node " + node_label(id) + " lacks an incoming tactic");
    } else if (n.incoming_tactic) {
      schema("root must not have an incoming tactic");
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      NodeId expect = id;
      expect.push_back(i);
      if (n.children[i] != expect || t.nodes_.count(expect) == 0) {
        schema("children of " + node_label(id) + " are inconsistent");
      }
    }
    if (n.closing_tactic && !n.children.empty()) schema("node " + node_label(id) + " has both children and a closing tactic");
    if (n.status == NodeStatus::Closed && n.children.empty() && !n.closing_tactic) {
      schema("closed leaf " + node_label(id) + " lacks a closing tactic");
    }
  }
  if (auto f = optional_string(doc, "focus")) {
    auto id = parse_node_label(*f);
    if (!id) schema("malformed focus id");
    auto it = t.nodes_.find(*id);
    if (it == t.nodes_.end() || it->second.status != NodeStatus::Open) schema("focus must be an open node");
    t.focus_ = *id;
  }
  return t;
}

}  // namespace proofagent
