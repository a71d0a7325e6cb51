#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "proofagent/prover.hpp"

namespace proofagent {

/// Path from the root; the root is the empty path.
using NodeId = std::vector<std::size_t>;

/// "0" for the root, "0.i.j" below it (same scheme as session goal ids).
std::string node_label(const NodeId& id);
std::optional<NodeId> parse_node_label(std::string_view label);

enum class NodeStatus { Open, Closed };

struct ProofNode {
  NodeId id;
  GoalState goal;
  NodeStatus status = NodeStatus::Open;
  std::optional<std::string> incoming_tactic;  // absent only at the root
  std::vector<NodeId> children;
  std::optional<std::string> closing_tactic;   // set when closed as a leaf

  bool is_leaf() const { return children.empty(); }
  bool operator==(const ProofNode&) const = default;
};

enum class TreeErrorKind { NotFocused, AlreadyClosed, UnknownNode, TreeIncomplete, SchemaViolation };

class TreeError : public std::runtime_error {
 public:
  TreeError(TreeErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  TreeErrorKind kind() const { return kind_; }

 private:
  TreeErrorKind kind_;
};

struct ApplicationOutcome {
  enum class Kind { LeafClosed, Branched, SubgoalReplaced, Stayed };
  Kind kind = Kind::Stayed;
  std::vector<NodeId> children;
};

std::string_view to_string(ApplicationOutcome::Kind k);

/// One line of a linearized proof: a tactic or a subproof brace.
struct ScriptLine {
  enum class Kind { Tactic, Open, Close };
  Kind kind = Kind::Tactic;
  std::string text;

  bool operator==(const ScriptLine&) const = default;
};

struct ProofScript {
  std::vector<ScriptLine> lines;

  /// All sentences in order, braces included (what replay sends).
  std::vector<std::string> sentences() const;
  /// Number of tactic sentences, braces excluded.
  std::size_t tactic_count() const;
  /// One sentence per line, indented by brace depth.
  std::string text() const;
};

/// Reads a certificate file body back into sentences (one per line,
/// blank lines and "Proof."/"Qed." ignored).
std::vector<std::string> parse_certificate(std::string_view text);

class ProofTree {
 public:
  ProofTree() = default;
  explicit ProofTree(GoalState root_goal);

  const ProofNode& node(const NodeId& id) const;
  const ProofNode& root() const { return node({}); }
  const std::map<NodeId, ProofNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  const std::optional<NodeId>& focus() const { return focus_; }

  /// Updates the tree with the prover's reply to `tactic` applied at
  /// `node`. Failure leaves the tree untouched (Stayed).
  ApplicationOutcome record_application(const NodeId& node, const std::string& tactic,
                                        const ProverReply& reply);

  /// First open leaf in depth-first, left-to-right order.
  std::optional<NodeId> next_open_goal() const;
  std::vector<NodeId> open_leaves() const;
  bool is_complete() const;

  ProofScript linearize() const;

  /// Outline with one line per node, at most `budget` characters.
  std::string render(std::size_t budget) const;

  nlohmann::json serialize() const;
  static ProofTree deserialize(const nlohmann::json& doc);

  bool operator==(const ProofTree&) const = default;

 private:
  ProofNode& mutable_node(const NodeId& id);
  void propagate_closure(NodeId id);
  void emit(const ProofNode& n, ProofScript& out) const;

  std::map<NodeId, ProofNode> nodes_;  // lexicographic order = preorder
  std::optional<NodeId> focus_;
};

/// Maximum characters per rendered node line.
inline constexpr std::size_t kRenderLineWidth = 160;

}  // namespace proofagent
