#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "treetab/planner.hpp"
#include "treetab/table.hpp"

namespace treetab {

/// One node of the plan tree. Thinking nodes hold a sub-solution statement
/// and the relationship governing their children; execution nodes hold the
/// sampled op call (plus the statement that produced them, kept for traces).
struct TreeNode {
    enum class Kind { Thinking, Execution };

    std::string id;  // path-shaped: "root", "root/0", "root/0/1", ...
    std::optional<std::string> parent;
    int depth = 0;
    Kind kind = Kind::Thinking;
    std::string statement;
    Relationship relationship;   // Thinking only
    std::optional<OpCall> call;  // Execution only
    std::vector<std::string> children;
};

/// Bounded-degree, bounded-depth plan tree. Nodes are stored in creation
/// order; the structure is immutable once built.
class TableTree {
public:
    TableTree(int max_degree, int max_depth);

    int max_degree() const { return max_degree_; }
    int max_depth() const { return max_depth_; }

    const TreeNode& node(const std::string& id) const;
    bool has_node(const std::string& id) const;
    const TreeNode& root() const { return node("root"); }
    const std::vector<std::string>& node_ids() const { return order_; }
    std::size_t size() const { return order_.size(); }

    /// Builder-side mutation; throws TableError on id reuse or a child depth
    /// that breaks the parent/child depth invariant.
    void add_node(TreeNode node);
    void set_relationship(const std::string& id, Relationship relationship);
    void set_call(const std::string& id, OpCall call);

    /// Statements of the thinking nodes strictly between the root and `id`,
    /// root-side first (the audited ancestor chain for node `id`).
    std::vector<std::string> interior_path_statements(const std::string& id) const;

private:
    int max_degree_;
    int max_depth_;
    std::vector<std::string> order_;
    std::map<std::string, TreeNode> nodes_;
};

struct TreeStats {
    int height = 0;
    std::size_t node_count = 0;
};

/// height = max node depth; node_count = total nodes.
TreeStats tree_stats(const TableTree& tree);

/// Checks the structural invariants (bounds, leaf/internal typing, depth
/// bookkeeping, connectivity); returns the first problem or nullopt.
std::optional<std::string> check_tree_invariants(const TableTree& tree);

struct BuildOptions {
    int max_degree = 4;
    int max_depth = 8;
    TableFormat format = TableFormat::Markdown;
    std::size_t preview_chars = 2000;  // working-table preview budget
};

/// Supplies previews of earlier root-subtree results for planner contexts
/// (used by the interleaved pipeline; empty otherwise).
using BindingProvider = std::function<std::vector<BoundPreview>()>;

struct BuildResult {
    TableTree tree;
    std::vector<PlannerCallRecord> planner_calls;
    std::vector<std::string> warnings;  // degree clamps etc.
};

/// Constructs the plan tree breadth first, level by level. The root thinking
/// node holds the question's top-level statement; children the planner marks
/// terminal (and every child at max_depth) are materialized as execution
/// nodes via sample_operation. Planner output wider than max_degree is
/// clamped to the first max_degree children with a warning.
BuildResult build_tree(const QuestionTask& task, const Table& condensed, Planner& planner,
                       const BuildOptions& opts, const BindingProvider& bindings = {});

/// Incremental builder used by both the breadth-first build and the
/// interleaved pipeline. expand_node decomposes one thinking node and
/// attaches its children; expand_breadth_first drains a whole subtree.
class TreeGrower {
public:
    TreeGrower(const QuestionTask& task, const Table& condensed, Planner& planner,
               const BuildOptions& opts, BindingProvider bindings = {});

    /// Creates the root thinking node (statement = the question) and returns
    /// its id. Does not decompose it.
    std::string init_root();

    /// Decomposes `id` and attaches children; returns ids of the new
    /// non-terminal (thinking) children.
    std::vector<std::string> expand_node(const std::string& id);

    /// Expands `id` and all descendants level by level.
    void expand_breadth_first(const std::string& id);

    const TableTree& tree() const { return tree_; }
    TableTree take_tree();
    std::vector<PlannerCallRecord> take_calls();
    std::vector<std::string> take_warnings();

private:
    PlannerContext context_for(const std::string& id, const std::string& statement) const;

    const QuestionTask& task_;
    Planner& planner_;
    BuildOptions opts_;
    BindingProvider bindings_;
    std::string preview_;
    TableTree tree_;
    std::vector<PlannerCallRecord> calls_;
    std::vector<std::string> warnings_;
};

nlohmann::ordered_json tree_to_json(const TableTree& tree);
TableTree tree_from_json(const nlohmann::ordered_json& j);

}  // namespace treetab
