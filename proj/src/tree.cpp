#include "treetab/tree.hpp"

#include <deque>

#include <nlohmann/json.hpp>

#include "treetab/codecs.hpp"
#include "treetab/errors.hpp"

namespace treetab {

TableTree::TableTree(int max_degree, int max_depth)
    : max_degree_(max_degree), max_depth_(max_depth) {
    if (max_degree < 1 || max_depth < 1) {
        throw TableError("tree bounds must be at least 1");
    }
}

const TreeNode& TableTree::node(const std::string& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw TableError("unknown tree node '" + id + "'");
    return it->second;
}

bool TableTree::has_node(const std::string& id) const { return nodes_.count(id) > 0; }

void TableTree::add_node(TreeNode node) {
    if (nodes_.count(node.id) > 0) throw TableError("duplicate tree node '" + node.id + "'");
    if (node.parent) {
        auto it = nodes_.find(*node.parent);
        if (it == nodes_.end()) {
            throw TableError("node '" + node.id + "' references missing parent");
        }
        if (node.depth != it->second.depth + 1) {
            throw TableError("node '" + node.id + "' breaks the depth invariant");
        }
        it->second.children.push_back(node.id);
    } else if (node.depth != 0) {
        throw TableError("root node must have depth 0");
    }
    order_.push_back(node.id);
    nodes_.emplace(node.id, std::move(node));
}

void TableTree::set_relationship(const std::string& id, Relationship relationship) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw TableError("unknown tree node '" + id + "'");
    it->second.relationship = std::move(relationship);
}

void TableTree::set_call(const std::string& id, OpCall call) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw TableError("unknown tree node '" + id + "'");
    it->second.call = std::move(call);
}

std::vector<std::string> TableTree::interior_path_statements(const std::string& id) const {
    std::vector<std::string> reversed;
    const TreeNode* cur = &node(id);
    while (cur->parent) {
        cur = &node(*cur->parent);
        if (cur->parent) reversed.push_back(cur->statement);  // root excluded
    }
    return {reversed.rbegin(), reversed.rend()};
}

TreeStats tree_stats(const TableTree& tree) {
    TreeStats stats;
    stats.node_count = tree.size();
    for (const auto& id : tree.node_ids()) {
        stats.height = std::max(stats.height, tree.node(id).depth);
    }
    return stats;
}

std::optional<std::string> check_tree_invariants(const TableTree& tree) {
    if (!tree.has_node("root")) return "tree has no root";
    std::size_t reachable = 0;
    std::deque<std::string> queue{"root"};
    while (!queue.empty()) {
        const TreeNode& n = tree.node(queue.front());
        queue.pop_front();
        ++reachable;

        if (static_cast<int>(n.children.size()) > tree.max_degree()) {
            return "node " + n.id + " exceeds max degree";
        }
        if (n.depth > tree.max_depth()) {
            return "node " + n.id + " exceeds max depth";
        }
        if (n.kind == TreeNode::Kind::Execution) {
            if (!n.children.empty()) return "execution node " + n.id + " has children";
            if (!n.call) return "execution node " + n.id + " has no op call";
        } else {
            if (n.children.empty()) return "thinking node " + n.id + " is a leaf";
        }
        for (const auto& child_id : n.children) {
            const TreeNode& child = tree.node(child_id);
            if (!child.parent || *child.parent != n.id) {
                return "node " + child_id + " has a broken parent link";
            }
            if (child.depth != n.depth + 1) {
                return "node " + child_id + " breaks the depth invariant";
            }
            queue.push_back(child_id);
        }
    }
    if (reachable != tree.size()) return "tree has unreachable nodes";
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Growing

TreeGrower::TreeGrower(const QuestionTask& task, const Table& condensed, Planner& planner,
                       const BuildOptions& opts, BindingProvider bindings)
    : task_(task),
      planner_(planner),
      opts_(opts),
      bindings_(std::move(bindings)),
      tree_(opts.max_degree, opts.max_depth) {
    preview_ = encode(condensed, opts_.format);
    if (preview_.size() > opts_.preview_chars) {
        preview_.resize(opts_.preview_chars);
        preview_ += "\n... (truncated)";
    }
}

PlannerContext TreeGrower::context_for(const std::string& id, const std::string& statement) const {
    PlannerContext ctx;
    ctx.task_id = task_.id;
    ctx.node_path = id;
    ctx.question = task_.question;
    ctx.knowledge = task_.knowledge;
    ctx.statement = statement;
    ctx.ancestor_statements = tree_.interior_path_statements(id);
    ctx.working_table_preview = preview_;
    if (bindings_) ctx.bound_results = bindings_();
    ctx.max_degree = opts_.max_degree;
    return ctx;
}

std::string TreeGrower::init_root() {
    TreeNode root;
    root.id = "root";
    root.depth = 0;
    root.kind = TreeNode::Kind::Thinking;
    root.statement = task_.question;
    tree_.add_node(std::move(root));
    return "root";
}

std::vector<std::string> TreeGrower::expand_node(const std::string& id) {
    const TreeNode& node = tree_.node(id);
    if (node.kind != TreeNode::Kind::Thinking) {
        throw TableError("cannot expand execution node '" + id + "'");
    }
    const int depth = node.depth;

    PlannerContext ctx = context_for(id, node.statement);
    Decomposition dec = planner_.decompose(ctx, opts_.max_degree);

    PlannerCallRecord record;
    record.role = "decompose";
    record.task_id = task_.id;
    record.node_path = id;
    record.statement = ctx.statement;
    record.ancestors = ctx.ancestor_statements;

    if (dec.children.size() > static_cast<std::size_t>(opts_.max_degree)) {
        warnings_.push_back("node " + id + ": planner returned " +
                            std::to_string(dec.children.size()) + " children, clamped to " +
                            std::to_string(opts_.max_degree));
        dec.children.resize(static_cast<std::size_t>(opts_.max_degree));
        dec.terminal.resize(static_cast<std::size_t>(opts_.max_degree));
    }
    if (dec.terminal.size() != dec.children.size()) {
        dec.terminal.resize(dec.children.size(), false);
    }

    // Persist the decomposition's relationship on the expanded node.
    {
        TreeNode updated = node;
        updated.relationship = dec.relationship;
        const_cast<TreeNode&>(tree_.node(id)) = std::move(updated);
    }

    record.detail = "children=" + std::to_string(dec.children.size()) +
                    " relationship=" + dec.relationship.to_string();
    calls_.push_back(std::move(record));

    std::vector<std::string> thinking_children;
    for (std::size_t i = 0; i < dec.children.size(); ++i) {
        std::string child_id = id + "/" + std::to_string(i);
        const bool at_depth_limit = depth + 1 >= opts_.max_depth;
        const bool terminal = dec.terminal[i] || at_depth_limit;

        TreeNode child;
        child.id = child_id;
        child.parent = id;
        child.depth = depth + 1;
        child.statement = dec.children[i];
        if (terminal) {
            child.kind = TreeNode::Kind::Execution;
            tree_.add_node(std::move(child));

            PlannerContext leaf_ctx = context_for(child_id, dec.children[i]);
            OpCall call = planner_.sample_operation(leaf_ctx);

            PlannerCallRecord sample;
            sample.role = "sample_op";
            sample.task_id = task_.id;
            sample.node_path = child_id;
            sample.statement = leaf_ctx.statement;
            sample.ancestors = leaf_ctx.ancestor_statements;
            sample.detail = call.to_string();
            calls_.push_back(std::move(sample));

            const_cast<TreeNode&>(tree_.node(child_id)).call = std::move(call);
        } else {
            child.kind = TreeNode::Kind::Thinking;
            tree_.add_node(std::move(child));
            thinking_children.push_back(std::move(child_id));
        }
    }
    return thinking_children;
}

void TreeGrower::expand_breadth_first(const std::string& id) {
    std::deque<std::string> frontier{id};
    while (!frontier.empty()) {
        // One level at a time: children attach in planner order, so the tree
        // is identical regardless of how siblings would be scheduled.
        std::deque<std::string> next;
        while (!frontier.empty()) {
            for (auto& child : expand_node(frontier.front())) {
                next.push_back(std::move(child));
            }
            frontier.pop_front();
        }
        frontier = std::move(next);
    }
}

TableTree TreeGrower::take_tree() { return std::move(tree_); }

std::vector<PlannerCallRecord> TreeGrower::take_calls() { return std::move(calls_); }

std::vector<std::string> TreeGrower::take_warnings() { return std::move(warnings_); }

BuildResult build_tree(const QuestionTask& task, const Table& condensed, Planner& planner,
                       const BuildOptions& opts, const BindingProvider& bindings) {
    TreeGrower grower(task, condensed, planner, opts, bindings);
    grower.expand_breadth_first(grower.init_root());
    BuildResult result{grower.take_tree(), grower.take_calls(), grower.take_warnings()};
    if (auto problem = check_tree_invariants(result.tree)) {
        throw TableError("built tree violates invariants: " + *problem);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::ordered_json tree_to_json(const TableTree& tree) {
    nlohmann::ordered_json j;
    j["root"] = "root";
    j["max_degree"] = tree.max_degree();
    j["max_depth"] = tree.max_depth();
    j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& id : tree.node_ids()) {
        const TreeNode& n = tree.node(id);
        nlohmann::ordered_json entry;
        entry["id"] = n.id;
        if (n.parent) {
            entry["parent"] = *n.parent;
        } else {
            entry["parent"] = nullptr;
        }
        entry["depth"] = n.depth;
        if (n.kind == TreeNode::Kind::Thinking) {
            entry["kind"] = "thinking";
            entry["statement"] = n.statement;
            entry["relationship"] = n.relationship.to_string();
        } else {
            entry["kind"] = "execution";
            entry["statement"] = n.statement;
            entry["call"] = n.call ? n.call->to_string() : "";
        }
        entry["children"] = n.children;
        j["nodes"].push_back(std::move(entry));
    }
    return j;
}

TableTree tree_from_json(const nlohmann::ordered_json& j) {
    TableTree tree(j.at("max_degree").get<int>(), j.at("max_depth").get<int>());
    for (const auto& entry : j.at("nodes")) {
        TreeNode n;
        n.id = entry.at("id").get<std::string>();
        if (!entry.at("parent").is_null()) {
            n.parent = entry.at("parent").get<std::string>();
        }
        n.depth = entry.at("depth").get<int>();
        std::string kind = entry.at("kind").get<std::string>();
        n.statement = entry.value("statement", "");
        if (kind == "thinking") {
            n.kind = TreeNode::Kind::Thinking;
            auto rel = Relationship::parse(entry.value("relationship", ""));
            if (!rel) throw TableError("bad relationship on node " + n.id);
            n.relationship = *rel;
        } else if (kind == "execution") {
            n.kind = TreeNode::Kind::Execution;
            n.call = parse_op_call(entry.at("call").get<std::string>());
        } else {
            throw TableError("unknown node kind '" + kind + "'");
        }
        tree.add_node(std::move(n));  // children lists rebuild from parents
    }
    if (auto problem = check_tree_invariants(tree)) {
        throw TableError("deserialized tree violates invariants: " + *problem);
    }
    return tree;
}

}  // namespace treetab
