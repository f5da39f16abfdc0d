#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "treetab/ops.hpp"
#include "treetab/planner.hpp"
#include "treetab/tree.hpp"

namespace treetab {

/// Per-task result storage: every executed node's result, plus one binding
/// "R1", "R2", ... per completed root subtree. A subtree's result is stored
/// before any node outside it is visited.
struct ResultStore {
    std::map<std::string, OpResult> by_node;
    std::vector<std::pair<std::string, OpResult>> bindings;

    const OpResult* find_binding(std::string_view name) const;
};

struct NodeResultSummary {
    std::string node_id;
    std::string kind;     // "table" | "scalar"
    std::string summary;  // full encoding for small tables, dims + first rows above threshold
};

/// Full execution record for one task. Serialization is byte-deterministic;
/// wall-clock timings are kept in memory and only serialized on request.
struct RunTrace {
    std::string task_id;
    std::size_t cells_before = 0;
    std::size_t cells_after = 0;
    std::string condensed_table;  // Markdown encoding of the executor input
    nlohmann::ordered_json tree_json;
    std::vector<std::string> visit_order;  // DFS preorder over executed nodes
    std::vector<std::string> events;       // "visit:<id>" and "bind:R<i>" in order
    std::vector<NodeResultSummary> node_results;
    std::vector<PlannerCallRecord> planner_calls;
    std::vector<std::string> planner_events;
    std::vector<std::string> warnings;
    std::string final_answer;
    double total_ms = 0.0;

    nlohmann::ordered_json to_json(bool include_timings = false) const;
    static RunTrace from_json(const nlohmann::ordered_json& j);
};

struct ExecOptions {
    TableFormat format = TableFormat::Markdown;
    std::size_t summary_cell_threshold = 60;  // larger tables summarized in traces
    std::size_t preview_chars = 2000;
};

struct ExecuteResult {
    std::string answer;
    OpResult final_result;
};

/// Executes the tree depth first over the condensed table. Root children are
/// processed left to right as complete subtrees; after subtree i finishes its
/// result is bound as "R{i}" and exposed to later planner contexts; the
/// root's relationship folds the child results and synthesize_answer turns
/// the fold into the answer string. Visits, bindings, results, and planner
/// calls are appended to `trace`.
ExecuteResult execute_tree(const TableTree& tree, const Table& condensed, Planner& planner,
                           const QuestionTask& task, RunTrace& trace,
                           const ExecOptions& opts = {});

/// Executes one node (and its subtree) on `input`, storing the result in
/// `store` before returning. Sequential wiring pipes each child's table into
/// the next child (a scalar child passes the table through unchanged);
/// parallel wiring gives every child the same input; the combiner folds the
/// child results.
OpResult execute_subtree(const TableTree& tree, const std::string& node_id, const Table& input,
                         ResultStore& store, Planner& planner, const QuestionTask& task,
                         RunTrace& trace, const ExecOptions& opts = {});

struct AuditResult {
    bool ok = true;
    std::string detail;
};

/// visit_order must equal the DFS preorder of the executed tree.
AuditResult audit_dfs_preorder(const RunTrace& trace, const TableTree& tree);

/// "bind:R{i}" must appear in the event stream before the first visit of
/// root subtree i+1.
AuditResult audit_store_before_proceed(const RunTrace& trace, const TableTree& tree);

/// Every decompose/sample_op call record must carry exactly the subject
/// node's interior root-path statements, with chain length < tree height.
AuditResult audit_ancestor_isolation(const std::vector<PlannerCallRecord>& calls,
                                     const TableTree& tree);
AuditResult audit_ancestor_isolation(const RunTrace& trace, const TableTree& tree);

}  // namespace treetab
