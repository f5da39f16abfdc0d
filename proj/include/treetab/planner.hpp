#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "treetab/codecs.hpp"
#include "treetab/ops.hpp"
#include "treetab/selection.hpp"
#include "treetab/table.hpp"

namespace treetab {

/// How sibling results are wired and folded at a thinking node.
struct Relationship {
    enum class Wiring { Sequential, Parallel };
    enum class Combiner { Last, UnionRows, JoinOn, ConcatText, Synthesize };

    Wiring wiring = Wiring::Sequential;
    Combiner combiner = Combiner::Last;
    std::string join_column;  // Combiner::JoinOn only

    bool operator==(const Relationship& other) const = default;

    /// "sequential/last", "parallel/join_on:Team", ...
    std::string to_string() const;
    /// Empty text yields the default relationship; malformed text -> nullopt.
    static std::optional<Relationship> parse(std::string_view text);
};

/// Planner output for one thinking node: child statements, the sibling
/// relationship, and a terminal flag per child (terminal children become
/// execution nodes).
struct Decomposition {
    std::vector<std::string> children;
    Relationship relationship;
    std::vector<bool> terminal;
};

struct BoundPreview {
    std::string name;     // "R1", "R2", ...
    std::string preview;  // rendered scalar or truncated table encoding
};

/// Everything a planner sees when expanding or sampling one node. The
/// ancestor list holds the statements strictly between the root and the
/// subject node (the root's statement is the question itself and travels in
/// `question`; the subject's own statement travels in `statement`), so the
/// recorded chain is always shorter than the tree height.
struct PlannerContext {
    std::string task_id;    // engine metadata, keys scripted fixtures
    std::string node_path;  // "root", "root/0", ...
    std::string question;
    std::optional<std::string> knowledge;
    std::string statement;
    std::vector<std::string> ancestor_statements;
    std::string working_table_preview;
    std::vector<BoundPreview> bound_results;
    int max_degree = 0;  // decompose calls only
};

/// Headers plus a row-preview for one table, as shown to schema linking.
struct TablePreview {
    std::string table;
    std::vector<std::string> headers;
    std::string preview;  // encoded preview capped at preview_rows
};

struct SchemaLinkContext {
    std::string task_id;
    std::string question;
    std::optional<std::string> knowledge;
    std::vector<TablePreview> tables;
    std::vector<ForeignKey> foreign_keys;
    std::string error_note;  // filled on validation retries
};

/// One planner invocation as recorded in the run trace. `detail` carries the
/// decision text (children/relationship, op call, selection, or answer).
struct PlannerCallRecord {
    std::string role;  // "decompose" | "sample_op" | "schema_link" | "answer"
    std::string task_id;
    std::string node_path;
    std::string statement;
    std::vector<std::string> ancestors;
    std::string detail;
    bool ok = true;
};

/// The pluggable reasoning backend. Public entry points count invocations
/// atomically and are safe for concurrent use when the implementation is.
class Planner {
public:
    virtual ~Planner() = default;

    Decomposition decompose(const PlannerContext& ctx, int max_degree);
    OpCall sample_operation(const PlannerContext& ctx);
    ColumnSelection schema_link(const SchemaLinkContext& ctx);
    std::string synthesize_answer(const PlannerContext& ctx, const OpResult& final_result);

    /// Total planner calls made so far (the run's "generated samples").
    std::size_t invocation_count() const { return invocations_.load(); }

    /// Re-prompt attempts allowed on malformed or invalid responses.
    virtual int retry_limit() const { return 2; }

    /// Drains notes recorded during calls (malformed responses kept for the
    /// trace). Thread safe.
    std::vector<std::string> take_events();

protected:
    virtual Decomposition do_decompose(const PlannerContext& ctx, int max_degree) = 0;
    virtual OpCall do_sample_operation(const PlannerContext& ctx) = 0;
    virtual ColumnSelection do_schema_link(const SchemaLinkContext& ctx) = 0;
    virtual std::string do_synthesize_answer(const PlannerContext& ctx,
                                             const OpResult& final_result) = 0;

    void note_event(std::string event);
    void count_invocation() { invocations_.fetch_add(1); }

private:
    std::atomic<std::size_t> invocations_{0};
    std::mutex events_mutex_;
    std::vector<std::string> events_;
};

/// Deterministic planner driven by a JSON fixture mapping
/// {"task_id": {"node_path": decision, ...}, ...}. Decisions:
///   decompose: {"children": [...], "relationship": "sequential/last",
///               "terminal": [bool, ...]}
///   sample:    {"op": "filter_rows(column=\"Team\", op=\"=\", value=\"Red\")"}
///   schema link (key "schema_link"): {"keep": ["Players.Points", ...],
///               "join": ["Players.TeamId->Teams.Id", ...]}
///   combiner synthesis (key "synth:<node_path>") and final answer
///   (key "answer"): {"text": "..."}
/// Read-only after load; a pure function of (task id, node path).
class ScriptedPlanner : public Planner {
public:
    static std::shared_ptr<ScriptedPlanner> from_file(const std::string& path);
    static std::shared_ptr<ScriptedPlanner> from_json_text(const std::string& json_text);

    ~ScriptedPlanner() override;

protected:
    Decomposition do_decompose(const PlannerContext& ctx, int max_degree) override;
    OpCall do_sample_operation(const PlannerContext& ctx) override;
    ColumnSelection do_schema_link(const SchemaLinkContext& ctx) override;
    std::string do_synthesize_answer(const PlannerContext& ctx,
                                     const OpResult& final_result) override;

private:
    struct Impl;
    explicit ScriptedPlanner(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

/// Backend parameters for the remote planner (the opaque theta).
struct PlannerConfig {
    std::string endpoint;  // TREETAB_LLM_URL when empty
    std::string api_key;   // TREETAB_LLM_KEY when empty
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.0;
    int retry_limit = 2;
    TableFormat table_format = TableFormat::Markdown;
    std::string demo_set = "default";
    std::string prompt_dir;  // optional template overrides
};

/// HTTP chat-completion client. POSTs {"model", "messages", "temperature"}
/// and reads choices[0].message.content; responses must carry the decision
/// inside a fenced block. Parse failures are retried with an error note
/// appended to the prompt, then surface as PlannerError.
class RemotePlanner : public Planner {
public:
    explicit RemotePlanner(PlannerConfig config);
    ~RemotePlanner() override;

    int retry_limit() const override;

protected:
    Decomposition do_decompose(const PlannerContext& ctx, int max_degree) override;
    OpCall do_sample_operation(const PlannerContext& ctx) override;
    ColumnSelection do_schema_link(const SchemaLinkContext& ctx) override;
    std::string do_synthesize_answer(const PlannerContext& ctx,
                                     const OpResult& final_result) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Response-grammar parsers used by RemotePlanner, exposed for direct testing.
// Each takes the raw model output, extracts the last fenced block (or the
// whole text when no fence is present), and throws PlannerError on malformed
// content.
Decomposition parse_decompose_response(const std::string& text, int max_degree);
OpCall parse_op_response(const std::string& text);
ColumnSelection parse_schema_link_response(const std::string& text);
std::string parse_answer_response(const std::string& text);

}  // namespace treetab
