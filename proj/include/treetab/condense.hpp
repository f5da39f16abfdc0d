#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "treetab/planner.hpp"
#include "treetab/selection.hpp"
#include "treetab/table.hpp"

namespace treetab {

/// True when the database needs condensation: total cell count over budget,
/// any single table's Markdown encoding over the char budget, or more than
/// one table.
bool needs_condense(const Database& db, const SizeBudget& budget);

struct CondenseOptions {
    SizeBudget budget;
    std::size_t preview_rows = 3;  // rows shown per table to schema linking
    TableFormat format = TableFormat::Markdown;
};

/// Validates a selection against the database: kept columns exist, join path
/// uses declared foreign keys only, and the path connects every kept table
/// to the first kept table without revisiting a table. Returns the first
/// problem or nullopt.
std::optional<std::string> validate_selection(const ColumnSelection& sel, const Database& db);

/// Asks the planner for the question-relevant columns, showing headers plus
/// a bounded row preview per table (never full row data). Invalid selections
/// are retried with an error note up to the planner's retry limit, then
/// surface as InvalidSelectionError.
ColumnSelection schema_link(const std::string& question, const Database& db,
                            const std::optional<std::string>& knowledge, Planner& planner,
                            const CondenseOptions& opts = {},
                            const std::string& task_id = {},
                            std::vector<PlannerCallRecord>* calls = nullptr);

/// Left-joins along the selection's foreign-key path starting from the first
/// kept column's table, then projects to the kept columns. Unmatched left
/// rows are padded with Null; unmatched right rows are dropped. Projected
/// column names are bare when unambiguous among the kept columns, otherwise
/// "table.column". The result is named "condensed".
Table merge(const Database& db, const ColumnSelection& sel);

struct CondensationResult {
    Table table;
    std::size_t cells_before = 0;
    std::size_t cells_after = 0;
    bool condensed = false;  // false = pass-through
    std::vector<PlannerCallRecord> planner_calls;
};

/// The full condensation step: a single under-budget table passes through
/// unchanged; everything else goes through schema_link + merge.
CondensationResult condense(const QuestionTask& task, Planner& planner,
                            const CondenseOptions& opts = {});

}  // namespace treetab
