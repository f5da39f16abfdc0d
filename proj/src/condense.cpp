#include "treetab/condense.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "treetab/codecs.hpp"
#include "treetab/errors.hpp"

namespace treetab {

bool needs_condense(const Database& db, const SizeBudget& budget) {
    if (db.tables().size() > 1) return true;
    if (db.total_cell_count() > budget.max_cells) return true;
    for (const auto& t : db.tables()) {
        if (t.num_columns() > 0 && encode(t, TableFormat::Markdown).size() > budget.max_chars) {
            return true;
        }
    }
    return false;
}

std::optional<std::string> validate_selection(const ColumnSelection& sel, const Database& db) {
    if (sel.kept.empty()) return "selection keeps no columns";
    for (const auto& [table, column] : sel.kept) {
        const Table* t = db.find_table(table);
        if (t == nullptr) return "unknown table \"" + table + "\"";
        if (!t->column_index(column)) {
            return "unknown column \"" + table + "." + column + "\"";
        }
    }

    const auto& declared = db.foreign_keys();
    for (const auto& fk : sel.join_path) {
        if (std::find(declared.begin(), declared.end(), fk) == declared.end()) {
            return "join path uses an undeclared foreign key: " + fk.to_string();
        }
    }

    // The path must connect every kept table to the first one, visiting each
    // new table exactly once (a tree walk, no cycles).
    std::set<std::string> reached{sel.kept.front().first};
    for (const auto& fk : sel.join_path) {
        bool from_in = reached.count(fk.from_table) > 0;
        bool to_in = reached.count(fk.to_table) > 0;
        if (from_in && to_in) return "join path revisits table: " + fk.to_string();
        if (!from_in && !to_in) {
            return "join path is disconnected at: " + fk.to_string();
        }
        reached.insert(from_in ? fk.to_table : fk.from_table);
    }
    for (const auto& [table, _] : sel.kept) {
        if (reached.count(table) == 0) {
            return "kept table \"" + table + "\" is not connected by the join path";
        }
    }
    return std::nullopt;
}

namespace {

std::string preview_encoding(const Table& t, std::size_t preview_rows, TableFormat format) {
    if (t.num_rows() <= preview_rows) return encode(t, format);
    std::vector<Row> head(t.rows().begin(),
                          t.rows().begin() + static_cast<std::ptrdiff_t>(preview_rows));
    return encode(Table(t.name(), t.headers(), std::move(head)), format);
}

PlannerCallRecord schema_link_record(const SchemaLinkContext& ctx, const ColumnSelection& sel,
                                     bool ok, const std::string& note) {
    PlannerCallRecord record;
    record.role = "schema_link";
    record.task_id = ctx.task_id;
    record.node_path = "schema_link";
    record.ok = ok;
    std::string detail;
    for (const auto& [table, column] : sel.kept) {
        if (!detail.empty()) detail += ", ";
        detail += table + "." + column;
    }
    for (const auto& fk : sel.join_path) detail += "; join " + fk.to_string();
    if (!note.empty()) detail += " [" + note + "]";
    record.detail = detail;
    return record;
}

}  // namespace

ColumnSelection schema_link(const std::string& question, const Database& db,
                            const std::optional<std::string>& knowledge, Planner& planner,
                            const CondenseOptions& opts, const std::string& task_id,
                            std::vector<PlannerCallRecord>* calls) {
    SchemaLinkContext ctx;
    ctx.task_id = task_id;
    ctx.question = question;
    ctx.knowledge = knowledge;
    ctx.foreign_keys = db.foreign_keys();
    for (const auto& t : db.tables()) {
        TablePreview preview;
        preview.table = t.name();
        preview.headers = t.headers();
        preview.preview = preview_encoding(t, opts.preview_rows, opts.format);
        ctx.tables.push_back(std::move(preview));
    }

    // Semantic validation retries are separate from the planner's own parse
    // retries: an invalid selection is re-asked with the reason attached.
    std::string problem;
    const int attempts = planner.retry_limit() + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        ctx.error_note = problem.empty() ? "" : "previous selection was invalid: " + problem;
        ColumnSelection sel = planner.schema_link(ctx);
        auto verdict = validate_selection(sel, db);
        if (calls != nullptr) {
            calls->push_back(
                schema_link_record(ctx, sel, !verdict.has_value(), verdict.value_or("")));
        }
        if (!verdict) return sel;
        problem = *verdict;
    }
    throw InvalidSelectionError("schema link produced an invalid selection after " +
                                std::to_string(attempts) + " attempts: " + problem);
}

namespace {

struct WorkingTable {
    std::vector<std::string> qualified;  // "table.column" per working column
    std::vector<Row> rows;

    std::optional<std::size_t> find(const std::string& table, const std::string& column) const {
        std::string want = table + "." + column;
        for (std::size_t i = 0; i < qualified.size(); ++i) {
            if (qualified[i] == want) return i;
        }
        return std::nullopt;
    }
};

void append_table_columns(WorkingTable& w, const Table& t) {
    for (const auto& h : t.headers()) w.qualified.push_back(t.name() + "." + h);
}

}  // namespace

Table merge(const Database& db, const ColumnSelection& sel) {
    if (sel.kept.empty()) {
        throw InvalidSelectionError("merge needs at least one kept column");
    }
    const Table* base = db.find_table(sel.kept.front().first);
    if (base == nullptr) {
        throw InvalidSelectionError("unknown base table \"" + sel.kept.front().first + "\"");
    }

    WorkingTable working;
    append_table_columns(working, *base);
    working.rows = base->rows();
    std::set<std::string> merged{base->name()};

    for (const auto& fk : sel.join_path) {
        bool from_merged = merged.count(fk.from_table) > 0;
        bool to_merged = merged.count(fk.to_table) > 0;
        if (from_merged == to_merged) {
            // Either endpoint already folded in (revisit) or neither is
            // reachable yet: the key this hop needs is not available.
            throw JoinKeyMissingError("join key unavailable for " + fk.to_string(),
                                      fk.to_string());
        }
        const std::string& left_table = from_merged ? fk.from_table : fk.to_table;
        const std::string& left_column = from_merged ? fk.from_column : fk.to_column;
        const std::string& right_name = from_merged ? fk.to_table : fk.from_table;
        const std::string& right_column = from_merged ? fk.to_column : fk.from_column;

        auto left_idx = working.find(left_table, left_column);
        if (!left_idx) {
            throw JoinKeyMissingError("join key " + left_table + "." + left_column +
                                          " was projected away before use",
                                      fk.to_string());
        }
        const Table* right = db.find_table(right_name);
        if (right == nullptr) {
            throw InvalidSelectionError("unknown table \"" + right_name + "\" in join path");
        }
        auto right_idx = right->column_index(right_column);
        if (!right_idx) {
            throw JoinKeyMissingError("join key " + right_name + "." + right_column +
                                          " does not exist",
                                      fk.to_string());
        }

        // Left join: every working row survives; unmatched rows pad the new
        // columns with Null, multiple matches multiply the row.
        std::vector<Row> joined;
        for (const auto& row : working.rows) {
            const CellValue& key = row[*left_idx];
            bool matched = false;
            for (const auto& right_row : right->rows()) {
                if (right_row[*right_idx] == key) {
                    Row out = row;
                    out.insert(out.end(), right_row.begin(), right_row.end());
                    joined.push_back(std::move(out));
                    matched = true;
                }
            }
            if (!matched) {
                Row out = row;
                out.resize(out.size() + right->num_columns(), CellValue::null());
                joined.push_back(std::move(out));
            }
        }
        working.rows = std::move(joined);
        append_table_columns(working, *right);
        merged.insert(right_name);
    }

    // Project to the kept columns; bare names where unambiguous.
    std::unordered_map<std::string, int> bare_counts;
    for (const auto& [table, column] : sel.kept) ++bare_counts[column];

    std::vector<std::string> headers;
    std::vector<std::size_t> indices;
    for (const auto& [table, column] : sel.kept) {
        auto idx = working.find(table, column);
        if (!idx) {
            throw InvalidSelectionError("kept column " + table + "." + column +
                                        " is not reachable through the join path");
        }
        indices.push_back(*idx);
        headers.push_back(bare_counts[column] > 1 ? table + "." + column : column);
    }

    std::vector<Row> rows;
    rows.reserve(working.rows.size());
    for (const auto& row : working.rows) {
        Row out;
        out.reserve(indices.size());
        for (std::size_t idx : indices) out.push_back(row[idx]);
        rows.push_back(std::move(out));
    }
    return Table("condensed", std::move(headers), std::move(rows));
}

CondensationResult condense(const QuestionTask& task, Planner& planner,
                            const CondenseOptions& opts) {
    CondensationResult result;
    result.cells_before = task.database.total_cell_count();

    if (!needs_condense(task.database, opts.budget) && task.database.tables().size() == 1) {
        result.table = task.database.tables().front();
        result.cells_after = result.cells_before;
        result.condensed = false;
        return result;
    }

    ColumnSelection sel = schema_link(task.question, task.database, task.knowledge, planner,
                                      opts, task.id, &result.planner_calls);
    result.table = merge(task.database, sel);
    result.cells_after = cell_count(result.table);
    result.condensed = true;
    return result;
}

}  // namespace treetab
