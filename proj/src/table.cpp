#include "treetab/table.hpp"

#include <set>
#include <unordered_map>
#include <unordered_set>

#include "treetab/errors.hpp"

namespace treetab {

std::vector<std::string> dedup_headers(std::vector<std::string> headers) {
    std::unordered_set<std::string> seen;
    for (auto& h : headers) {
        if (seen.insert(h).second) continue;
        int suffix = 2;
        std::string candidate;
        do {
            candidate = h + "_" + std::to_string(suffix++);
        } while (seen.count(candidate) > 0);
        h = candidate;
        seen.insert(h);
    }
    return headers;
}

Table::Table(std::string name, std::vector<std::string> headers, std::vector<Row> rows)
    : name_(std::move(name)), headers_(dedup_headers(std::move(headers))), rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].size() != headers_.size()) {
            throw TableError("ragged row " + std::to_string(i) + " in table '" + name_ +
                             "': " + std::to_string(rows_[i].size()) + " cells, expected " +
                             std::to_string(headers_.size()));
        }
    }
}

std::optional<std::size_t> Table::column_index(std::string_view header) const {
    for (std::size_t i = 0; i < headers_.size(); ++i) {
        if (headers_[i] == header) return i;
    }
    return std::nullopt;
}

bool Table::same_content(const Table& other) const {
    return headers_ == other.headers_ && rows_ == other.rows_;
}

bool Table::operator==(const Table& other) const {
    return name_ == other.name_ && same_content(other);
}

std::optional<Violation> validate_table(const std::vector<std::string>& headers,
                                        const std::vector<Row>& rows) {
    std::unordered_set<std::string> seen;
    for (const auto& h : headers) {
        if (!seen.insert(h).second) {
            Violation v;
            v.kind = Violation::Kind::DuplicateHeader;
            v.header = h;
            v.message = "duplicate header \"" + h + "\"";
            return v;
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != headers.size()) {
            Violation v;
            v.kind = Violation::Kind::RaggedRow;
            v.row_index = i;
            v.message = "ragged row " + std::to_string(i);
            return v;
        }
    }
    return std::nullopt;
}

std::optional<Violation> validate_table(const Table& t) {
    return validate_table(t.headers(), t.rows());
}

std::size_t cell_count(const Table& t) { return t.num_rows() * t.num_columns(); }

std::string ForeignKey::to_string() const {
    return from_table + "." + from_column + "->" + to_table + "." + to_column;
}

Database::Database(std::vector<Table> tables, std::vector<ForeignKey> foreign_keys)
    : tables_(std::move(tables)), foreign_keys_(std::move(foreign_keys)) {
    std::unordered_set<std::string> names;
    for (const auto& t : tables_) {
        if (!names.insert(t.name()).second) {
            throw TableError("duplicate table name '" + t.name() + "'");
        }
    }
    for (const auto& fk : foreign_keys_) {
        const Table* from = find_table(fk.from_table);
        const Table* to = find_table(fk.to_table);
        if (from == nullptr || to == nullptr || !from->column_index(fk.from_column) ||
            !to->column_index(fk.to_column)) {
            throw TableError("foreign key does not resolve: " + fk.to_string());
        }
    }
}

const Table* Database::find_table(std::string_view name) const {
    for (const auto& t : tables_) {
        if (t.name() == name) return &t;
    }
    return nullptr;
}

std::size_t Database::total_cell_count() const {
    std::size_t total = 0;
    for (const auto& t : tables_) total += cell_count(t);
    return total;
}

std::optional<std::string> validate_task(const QuestionTask& task) {
    if (task.id.empty()) return "task id is empty";
    if (task.question.empty()) return "question is empty";
    if (task.database.tables().empty()) return "task has no tables";
    const bool has_gold = task.gold.has_value();
    const bool has_reference = task.reference.has_value();
    if (has_gold == has_reference) {
        return "exactly one of gold / reference must be present";
    }
    return std::nullopt;
}

}  // namespace treetab
