#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "treetab/cell.hpp"

namespace treetab {

using Row = std::vector<CellValue>;

/// First invariant violation found by validate_table.
struct Violation {
    enum class Kind { RaggedRow, DuplicateHeader };

    Kind kind;
    std::size_t row_index = 0;  // 0-based, RaggedRow only
    std::string header;         // DuplicateHeader only
    std::string message;
};

/// Rectangular typed cell grid with a name and ordered headers.
/// Instances are immutable after construction; the constructor deduplicates
/// colliding header names by suffixing "_2", "_3", ... and rejects ragged
/// rows with a TableError.
class Table {
public:
    Table() = default;
    Table(std::string name, std::vector<std::string> headers, std::vector<Row> rows);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& headers() const { return headers_; }
    const std::vector<Row>& rows() const { return rows_; }

    std::size_t num_rows() const { return rows_.size(); }
    std::size_t num_columns() const { return headers_.size(); }

    const Row& row(std::size_t i) const { return rows_[i]; }
    const CellValue& at(std::size_t r, std::size_t c) const { return rows_[r][c]; }

    std::optional<std::size_t> column_index(std::string_view header) const;

    /// Same headers and cells; name is ignored.
    bool same_content(const Table& other) const;

    bool operator==(const Table& other) const;
    bool operator!=(const Table& other) const { return !(*this == other); }

private:
    std::string name_;
    std::vector<std::string> headers_;
    std::vector<Row> rows_;
};

/// Suffix-dedup rule applied by the Table constructor, exposed for ingest
/// paths that need to predict the final header names.
std::vector<std::string> dedup_headers(std::vector<std::string> headers);

/// Checks raw parts against the Table invariants and reports the first
/// violation (ragged row, duplicate header) or nullopt when well formed.
std::optional<Violation> validate_table(const std::vector<std::string>& headers,
                                        const std::vector<Row>& rows);
std::optional<Violation> validate_table(const Table& t);

/// rows x columns.
std::size_t cell_count(const Table& t);

struct ForeignKey {
    std::string from_table;
    std::string from_column;
    std::string to_table;
    std::string to_column;

    bool operator==(const ForeignKey& other) const = default;
    std::string to_string() const;
};

/// Named collection of tables plus declared foreign keys. The constructor
/// rejects duplicate table names and foreign keys whose endpoints do not
/// resolve (TableError).
class Database {
public:
    Database() = default;
    Database(std::vector<Table> tables, std::vector<ForeignKey> foreign_keys);

    const std::vector<Table>& tables() const { return tables_; }
    const std::vector<ForeignKey>& foreign_keys() const { return foreign_keys_; }

    const Table* find_table(std::string_view name) const;
    std::size_t total_cell_count() const;

private:
    std::vector<Table> tables_;
    std::vector<ForeignKey> foreign_keys_;
};

/// One question over a table or database. Exactly one of `gold`
/// (denotation targets) and `reference` (free-form answer) is present.
struct QuestionTask {
    std::string id;
    std::string question;
    std::optional<std::string> knowledge;
    Database database;
    std::optional<std::vector<std::string>> gold;
    std::optional<std::string> reference;
};

/// Nullopt when well formed, otherwise a description of the problem.
std::optional<std::string> validate_task(const QuestionTask& task);

}  // namespace treetab
