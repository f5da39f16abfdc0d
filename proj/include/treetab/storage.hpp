#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "treetab/table.hpp"

namespace treetab {

/// RFC-4180 records: comma-separated, double-quote quoting, "" escapes,
/// CRLF or LF line ends. Cells are raw strings; callers parse them.
std::vector<std::vector<std::string>> read_csv(std::istream& in);
std::string to_csv(const std::vector<std::vector<std::string>>& records);

/// Loads one CSV file (first line headers, cells through parse_cell).
Table load_table_csv(const std::string& path, const std::string& table_name);

/// Loads a database directory: one CSV per table plus schema.json naming the
/// tables (in order), column order, and foreign keys.
Database load_database(const std::string& dir);

/// Writes the directory format load_database reads.
void save_database(const Database& db, const std::string& dir);

}  // namespace treetab
