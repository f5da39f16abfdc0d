#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "treetab/table.hpp"

namespace treetab {

/// The four textual table encodings the planner prompt can use.
enum class TableFormat { Markdown, Pipe, Tsv, Html };

std::string format_name(TableFormat f);
std::optional<TableFormat> parse_format_name(std::string_view name);

/// Deterministic text encoding of a table.
///
/// Markdown: "| h |" header line, "| --- |" separator, one "| c |" line per
/// row; "|" in cells escaped as "\|". PIPE: "col : h1 | h2" then
/// "row i : c1 | c2" (1-based), same escaping. TSV: tab-separated lines with
/// "\t" / "\\" escapes so tab-bearing cells survive the round trip. HTML:
/// single-line <table><tr><th>..</th></tr><tr><td>..</td></tr></table> with
/// &, <, > entity-escaped.
std::string encode(const Table& t, TableFormat f);

/// Inverse of encode for text conforming to the per-format grammar. Cells go
/// through parse_cell, so decode(encode(t, f), f) == t for tables whose cells
/// are already in parse_cell normal form. Throws CodecError on grammar
/// violations and ragged rows.
Table decode(const std::string& text, TableFormat f);

}  // namespace treetab
