#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "treetab/table.hpp"

namespace treetab {

/// Argument value inside an op-call: number, quoted string, bare identifier,
/// or bracketed list of values.
struct ArgValue {
    enum class Kind { Number, String, Ident, List };

    Kind kind = Kind::Ident;
    double number = 0.0;
    std::string str;               // String and Ident
    std::vector<ArgValue> items;   // List

    static ArgValue make_number(double x);
    static ArgValue make_string(std::string s);
    static ArgValue make_ident(std::string s);
    static ArgValue make_list(std::vector<ArgValue> items);

    bool operator==(const ArgValue& other) const;
    std::string to_string() const;  // grammar form, strings re-quoted
};

/// Parsed invocation of a pool operation with named arguments.
struct OpCall {
    std::string name;
    std::vector<std::pair<std::string, ArgValue>> args;

    const ArgValue* find(std::string_view key) const;
    std::string to_string() const;

    bool operator==(const OpCall& other) const;
};

/// A pool operation yields either a table or a scalar cell.
using OpResult = std::variant<Table, CellValue>;

bool is_table(const OpResult& r);
const Table& as_table(const OpResult& r);
const CellValue& as_scalar(const OpResult& r);
/// Scalar -> its cell rendering; table -> cells row-major joined with " | ".
std::string render_result(const OpResult& r);

enum class SortOrder { Ascending, Descending };
enum class FilterOp { Eq, Ne, Lt, Le, Gt, Ge, Contains };
enum class AggregateFn { Count, Sum, Avg, Min, Max };

std::optional<SortOrder> parse_sort_order(std::string_view s);
std::optional<FilterOp> parse_filter_op(std::string_view s);
std::optional<AggregateFn> parse_aggregate_fn(std::string_view s);
std::string to_string(FilterOp op);
std::string to_string(AggregateFn fn);

// The operation pool. All functions are pure: inputs are never mutated and
// every returned table is rectangular with the documented headers.

/// Rows picked by 1-based index, in the given order. Duplicates rejected.
Table select_row(const Table& t, const std::vector<std::int64_t>& rows);

/// Columns projected and reordered to the given header names.
Table select_column(const Table& t, const std::vector<std::string>& columns);

/// New rightmost column. |values| must equal the row count and `name` must
/// not collide with an existing header.
Table add_column(const Table& t, const std::string& name, const std::vector<CellValue>& values);

/// Stable sort on one column. Numbers order numerically, Text by code point,
/// Null sorts last regardless of direction; in mixed columns Numbers come
/// before Text.
Table sort_by(const Table& t, const std::string& column, SortOrder order);

/// Two-column [column, "Count"] table, one row per distinct value in
/// first-appearance order. Null cells form their own group rendered "Null".
Table group_by(const Table& t, const std::string& column);

/// Rows whose cell satisfies the predicate, input order preserved. Null
/// cells never match. Ordering ops require a Number value and a column with
/// at least one Number cell among its non-Null cells; `contains` is a
/// case-sensitive substring test on the cell's text rendering.
Table filter_rows(const Table& t, const std::string& column, FilterOp op, const CellValue& value);

/// count counts non-Null cells; sum/avg/min/max skip non-Number cells and
/// require at least one Number cell.
CellValue aggregate(const Table& t, const std::string& column, AggregateFn fn);

/// Registered pool: op names with arity/argument checking and dispatch.
/// Membership beyond the standard seven is configurable through add().
class OpRegistry {
public:
    using Executor = std::function<OpResult(const OpCall&, const Table&)>;

    /// The standard pool: select_row, select_column, add_column, sort_by,
    /// group_by, filter_rows, aggregate.
    static const OpRegistry& standard();

    void add(std::string name, Executor exec);
    bool contains(std::string_view name) const;
    std::vector<std::string> names() const;

    /// Dispatches to the named operation; throws OpError for unknown ops,
    /// missing arguments, and argument type mismatches.
    OpResult apply(const OpCall& call, const Table& t) const;

private:
    std::map<std::string, Executor, std::less<>> executors_;
};

/// Parses `name '(' [key '=' value {',' key '=' value}] ')'`. Values are
/// numbers, double-quoted strings with backslash escapes, bare identifiers,
/// or bracketed lists. Throws OpParseError on grammar violations, and OpError
/// for unknown op names and duplicate argument keys.
OpCall parse_op_call(std::string_view text, const OpRegistry& registry = OpRegistry::standard());

/// Dispatch through the standard registry.
OpResult apply(const OpCall& call, const Table& t);

/// String arguments go through parse_cell, numbers become Number, and the
/// bare identifier `null` becomes Null.
CellValue arg_to_cell(const ArgValue& v);

}  // namespace treetab
