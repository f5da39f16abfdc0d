#include "treetab/ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "treetab/cell.hpp"
#include "treetab/errors.hpp"

namespace treetab {

// ---------------------------------------------------------------------------
// ArgValue / OpCall

ArgValue ArgValue::make_number(double x) {
    ArgValue v;
    v.kind = Kind::Number;
    v.number = x;
    return v;
}

ArgValue ArgValue::make_string(std::string s) {
    ArgValue v;
    v.kind = Kind::String;
    v.str = std::move(s);
    return v;
}

ArgValue ArgValue::make_ident(std::string s) {
    ArgValue v;
    v.kind = Kind::Ident;
    v.str = std::move(s);
    return v;
}

ArgValue ArgValue::make_list(std::vector<ArgValue> items) {
    ArgValue v;
    v.kind = Kind::List;
    v.items = std::move(items);
    return v;
}

bool ArgValue::operator==(const ArgValue& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
        case Kind::Number: return number == other.number;
        case Kind::String:
        case Kind::Ident: return str == other.str;
        case Kind::List: return items == other.items;
    }
    return false;
}

namespace {

std::string quote_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string ArgValue::to_string() const {
    switch (kind) {
        case Kind::Number: return render_number(number);
        case Kind::String: return quote_string(str);
        case Kind::Ident: return str;
        case Kind::List: {
            std::string out = "[";
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (i > 0) out += ", ";
                out += items[i].to_string();
            }
            out += "]";
            return out;
        }
    }
    return "";
}

const ArgValue* OpCall::find(std::string_view key) const {
    for (const auto& [k, v] : args) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::string OpCall::to_string() const {
    std::string out = name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i > 0) out += ", ";
        out += args[i].first + "=" + args[i].second.to_string();
    }
    out += ")";
    return out;
}

bool OpCall::operator==(const OpCall& other) const {
    return name == other.name && args == other.args;
}

bool is_table(const OpResult& r) { return std::holds_alternative<Table>(r); }

const Table& as_table(const OpResult& r) { return std::get<Table>(r); }

const CellValue& as_scalar(const OpResult& r) { return std::get<CellValue>(r); }

std::string render_result(const OpResult& r) {
    if (!is_table(r)) return as_scalar(r).render();
    const Table& t = as_table(r);
    std::string out;
    bool first = true;
    for (const auto& row : t.rows()) {
        for (const auto& cell : row) {
            if (!first) out += " | ";
            out += cell.render();
            first = false;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Op-call grammar

namespace {

class OpCallParser {
public:
    explicit OpCallParser(std::string_view text) : text_(text) {}

    OpCall parse(const OpRegistry& registry) {
        skip_ws();
        OpCall call;
        call.name = expect_ident("operation name");
        if (!registry.contains(call.name)) {
            throw OpError(OpError::Kind::UnknownOp, "unknown operation '" + call.name + "'",
                          call.name);
        }
        skip_ws();
        expect('(', "'('");
        skip_ws();
        if (!peek_is(')')) {
            parse_arg(call);
            skip_ws();
            while (peek_is(',')) {
                ++pos_;
                skip_ws();
                parse_arg(call);
                skip_ws();
            }
        }
        expect(')', "')'");
        skip_ws();
        if (pos_ != text_.size()) {
            throw OpParseError(pos_, "end of input");
        }
        return call;
    }

private:
    void parse_arg(OpCall& call) {
        std::string key = expect_ident("argument name");
        skip_ws();
        expect('=', "'='");
        skip_ws();
        ArgValue value = parse_value();
        if (call.find(key) != nullptr) {
            throw OpError(OpError::Kind::DuplicateArg, "duplicate argument '" + key + "'", key);
        }
        call.args.emplace_back(std::move(key), std::move(value));
    }

    ArgValue parse_value() {
        if (pos_ >= text_.size()) throw OpParseError(pos_, "value");
        char c = text_[pos_];
        if (c == '"') return parse_string();
        if (c == '[') return parse_list();
        if (c == '-' || c == '+' || is_digit(c)) return parse_number();
        if (is_ident_start(c)) return ArgValue::make_ident(expect_ident("value"));
        throw OpParseError(pos_, "value");
    }

    ArgValue parse_number() {
        std::size_t start = pos_;
        if (peek_is('-') || peek_is('+')) ++pos_;
        std::size_t digits = 0;
        while (pos_ < text_.size() && is_digit(text_[pos_])) {
            ++pos_;
            ++digits;
        }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && is_digit(text_[pos_])) {
                ++pos_;
                ++digits;
            }
        }
        if (digits == 0) throw OpParseError(start, "number");
        std::string token(text_.substr(start, pos_ - start));
        return ArgValue::make_number(std::strtod(token.c_str(), nullptr));
    }

    ArgValue parse_string() {
        ++pos_;  // opening quote
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_];
            if (c == '\\') {
                if (pos_ + 1 >= text_.size()) throw OpParseError(pos_, "escape character");
                char esc = text_[pos_ + 1];
                switch (esc) {
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case 'r': out.push_back('\r'); break;
                    default: throw OpParseError(pos_ + 1, "valid escape (\" \\ n t r)");
                }
                pos_ += 2;
            } else {
                out.push_back(c);
                ++pos_;
            }
        }
        if (pos_ >= text_.size()) throw OpParseError(pos_, "closing '\"'");
        ++pos_;  // closing quote
        return ArgValue::make_string(std::move(out));
    }

    ArgValue parse_list() {
        ++pos_;  // '['
        std::vector<ArgValue> items;
        skip_ws();
        if (peek_is(']')) {
            ++pos_;
            return ArgValue::make_list(std::move(items));
        }
        while (true) {
            if (pos_ >= text_.size()) throw OpParseError(pos_, "value or ']'");
            items.push_back(parse_value());
            skip_ws();
            if (peek_is(']')) {
                ++pos_;
                return ArgValue::make_list(std::move(items));
            }
            expect(',', "',' or ']'");
            skip_ws();
            if (pos_ >= text_.size()) throw OpParseError(pos_, "value or ']'");
        }
    }

    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

    void skip_ws() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
                text_[pos_] == '\n')) {
            ++pos_;
        }
    }

    bool peek_is(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

    void expect(char c, const std::string& what) {
        if (!peek_is(c)) throw OpParseError(pos_, what);
        ++pos_;
    }

    std::string expect_ident(const std::string& what) {
        if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) {
            throw OpParseError(pos_, what);
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

OpCall parse_op_call(std::string_view text, const OpRegistry& registry) {
    return OpCallParser(text).parse(registry);
}

// ---------------------------------------------------------------------------
// Pool operations

namespace {

std::size_t require_column(const Table& t, const std::string& column) {
    auto idx = t.column_index(column);
    if (!idx) {
        throw OpError(OpError::Kind::UnknownColumn, "unknown column \"" + column + "\"", column);
    }
    return *idx;
}

// Number < Text < Null, Null last regardless of direction.
int type_rank(const CellValue& v) {
    switch (v.kind()) {
        case CellKind::Number: return 0;
        case CellKind::Text: return 1;
        case CellKind::Null: return 2;
    }
    return 2;
}

}  // namespace

std::optional<SortOrder> parse_sort_order(std::string_view s) {
    if (s == "asc" || s == "ascending") return SortOrder::Ascending;
    if (s == "desc" || s == "descending") return SortOrder::Descending;
    return std::nullopt;
}

std::optional<FilterOp> parse_filter_op(std::string_view s) {
    if (s == "=" || s == "==") return FilterOp::Eq;
    if (s == "!=") return FilterOp::Ne;
    if (s == "<") return FilterOp::Lt;
    if (s == "<=") return FilterOp::Le;
    if (s == ">") return FilterOp::Gt;
    if (s == ">=") return FilterOp::Ge;
    if (s == "contains") return FilterOp::Contains;
    return std::nullopt;
}

std::optional<AggregateFn> parse_aggregate_fn(std::string_view s) {
    if (s == "count") return AggregateFn::Count;
    if (s == "sum") return AggregateFn::Sum;
    if (s == "avg" || s == "mean") return AggregateFn::Avg;
    if (s == "min") return AggregateFn::Min;
    if (s == "max") return AggregateFn::Max;
    return std::nullopt;
}

std::string to_string(FilterOp op) {
    switch (op) {
        case FilterOp::Eq: return "=";
        case FilterOp::Ne: return "!=";
        case FilterOp::Lt: return "<";
        case FilterOp::Le: return "<=";
        case FilterOp::Gt: return ">";
        case FilterOp::Ge: return ">=";
        case FilterOp::Contains: return "contains";
    }
    return "=";
}

std::string to_string(AggregateFn fn) {
    switch (fn) {
        case AggregateFn::Count: return "count";
        case AggregateFn::Sum: return "sum";
        case AggregateFn::Avg: return "avg";
        case AggregateFn::Min: return "min";
        case AggregateFn::Max: return "max";
    }
    return "count";
}

Table select_row(const Table& t, const std::vector<std::int64_t>& rows) {
    std::unordered_set<std::int64_t> seen;
    std::vector<Row> out;
    out.reserve(rows.size());
    for (std::int64_t i : rows) {
        if (i < 1 || static_cast<std::size_t>(i) > t.num_rows()) {
            throw OpError(OpError::Kind::IndexOutOfRange,
                          "row index " + std::to_string(i) + " out of range [1, " +
                              std::to_string(t.num_rows()) + "]",
                          "", i);
        }
        if (!seen.insert(i).second) {
            throw OpError(OpError::Kind::DuplicateIndex,
                          "duplicate row index " + std::to_string(i), "", i);
        }
        out.push_back(t.row(static_cast<std::size_t>(i - 1)));
    }
    return Table(t.name(), t.headers(), std::move(out));
}

Table select_column(const Table& t, const std::vector<std::string>& columns) {
    std::vector<std::size_t> indices;
    indices.reserve(columns.size());
    for (const auto& c : columns) indices.push_back(require_column(t, c));

    std::vector<Row> out;
    out.reserve(t.num_rows());
    for (const auto& row : t.rows()) {
        Row projected;
        projected.reserve(indices.size());
        for (std::size_t idx : indices) projected.push_back(row[idx]);
        out.push_back(std::move(projected));
    }
    return Table(t.name(), columns, std::move(out));
}

Table add_column(const Table& t, const std::string& name, const std::vector<CellValue>& values) {
    if (t.column_index(name)) {
        throw OpError(OpError::Kind::DuplicateColumn, "column \"" + name + "\" already exists",
                      name);
    }
    if (values.size() != t.num_rows()) {
        throw OpError(OpError::Kind::LengthMismatch,
                      "value count " + std::to_string(values.size()) + " != row count " +
                          std::to_string(t.num_rows()));
    }
    auto headers = t.headers();
    headers.push_back(name);
    std::vector<Row> out = t.rows();
    for (std::size_t i = 0; i < out.size(); ++i) out[i].push_back(values[i]);
    return Table(t.name(), std::move(headers), std::move(out));
}

Table sort_by(const Table& t, const std::string& column, SortOrder order) {
    std::size_t idx = require_column(t, column);
    std::vector<Row> rows = t.rows();
    const bool desc = order == SortOrder::Descending;
    std::stable_sort(rows.begin(), rows.end(), [idx, desc](const Row& a, const Row& b) {
        const CellValue& lhs = a[idx];
        const CellValue& rhs = b[idx];
        int ra = type_rank(lhs);
        int rb = type_rank(rhs);
        if (ra != rb) return ra < rb;
        if (lhs.is_number()) {
            return desc ? rhs.number() < lhs.number() : lhs.number() < rhs.number();
        }
        if (lhs.is_text()) {
            return desc ? rhs.text() < lhs.text() : lhs.text() < rhs.text();
        }
        return false;  // Null == Null
    });
    return Table(t.name(), t.headers(), std::move(rows));
}

Table group_by(const Table& t, const std::string& column) {
    std::size_t idx = require_column(t, column);
    std::vector<CellValue> keys;
    std::vector<std::size_t> counts;
    for (const auto& row : t.rows()) {
        // Null cells bucket under the rendered key "Null".
        CellValue key = row[idx].is_null() ? CellValue::text("Null") : row[idx];
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
            keys.push_back(key);
            counts.push_back(1);
        } else {
            ++counts[static_cast<std::size_t>(it - keys.begin())];
        }
    }
    std::vector<Row> rows;
    rows.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        rows.push_back({keys[i], CellValue::number(static_cast<double>(counts[i]))});
    }
    return Table(t.name(), {column, "Count"}, std::move(rows));
}

Table filter_rows(const Table& t, const std::string& column, FilterOp op, const CellValue& value) {
    std::size_t idx = require_column(t, column);
    const bool ordering = op == FilterOp::Lt || op == FilterOp::Le || op == FilterOp::Gt ||
                          op == FilterOp::Ge;
    if (ordering) {
        if (!value.is_number()) {
            throw OpError(OpError::Kind::TypeMismatch,
                          "\"" + to_string(op) + "\" requires a Number value", to_string(op));
        }
        bool any_number = false;
        bool any_non_null = false;
        for (const auto& row : t.rows()) {
            if (row[idx].is_number()) any_number = true;
            if (!row[idx].is_null()) any_non_null = true;
        }
        if (!any_number && any_non_null) {
            throw OpError(OpError::Kind::TypeMismatch,
                          "\"" + to_string(op) + "\": Text column vs Number value",
                          to_string(op));
        }
    }

    auto matches = [&](const CellValue& cell) {
        if (cell.is_null()) return false;  // Null never matches, != included
        switch (op) {
            case FilterOp::Eq: return cell == value;
            case FilterOp::Ne: return cell != value;
            case FilterOp::Contains:
                return cell.render().find(value.render()) != std::string::npos;
            default: break;
        }
        if (!cell.is_number()) return false;
        double x = cell.number();
        double y = value.number();
        switch (op) {
            case FilterOp::Lt: return x < y;
            case FilterOp::Le: return x <= y;
            case FilterOp::Gt: return x > y;
            case FilterOp::Ge: return x >= y;
            default: return false;
        }
    };

    std::vector<Row> rows;
    for (const auto& row : t.rows()) {
        if (matches(row[idx])) rows.push_back(row);
    }
    return Table(t.name(), t.headers(), std::move(rows));
}

CellValue aggregate(const Table& t, const std::string& column, AggregateFn fn) {
    std::size_t idx = require_column(t, column);
    if (fn == AggregateFn::Count) {
        std::size_t count = 0;
        for (const auto& row : t.rows()) {
            if (!row[idx].is_null()) ++count;
        }
        return CellValue::number(static_cast<double>(count));
    }

    double sum = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
    for (const auto& row : t.rows()) {
        if (!row[idx].is_number()) continue;
        double x = row[idx].number();
        if (n == 0) {
            min = x;
            max = x;
        } else {
            min = std::min(min, x);
            max = std::max(max, x);
        }
        sum += x;
        ++n;
    }
    if (n == 0) {
        throw OpError(OpError::Kind::NoNumericCells,
                      "no numeric cells in column \"" + column + "\" for " + to_string(fn),
                      column);
    }
    switch (fn) {
        case AggregateFn::Sum: return CellValue::number(sum);
        case AggregateFn::Avg: return CellValue::number(sum / static_cast<double>(n));
        case AggregateFn::Min: return CellValue::number(min);
        case AggregateFn::Max: return CellValue::number(max);
        default: return CellValue::number(static_cast<double>(n));
    }
}

// ---------------------------------------------------------------------------
// Registry and dispatch

CellValue arg_to_cell(const ArgValue& v) {
    switch (v.kind) {
        case ArgValue::Kind::Number: return CellValue::number(v.number);
        case ArgValue::Kind::String: return parse_cell(v.str);
        case ArgValue::Kind::Ident:
            if (v.str == "null" || v.str == "Null" || v.str == "NULL") return CellValue::null();
            return CellValue::text(v.str);
        case ArgValue::Kind::List:
            throw OpError(OpError::Kind::ArgumentTypeMismatch, "list is not a cell value");
    }
    return CellValue::null();
}

namespace {

const ArgValue& require_arg(const OpCall& call, std::string_view key) {
    const ArgValue* v = call.find(key);
    if (v == nullptr) {
        throw OpError(OpError::Kind::MissingArgument,
                      call.name + ": missing argument '" + std::string(key) + "'",
                      std::string(key));
    }
    return *v;
}

std::string require_text_arg(const OpCall& call, std::string_view key) {
    const ArgValue& v = require_arg(call, key);
    if (v.kind != ArgValue::Kind::String && v.kind != ArgValue::Kind::Ident) {
        throw OpError(OpError::Kind::ArgumentTypeMismatch,
                      call.name + ": argument '" + std::string(key) + "' must be a string",
                      std::string(key));
    }
    return v.str;
}

std::vector<std::int64_t> require_index_list(const OpCall& call, std::string_view key) {
    const ArgValue& v = require_arg(call, key);
    if (v.kind != ArgValue::Kind::List) {
        throw OpError(OpError::Kind::ArgumentTypeMismatch,
                      call.name + ": argument '" + std::string(key) + "' must be a list",
                      std::string(key));
    }
    std::vector<std::int64_t> out;
    out.reserve(v.items.size());
    for (const auto& item : v.items) {
        if (item.kind != ArgValue::Kind::Number || item.number != std::floor(item.number)) {
            throw OpError(OpError::Kind::ArgumentTypeMismatch,
                          call.name + ": '" + std::string(key) + "' entries must be integers",
                          std::string(key));
        }
        out.push_back(static_cast<std::int64_t>(item.number));
    }
    return out;
}

std::vector<std::string> require_name_list(const OpCall& call, std::string_view key) {
    const ArgValue& v = require_arg(call, key);
    if (v.kind != ArgValue::Kind::List) {
        throw OpError(OpError::Kind::ArgumentTypeMismatch,
                      call.name + ": argument '" + std::string(key) + "' must be a list",
                      std::string(key));
    }
    std::vector<std::string> out;
    out.reserve(v.items.size());
    for (const auto& item : v.items) {
        if (item.kind != ArgValue::Kind::String && item.kind != ArgValue::Kind::Ident) {
            throw OpError(OpError::Kind::ArgumentTypeMismatch,
                          call.name + ": '" + std::string(key) + "' entries must be strings",
                          std::string(key));
        }
        out.push_back(item.str);
    }
    return out;
}

std::vector<CellValue> require_cell_list(const OpCall& call, std::string_view key) {
    const ArgValue& v = require_arg(call, key);
    if (v.kind != ArgValue::Kind::List) {
        throw OpError(OpError::Kind::ArgumentTypeMismatch,
                      call.name + ": argument '" + std::string(key) + "' must be a list",
                      std::string(key));
    }
    std::vector<CellValue> out;
    out.reserve(v.items.size());
    for (const auto& item : v.items) out.push_back(arg_to_cell(item));
    return out;
}

OpRegistry make_standard_registry() {
    OpRegistry reg;
    reg.add("select_row", [](const OpCall& call, const Table& t) -> OpResult {
        return select_row(t, require_index_list(call, "rows"));
    });
    reg.add("select_column", [](const OpCall& call, const Table& t) -> OpResult {
        return select_column(t, require_name_list(call, "columns"));
    });
    reg.add("add_column", [](const OpCall& call, const Table& t) -> OpResult {
        return add_column(t, require_text_arg(call, "name"), require_cell_list(call, "values"));
    });
    reg.add("sort_by", [](const OpCall& call, const Table& t) -> OpResult {
        std::string order_text = require_text_arg(call, "order");
        auto order = parse_sort_order(order_text);
        if (!order) {
            throw OpError(OpError::Kind::ArgumentTypeMismatch,
                          "sort_by: order must be asc or desc, got '" + order_text + "'",
                          "order");
        }
        return sort_by(t, require_text_arg(call, "column"), *order);
    });
    reg.add("group_by", [](const OpCall& call, const Table& t) -> OpResult {
        return group_by(t, require_text_arg(call, "column"));
    });
    reg.add("filter_rows", [](const OpCall& call, const Table& t) -> OpResult {
        std::string op_text = require_text_arg(call, "op");
        auto op = parse_filter_op(op_text);
        if (!op) {
            throw OpError(OpError::Kind::ArgumentTypeMismatch,
                          "filter_rows: unknown comparison '" + op_text + "'", "op");
        }
        return filter_rows(t, require_text_arg(call, "column"), *op,
                           arg_to_cell(require_arg(call, "value")));
    });
    reg.add("aggregate", [](const OpCall& call, const Table& t) -> OpResult {
        std::string fn_text = require_text_arg(call, "fn");
        auto fn = parse_aggregate_fn(fn_text);
        if (!fn) {
            throw OpError(OpError::Kind::ArgumentTypeMismatch,
                          "aggregate: unknown function '" + fn_text + "'", "fn");
        }
        return aggregate(t, require_text_arg(call, "column"), *fn);
    });
    return reg;
}

}  // namespace

const OpRegistry& OpRegistry::standard() {
    static const OpRegistry registry = make_standard_registry();
    return registry;
}

void OpRegistry::add(std::string name, Executor exec) {
    executors_[std::move(name)] = std::move(exec);
}

bool OpRegistry::contains(std::string_view name) const {
    return executors_.find(name) != executors_.end();
}

std::vector<std::string> OpRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(executors_.size());
    for (const auto& [name, _] : executors_) out.push_back(name);
    return out;
}

OpResult OpRegistry::apply(const OpCall& call, const Table& t) const {
    auto it = executors_.find(call.name);
    if (it == executors_.end()) {
        throw OpError(OpError::Kind::UnknownOp, "unknown operation '" + call.name + "'",
                      call.name);
    }
    return it->second(call, t);
}

OpResult apply(const OpCall& call, const Table& t) {
    return OpRegistry::standard().apply(call, t);
}

}  // namespace treetab
