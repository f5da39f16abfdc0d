#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace treetab {

enum class CellKind { Null, Text, Number };

/// One table cell: Null, unicode text, or a finite 64-bit float.
/// Immutable after construction.
class CellValue {
public:
    CellValue() : value_(std::monostate{}) {}

    static CellValue null() { return CellValue(); }
    static CellValue text(std::string s) { return CellValue(std::move(s)); }
    /// Throws std::invalid_argument on NaN or infinity.
    static CellValue number(double x);

    CellKind kind() const;
    bool is_null() const { return kind() == CellKind::Null; }
    bool is_text() const { return kind() == CellKind::Text; }
    bool is_number() const { return kind() == CellKind::Number; }

    /// Valid only when is_text().
    const std::string& text() const { return std::get<std::string>(value_); }
    /// Valid only when is_number().
    double number() const { return std::get<double>(value_); }

    /// Canonical text rendering: Null -> "", Text verbatim, Number in the
    /// shortest fixed-point form that parses back to the same value.
    std::string render() const;

    bool operator==(const CellValue& other) const { return value_ == other.value_; }
    bool operator!=(const CellValue& other) const { return !(*this == other); }

private:
    explicit CellValue(std::string s) : value_(std::move(s)) {}
    explicit CellValue(double x) : value_(x) {}

    std::variant<std::monostate, std::string, double> value_;
};

/// Total cell parser. Numeric-looking tokens (optional sign, digits, one
/// optional decimal point, "," thousands separators in the integer part)
/// become Number with separators stripped; empty or whitespace-only tokens
/// become Null; everything else is Text with outer whitespace trimmed.
CellValue parse_cell(std::string_view token);

/// Shortest fixed-point rendering of a finite double ("24", "0.5").
std::string render_number(double x);

std::string_view trim_view(std::string_view s);

}  // namespace treetab
