#include "treetab/cell.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace treetab {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Accepts: [sign] digits | [sign] digits '.' [digits] | [sign] '.' digits,
// where the integer part may use "," thousands separators (first group of
// 1-3 digits, every later group exactly 3). At least one digit overall.
bool looks_numeric(std::string_view s, std::string& stripped) {
    std::size_t i = 0;
    stripped.clear();
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        stripped.push_back(s[i]);
        ++i;
    }

    std::size_t int_digits = 0;
    std::size_t group = 0;
    bool saw_separator = false;
    while (i < s.size() && (is_digit(s[i]) || s[i] == ',')) {
        if (s[i] == ',') {
            if (group == 0 || group > 3) return false;   // ",123" or "1234,5"
            if (saw_separator && group != 3) return false;
            saw_separator = true;
            group = 0;
        } else {
            stripped.push_back(s[i]);
            ++int_digits;
            ++group;
        }
        ++i;
    }
    if (saw_separator && group != 3) return false;  // "1,23"
    if (saw_separator && int_digits == 0) return false;

    std::size_t frac_digits = 0;
    if (i < s.size() && s[i] == '.') {
        stripped.push_back('.');
        ++i;
        while (i < s.size() && is_digit(s[i])) {
            stripped.push_back(s[i]);
            ++frac_digits;
            ++i;
        }
    }
    if (i != s.size()) return false;
    return int_digits + frac_digits > 0;
}

}  // namespace

std::string_view trim_view(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

CellValue CellValue::number(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("cell numbers must be finite");
    }
    return CellValue(x);
}

CellKind CellValue::kind() const {
    switch (value_.index()) {
        case 1: return CellKind::Text;
        case 2: return CellKind::Number;
        default: return CellKind::Null;
    }
}

std::string render_number(double x) {
    char buf[340];  // fixed form of the smallest doubles needs ~330 chars
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed);
    assert(res.ec == std::errc());
    return std::string(buf, res.ptr);
}

std::string CellValue::render() const {
    switch (kind()) {
        case CellKind::Null: return "";
        case CellKind::Text: return text();
        case CellKind::Number: return render_number(number());
    }
    return "";
}

CellValue parse_cell(std::string_view token) {
    std::string_view t = trim_view(token);
    if (t.empty()) return CellValue::null();

    std::string stripped;
    if (looks_numeric(t, stripped)) {
        errno = 0;
        char* end = nullptr;
        double x = std::strtod(stripped.c_str(), &end);
        if (end == stripped.c_str() + stripped.size() && std::isfinite(x)) {
            return CellValue::number(x);
        }
    }
    return CellValue::text(std::string(t));
}

}  // namespace treetab
