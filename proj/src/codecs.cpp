#include "treetab/codecs.hpp"

#include <sstream>

#include "treetab/errors.hpp"

namespace treetab {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (true) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

// "|" -> "\|"; backslashes pass through (decode only treats "\|" specially,
// which keeps the mapping reversible).
std::string escape_pipes(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '|') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string unescape_pipes(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == '|') {
            out.push_back('|');
            ++i;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

// Splits on '|' delimiters; a '|' preceded by '\' is cell content.
std::vector<std::string> split_unescaped_pipes(std::string_view s) {
    std::vector<std::string> fields;
    std::string cur;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '|' && (i == 0 || s[i - 1] != '\\')) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(s[i]);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string field_text(std::string_view raw) {
    return unescape_pipes(trim_view(raw));
}

std::string escape_tsv(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '\\') {
            out += "\\\\";
        } else if (c == '\t') {
            out += "\\t";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string unescape_tsv(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            if (s[i + 1] == 't') {
                out.push_back('\t');
                ++i;
                continue;
            }
            if (s[i + 1] == '\\') {
                out.push_back('\\');
                ++i;
                continue;
            }
        }
        out.push_back(s[i]);
    }
    return out;
}

std::vector<std::string> split_on(std::string_view s, char sep) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string escape_html(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape_html(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '&') {
            if (s.substr(i, 5) == "&amp;") {
                out.push_back('&');
                i += 4;
                continue;
            }
            if (s.substr(i, 4) == "&lt;") {
                out.push_back('<');
                i += 3;
                continue;
            }
            if (s.substr(i, 4) == "&gt;") {
                out.push_back('>');
                i += 3;
                continue;
            }
        }
        out.push_back(s[i]);
    }
    return out;
}

std::string encode_markdown(const Table& t) {
    std::ostringstream out;
    auto emit_row = [&out](const std::vector<std::string>& fields) {
        out << "|";
        for (const auto& f : fields) out << " " << f << " |";
    };
    std::vector<std::string> fields;
    fields.reserve(t.num_columns());
    for (const auto& h : t.headers()) fields.push_back(escape_pipes(h));
    emit_row(fields);
    fields.assign(t.num_columns(), "---");
    out << "\n";
    emit_row(fields);
    for (const auto& row : t.rows()) {
        fields.clear();
        for (const auto& cell : row) fields.push_back(escape_pipes(cell.render()));
        out << "\n";
        emit_row(fields);
    }
    return out.str();
}

std::string encode_pipe(const Table& t) {
    std::ostringstream out;
    out << "col :";
    for (std::size_t i = 0; i < t.num_columns(); ++i) {
        out << " " << escape_pipes(t.headers()[i]);
        if (i + 1 < t.num_columns()) out << " |";
    }
    for (std::size_t r = 0; r < t.num_rows(); ++r) {
        out << "\nrow " << (r + 1) << " :";
        for (std::size_t c = 0; c < t.num_columns(); ++c) {
            out << " " << escape_pipes(t.at(r, c).render());
            if (c + 1 < t.num_columns()) out << " |";
        }
    }
    return out.str();
}

std::string encode_tsv(const Table& t) {
    std::ostringstream out;
    for (std::size_t c = 0; c < t.num_columns(); ++c) {
        if (c > 0) out << '\t';
        out << escape_tsv(t.headers()[c]);
    }
    for (const auto& row : t.rows()) {
        out << '\n';
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << '\t';
            out << escape_tsv(row[c].render());
        }
    }
    return out.str();
}

std::string encode_html(const Table& t) {
    std::ostringstream out;
    out << "<table><tr>";
    for (const auto& h : t.headers()) out << "<th>" << escape_html(h) << "</th>";
    out << "</tr>";
    for (const auto& row : t.rows()) {
        out << "<tr>";
        for (const auto& cell : row) out << "<td>" << escape_html(cell.render()) << "</td>";
        out << "</tr>";
    }
    out << "</table>";
    return out.str();
}

[[noreturn]] void malformed(std::size_t line, const std::string& reason) {
    throw CodecError(CodecError::Kind::MalformedTable, line, reason);
}

// Markdown rows must be "| ... |" with unescaped pipes as delimiters.
std::vector<std::string> markdown_fields(const std::string& line, std::size_t line_no) {
    if (line.size() < 2 || line.front() != '|' || line.back() != '|' ||
        (line.size() >= 2 && line[line.size() - 2] == '\\')) {
        malformed(line_no, "expected a '|'-delimited row");
    }
    std::string_view inner(line);
    inner.remove_prefix(1);
    inner.remove_suffix(1);
    return split_unescaped_pipes(inner);
}

Table decode_markdown(const std::string& text) {
    auto lines = split_lines(text);
    if (lines.size() < 2) malformed(lines.size() + 1, "expected separator");

    auto header_fields = markdown_fields(lines[0], 1);
    std::vector<std::string> headers;
    headers.reserve(header_fields.size());
    for (const auto& f : header_fields) headers.push_back(field_text(f));

    auto sep_fields = markdown_fields(lines[1], 2);
    if (sep_fields.size() != headers.size()) malformed(2, "expected separator");
    for (const auto& f : sep_fields) {
        if (trim_view(f) != "---") malformed(2, "expected separator");
    }

    std::vector<Row> rows;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        auto fields = markdown_fields(lines[i], i + 1);
        if (fields.size() != headers.size()) {
            throw CodecError(CodecError::Kind::RaggedRow, i + 1,
                             "ragged row " + std::to_string(i - 2));
        }
        Row row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_cell(field_text(f)));
        rows.push_back(std::move(row));
    }
    return Table("", std::move(headers), std::move(rows));
}

Table decode_pipe(const std::string& text) {
    auto lines = split_lines(text);
    const std::string col_prefix = "col :";
    if (lines.empty() || lines[0].compare(0, col_prefix.size(), col_prefix) != 0) {
        malformed(1, "expected 'col :' header line");
    }
    auto header_fields = split_unescaped_pipes(
        std::string_view(lines[0]).substr(col_prefix.size()));
    std::vector<std::string> headers;
    headers.reserve(header_fields.size());
    for (const auto& f : header_fields) headers.push_back(field_text(f));

    std::vector<Row> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.compare(0, 4, "row ") != 0) malformed(i + 1, "expected 'row i :' line");
        std::size_t pos = 4;
        std::size_t digits = 0;
        std::size_t row_no = 0;
        while (pos < line.size() && line[pos] >= '0' && line[pos] <= '9') {
            row_no = row_no * 10 + static_cast<std::size_t>(line[pos] - '0');
            ++pos;
            ++digits;
        }
        if (digits == 0 || line.compare(pos, 2, " :") != 0) {
            malformed(i + 1, "expected 'row i :' line");
        }
        if (row_no != i) malformed(i + 1, "row numbering must be 1-based and sequential");
        pos += 2;
        auto fields = split_unescaped_pipes(std::string_view(line).substr(pos));
        if (fields.size() != headers.size()) {
            throw CodecError(CodecError::Kind::RaggedRow, i + 1,
                             "ragged row " + std::to_string(i - 1));
        }
        Row row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_cell(field_text(f)));
        rows.push_back(std::move(row));
    }
    return Table("", std::move(headers), std::move(rows));
}

Table decode_tsv(const std::string& text) {
    auto lines = split_lines(text);
    auto header_fields = split_on(lines[0], '\t');
    std::vector<std::string> headers;
    headers.reserve(header_fields.size());
    for (const auto& f : header_fields) headers.push_back(unescape_tsv(f));

    std::vector<Row> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_on(lines[i], '\t');
        if (fields.size() != headers.size()) {
            throw CodecError(CodecError::Kind::RaggedRow, i + 1,
                             "ragged row " + std::to_string(i - 1));
        }
        Row row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_cell(unescape_tsv(f)));
        rows.push_back(std::move(row));
    }
    return Table("", std::move(headers), std::move(rows));
}

// Strict parser for the subset encode_html emits (no attributes, no nesting).
class HtmlScanner {
public:
    explicit HtmlScanner(const std::string& text) : text_(text) {}

    bool try_literal(std::string_view lit) {
        if (text_.compare(pos_, lit.size(), lit) == 0) {
            pos_ += lit.size();
            return true;
        }
        return false;
    }

    void expect_literal(std::string_view lit) {
        if (!try_literal(lit)) {
            malformed(1, "expected '" + std::string(lit) + "' in HTML table");
        }
    }

    std::string cell_until(std::string_view close_tag) {
        std::size_t end = text_.find('<', pos_);
        if (end == std::string::npos) malformed(1, "unterminated HTML cell");
        std::string raw = text_.substr(pos_, end - pos_);
        pos_ = end;
        expect_literal(close_tag);
        return unescape_html(raw);
    }

    bool at_end() const { return pos_ >= text_.size(); }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
};

Table decode_html(const std::string& text) {
    HtmlScanner scan(text);
    scan.expect_literal("<table>");

    std::vector<std::string> headers;
    std::vector<Row> rows;
    bool first_tr = true;
    while (scan.try_literal("<tr>")) {
        if (first_tr) {
            while (scan.try_literal("<th>")) headers.push_back(scan.cell_until("</th>"));
            if (headers.empty()) malformed(1, "header row must contain <th> cells");
        } else {
            Row row;
            while (scan.try_literal("<td>")) {
                row.push_back(parse_cell(scan.cell_until("</td>")));
            }
            if (row.size() != headers.size()) {
                throw CodecError(CodecError::Kind::RaggedRow, 1,
                                 "ragged row " + std::to_string(rows.size()));
            }
            rows.push_back(std::move(row));
        }
        scan.expect_literal("</tr>");
        first_tr = false;
    }
    if (first_tr) malformed(1, "expected a header <tr>");
    scan.expect_literal("</table>");
    if (!scan.at_end()) malformed(1, "trailing content after </table>");
    return Table("", std::move(headers), std::move(rows));
}

}  // namespace

std::string format_name(TableFormat f) {
    switch (f) {
        case TableFormat::Markdown: return "markdown";
        case TableFormat::Pipe: return "pipe";
        case TableFormat::Tsv: return "tsv";
        case TableFormat::Html: return "html";
    }
    return "markdown";
}

std::optional<TableFormat> parse_format_name(std::string_view name) {
    if (name == "markdown" || name == "md") return TableFormat::Markdown;
    if (name == "pipe") return TableFormat::Pipe;
    if (name == "tsv") return TableFormat::Tsv;
    if (name == "html") return TableFormat::Html;
    return std::nullopt;
}

std::string encode(const Table& t, TableFormat f) {
    if (t.num_columns() == 0) {
        throw TableError("cannot encode a table with no columns");
    }
    switch (f) {
        case TableFormat::Markdown: return encode_markdown(t);
        case TableFormat::Pipe: return encode_pipe(t);
        case TableFormat::Tsv: return encode_tsv(t);
        case TableFormat::Html: return encode_html(t);
    }
    return encode_markdown(t);
}

Table decode(const std::string& text, TableFormat f) {
    switch (f) {
        case TableFormat::Markdown: return decode_markdown(text);
        case TableFormat::Pipe: return decode_pipe(text);
        case TableFormat::Tsv: return decode_tsv(text);
        case TableFormat::Html: return decode_html(text);
    }
    return decode_markdown(text);
}

}  // namespace treetab
