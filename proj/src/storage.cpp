#include "treetab/storage.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "treetab/errors.hpp"

namespace treetab {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool any_content = false;

    char c;
    while (in.get(c)) {
        any_content = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && in.peek() == '\n') in.get(c);
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
        } else {
            field.push_back(c);
        }
    }
    if (!field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    if (!any_content) return {};
    return records;
}

namespace {

std::string csv_field(const std::string& s) {
    bool needs_quotes = s.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string to_csv(const std::vector<std::vector<std::string>>& records) {
    std::ostringstream out;
    for (const auto& record : records) {
        for (std::size_t i = 0; i < record.size(); ++i) {
            if (i > 0) out << ',';
            out << csv_field(record[i]);
        }
        out << '\n';
    }
    return out.str();
}

Table load_table_csv(const std::string& path, const std::string& table_name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open CSV file: " + path);
    auto records = read_csv(in);
    if (records.empty()) throw IoError("empty CSV file: " + path);

    std::vector<std::string> headers = records[0];
    std::vector<Row> rows;
    rows.reserve(records.size() - 1);
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != headers.size()) {
            throw IoError(path + ": row " + std::to_string(i) + " has " +
                          std::to_string(records[i].size()) + " fields, expected " +
                          std::to_string(headers.size()));
        }
        Row row;
        row.reserve(records[i].size());
        for (const auto& cell : records[i]) row.push_back(parse_cell(cell));
        rows.push_back(std::move(row));
    }
    return Table(table_name, std::move(headers), std::move(rows));
}

Database load_database(const std::string& dir) {
    fs::path root(dir);
    fs::path schema_path = root / "schema.json";
    std::ifstream schema_in(schema_path);
    if (!schema_in) throw IoError("cannot open schema file: " + schema_path.string());

    json schema;
    try {
        schema_in >> schema;
    } catch (const json::exception& e) {
        throw IoError(schema_path.string() + ": " + e.what());
    }

    std::vector<Table> tables;
    for (const auto& entry : schema.at("tables")) {
        std::string name = entry.at("name").get<std::string>();
        Table t = load_table_csv((root / (name + ".csv")).string(), name);
        if (entry.contains("columns")) {
            auto declared = entry.at("columns").get<std::vector<std::string>>();
            if (declared != t.headers()) {
                throw IoError(name + ".csv: column order does not match schema.json");
            }
        }
        tables.push_back(std::move(t));
    }

    std::vector<ForeignKey> fks;
    if (schema.contains("foreign_keys")) {
        for (const auto& entry : schema.at("foreign_keys")) {
            ForeignKey fk;
            fk.from_table = entry.at("from_table").get<std::string>();
            fk.from_column = entry.at("from_column").get<std::string>();
            fk.to_table = entry.at("to_table").get<std::string>();
            fk.to_column = entry.at("to_column").get<std::string>();
            fks.push_back(std::move(fk));
        }
    }
    return Database(std::move(tables), std::move(fks));
}

void save_database(const Database& db, const std::string& dir) {
    fs::path root(dir);
    fs::create_directories(root);

    nlohmann::ordered_json schema;
    schema["tables"] = json::array();
    for (const auto& t : db.tables()) {
        nlohmann::ordered_json entry;
        entry["name"] = t.name();
        entry["columns"] = t.headers();
        schema["tables"].push_back(entry);

        std::vector<std::vector<std::string>> records;
        records.push_back(t.headers());
        for (const auto& row : t.rows()) {
            std::vector<std::string> record;
            record.reserve(row.size());
            for (const auto& cell : row) record.push_back(cell.render());
            records.push_back(std::move(record));
        }
        std::ofstream out(root / (t.name() + ".csv"), std::ios::binary);
        if (!out) throw IoError("cannot write " + (root / (t.name() + ".csv")).string());
        out << to_csv(records);
    }

    schema["foreign_keys"] = json::array();
    for (const auto& fk : db.foreign_keys()) {
        nlohmann::ordered_json entry;
        entry["from_table"] = fk.from_table;
        entry["from_column"] = fk.from_column;
        entry["to_table"] = fk.to_table;
        entry["to_column"] = fk.to_column;
        schema["foreign_keys"].push_back(entry);
    }
    std::ofstream out(root / "schema.json");
    if (!out) throw IoError("cannot write " + (root / "schema.json").string());
    out << schema.dump(2) << "\n";
}

}  // namespace treetab
