#include "treetab/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "treetab/errors.hpp"

namespace treetab {

namespace {

const char* kDecomposeText =
    "You are planning how to answer a question about a table, step by step.\n"
    "Question: {question}\n"
    "External knowledge: {knowledge}\n"
    "Steps already taken on the path to this one:\n{ancestors}\n"
    "Current step to break down: {statement}\n"
    "Working table:\n{table}\n"
    "Results of earlier completed subtrees:\n{bindings}\n"
    "\n"
    "Decompose the current step into at most {max_degree} child steps. Mark a child\n"
    "terminal when it can be carried out by a single table operation. Respond inside\n"
    "a fenced code block using exactly these line forms:\n"
    "```\n"
    "child 1: <sub-step text>\n"
    "terminal: yes\n"
    "child 2: <sub-step text>\n"
    "terminal: no\n"
    "relationship: sequential/last\n"
    "```\n"
    "The relationship line is <sequential|parallel>/<last|union_rows|join_on:<column>|"
    "concat_text|synthesize> and may be omitted for the default sequential/last.\n"
    "{error_note}";

const char* kSampleOpText =
    "You are choosing one table operation to carry out a step.\n"
    "Question: {question}\n"
    "External knowledge: {knowledge}\n"
    "Steps already taken on the path to this one:\n{ancestors}\n"
    "Step to execute: {statement}\n"
    "Working table:\n{table}\n"
    "Results of earlier completed subtrees:\n{bindings}\n"
    "\n"
    "Available operations: {op_pool}\n"
    "Respond inside a fenced code block with exactly one operation call, for example:\n"
    "```\n"
    "filter_rows(column=\"Team\", op=\"=\", value=\"Red\")\n"
    "```\n"
    "Row indices are 1-based. String arguments are double-quoted.\n"
    "{error_note}";

const char* kSchemaLinkText =
    "You are selecting the columns of a database that are relevant to a question.\n"
    "Question: {question}\n"
    "External knowledge: {knowledge}\n"
    "Tables (headers and a small preview):\n{tables}\n"
    "Declared foreign keys:\n{foreign_keys}\n"
    "\n"
    "Pick the columns needed to answer the question and the foreign keys to join\n"
    "along (only declared ones). Respond inside a fenced code block using lines:\n"
    "```\n"
    "keep: <table>.<column>\n"
    "join: <table>.<column> -> <table>.<column>\n"
    "```\n"
    "{error_note}";

const char* kAnswerText =
    "You are writing the final answer to a question about a table.\n"
    "Question: {question}\n"
    "External knowledge: {knowledge}\n"
    "Computed result:\n{result}\n"
    "Results of completed subtrees:\n{bindings}\n"
    "\n"
    "Respond inside a fenced code block containing only the answer text. Join\n"
    "multiple answer values with \" | \".\n"
    "{error_note}";

const char* role_file_name(PromptRole role) {
    switch (role) {
        case PromptRole::Decompose: return "decompose.txt";
        case PromptRole::SampleOp: return "sample_op.txt";
        case PromptRole::SchemaLink: return "schema_link.txt";
        case PromptRole::Answer: return "answer.txt";
    }
    return "decompose.txt";
}

bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || c == '_';
}

}  // namespace

PromptTemplate default_template(PromptRole role) {
    PromptTemplate t;
    t.role = role;
    switch (role) {
        case PromptRole::Decompose: t.text = kDecomposeText; break;
        case PromptRole::SampleOp: t.text = kSampleOpText; break;
        case PromptRole::SchemaLink: t.text = kSchemaLinkText; break;
        case PromptRole::Answer: t.text = kAnswerText; break;
    }
    return t;
}

PromptTemplate load_template(PromptRole role, const std::string& dir) {
    if (dir.empty()) return default_template(role);
    std::filesystem::path path = std::filesystem::path(dir) / role_file_name(role);
    std::ifstream in(path);
    if (!in) return default_template(role);
    std::ostringstream buf;
    buf << in.rdbuf();
    PromptTemplate t;
    t.role = role;
    t.text = buf.str();
    return t;
}

std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& values) {
    std::string out;
    for (const auto& demo : tmpl.demos) {
        out += demo;
        out += "\n\n";
    }
    const std::string& text = tmpl.text;
    // Single pass over the template: substituted values are not re-scanned.
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') {
            out.push_back(text[i]);
            continue;
        }
        std::size_t close = i + 1;
        while (close < text.size() && is_ident_char(text[close])) ++close;
        if (close >= text.size() || text[close] != '}' || close == i + 1) {
            out.push_back(text[i]);  // brace without a placeholder
            continue;
        }
        std::string name = text.substr(i + 1, close - i - 1);
        auto it = values.find(name);
        if (it == values.end()) {
            throw PlannerError("prompt placeholder {" + name + "} has no value");
        }
        out += it->second;
        i = close;
    }
    return out;
}

}  // namespace treetab
