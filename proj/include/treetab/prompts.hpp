#pragma once

#include <map>
#include <string>
#include <vector>

namespace treetab {

enum class PromptRole { Decompose, SampleOp, SchemaLink, Answer };

/// Editable prompt text with {placeholder} slots and few-shot demos that are
/// prepended verbatim. Placeholders: {question} {knowledge} {statement}
/// {ancestors} {table} {bindings} {max_degree} {op_pool} {error_note}.
struct PromptTemplate {
    PromptRole role;
    std::string text;
    std::vector<std::string> demos;
};

/// Built-in templates for each role.
PromptTemplate default_template(PromptRole role);

/// Loads "<dir>/{decompose,sample_op,schema_link,answer}.txt" when present,
/// falling back to the built-in text per missing file.
PromptTemplate load_template(PromptRole role, const std::string& dir);

/// Substitutes placeholders; throws PlannerError if the text references a
/// placeholder with no value.
std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& values);

}  // namespace treetab
