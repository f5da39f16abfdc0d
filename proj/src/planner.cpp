#include "treetab/planner.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "treetab/cell.hpp"
#include "treetab/errors.hpp"
#include "treetab/prompts.hpp"

namespace treetab {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Relationship

namespace {

std::string wiring_name(Relationship::Wiring w) {
    return w == Relationship::Wiring::Sequential ? "sequential" : "parallel";
}

std::string combiner_name(const Relationship& r) {
    switch (r.combiner) {
        case Relationship::Combiner::Last: return "last";
        case Relationship::Combiner::UnionRows: return "union_rows";
        case Relationship::Combiner::JoinOn: return "join_on:" + r.join_column;
        case Relationship::Combiner::ConcatText: return "concat_text";
        case Relationship::Combiner::Synthesize: return "synthesize";
    }
    return "last";
}

}  // namespace

std::string Relationship::to_string() const {
    return wiring_name(wiring) + "/" + combiner_name(*this);
}

std::optional<Relationship> Relationship::parse(std::string_view text) {
    Relationship r;
    std::string_view t = trim_view(text);
    if (t.empty()) return r;  // empty relationship falls back to defaults

    std::size_t slash = t.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    std::string_view wiring = trim_view(t.substr(0, slash));
    std::string_view combiner = trim_view(t.substr(slash + 1));

    if (wiring == "sequential") {
        r.wiring = Wiring::Sequential;
    } else if (wiring == "parallel") {
        r.wiring = Wiring::Parallel;
    } else {
        return std::nullopt;
    }

    if (combiner == "last") {
        r.combiner = Combiner::Last;
    } else if (combiner == "union_rows") {
        r.combiner = Combiner::UnionRows;
    } else if (combiner == "concat_text") {
        r.combiner = Combiner::ConcatText;
    } else if (combiner == "synthesize") {
        r.combiner = Combiner::Synthesize;
    } else if (combiner.rfind("join_on:", 0) == 0) {
        r.combiner = Combiner::JoinOn;
        r.join_column = std::string(trim_view(combiner.substr(8)));
        if (r.join_column.empty()) return std::nullopt;
    } else {
        return std::nullopt;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Planner base: invocation counting and event notes

Decomposition Planner::decompose(const PlannerContext& ctx, int max_degree) {
    count_invocation();
    return do_decompose(ctx, max_degree);
}

OpCall Planner::sample_operation(const PlannerContext& ctx) {
    count_invocation();
    return do_sample_operation(ctx);
}

ColumnSelection Planner::schema_link(const SchemaLinkContext& ctx) {
    count_invocation();
    return do_schema_link(ctx);
}

std::string Planner::synthesize_answer(const PlannerContext& ctx, const OpResult& final_result) {
    count_invocation();
    return do_synthesize_answer(ctx, final_result);
}

std::vector<std::string> Planner::take_events() {
    std::lock_guard<std::mutex> lock(events_mutex_);
    std::vector<std::string> out = std::move(events_);
    events_.clear();
    return out;
}

void Planner::note_event(std::string event) {
    std::lock_guard<std::mutex> lock(events_mutex_);
    events_.push_back(std::move(event));
}

// ---------------------------------------------------------------------------
// ScriptedPlanner

struct ScriptedPlanner::Impl {
    json fixtures;

    const json* find_task(const std::string& task_id) const {
        auto it = fixtures.find(task_id);
        return it == fixtures.end() ? nullptr : &*it;
    }

    const json& require_entry(const std::string& task_id, const std::string& key,
                              const char* role) const {
        const json* task = find_task(task_id);
        if (task == nullptr) {
            throw PlannerError("scripted planner has no fixtures for task '" + task_id + "'");
        }
        auto it = task->find(key);
        if (it == task->end()) {
            throw PlannerError("scripted planner: no " + std::string(role) + " fixture at '" +
                               key + "' for task '" + task_id + "'");
        }
        return *it;
    }
};

ScriptedPlanner::ScriptedPlanner(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
ScriptedPlanner::~ScriptedPlanner() = default;

std::shared_ptr<ScriptedPlanner> ScriptedPlanner::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open fixture file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::shared_ptr<ScriptedPlanner> ScriptedPlanner::from_json_text(const std::string& json_text) {
    auto impl = std::make_unique<Impl>();
    try {
        impl->fixtures = json::parse(json_text);
    } catch (const json::exception& e) {
        throw IoError(std::string("fixture file is not valid JSON: ") + e.what());
    }
    if (!impl->fixtures.is_object()) {
        throw IoError("fixture file must hold a task-id keyed object");
    }
    return std::shared_ptr<ScriptedPlanner>(new ScriptedPlanner(std::move(impl)));
}

Decomposition ScriptedPlanner::do_decompose(const PlannerContext& ctx, int max_degree) {
    (void)max_degree;  // bounds are enforced by the builder
    const json& entry = impl_->require_entry(ctx.task_id, ctx.node_path, "decompose");
    if (!entry.is_object() || !entry.contains("children")) {
        throw PlannerError("scripted decompose fixture at '" + ctx.node_path +
                           "' must contain \"children\"");
    }
    Decomposition d;
    for (const auto& child : entry.at("children")) {
        d.children.push_back(child.get<std::string>());
    }
    if (d.children.empty()) {
        throw PlannerError("scripted decompose fixture at '" + ctx.node_path +
                           "' has no children");
    }
    std::string rel_text = entry.value("relationship", "");
    auto rel = Relationship::parse(rel_text);
    if (!rel) {
        throw PlannerError("scripted fixture at '" + ctx.node_path +
                           "': bad relationship '" + rel_text + "'");
    }
    d.relationship = *rel;
    if (entry.contains("terminal")) {
        for (const auto& flag : entry.at("terminal")) d.terminal.push_back(flag.get<bool>());
        if (d.terminal.size() != d.children.size()) {
            throw PlannerError("scripted fixture at '" + ctx.node_path +
                               "': terminal flags do not match children");
        }
    } else {
        d.terminal.assign(d.children.size(), false);
    }
    return d;
}

OpCall ScriptedPlanner::do_sample_operation(const PlannerContext& ctx) {
    const json& entry = impl_->require_entry(ctx.task_id, ctx.node_path, "sample");
    if (!entry.is_object() || !entry.contains("op")) {
        throw PlannerError("scripted sample fixture at '" + ctx.node_path +
                           "' must contain \"op\"");
    }
    return parse_op_call(entry.at("op").get<std::string>());
}

ColumnSelection ScriptedPlanner::do_schema_link(const SchemaLinkContext& ctx) {
    const json& entry = impl_->require_entry(ctx.task_id, "schema_link", "schema_link");
    ColumnSelection sel;
    for (const auto& kept : entry.at("keep")) {
        std::string text = kept.get<std::string>();
        std::size_t dot = text.find('.');
        if (dot == std::string::npos) {
            throw PlannerError("scripted schema_link entries must be table.column, got '" +
                               text + "'");
        }
        sel.kept.emplace_back(text.substr(0, dot), text.substr(dot + 1));
    }
    if (entry.contains("join")) {
        for (const auto& join : entry.at("join")) {
            std::string text = join.get<std::string>();
            std::size_t arrow = text.find("->");
            std::size_t dot1 = text.find('.');
            std::size_t dot2 = text.find('.', arrow == std::string::npos ? 0 : arrow + 2);
            if (arrow == std::string::npos || dot1 == std::string::npos ||
                dot2 == std::string::npos || dot1 > arrow || dot2 < arrow) {
                throw PlannerError("scripted join entries must be t1.c1->t2.c2, got '" + text +
                                   "'");
            }
            ForeignKey fk;
            fk.from_table = std::string(trim_view(text.substr(0, dot1)));
            fk.from_column = std::string(trim_view(text.substr(dot1 + 1, arrow - dot1 - 1)));
            fk.to_table = std::string(trim_view(text.substr(arrow + 2, dot2 - arrow - 2)));
            fk.to_column = std::string(trim_view(text.substr(dot2 + 1)));
            sel.join_path.push_back(std::move(fk));
        }
    }
    return sel;
}

std::string ScriptedPlanner::do_synthesize_answer(const PlannerContext& ctx,
                                                  const OpResult& final_result) {
    const json* task = impl_->find_task(ctx.task_id);
    if (task != nullptr) {
        // Combiner-level synthesis looks for "synth:<node_path>"; the final
        // answer looks for "answer". Both fall back to the rendering rule.
        std::string key = ctx.node_path == "answer" ? "answer" : "synth:" + ctx.node_path;
        auto it = task->find(key);
        if (it != task->end() && it->contains("text")) {
            return it->at("text").get<std::string>();
        }
    }
    return render_result(final_result);
}

// ---------------------------------------------------------------------------
// Remote planner response grammar

namespace {

// The decision must sit in a fenced block; without fences the whole text is
// treated as the block, so bare-bones model output still parses.
std::string extract_fenced_block(const std::string& text) {
    std::size_t first = text.find("```");
    if (first == std::string::npos) return text;
    std::size_t content_start = text.find('\n', first);
    if (content_start == std::string::npos) return text;
    ++content_start;
    std::size_t close = text.find("```", content_start);
    if (close == std::string::npos) return text.substr(content_start);
    return text.substr(content_start, close - content_start);
}

std::vector<std::string> nonempty_lines(const std::string& block) {
    std::vector<std::string> lines;
    std::istringstream in(block);
    std::string line;
    while (std::getline(in, line)) {
        std::string_view t = trim_view(line);
        if (!t.empty()) lines.emplace_back(t);
    }
    return lines;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

Decomposition parse_decompose_response(const std::string& text, int max_degree) {
    (void)max_degree;
    Decomposition d;
    bool saw_relationship = false;
    for (const auto& line : nonempty_lines(extract_fenced_block(text))) {
        std::string_view v(line);
        if (starts_with(v, "child ")) {
            std::size_t colon = v.find(':');
            if (colon == std::string_view::npos) {
                throw PlannerError("decompose response: 'child' line without ':': " + line);
            }
            d.children.emplace_back(trim_view(v.substr(colon + 1)));
            d.terminal.push_back(false);
        } else if (starts_with(v, "terminal:")) {
            if (d.terminal.empty()) {
                throw PlannerError("decompose response: 'terminal:' before any child");
            }
            std::string_view flag = trim_view(v.substr(9));
            if (flag == "yes") {
                d.terminal.back() = true;
            } else if (flag == "no") {
                d.terminal.back() = false;
            } else {
                throw PlannerError("decompose response: terminal must be yes or no, got '" +
                                   std::string(flag) + "'");
            }
        } else if (starts_with(v, "relationship:")) {
            auto rel = Relationship::parse(trim_view(v.substr(13)));
            if (!rel) {
                throw PlannerError("decompose response: bad relationship line: " + line);
            }
            d.relationship = *rel;
            saw_relationship = true;
        } else {
            throw PlannerError("decompose response: unrecognized line: " + line);
        }
    }
    if (d.children.empty()) {
        throw PlannerError("decompose response contains no 'child i:' lines");
    }
    (void)saw_relationship;  // missing relationship line keeps the defaults
    return d;
}

OpCall parse_op_response(const std::string& text) {
    auto lines = nonempty_lines(extract_fenced_block(text));
    if (lines.size() != 1) {
        throw PlannerError("operation response must contain exactly one op-call line, got " +
                           std::to_string(lines.size()));
    }
    try {
        return parse_op_call(lines[0]);
    } catch (const TreetabError& e) {
        throw PlannerError(std::string("operation response is not an op-call: ") + e.what());
    }
}

ColumnSelection parse_schema_link_response(const std::string& text) {
    ColumnSelection sel;
    for (const auto& line : nonempty_lines(extract_fenced_block(text))) {
        std::string_view v(line);
        if (starts_with(v, "keep:")) {
            std::string_view rest = trim_view(v.substr(5));
            std::size_t dot = rest.find('.');
            if (dot == std::string_view::npos) {
                throw PlannerError("schema_link response: keep lines need table.column: " + line);
            }
            sel.kept.emplace_back(std::string(trim_view(rest.substr(0, dot))),
                                  std::string(trim_view(rest.substr(dot + 1))));
        } else if (starts_with(v, "join:")) {
            std::string rest(trim_view(v.substr(5)));
            std::size_t arrow = rest.find("->");
            if (arrow == std::string::npos) {
                throw PlannerError("schema_link response: join lines need t1.c1 -> t2.c2: " +
                                   line);
            }
            auto parse_side = [&line](std::string_view side) {
                std::size_t dot = side.find('.');
                if (dot == std::string_view::npos) {
                    throw PlannerError("schema_link response: join sides need table.column: " +
                                       line);
                }
                return std::make_pair(std::string(trim_view(side.substr(0, dot))),
                                      std::string(trim_view(side.substr(dot + 1))));
            };
            auto [from_table, from_column] = parse_side(trim_view(rest.substr(0, arrow)));
            auto [to_table, to_column] = parse_side(trim_view(rest.substr(arrow + 2)));
            sel.join_path.push_back(ForeignKey{from_table, from_column, to_table, to_column});
        } else {
            throw PlannerError("schema_link response: unrecognized line: " + line);
        }
    }
    if (sel.kept.empty()) {
        throw PlannerError("schema_link response contains no keep lines");
    }
    return sel;
}

std::string parse_answer_response(const std::string& text) {
    return std::string(trim_view(extract_fenced_block(text)));
}

}  // namespace treetab
