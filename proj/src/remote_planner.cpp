#include <cstdlib>
#include <map>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "treetab/errors.hpp"
#include "treetab/planner.hpp"
#include "treetab/prompts.hpp"

namespace treetab {

using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* value = std::getenv(name);
    return value != nullptr && *value != '\0' ? std::string(value) : std::move(fallback);
}

// "http://host:port/some/path" -> ("http://host:port", "/some/path")
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    std::size_t scheme = url.find("://");
    std::size_t path_start = scheme == std::string::npos
                                 ? url.find('/')
                                 : url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string bullet_list(const std::vector<std::string>& items) {
    if (items.empty()) return "(none)";
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += "\n";
        out += "- " + items[i];
    }
    return out;
}

std::string bindings_text(const std::vector<BoundPreview>& bindings) {
    if (bindings.empty()) return "(none)";
    std::string out;
    for (std::size_t i = 0; i < bindings.size(); ++i) {
        if (i > 0) out += "\n";
        out += bindings[i].name + ": " + bindings[i].preview;
    }
    return out;
}

std::string error_note_text(const std::string& error) {
    if (error.empty()) return "";
    return "NOTE: your previous response was invalid: " + error + "\n";
}

}  // namespace

struct RemotePlanner::Impl {
    PlannerConfig config;
    std::string base;
    std::string path;
    PromptTemplate t_decompose;
    PromptTemplate t_sample;
    PromptTemplate t_schema;
    PromptTemplate t_answer;

    std::string chat(const std::string& prompt) const {
        httplib::Client client(base);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(120, 0);

        json body;
        body["model"] = config.model;
        body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
        body["temperature"] = config.temperature;

        httplib::Headers headers;
        if (!config.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config.api_key);
        }
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            throw PlannerError("remote planner: request to " + base + path + " failed: " +
                               httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            throw PlannerError("remote planner: HTTP " + std::to_string(res->status) + " from " +
                               base + path);
        }
        try {
            json reply = json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw PlannerError(std::string("remote planner: malformed response body: ") +
                               e.what());
        }
    }

    std::map<std::string, std::string> context_values(const PlannerContext& ctx) const {
        std::map<std::string, std::string> values;
        values["question"] = ctx.question;
        values["knowledge"] = ctx.knowledge.value_or("(none)");
        values["statement"] = ctx.statement;
        values["ancestors"] = bullet_list(ctx.ancestor_statements);
        values["table"] = ctx.working_table_preview.empty() ? "(none)"
                                                            : ctx.working_table_preview;
        values["bindings"] = bindings_text(ctx.bound_results);
        return values;
    }
};

RemotePlanner::RemotePlanner(PlannerConfig config) : impl_(std::make_unique<Impl>()) {
    config.endpoint = config.endpoint.empty() ? env_or("TREETAB_LLM_URL", "") : config.endpoint;
    config.api_key = config.api_key.empty() ? env_or("TREETAB_LLM_KEY", "") : config.api_key;
    if (config.endpoint.empty()) {
        throw PlannerError(
            "remote planner needs an endpoint (flag/config or TREETAB_LLM_URL)");
    }
    auto [base, path] = split_endpoint(config.endpoint);
    impl_->base = base;
    impl_->path = path;
    impl_->t_decompose = load_template(PromptRole::Decompose, config.prompt_dir);
    impl_->t_sample = load_template(PromptRole::SampleOp, config.prompt_dir);
    impl_->t_schema = load_template(PromptRole::SchemaLink, config.prompt_dir);
    impl_->t_answer = load_template(PromptRole::Answer, config.prompt_dir);
    impl_->config = std::move(config);
}

RemotePlanner::~RemotePlanner() = default;

int RemotePlanner::retry_limit() const { return impl_->config.retry_limit; }

Decomposition RemotePlanner::do_decompose(const PlannerContext& ctx, int max_degree) {
    std::string error;
    const int attempts = retry_limit() + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) count_invocation();  // every regeneration is a sample
        auto values = impl_->context_values(ctx);
        values["max_degree"] = std::to_string(max_degree);
        values["error_note"] = error_note_text(error);
        try {
            return parse_decompose_response(impl_->chat(render_prompt(impl_->t_decompose, values)),
                                            max_degree);
        } catch (const PlannerError& e) {
            note_event("decompose at " + ctx.node_path + ": " + e.what());
            error = e.what();
        }
    }
    throw PlannerError("decompose at " + ctx.node_path + " failed after " +
                       std::to_string(attempts) + " attempts: " + error);
}

OpCall RemotePlanner::do_sample_operation(const PlannerContext& ctx) {
    std::string error;
    const int attempts = retry_limit() + 1;
    std::string pool;
    for (const auto& name : OpRegistry::standard().names()) {
        if (!pool.empty()) pool += ", ";
        pool += name;
    }
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) count_invocation();
        auto values = impl_->context_values(ctx);
        values["op_pool"] = pool;
        values["error_note"] = error_note_text(error);
        try {
            return parse_op_response(impl_->chat(render_prompt(impl_->t_sample, values)));
        } catch (const PlannerError& e) {
            note_event("sample_op at " + ctx.node_path + ": " + e.what());
            error = e.what();
        }
    }
    throw PlannerError("sample_op at " + ctx.node_path + " failed after " +
                       std::to_string(attempts) + " attempts: " + error);
}

ColumnSelection RemotePlanner::do_schema_link(const SchemaLinkContext& ctx) {
    std::string error = ctx.error_note;
    const int attempts = retry_limit() + 1;

    std::string tables;
    for (const auto& preview : ctx.tables) {
        tables += "Table " + preview.table + ":\n" + preview.preview + "\n";
    }
    std::vector<std::string> fk_lines;
    fk_lines.reserve(ctx.foreign_keys.size());
    for (const auto& fk : ctx.foreign_keys) fk_lines.push_back(fk.to_string());

    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) count_invocation();
        std::map<std::string, std::string> values;
        values["question"] = ctx.question;
        values["knowledge"] = ctx.knowledge.value_or("(none)");
        values["tables"] = tables.empty() ? "(none)" : tables;
        values["foreign_keys"] = bullet_list(fk_lines);
        values["error_note"] = error_note_text(error);
        try {
            return parse_schema_link_response(impl_->chat(render_prompt(impl_->t_schema, values)));
        } catch (const PlannerError& e) {
            note_event("schema_link: " + std::string(e.what()));
            error = e.what();
        }
    }
    throw PlannerError("schema_link failed after " + std::to_string(attempts) +
                       " attempts: " + error);
}

std::string RemotePlanner::do_synthesize_answer(const PlannerContext& ctx,
                                                const OpResult& final_result) {
    std::string error;
    const int attempts = retry_limit() + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) count_invocation();
        auto values = impl_->context_values(ctx);
        values["result"] = render_result(final_result);
        values["error_note"] = error_note_text(error);
        try {
            return parse_answer_response(impl_->chat(render_prompt(impl_->t_answer, values)));
        } catch (const PlannerError& e) {
            note_event("answer at " + ctx.node_path + ": " + e.what());
            error = e.what();
        }
    }
    throw PlannerError("answer synthesis failed after " + std::to_string(attempts) +
                       " attempts: " + error);
}

}  // namespace treetab
