#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "treetab/condense.hpp"
#include "treetab/executor.hpp"
#include "treetab/planner.hpp"
#include "treetab/table.hpp"

namespace treetab {

/// Run-level configuration shared by the CLI and the benchmark harness.
/// Every field has a config-file equivalent (treetab.json); flags override.
struct RunConfig {
    std::string planner_kind = "scripted";  // "scripted" | "remote"
    std::string fixtures_path;
    std::string endpoint;
    std::string model = "gpt-3.5-turbo";
    int max_degree = 4;
    int max_depth = 8;
    SizeBudget budget;
    TableFormat format = TableFormat::Markdown;
    int parallelism = 1;
    std::string trace_dir;
    bool interleave = false;
    bool include_timings = false;
    bool corpus_bleu = false;  // report corpus-level BLEU next to the mean

    /// Empty when valid, otherwise one message per problem.
    std::vector<std::string> validate() const;

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::ordered_json to_json() const;
    /// Loads treetab.json-style config; missing file yields defaults.
    static RunConfig load_file(const std::string& path);
};

struct TaskLoadResult {
    std::vector<QuestionTask> tasks;
    std::size_t skipped = 0;
    std::vector<std::string> messages;
};

/// Parses the JSONL task format. Malformed lines are skipped and logged in
/// the result. Throws IoError on a missing file and EmptyTaskFileError when
/// the file holds no lines at all. Relative database paths resolve against
/// the task file's directory.
TaskLoadResult load_tasks(const std::string& path);

struct TaskOutcome {
    std::string id;
    std::string answer;
    bool failed = false;
    std::string error;
    std::optional<bool> denotation_correct;
    std::optional<double> bleu_score;
    std::optional<double> rouge1;
    std::optional<double> rouge2;
    std::optional<double> rougel;
    int tree_height = 0;
    std::size_t node_count = 0;
    std::size_t planner_samples = 0;
    std::size_t cells_before = 0;
    std::size_t cells_after = 0;
};

struct SizeBucket {
    std::string label;
    std::size_t task_count = 0;
    std::size_t denotation_count = 0;
    std::size_t correct = 0;
};

/// Per-task rows plus the aggregate block: denotation accuracy, mean
/// BLEU/ROUGE over reference tasks, mean tree height and node count, total
/// and mean planner samples, mean cell reduction ratio, and input-size
/// buckets (<100, 100-500, 500-2000, >2000 cells).
struct MetricReport {
    std::vector<TaskOutcome> per_task;
    std::size_t denotation_tasks = 0;
    std::size_t reference_tasks = 0;
    std::size_t failures = 0;
    double accuracy = 0.0;
    double mean_bleu = 0.0;
    double corpus_bleu_score = 0.0;
    bool has_corpus_bleu = false;
    double mean_rouge1 = 0.0;
    double mean_rouge2 = 0.0;
    double mean_rougel = 0.0;
    double mean_height = 0.0;
    double mean_nodes = 0.0;
    std::size_t total_samples = 0;
    double mean_samples = 0.0;
    double mean_reduction = 0.0;  // mean of cells_after / cells_before
    std::vector<SizeBucket> buckets;

    nlohmann::ordered_json to_json() const;
    std::string to_text() const;
};

/// Runs condense -> build_tree -> execute_tree for one task and returns the
/// full trace. With interleave=true each root subtree is grown and executed
/// before the next one is grown, exposing bound results to later planning.
RunTrace run_single_task(const QuestionTask& task, Planner& planner, const RunConfig& config);

/// Evaluates every task, scoring denotation tasks with denotation_match and
/// reference tasks with BLEU/ROUGE. Per-task failures are recorded as
/// incorrect and never abort the run. Traces are written to
/// config.trace_dir/<task id>.json when a trace dir is set.
MetricReport run_benchmark(const std::vector<QuestionTask>& tasks, Planner& planner,
                           const RunConfig& config);

/// Scores precomputed answers (id -> answer) against the tasks' gold data;
/// pipeline statistics stay zero.
MetricReport score_answers(const std::vector<QuestionTask>& tasks,
                           const std::vector<std::pair<std::string, std::string>>& answers,
                           const RunConfig& config);

/// Builds the configured planner. Throws IoError when the scripted fixture
/// file is missing and PlannerError for an unknown kind.
std::shared_ptr<Planner> make_planner(const RunConfig& config);

}  // namespace treetab
