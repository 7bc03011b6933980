#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clh/corpus.hpp"
#include "clh/learner.hpp"
#include "clh/metrics.hpp"
#include "clh/rehearsal.hpp"

namespace clh::eval {

// ---------------------------------------------------------------------------
// Task material and settings
// ---------------------------------------------------------------------------

struct TaskBundle {
    corpus::TaskSpec spec;
    corpus::Dataset train;
    corpus::Dataset test;
};

struct TaskSet {
    std::vector<TaskBundle> tasks;

    const TaskBundle& by_id(const std::string& task_id) const;
    bool has(const std::string& task_id) const;
};

struct EvalSettings {
    size_t eval_cap = 1000;   // Appendix-style evaluation subsample
    uint64_t seed = 0;        // subsample seed, shared by UB and run evals
    size_t max_gen_len = 16;  // greedy decoding cap
    bool parallel = true;     // OpenMP fan-out over eval examples
};

// ---------------------------------------------------------------------------
// Batch generation kernels
// ---------------------------------------------------------------------------

// Greedy decoding for a batch of examples from one frozen state. The OpenMP
// kernel parallelizes over examples; generation is pure per example, so its
// output is bit-identical to the serial reference kept for testing.
std::vector<std::string> generate_batch(const learner::LearnerState& state,
                                        const std::vector<corpus::Example>& examples,
                                        size_t max_len);
std::vector<std::string> generate_batch_serial(const learner::LearnerState& state,
                                               const std::vector<corpus::Example>& examples,
                                               size_t max_len);

// ---------------------------------------------------------------------------
// Upper bounds and relative gain
// ---------------------------------------------------------------------------

struct UpperBounds {
    // task -> metric -> score of the single-task fine-tune from the base state
    std::map<std::string, std::map<std::string, double>> values;
    std::map<std::string, std::string> snapshot_ids;

    double at(const std::string& task_id, const std::string& metric_id) const;
    bool covers(const std::vector<std::string>& task_ids) const;

    nlohmann::json to_json() const;
    static UpperBounds from_json(const nlohmann::json& j);
};

struct UpperBoundResult {
    std::map<std::string, double> values;  // metric -> score
    learner::LearnerState state;           // the single-task fine-tuned snapshot
};

// Clones the base state, trains on the task alone (capped, no rehearsal) and
// evaluates its metrics on the test split.
UpperBoundResult compute_upper_bound(const TaskBundle& task,
                                     const learner::LearnerState& base_state,
                                     const learner::TrainHyper& hyper, uint64_t seed,
                                     const EvalSettings& settings);

// raw / ub; ub must be > 0. Values above 1 are legitimate.
double relative_gain(double raw, double ub);

// true (retained) iff final_rg >= 1 - threshold; the boundary is inclusive.
bool forgetting_flag(double final_rg, double threshold = 0.02);

// ---------------------------------------------------------------------------
// Evaluation and the sequential run loop
// ---------------------------------------------------------------------------

struct TaskEval {
    std::string task_id;
    std::vector<metrics::MetricValue> values;
};

// Evaluates every scheduled task and every zero-shot task: subsample the test
// split to eval_cap, decode greedily, score the task's metric set.
std::vector<TaskEval> evaluate_all_tasks(const learner::LearnerState& state,
                                         const rehearsal::TaskSchedule& schedule,
                                         const TaskSet& tasks, const EvalSettings& settings);

struct ResultRow {
    std::string run_id;
    size_t sequence_step = 0;
    std::string task_id;
    std::string metric_id;
    double raw = 0.0;
    double rg = 0.0;  // raw / UB
};

struct SeriesPoint {
    size_t step = 0;
    double raw = 0.0;
    double rg = 0.0;
};

struct RelativeGainSeries {
    // (task, metric) -> points at strictly increasing sequence steps
    std::map<std::pair<std::string, std::string>, std::vector<SeriesPoint>> series;
    // final-step retention flag per scheduled task, on its primary metric
    std::map<std::string, bool> retained;

    double final_rg(const std::string& task_id, const std::string& metric_id) const;
};

struct RunSeeds {
    uint64_t data = 1;
    uint64_t learner = 2;
    uint64_t eval = 3;
};

struct RunConfig {
    std::string run_id = "run";
    rehearsal::TaskSchedule schedule;
    double r = 0.01;
    RunSeeds seeds;
    learner::TrainHyper hyper;
    size_t eval_cadence = 0;  // batches between in-task evaluations; 0 = 4 per task
    EvalSettings eval;
    std::string out_dir;      // artifact directory; empty = no persistence
};

struct RunResult {
    RelativeGainSeries series;
    std::vector<ResultRow> rows;
    nlohmann::json manifest;
    learner::LearnerState final_state;
};

// The sequential protocol: for each scheduled task, compose the rehearsal-
// augmented stream from the frozen buffers of the completed tasks, train,
// and evaluate all tasks (including zero-shot ones) every eval_cadence
// batches and at task completion. Buffers freeze at task completion and are
// persisted under out_dir (re-runs load them instead of resampling). Any
// sub-step error still writes a manifest flagged incomplete before
// propagating.
RunResult run_continual_sequence(const RunConfig& config, const TaskSet& tasks,
                                 const learner::LearnerState& base_state,
                                 const UpperBounds& ubs,
                                 const nlohmann::json& config_manifest = {});

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct OrderInvarianceReport {
    std::map<std::string, double> gaps;  // "task/metric" -> |RG_fwd - RG_rev|
    double tolerance = 0.0;
    bool pass = false;
};

OrderInvarianceReport order_invariance_report(const RelativeGainSeries& forward,
                                              const RelativeGainSeries& reversed,
                                              double tolerance);

struct CompositionReport {
    // n -> fraction of prompts whose n added constraints were all respected
    std::map<size_t, double> constrained;
    // same keyword sets checked against generations from unconstrained prompts
    std::map<size_t, double> control;
    size_t items = 0;
};

// Composes 1..n_constraints contain-constraints onto the base task's
// unconstrained instruction (keywords drawn from the task's gold-target token
// pool) and reports full-satisfaction rates next to the no-constraint
// control. n_constraints must be in 1..3.
CompositionReport compositionality_sweep(const learner::LearnerState& state,
                                         const TaskBundle& base_task, size_t n_constraints,
                                         uint64_t seed, const EvalSettings& settings);

// ---------------------------------------------------------------------------
// Result file formats
// ---------------------------------------------------------------------------

void save_results_jsonl(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> load_results_jsonl(const std::string& path);
RelativeGainSeries series_from_rows(const std::vector<ResultRow>& rows);

// FNV digest over the serialized rows; manifests embed it so reruns can be
// checked bit-for-bit.
std::string results_digest(const std::vector<ResultRow>& rows);

// CSV with a step column and one RG column per scheduled task (primary
// metric); SVG renders one polyline per task.
std::string series_to_csv(const RelativeGainSeries& series,
                          const std::vector<std::string>& task_order,
                          const std::map<std::string, std::string>& primary_metric);
std::string series_to_svg(const RelativeGainSeries& series,
                          const std::vector<std::string>& task_order,
                          const std::map<std::string, std::string>& primary_metric);

} // namespace clh::eval
