#include "clh/evaluation.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "clh/rng.hpp"
#include "clh/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace clh::eval {

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string hex64(uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

metrics::ScoreItem make_score_item(const corpus::Example& ex, std::string prediction) {
    metrics::ScoreItem it;
    it.prediction = std::move(prediction);
    it.references = {ex.target_text};
    it.source = ex.input_text;
    it.constraints = ex.meta.constraints;
    it.topic = ex.meta.topic;
    return it;
}

std::vector<metrics::MetricValue> evaluate_task(const learner::LearnerState& state,
                                                const TaskBundle& task,
                                                const EvalSettings& settings) {
    const auto eval_set = corpus::subsample_eval_set(
        task.test, settings.eval_cap, derive_seed(settings.seed, "eval:" + task.spec.task_id));
    if (eval_set.empty()) {
        throw std::runtime_error("evaluate: empty test split for task " + task.spec.task_id);
    }

    const auto preds = settings.parallel
                           ? generate_batch(state, eval_set.examples, settings.max_gen_len)
                           : generate_batch_serial(state, eval_set.examples, settings.max_gen_len);

    std::vector<metrics::ScoreItem> items;
    items.reserve(eval_set.size());
    for (size_t i = 0; i < eval_set.size(); ++i) {
        items.push_back(make_score_item(eval_set.examples[i], preds[i]));
    }

    std::vector<metrics::MetricValue> out;
    out.reserve(task.spec.metric_ids.size());
    for (const auto& id : task.spec.metric_ids) {
        out.push_back(settings.parallel ? metrics::score_metric(id, items)
                                        : metrics::score_metric_serial(id, items));
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// TaskSet
// ---------------------------------------------------------------------------

const TaskBundle& TaskSet::by_id(const std::string& task_id) const {
    for (const auto& t : tasks) {
        if (t.spec.task_id == task_id) return t;
    }
    throw std::invalid_argument("missing task or test split: " + task_id);
}

bool TaskSet::has(const std::string& task_id) const {
    for (const auto& t : tasks) {
        if (t.spec.task_id == task_id) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Batch generation
// ---------------------------------------------------------------------------

std::vector<std::string> generate_batch(const learner::LearnerState& state,
                                        const std::vector<corpus::Example>& examples,
                                        size_t max_len) {
    std::vector<std::string> out(examples.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < static_cast<long long>(examples.size()); ++i) {
        out[static_cast<size_t>(i)] =
            learner::generate(state, examples[static_cast<size_t>(i)].input_text, max_len);
    }
    return out;
}

std::vector<std::string> generate_batch_serial(const learner::LearnerState& state,
                                               const std::vector<corpus::Example>& examples,
                                               size_t max_len) {
    std::vector<std::string> out(examples.size());
    for (size_t i = 0; i < examples.size(); ++i) {
        out[i] = learner::generate(state, examples[i].input_text, max_len);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Upper bounds
// ---------------------------------------------------------------------------

double UpperBounds::at(const std::string& task_id, const std::string& metric_id) const {
    auto t = values.find(task_id);
    if (t == values.end()) throw std::invalid_argument("missing upper bound for task " + task_id);
    auto m = t->second.find(metric_id);
    if (m == t->second.end()) {
        throw std::invalid_argument("missing upper bound for task " + task_id + " metric " + metric_id);
    }
    return m->second;
}

bool UpperBounds::covers(const std::vector<std::string>& task_ids) const {
    for (const auto& t : task_ids) {
        if (!values.count(t)) return false;
    }
    return true;
}

json UpperBounds::to_json() const {
    json j;
    j["values"] = values;
    j["snapshots"] = snapshot_ids;
    return j;
}

UpperBounds UpperBounds::from_json(const json& j) {
    UpperBounds ub;
    ub.values = j.at("values").get<std::map<std::string, std::map<std::string, double>>>();
    if (j.contains("snapshots")) {
        ub.snapshot_ids = j.at("snapshots").get<std::map<std::string, std::string>>();
    }
    return ub;
}

UpperBoundResult compute_upper_bound(const TaskBundle& task,
                                     const learner::LearnerState& base_state,
                                     const learner::TrainHyper& hyper, uint64_t seed,
                                     const EvalSettings& settings) {
    const auto capped = corpus::resample_to_cap(
        task.train, task.spec.cap, derive_seed(seed, "cap:" + task.spec.task_id));
    const auto stream = rehearsal::compose_training_stream(
        capped, {}, hyper.batch_size, hyper.epochs,
        derive_seed(seed, "ub-stream:" + task.spec.task_id));

    UpperBoundResult out;
    try {
        out.state = learner::train_on_stream(base_state, stream, hyper).state;
    } catch (const std::exception& e) {
        throw std::runtime_error("upper bound for task " + task.spec.task_id + ": " + e.what());
    }
    for (const auto& mv : evaluate_task(out.state, task, settings)) {
        out.values[mv.metric_id] = mv.value;
    }
    return out;
}

double relative_gain(double raw, double ub) {
    if (!(ub > 0.0)) throw std::invalid_argument("relative_gain: upper bound must be > 0");
    return raw / ub;
}

bool forgetting_flag(double final_rg, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("forgetting_flag: threshold must be in (0, 1)");
    }
    return final_rg >= 1.0 - threshold;
}

// ---------------------------------------------------------------------------
// Evaluation loop
// ---------------------------------------------------------------------------

std::vector<TaskEval> evaluate_all_tasks(const learner::LearnerState& state,
                                         const rehearsal::TaskSchedule& schedule,
                                         const TaskSet& tasks, const EvalSettings& settings) {
    std::vector<TaskEval> out;
    auto eval_one = [&](const std::string& task_id) {
        const auto& bundle = tasks.by_id(task_id);
        out.push_back({task_id, evaluate_task(state, bundle, settings)});
    };
    for (const auto& t : schedule.task_ids) eval_one(t);
    for (const auto& z : schedule.zero_shot_eval_ids) eval_one(z);
    return out;
}

double RelativeGainSeries::final_rg(const std::string& task_id,
                                    const std::string& metric_id) const {
    auto it = series.find({task_id, metric_id});
    if (it == series.end() || it->second.empty()) {
        throw std::invalid_argument("no series for " + task_id + "/" + metric_id);
    }
    return it->second.back().rg;
}

RunResult run_continual_sequence(const RunConfig& config, const TaskSet& tasks,
                                 const learner::LearnerState& base_state,
                                 const UpperBounds& ubs, const json& config_manifest) {
    if (config.r < 0.0 || config.r > 1.0) {
        throw std::invalid_argument("run_continual_sequence: r must be in [0, 1]");
    }
    config.hyper.validate();

    // Every scheduled and zero-shot task needs its UB entries up front.
    std::vector<std::string> all_ids = config.schedule.task_ids;
    all_ids.insert(all_ids.end(), config.schedule.zero_shot_eval_ids.begin(),
                   config.schedule.zero_shot_eval_ids.end());
    for (const auto& t : all_ids) {
        const auto& spec = tasks.by_id(t).spec;
        for (const auto& m : spec.metric_ids) ubs.at(t, m);
    }

    RunResult res;
    res.manifest = json::object();
    res.manifest["run_id"] = config.run_id;
    res.manifest["status"] = "incomplete";
    res.manifest["started_at"] = iso_timestamp();
    {
        json cfg = config_manifest.is_null() || config_manifest.empty() ? json::object()
                                                                        : config_manifest;
        cfg["r"] = config.r;
        cfg["schedule"] = config.schedule.task_ids;
        cfg["zero_shot"] = config.schedule.zero_shot_eval_ids;
        cfg["seeds"] = {{"data", config.seeds.data},
                        {"learner", config.seeds.learner},
                        {"eval", config.seeds.eval}};
        cfg["hyper"] = {{"learning_rate", config.hyper.learning_rate},
                        {"epochs", config.hyper.epochs},
                        {"batch_size", config.hyper.batch_size},
                        {"l2", config.hyper.l2}};
        cfg["eval_cadence"] = config.eval_cadence;
        cfg["eval_cap"] = config.eval.eval_cap;
        cfg["max_gen_len"] = config.eval.max_gen_len;
        res.manifest["config"] = cfg;
        res.manifest["config_digest"] = hex64(fnv1a64(cfg.dump()));
    }

    if (!config.out_dir.empty()) fs::create_directories(config.out_dir);

    auto write_manifest = [&] {
        if (config.out_dir.empty()) return;
        std::ofstream out(config.out_dir + "/manifest.json", std::ios::binary);
        out << res.manifest.dump(2) << "\n";
    };

    EvalSettings settings = config.eval;
    settings.seed = config.seeds.eval;

    std::map<std::pair<std::string, std::string>, double> initial_raw;
    auto record_eval = [&](const learner::LearnerState& state, size_t step) {
        for (const auto& te : evaluate_all_tasks(state, config.schedule, tasks, settings)) {
            for (const auto& mv : te.values) {
                ResultRow row;
                row.run_id = config.run_id;
                row.sequence_step = step;
                row.task_id = te.task_id;
                row.metric_id = mv.metric_id;
                row.raw = mv.value;
                row.rg = relative_gain(mv.value, ubs.at(te.task_id, mv.metric_id));
                res.rows.push_back(row);
                res.series.series[{row.task_id, row.metric_id}].push_back(
                    {step, row.raw, row.rg});
                if (step == 0) initial_raw[{row.task_id, row.metric_id}] = row.raw;
            }
        }
    };

    std::vector<std::string> buffer_paths;
    try {
        learner::LearnerState state = base_state;
        size_t global_step = 0;
        record_eval(state, global_step);

        std::vector<rehearsal::RehearsalBuffer> buffers;
        for (const auto& task_id : config.schedule.task_ids) {
            const auto& bundle = tasks.by_id(task_id);
            const auto capped = corpus::resample_to_cap(
                bundle.train, bundle.spec.cap, derive_seed(config.seeds.data, "cap:" + task_id));

            const auto stream = rehearsal::compose_training_stream(
                capped, buffers, config.hyper.batch_size, config.hyper.epochs,
                derive_seed(config.seeds.data, "stream:" + task_id));

            const size_t cadence = config.eval_cadence
                                       ? config.eval_cadence
                                       : std::max<size_t>(1, stream.total_steps() / 4);
            for (size_t b = 0; b < stream.batches.size(); ++b) {
                const double loss = learner::train_on_batch(state, stream.batches[b], config.hyper);
                if (!std::isfinite(loss)) {
                    throw std::runtime_error("task " + task_id + ": non-finite loss at batch " +
                                             std::to_string(b));
                }
                ++global_step;
                const bool last = b + 1 == stream.batches.size();
                if (!last && (b + 1) % cadence == 0) record_eval(state, global_step);
            }
            record_eval(state, global_step);  // task-completion evaluation

            // Freeze this task's buffer; re-runs load the persisted file.
            if (bundle.spec.rehearsable) {
                rehearsal::RehearsalBuffer buf;
                std::string path;
                if (!config.out_dir.empty()) {
                    path = config.out_dir + "/" +
                           rehearsal::buffer_filename(task_id, config.r, config.seeds.data);
                }
                if (!path.empty() && fs::exists(path)) {
                    buf.task_id = task_id;
                    buf.source_size = capped.size();
                    buf.examples =
                        corpus::load_dataset(path, bundle.spec, corpus::Split::Train).examples;
                } else {
                    buf = rehearsal::build_rehearsal_buffer(capped, bundle.spec,
                                                            {config.r, config.seeds.data});
                    if (!path.empty()) {
                        corpus::Dataset d;
                        d.task_id = task_id;
                        d.split = corpus::Split::Train;
                        d.examples = buf.examples;
                        corpus::save_dataset(d, path);
                    }
                }
                if (!path.empty()) buffer_paths.push_back(path);
                buffers.push_back(std::move(buf));
            }
        }

        for (const auto& task_id : config.schedule.task_ids) {
            const auto& spec = tasks.by_id(task_id).spec;
            res.series.retained[task_id] =
                forgetting_flag(res.series.final_rg(task_id, spec.primary_metric()));
        }
        res.final_state = std::move(state);
    } catch (...) {
        res.manifest["artifacts"] = {{"buffers", buffer_paths}};
        write_manifest();
        throw;
    }

    res.manifest["status"] = "complete";
    res.manifest["finished_at"] = iso_timestamp();
    res.manifest["results_digest"] = results_digest(res.rows);

    json artifacts;
    artifacts["buffers"] = buffer_paths;
    if (!config.out_dir.empty()) {
        const std::string results_path = config.out_dir + "/results.jsonl";
        save_results_jsonl(res.rows, results_path);
        artifacts["results"] = results_path;

        const std::string delta_path = config.out_dir + "/delta_vs_initial.jsonl";
        {
            std::ofstream out(delta_path, std::ios::binary);
            for (const auto& row : res.rows) {
                const double initial = initial_raw[{row.task_id, row.metric_id}];
                json j;
                j["run_id"] = row.run_id;
                j["step"] = row.sequence_step;
                j["task"] = row.task_id;
                j["metric"] = row.metric_id;
                j["raw"] = row.raw;
                j["initial"] = initial;
                j["delta_vs_initial"] =
                    initial != 0.0 ? (row.raw - initial) / initial : row.raw - initial;
                out << j.dump() << "\n";
            }
        }
        artifacts["delta_vs_initial"] = delta_path;

        const std::string snap_path = config.out_dir + "/final.state";
        learner::save_snapshot_file(res.final_state, snap_path);
        artifacts["final_snapshot"] = snap_path;
    }
    res.manifest["artifacts"] = artifacts;
    write_manifest();
    return res;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

OrderInvarianceReport order_invariance_report(const RelativeGainSeries& forward,
                                              const RelativeGainSeries& reversed,
                                              double tolerance) {
    std::set<std::pair<std::string, std::string>> fwd_keys, rev_keys;
    for (const auto& [k, _] : forward.series) fwd_keys.insert(k);
    for (const auto& [k, _] : reversed.series) rev_keys.insert(k);
    if (fwd_keys != rev_keys) {
        throw std::invalid_argument("order_invariance_report: mismatched task sets");
    }

    OrderInvarianceReport rep;
    rep.tolerance = tolerance;
    rep.pass = true;
    for (const auto& [key, _] : forward.series) {
        const double gap =
            std::abs(forward.final_rg(key.first, key.second) - reversed.final_rg(key.first, key.second));
        rep.gaps[key.first + "/" + key.second] = gap;
        if (gap > tolerance) rep.pass = false;
    }
    return rep;
}

namespace {

std::string constraint_fragment(const metrics::Constraint& c) {
    switch (c.position) {
        case metrics::Position::Start: return "starting with \"" + c.keyword + "\"";
        case metrics::Position::End: return "ending with \"" + c.keyword + "\"";
        case metrics::Position::Contain: return "that contains \"" + c.keyword + "\"";
    }
    return "";
}

// Removes the rendered constraint clauses from an instruction, recovering the
// unconstrained base prompt of constraint-bearing tasks.
corpus::Example strip_constraint_clauses(const corpus::Example& ex) {
    corpus::Example base = ex;
    for (const auto& c : base.meta.constraints) {
        const std::string frags[] = {", " + constraint_fragment(c), " " + constraint_fragment(c),
                                     ", containing \"" + c.keyword + "\"",
                                     " containing \"" + c.keyword + "\""};
        for (const std::string& frag : frags) {
            const size_t pos = base.input_text.find(frag);
            if (pos != std::string::npos) {
                base.input_text.erase(pos, frag.size());
                break;
            }
        }
    }
    base.meta.constraints.clear();
    return base;
}

} // namespace

CompositionReport compositionality_sweep(const learner::LearnerState& state,
                                         const TaskBundle& base_task, size_t n_constraints,
                                         uint64_t seed, const EvalSettings& settings) {
    if (n_constraints < 1 || n_constraints > 3) {
        throw std::invalid_argument("compositionality_sweep: n_constraints must be in 1..3");
    }
    bool constraint_bearing = false;
    for (const auto& t : base_task.spec.templates) {
        if (t.find("{keyword}") != std::string::npos) constraint_bearing = true;
    }
    if (!constraint_bearing) {
        throw std::invalid_argument("compositionality_sweep: task " + base_task.spec.task_id +
                                    " has no constraint-bearing templates");
    }

    // Keyword pool: tokens appearing in the task's gold targets.
    std::set<std::string> pool_set;
    for (const auto& ex : base_task.test.examples) {
        for (const auto& t : split_ws(ex.target_text)) {
            const std::string k = strip_terminal_punct(t);
            if (!k.empty() && k != "\"") pool_set.insert(k);
        }
    }
    std::vector<std::string> pool(pool_set.begin(), pool_set.end());
    if (pool.size() < 3) {
        throw std::invalid_argument("compositionality_sweep: gold-target keyword pool too small");
    }

    const auto eval_set = corpus::subsample_eval_set(base_task.test, settings.eval_cap,
                                                     derive_seed(seed, "comp-eval"));
    Rng rng(derive_seed(seed, "comp-draw"));

    std::vector<corpus::Example> bases;
    bases.reserve(eval_set.size());
    for (const auto& ex : eval_set.examples) bases.push_back(strip_constraint_clauses(ex));

    // Per example and per n, a fresh distinct keyword set.
    std::vector<std::vector<metrics::ConstraintSet>> drawn(eval_set.size());
    std::vector<corpus::Example> composed;
    composed.reserve(eval_set.size() * n_constraints);
    for (size_t i = 0; i < bases.size(); ++i) {
        for (size_t n = 1; n <= n_constraints; ++n) {
            metrics::ConstraintSet cs;
            std::set<size_t> used;
            while (cs.size() < n) {
                const size_t j = rng.bounded(pool.size());
                if (used.insert(j).second) {
                    cs.push_back({pool[j], metrics::Position::Contain});
                }
            }
            drawn[i].push_back(cs);

            std::vector<corpus::Addition> adds;
            for (const auto& c : cs) {
                adds.push_back({corpus::Addition::Kind::Constraint, c, ""});
            }
            composed.push_back(corpus::compose_instruction(bases[i], adds));
        }
    }

    const auto control_preds = settings.parallel
                                   ? generate_batch(state, bases, settings.max_gen_len)
                                   : generate_batch_serial(state, bases, settings.max_gen_len);
    const auto composed_preds = settings.parallel
                                    ? generate_batch(state, composed, settings.max_gen_len)
                                    : generate_batch_serial(state, composed, settings.max_gen_len);

    CompositionReport rep;
    rep.items = eval_set.size();
    for (size_t n = 1; n <= n_constraints; ++n) {
        size_t ok = 0, ok_control = 0;
        for (size_t i = 0; i < bases.size(); ++i) {
            const auto& cs = drawn[i][n - 1];
            const auto& gen = composed_preds[i * n_constraints + (n - 1)];
            if (metrics::constraint_satisfaction(gen, cs).fully_respected) ++ok;
            if (metrics::constraint_satisfaction(control_preds[i], cs).fully_respected) ++ok_control;
        }
        rep.constrained[n] = static_cast<double>(ok) / static_cast<double>(bases.size());
        rep.control[n] = static_cast<double>(ok_control) / static_cast<double>(bases.size());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Result files
// ---------------------------------------------------------------------------

void save_results_jsonl(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write results " + path);
    for (const auto& r : rows) {
        json j;
        j["run_id"] = r.run_id;
        j["sequence_step"] = r.sequence_step;
        j["task_id"] = r.task_id;
        j["metric_id"] = r.metric_id;
        j["raw"] = r.raw;
        j["rg"] = r.rg;
        out << j.dump() << "\n";
    }
}

std::vector<ResultRow> load_results_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results " + path);
    std::vector<ResultRow> rows;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            ++line_no;
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        ResultRow r;
        r.run_id = j.value("run_id", "");
        r.sequence_step = j.at("sequence_step").get<size_t>();
        r.task_id = j.at("task_id").get<std::string>();
        r.metric_id = j.at("metric_id").get<std::string>();
        r.raw = j.at("raw").get<double>();
        r.rg = j.at("rg").get<double>();
        rows.push_back(std::move(r));
        ++line_no;
    }
    return rows;
}

RelativeGainSeries series_from_rows(const std::vector<ResultRow>& rows) {
    RelativeGainSeries s;
    for (const auto& r : rows) {
        s.series[{r.task_id, r.metric_id}].push_back({r.sequence_step, r.raw, r.rg});
    }
    for (auto& [_, pts] : s.series) {
        std::stable_sort(pts.begin(), pts.end(),
                         [](const SeriesPoint& a, const SeriesPoint& b) { return a.step < b.step; });
    }
    return s;
}

std::string results_digest(const std::vector<ResultRow>& rows) {
    uint64_t h = fnv1a64("results");
    for (const auto& r : rows) {
        h = fnv1a64(r.run_id, h);
        h = fnv1a64(std::to_string(r.sequence_step), h);
        h = fnv1a64(r.task_id, h);
        h = fnv1a64(r.metric_id, h);
        h = fnv1a64(hex64(std::bit_cast<uint64_t>(r.raw)), h);
        h = fnv1a64(hex64(std::bit_cast<uint64_t>(r.rg)), h);
    }
    return hex64(h);
}

namespace {

std::vector<size_t> collect_steps(const RelativeGainSeries& series) {
    std::set<size_t> steps;
    for (const auto& [_, pts] : series.series) {
        for (const auto& p : pts) steps.insert(p.step);
    }
    return {steps.begin(), steps.end()};
}

std::optional<double> rg_at(const RelativeGainSeries& series, const std::string& task,
                            const std::string& metric, size_t step) {
    auto it = series.series.find({task, metric});
    if (it == series.series.end()) return std::nullopt;
    for (const auto& p : it->second) {
        if (p.step == step) return p.rg;
    }
    return std::nullopt;
}

} // namespace

std::string series_to_csv(const RelativeGainSeries& series,
                          const std::vector<std::string>& task_order,
                          const std::map<std::string, std::string>& primary_metric) {
    std::ostringstream out;
    out << "step";
    for (const auto& t : task_order) out << "," << t;
    out << "\n";
    for (size_t step : collect_steps(series)) {
        out << step;
        for (const auto& t : task_order) {
            out << ",";
            const auto v = rg_at(series, t, primary_metric.at(t), step);
            if (v) out << *v;
        }
        out << "\n";
    }
    return out.str();
}

std::string series_to_svg(const RelativeGainSeries& series,
                          const std::vector<std::string>& task_order,
                          const std::map<std::string, std::string>& primary_metric) {
    static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    const auto steps = collect_steps(series);
    if (steps.empty()) throw std::invalid_argument("series_to_svg: empty series");

    const double width = 840, height = 420, ml = 60, mr = 150, mt = 20, mb = 40;
    const double x0 = ml, x1 = width - mr, y0 = height - mb, y1 = mt;
    const double max_step = static_cast<double>(steps.back());
    double max_rg = 1.05;
    for (const auto& [_, pts] : series.series) {
        for (const auto& p : pts) max_rg = std::max(max_rg, p.rg * 1.05);
    }

    auto sx = [&](double s) { return max_step > 0 ? x0 + (x1 - x0) * s / max_step : x0; };
    auto sy = [&](double r) { return y0 - (y0 - y1) * r / max_rg; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << height - 8
        << "\" font-size=\"12\" text-anchor=\"middle\">training batches</text>\n";
    out << "<text x=\"14\" y=\"" << (y0 + y1) / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << (y0 + y1) / 2 << ")\">relative gain</text>\n";
    // reference line at RG = 1
    out << "<line x1=\"" << x0 << "\" y1=\"" << sy(1.0) << "\" x2=\"" << x1 << "\" y2=\""
        << sy(1.0) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";

    for (size_t i = 0; i < task_order.size(); ++i) {
        const auto& task = task_order[i];
        const auto it = series.series.find({task, primary_metric.at(task)});
        if (it == series.series.end()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << kColors[i % 8]
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : it->second) {
            out << sx(static_cast<double>(p.step)) << "," << sy(p.rg) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << x1 + 10 << "\" y=\"" << mt + 16 * static_cast<double>(i + 1)
            << "\" font-size=\"12\" fill=\"" << kColors[i % 8] << "\">" << task << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace clh::eval
