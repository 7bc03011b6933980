#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clh/metrics.hpp"

namespace clh::corpus {

using metrics::Constraint;
using metrics::ConstraintSet;
using metrics::Position;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// Named text fields of one source record (document, reference title, topic,
// emotion, author, ...). Every field a template references must be non-empty.
struct RawRecord {
    std::map<std::string, std::string> fields;
};

struct ExampleMeta {
    ConstraintSet constraints;
    std::string author;
    std::string emotion;
    std::string topic;
    bool operator==(const ExampleMeta&) const = default;
};

struct Example {
    std::string id;
    std::string task_id;
    std::string input_text;
    std::string target_text;
    ExampleMeta meta;
    bool operator==(const Example&) const = default;
};

enum class Split { Train, Test };
std::string split_to_string(Split s);
Split split_from_string(const std::string& s);

struct TaskSpec {
    std::string task_id;
    std::string name;
    std::vector<std::string> templates;
    size_t cap = 100000;
    bool rehearsable = true;
    bool zero_shot_only = false;
    std::vector<std::string> metric_ids;
    std::string train_path;
    std::string test_path;

    // Enforces: at least one template, cap >= 1, zero-shot implies
    // non-rehearsable.
    void validate() const;
    const std::string& primary_metric() const;
};

struct Dataset {
    std::string task_id;
    Split split = Split::Train;
    std::vector<Example> examples;

    size_t size() const { return examples.size(); }
    bool empty() const { return examples.empty(); }
};

// ---------------------------------------------------------------------------
// Template rendering
// ---------------------------------------------------------------------------

// Placeholder syntax is {name}; literal braces are escaped by doubling.
// Throws naming the placeholder when a referenced field is missing or empty.
std::string render_template(const std::string& tmpl, const RawRecord& record);

// Renders one record through the task's template. Populates meta from the
// fields the template consumed (topic/author/emotion) and from keyword
// constraints. When the template carries a {keyword} placeholder and the
// record does not provide one, the keyword is derived from the record's
// target (the gold reference) with the mode implied by the template fragment.
Example render_instruction(const TaskSpec& spec, const RawRecord& record,
                           size_t template_index, uint64_t seed);

struct DerivedConstraint {
    Constraint constraint;
    std::string fragment;  // e.g. `starting with "protesters"`
};

// Selects the constraint keyword from a gold reference title: first token for
// start, last token (punctuation-stripped) for end, and a seeded uniform
// choice among content tokens for contain (stopwords excluded when
// alternatives exist).
DerivedConstraint derive_headline_constraint(const std::string& reference_title,
                                             Position mode, uint64_t seed);

struct Addition {
    enum class Kind { Constraint, Style, Emotion };
    Kind kind = Kind::Constraint;
    Constraint constraint;  // for Kind::Constraint
    std::string text;       // author or emotion
};

// Appends instruction fragments to an already-rendered example. Constraints
// join as `containing "X" and "Y"`, inserted before the first ": " separator
// when the instruction has one; style appends `, in the style of <author>`;
// emotion appends ` The associated emotion is "<emotion>".`. Application
// order is normalized to constraints, then style, then emotion. Duplicate
// keywords (within the additions or against existing constraints) throw.
Example compose_instruction(const Example& base, const std::vector<Addition>& additions);

// ---------------------------------------------------------------------------
// Dataset I/O and sampling
// ---------------------------------------------------------------------------

// Line-delimited records, one JSON object per line with fields: `input`
// (optional when raw `fields` are given), `target`, `task`, `meta`, and
// optional `id` / `template`. Missing ids are assigned `<task_id>:<line>`
// with 0-based line numbers; error messages use the same numbering.
Dataset load_dataset(const std::string& path, const TaskSpec& spec, Split split);
void save_dataset(const Dataset& d, const std::string& path);

// Exactly `cap` examples: seeded shuffle + truncate when oversized,
// whole-copy duplication plus a seeded remainder sample when undersized
// (every original appears at least floor(cap/|d|) times), identity at the
// cap. Duplicated entries keep their ids (multiset semantics).
Dataset resample_to_cap(const Dataset& d, size_t cap, uint64_t seed);

// min(n, |d|) examples, seeded uniform without replacement, original order.
Dataset subsample_eval_set(const Dataset& d, size_t n, uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic fixture suite
// ---------------------------------------------------------------------------

struct FixtureTaskConfig {
    std::string kind;     // copy | reverse | token-sort | case-marker |
                          // keyword-insertion | style-tag | first-word-question
    std::string task_id;  // defaults to kind
    size_t train_size = 500;
    size_t test_size = 100;
    size_t cap = 0;  // 0 means train_size
    bool zero_shot = false;
};

struct FixtureConfig {
    std::vector<FixtureTaskConfig> tasks;
    size_t vocab_size = 24;    // content tokens, cyclically ordered
    size_t min_len = 3;
    size_t max_len = 8;
    size_t keyword_vocab = 8;  // keyword-insertion tokens
    size_t num_authors = 4;    // style-tag authors
};

struct FixtureTask {
    TaskSpec spec;
    Dataset train;
    Dataset test;
};

// Desk-scale task suite. Content is a contiguous run over a small cyclic
// vocabulary; gold targets are computed by the named transformation. Train
// and test splits draw from disjoint (start, length) pools. Requires at
// least two tasks; unknown kinds throw.
std::vector<FixtureTask> generate_synthetic_suite(const FixtureConfig& config, uint64_t seed);

FixtureConfig fixture_config_from_json_file(const std::string& path);

TaskSpec load_task_spec(const std::string& path);
void save_task_spec(const TaskSpec& spec, const std::string& path);

// Instruction templates for the eight built-in generation task formats
// (simp, hgen, haiku, cqa, inqqg, emdg, exp, twst).
const std::map<std::string, std::vector<std::string>>& builtin_task_templates();

} // namespace clh::corpus
