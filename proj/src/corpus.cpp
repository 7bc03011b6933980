#include "clh/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "clh/rng.hpp"
#include "clh/text.hpp"

using nlohmann::json;

namespace clh::corpus {

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> sw = {
        "a", "an", "the", "of", "in", "on", "at", "to", "for", "as", "by",
        "with", "from", "and", "or", "but", "is", "are", "was", "were", "be",
        "been", "being", "it", "its", "this", "that", "these", "those", "his",
        "her", "their", "our", "your", "my"};
    return sw;
}

std::string quote_str(const std::string& s) { return "\"" + s + "\""; }

json meta_to_json(const ExampleMeta& m) {
    json j = json::object();
    if (!m.constraints.empty()) {
        json cs = json::array();
        for (const auto& c : m.constraints) {
            cs.push_back({{"keyword", c.keyword},
                          {"position", metrics::position_to_string(c.position)}});
        }
        j["constraints"] = cs;
    }
    if (!m.author.empty()) j["author"] = m.author;
    if (!m.emotion.empty()) j["emotion"] = m.emotion;
    if (!m.topic.empty()) j["topic"] = m.topic;
    return j;
}

ExampleMeta meta_from_json(const json& j) {
    ExampleMeta m;
    if (j.contains("constraints")) {
        for (const auto& c : j.at("constraints")) {
            m.constraints.push_back(
                {c.at("keyword").get<std::string>(),
                 metrics::position_from_string(c.at("position").get<std::string>())});
        }
    }
    m.author = j.value("author", "");
    m.emotion = j.value("emotion", "");
    m.topic = j.value("topic", "");
    return m;
}

} // namespace

std::string split_to_string(Split s) { return s == Split::Train ? "train" : "test"; }

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "test") return Split::Test;
    throw std::invalid_argument("unknown split: " + s);
}

void TaskSpec::validate() const {
    if (task_id.empty()) throw std::invalid_argument("TaskSpec: empty task_id");
    if (templates.empty()) throw std::invalid_argument("TaskSpec " + task_id + ": no templates");
    if (cap < 1) throw std::invalid_argument("TaskSpec " + task_id + ": cap must be >= 1");
    if (zero_shot_only && rehearsable) {
        throw std::invalid_argument("TaskSpec " + task_id + ": zero-shot tasks are never rehearsed");
    }
}

const std::string& TaskSpec::primary_metric() const {
    if (metric_ids.empty()) throw std::logic_error("TaskSpec " + task_id + ": no metrics");
    return metric_ids.front();
}

// ---------------------------------------------------------------------------
// Template rendering
// ---------------------------------------------------------------------------

std::string render_template(const std::string& tmpl, const RawRecord& record) {
    std::string out;
    out.reserve(tmpl.size());
    for (size_t i = 0; i < tmpl.size();) {
        const char c = tmpl[i];
        if (c == '{') {
            if (i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
                out += '{';
                i += 2;
                continue;
            }
            const size_t close = tmpl.find('}', i + 1);
            if (close == std::string::npos) {
                throw std::invalid_argument("template: unterminated placeholder");
            }
            const std::string name = tmpl.substr(i + 1, close - i - 1);
            auto it = record.fields.find(name);
            if (it == record.fields.end() || trim(it->second).empty()) {
                throw std::invalid_argument("template: unresolved placeholder '" + name + "'");
            }
            out += it->second;
            i = close + 1;
        } else if (c == '}' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
            out += '}';
            i += 2;
        } else {
            out += c;
            ++i;
        }
    }
    return out;
}

namespace {

std::vector<std::string> template_placeholders(const std::string& tmpl) {
    std::vector<std::string> names;
    for (size_t i = 0; i < tmpl.size();) {
        if (tmpl[i] == '{') {
            if (i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
                i += 2;
                continue;
            }
            const size_t close = tmpl.find('}', i + 1);
            if (close == std::string::npos) break;
            names.push_back(tmpl.substr(i + 1, close - i - 1));
            i = close + 1;
        } else {
            ++i;
        }
    }
    return names;
}

Position infer_mode_from_template(const std::string& tmpl) {
    if (tmpl.find("starting with") != std::string::npos) return Position::Start;
    if (tmpl.find("ending with") != std::string::npos) return Position::End;
    return Position::Contain;
}

} // namespace

Example render_instruction(const TaskSpec& spec, const RawRecord& record,
                           size_t template_index, uint64_t seed) {
    if (template_index >= spec.templates.size()) {
        throw std::out_of_range("render_instruction: template index " +
                                std::to_string(template_index) + " out of range for task " +
                                spec.task_id);
    }
    const std::string& tmpl = spec.templates[template_index];
    const auto names = template_placeholders(tmpl);

    RawRecord effective = record;
    Example ex;
    ex.task_id = spec.task_id;

    const bool wants_keyword = std::find(names.begin(), names.end(), "keyword") != names.end();
    if (wants_keyword) {
        Position mode;
        auto mode_it = record.fields.find("mode");
        if (mode_it != record.fields.end()) mode = metrics::position_from_string(mode_it->second);
        else mode = infer_mode_from_template(tmpl);

        auto kw_it = record.fields.find("keyword");
        if (kw_it != record.fields.end() && !trim(kw_it->second).empty()) {
            ex.meta.constraints.push_back({kw_it->second, mode});
        } else {
            auto title_it = record.fields.find("target");
            if (title_it == record.fields.end()) {
                throw std::invalid_argument(
                    "render_instruction: no keyword and no target to derive it from");
            }
            const auto derived = derive_headline_constraint(title_it->second, mode, seed);
            effective.fields["keyword"] = derived.constraint.keyword;
            ex.meta.constraints.push_back(derived.constraint);
        }
    }

    ex.input_text = render_template(tmpl, effective);
    auto tgt = record.fields.find("target");
    if (tgt != record.fields.end()) ex.target_text = tgt->second;

    for (const auto& n : names) {
        if (n == "topic") ex.meta.topic = effective.fields.at(n);
        else if (n == "author") ex.meta.author = effective.fields.at(n);
        else if (n == "emotion") ex.meta.emotion = effective.fields.at(n);
    }
    return ex;
}

DerivedConstraint derive_headline_constraint(const std::string& reference_title,
                                             Position mode, uint64_t seed) {
    const auto toks = split_ws(reference_title);
    if (toks.empty()) throw std::invalid_argument("derive_headline_constraint: empty title");

    std::string keyword;
    switch (mode) {
        case Position::Start:
            keyword = toks.front();
            break;
        case Position::End: {
            for (auto it = toks.rbegin(); it != toks.rend(); ++it) {
                const std::string stripped = strip_terminal_punct(*it);
                if (!stripped.empty()) {
                    keyword = stripped;
                    break;
                }
            }
            if (keyword.empty()) keyword = toks.back();
            break;
        }
        case Position::Contain: {
            std::vector<std::string> content;
            for (const auto& t : toks) {
                const std::string stripped = strip_terminal_punct(t);
                if (!stripped.empty() && !stopwords().count(lower(stripped))) {
                    content.push_back(stripped);
                }
            }
            if (content.empty()) {
                for (const auto& t : toks) {
                    const std::string stripped = strip_terminal_punct(t);
                    if (!stripped.empty()) content.push_back(stripped);
                }
            }
            if (content.empty()) content.push_back(toks.front());
            Rng rng(seed);
            keyword = content[rng.bounded(content.size())];
            break;
        }
    }

    DerivedConstraint out;
    out.constraint = {keyword, mode};
    switch (mode) {
        case Position::Start: out.fragment = "starting with " + quote_str(keyword); break;
        case Position::End: out.fragment = "ending with " + quote_str(keyword); break;
        case Position::Contain: out.fragment = "that contains " + quote_str(keyword); break;
    }
    return out;
}

Example compose_instruction(const Example& base, const std::vector<Addition>& additions) {
    if (additions.empty()) throw std::invalid_argument("compose_instruction: no additions");

    std::vector<Constraint> new_constraints;
    std::string style_author;
    std::string emotion;
    for (const auto& a : additions) {
        switch (a.kind) {
            case Addition::Kind::Constraint: new_constraints.push_back(a.constraint); break;
            case Addition::Kind::Style: style_author = a.text; break;
            case Addition::Kind::Emotion: emotion = a.text; break;
        }
    }

    std::set<std::string> seen;
    for (const auto& c : base.meta.constraints) seen.insert(c.keyword);
    for (const auto& c : new_constraints) {
        if (!seen.insert(c.keyword).second) {
            throw std::invalid_argument("compose_instruction: duplicate keyword '" + c.keyword + "'");
        }
    }

    Example out = base;

    // Fragments attach either before the first ": " separator (instructions of
    // the form "<instruction>: <payload>") or at the end.
    auto attach = [&](const std::string& fragment, bool comma_when_appending) {
        const size_t colon = out.input_text.find(": ");
        if (colon != std::string::npos) {
            out.input_text.insert(colon, " " + fragment);
        } else {
            out.input_text += (comma_when_appending ? ", " : " ") + fragment;
        }
    };

    if (!new_constraints.empty()) {
        std::string clause = "containing ";
        for (size_t i = 0; i < new_constraints.size(); ++i) {
            if (i) clause += " and ";
            clause += quote_str(new_constraints[i].keyword);
        }
        attach(clause, true);
        for (const auto& c : new_constraints) out.meta.constraints.push_back(c);
    }
    if (!style_author.empty()) {
        attach("in the style of " + style_author, true);
        out.meta.author = style_author;
    }
    if (!emotion.empty()) {
        out.input_text += " The associated emotion is " + quote_str(emotion) + ".";
        out.meta.emotion = emotion;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset I/O
// ---------------------------------------------------------------------------

Dataset load_dataset(const std::string& path, const TaskSpec& spec, Split split) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path);

    Dataset d;
    d.task_id = spec.task_id;
    d.split = split;

    std::set<std::string> ids;
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
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": malformed record: " + e.what());
        }
        if (!j.is_object()) {
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": malformed record: not an object");
        }

        Example ex;
        ex.task_id = j.value("task", spec.task_id);
        ex.id = j.value("id", spec.task_id + ":" + std::to_string(line_no));
        const std::string target = j.value("target", "");

        if (j.contains("input") && !j.at("input").get<std::string>().empty()) {
            ex.input_text = j.at("input").get<std::string>();
            ex.target_text = target;
            if (j.contains("meta")) ex.meta = meta_from_json(j.at("meta"));
        } else if (j.contains("fields")) {
            RawRecord rec;
            for (const auto& [k, v] : j.at("fields").items()) {
                rec.fields[k] = v.get<std::string>();
            }
            if (!target.empty()) rec.fields["target"] = target;
            const size_t tidx = j.value("template", 0);
            Example rendered;
            try {
                rendered = render_instruction(
                    spec, rec, tidx, derive_seed(fnv1a64(spec.task_id), std::to_string(line_no)));
            } catch (const std::exception& e) {
                throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + e.what());
            }
            ex.input_text = rendered.input_text;
            ex.target_text = rendered.target_text;
            ex.meta = rendered.meta;
            if (j.contains("meta")) {
                const auto explicit_meta = meta_from_json(j.at("meta"));
                if (!explicit_meta.constraints.empty()) ex.meta.constraints = explicit_meta.constraints;
                if (!explicit_meta.author.empty()) ex.meta.author = explicit_meta.author;
                if (!explicit_meta.emotion.empty()) ex.meta.emotion = explicit_meta.emotion;
                if (!explicit_meta.topic.empty()) ex.meta.topic = explicit_meta.topic;
            }
        } else {
            throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": missing input");
        }

        if (split == Split::Train && ex.target_text.empty()) {
            throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": missing target");
        }
        if (!ids.insert(ex.id).second) {
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": duplicate id '" + ex.id + "'");
        }
        d.examples.push_back(std::move(ex));
        ++line_no;
    }
    return d;
}

void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
    for (const auto& ex : d.examples) {
        json j;
        j["id"] = ex.id;
        j["task"] = ex.task_id;
        j["input"] = ex.input_text;
        j["target"] = ex.target_text;
        const json m = meta_to_json(ex.meta);
        if (!m.empty()) j["meta"] = m;
        out << j.dump() << "\n";
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

Dataset resample_to_cap(const Dataset& d, size_t cap, uint64_t seed) {
    if (d.empty()) throw std::invalid_argument("resample_to_cap: empty dataset");
    if (cap < 1) throw std::invalid_argument("resample_to_cap: cap must be >= 1");
    if (d.size() == cap) return d;

    Dataset out;
    out.task_id = d.task_id;
    out.split = d.split;
    Rng rng(seed);

    if (d.size() > cap) {
        std::vector<size_t> idx(d.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        rng.shuffle(idx);
        idx.resize(cap);
        out.examples.reserve(cap);
        for (size_t i : idx) out.examples.push_back(d.examples[i]);
        return out;
    }

    // Undersized: whole copies plus a seeded remainder, so every original
    // appears floor(cap/|d|) or floor(cap/|d|)+1 times.
    const size_t copies = cap / d.size();
    const size_t rem = cap % d.size();
    out.examples.reserve(cap);
    for (size_t k = 0; k < copies; ++k) {
        for (const auto& ex : d.examples) out.examples.push_back(ex);
    }
    for (size_t i : rng.sample_without_replacement(d.size(), rem)) {
        out.examples.push_back(d.examples[i]);
    }
    return out;
}

Dataset subsample_eval_set(const Dataset& d, size_t n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("subsample_eval_set: n must be >= 1");
    if (d.size() <= n) return d;

    Rng rng(seed);
    auto idx = rng.sample_without_replacement(d.size(), n);
    std::sort(idx.begin(), idx.end());

    Dataset out;
    out.task_id = d.task_id;
    out.split = d.split;
    out.examples.reserve(n);
    for (size_t i : idx) out.examples.push_back(d.examples[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic fixtures
// ---------------------------------------------------------------------------

namespace {

std::string content_token(size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "c%02zu", i + 1);
    return buf;
}

std::string keyword_token(size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "k%02zu", i + 1);
    return buf;
}

std::string author_token(size_t i) { return "a" + std::to_string(i + 1); }

std::string transform_target(const std::string& kind, const std::vector<std::string>& content,
                             const std::string& keyword, Position mode, const std::string& author,
                             size_t start_index) {
    if (kind == "copy") return join(content);
    if (kind == "reverse") {
        std::vector<std::string> r(content.rbegin(), content.rend());
        return join(r);
    }
    if (kind == "token-sort") {
        std::vector<std::string> s = content;
        std::sort(s.begin(), s.end());
        return join(s);
    }
    if (kind == "case-marker") {
        std::vector<std::string> u;
        u.reserve(content.size());
        for (const auto& t : content) {
            std::string x = t;
            for (char& c : x) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            u.push_back(x);
        }
        return join(u);
    }
    if (kind == "keyword-insertion") {
        std::vector<std::string> t = content;
        // `contain` places the keyword up front as well: any position satisfies
        // the constraint, and a fixed slot keeps the rule learnable.
        switch (mode) {
            case Position::Start:
            case Position::Contain: t.insert(t.begin(), keyword); break;
            case Position::End: t.push_back(keyword); break;
        }
        return join(t);
    }
    if (kind == "style-tag") return join(content) + " " + author;
    if (kind == "first-word-question") {
        static const char* qwords[3] = {"why", "how", "what"};
        return std::string(qwords[start_index % 3]) + " " + join(content) + " ?";
    }
    throw std::invalid_argument("unknown fixture task kind: " + kind);
}

std::vector<std::string> fixture_templates(const std::string& kind, const std::string& task_id) {
    if (kind == "keyword-insertion") {
        return {task_id + " , starting with \"{keyword}\" : \" {content} \"",
                task_id + " , ending with \"{keyword}\" : \" {content} \"",
                task_id + " , that contains \"{keyword}\" : \" {content} \""};
    }
    if (kind == "style-tag") return {task_id + " by {author} : \" {content} \""};
    return {task_id + " : \" {content} \""};
}

} // namespace

std::vector<FixtureTask> generate_synthetic_suite(const FixtureConfig& config, uint64_t seed) {
    static const std::set<std::string> kinds = {
        "copy", "reverse", "token-sort", "case-marker",
        "keyword-insertion", "style-tag", "first-word-question"};

    if (config.tasks.size() < 2) {
        throw std::invalid_argument("generate_synthetic_suite: need at least 2 tasks");
    }
    if (config.vocab_size < 2 || config.min_len < 1 || config.max_len < config.min_len) {
        throw std::invalid_argument("generate_synthetic_suite: bad content configuration");
    }
    for (const auto& t : config.tasks) {
        if (!kinds.count(t.kind)) {
            throw std::invalid_argument("generate_synthetic_suite: unknown task kind '" + t.kind + "'");
        }
    }

    const size_t V = config.vocab_size;
    std::vector<FixtureTask> out;
    std::set<std::string> used_ids;

    for (const auto& cfg : config.tasks) {
        FixtureTask ft;
        const std::string task_id = cfg.task_id.empty() ? cfg.kind : cfg.task_id;
        if (!used_ids.insert(task_id).second) {
            throw std::invalid_argument("generate_synthetic_suite: duplicate task id " + task_id);
        }

        ft.spec.task_id = task_id;
        ft.spec.name = cfg.kind + " fixture";
        ft.spec.templates = fixture_templates(cfg.kind, task_id);
        ft.spec.cap = cfg.cap ? cfg.cap : cfg.train_size;
        ft.spec.zero_shot_only = cfg.zero_shot;
        ft.spec.rehearsable = !cfg.zero_shot;
        ft.spec.metric_ids = {"exact_match"};
        if (cfg.kind == "keyword-insertion") ft.spec.metric_ids.push_back("constraint");
        ft.spec.validate();

        // Disjoint (start, length) pools for train and test.
        std::vector<std::pair<size_t, size_t>> combos;
        for (size_t s = 0; s < V; ++s) {
            for (size_t len = config.min_len; len <= config.max_len; ++len) combos.emplace_back(s, len);
        }
        Rng pool_rng(derive_seed(seed, "pool:" + task_id));
        pool_rng.shuffle(combos);
        const size_t test_count = std::max<size_t>(1, combos.size() / 4);
        const std::vector<std::pair<size_t, size_t>> test_pool(combos.begin(),
                                                               combos.begin() + test_count);
        const std::vector<std::pair<size_t, size_t>> train_pool(combos.begin() + test_count,
                                                                combos.end());

        Rng rng(derive_seed(seed, "ex:" + task_id));
        auto make_example = [&](const std::pair<size_t, size_t>& combo, size_t index,
                                const char* id_prefix) {
            std::vector<std::string> content;
            content.reserve(combo.second);
            for (size_t j = 0; j < combo.second; ++j) content.push_back(content_token((combo.first + j) % V));

            RawRecord rec;
            rec.fields["content"] = join(content);
            std::string keyword;
            Position mode = Position::Contain;
            std::string author;
            size_t tidx = 0;
            if (cfg.kind == "keyword-insertion") {
                keyword = keyword_token(rng.bounded(std::max<size_t>(config.keyword_vocab, 1)));
                const size_t m = rng.bounded(3);
                mode = m == 0 ? Position::Start : (m == 1 ? Position::End : Position::Contain);
                rec.fields["keyword"] = keyword;
                rec.fields["mode"] = metrics::position_to_string(mode);
                tidx = m;
            } else if (cfg.kind == "style-tag") {
                author = author_token(rng.bounded(std::max<size_t>(config.num_authors, 1)));
                rec.fields["author"] = author;
            }
            rec.fields["target"] =
                transform_target(cfg.kind, content, keyword, mode, author, combo.first);

            Example ex = render_instruction(ft.spec, rec, tidx, 0);
            ex.id = task_id + ":" + id_prefix + std::to_string(index);
            return ex;
        };

        ft.train.task_id = task_id;
        ft.train.split = Split::Train;
        for (size_t i = 0; i < cfg.train_size; ++i) {
            ft.train.examples.push_back(
                make_example(train_pool[rng.bounded(train_pool.size())], i, ""));
        }
        ft.test.task_id = task_id;
        ft.test.split = Split::Test;
        for (size_t i = 0; i < cfg.test_size; ++i) {
            ft.test.examples.push_back(make_example(test_pool[i % test_pool.size()], i, "t"));
        }
        out.push_back(std::move(ft));
    }
    return out;
}

FixtureConfig fixture_config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("fixture config " + path + ": " + e.what());
    }

    FixtureConfig cfg;
    cfg.vocab_size = j.value("vocab_size", cfg.vocab_size);
    cfg.min_len = j.value("min_len", cfg.min_len);
    cfg.max_len = j.value("max_len", cfg.max_len);
    cfg.keyword_vocab = j.value("keyword_vocab", cfg.keyword_vocab);
    cfg.num_authors = j.value("num_authors", cfg.num_authors);
    for (const auto& t : j.at("tasks")) {
        FixtureTaskConfig tc;
        tc.kind = t.at("kind").get<std::string>();
        tc.task_id = t.value("task_id", "");
        tc.train_size = t.value("train_size", tc.train_size);
        tc.test_size = t.value("test_size", tc.test_size);
        tc.cap = t.value("cap", tc.cap);
        tc.zero_shot = t.value("zero_shot", false);
        cfg.tasks.push_back(tc);
    }
    return cfg;
}

TaskSpec load_task_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open task spec " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("task spec " + path + ": " + e.what());
    }
    TaskSpec spec;
    spec.task_id = j.at("task_id").get<std::string>();
    spec.name = j.value("name", spec.task_id);
    spec.templates = j.at("templates").get<std::vector<std::string>>();
    spec.cap = j.value("cap", spec.cap);
    spec.rehearsable = j.value("rehearsable", true);
    spec.zero_shot_only = j.value("zero_shot_only", false);
    spec.metric_ids = j.value("metric_ids", std::vector<std::string>{"exact_match"});
    spec.train_path = j.value("train_path", "");
    spec.test_path = j.value("test_path", "");
    spec.validate();
    return spec;
}

void save_task_spec(const TaskSpec& spec, const std::string& path) {
    spec.validate();
    json j;
    j["task_id"] = spec.task_id;
    j["name"] = spec.name;
    j["templates"] = spec.templates;
    j["cap"] = spec.cap;
    j["rehearsable"] = spec.rehearsable;
    j["zero_shot_only"] = spec.zero_shot_only;
    j["metric_ids"] = spec.metric_ids;
    j["train_path"] = spec.train_path;
    j["test_path"] = spec.test_path;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write task spec " + path);
    out << j.dump(2) << "\n";
}

const std::map<std::string, std::vector<std::string>>& builtin_task_templates() {
    static const std::map<std::string, std::vector<std::string>> reg = {
        {"simp", {R"(Make this text simpler: "{text}")"}},
        {"hgen",
         {R"(Make a title for this article, starting with "{keyword}": {article})",
          R"(Make a title for this article, ending with "{keyword}": {article})",
          R"(Make a title for this article, that contains "{keyword}": {article})"}},
        {"haiku", {R"(Generate a haiku about '{topic}')"}},
        {"cqa", {R"(In the context of the COVID pandemic, {question})"}},
        {"inqqg",
         {R"(Given the following text, write the possible curious question it answers: "{text}")"}},
        {"emdg",
         {R"(The associated emotion is "{emotion}" and the input prompt is "{situation}". )"
          R"(Now what would be your response, given the following dialogue context:=== {dialogue})"}},
        {"exp",
         {R"(Explain why the two following sentences are {relation} each other: )"
          R"("Sentence 1: {premise}"; Sentence 2: "{hypothesis}")"}},
        {"twst", {R"(Write a tweet about {hashtag}, in the style of {author})"}},
    };
    return reg;
}

} // namespace clh::corpus
