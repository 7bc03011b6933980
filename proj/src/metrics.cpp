#include "clh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <stdexcept>

#include "clh/text.hpp"

namespace clh::metrics {

namespace {

constexpr double kBleuEps = 1e-9;
constexpr double kJsdFloor = 0.01;

// n-grams joined with an unlikely separator so they can key a map.
std::vector<std::string> ngrams(const std::vector<std::string>& toks, size_t n) {
    std::vector<std::string> out;
    if (toks.size() < n) return out;
    out.reserve(toks.size() - n + 1);
    for (size_t i = 0; i + n <= toks.size(); ++i) {
        std::string g = toks[i];
        for (size_t k = 1; k < n; ++k) {
            g += '\x1f';
            g += toks[i + k];
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::map<std::string, double> count_map(const std::vector<std::string>& grams, double scale = 1.0) {
    std::map<std::string, double> m;
    for (const auto& g : grams) m[g] += scale;
    return m;
}

double count_of(const std::map<std::string, double>& m, const std::string& g) {
    auto it = m.find(g);
    return it == m.end() ? 0.0 : it->second;
}

// Strips trailing whitespace and terminal punctuation from the end of a string.
std::string strip_tail(const std::string& s) {
    size_t b = s.size();
    while (b > 0 && (std::isspace(static_cast<unsigned char>(s[b - 1])) || is_terminal_punct(s[b - 1]))) --b;
    return s.substr(0, b);
}

size_t line_count(const std::string& s) {
    size_t lines = 0;
    std::string seg;
    auto flush = [&] {
        if (!trim(seg).empty()) ++lines;
        seg.clear();
    };
    for (char c : s) {
        if (c == '\n' || c == '/') flush();
        else seg += c;
    }
    flush();
    return lines;
}

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

int word_syllables(const std::string& raw) {
    const std::string w = lower(raw);
    int groups = 0;
    bool in_group = false;
    bool has_letter = false;
    for (char c : w) {
        const bool alpha = std::isalpha(static_cast<unsigned char>(c)) != 0;
        has_letter |= alpha;
        const bool v = alpha && is_vowel(c);
        if (v && !in_group) ++groups;
        in_group = v;
    }
    if (!has_letter) return 0;

    // Silent terminal 'e' unless it follows consonant + 'l' ("table", "apple").
    std::string core = w;
    while (!core.empty() && !std::isalpha(static_cast<unsigned char>(core.back()))) core.pop_back();
    const size_t n = core.size();
    if (n >= 2 && core[n - 1] == 'e') {
        const bool keeps_le = n >= 3 && core[n - 2] == 'l' && !is_vowel(core[n - 3]) &&
                              std::isalpha(static_cast<unsigned char>(core[n - 3]));
        if (!keeps_le) --groups;
    }
    return std::max(groups, 1);
}

} // namespace

Position position_from_string(const std::string& s) {
    if (s == "start") return Position::Start;
    if (s == "end") return Position::End;
    if (s == "contain") return Position::Contain;
    throw std::invalid_argument("unknown constraint position: " + s);
}

std::string position_to_string(Position p) {
    switch (p) {
        case Position::Start: return "start";
        case Position::End: return "end";
        case Position::Contain: return "contain";
    }
    return "contain";
}

double bleu4(const std::string& prediction, const std::vector<std::string>& references) {
    if (references.empty()) throw std::invalid_argument("bleu4: no references");
    const auto pred = split_ws(prediction);
    if (pred.empty()) return 0.0;

    std::vector<std::vector<std::string>> ref_toks;
    ref_toks.reserve(references.size());
    for (const auto& r : references) ref_toks.push_back(split_ws(r));

    double log_sum = 0.0;
    for (size_t n = 1; n <= 4; ++n) {
        const auto pgrams = ngrams(pred, n);
        double p_n;
        if (pgrams.empty()) {
            p_n = kBleuEps;
        } else {
            std::vector<std::map<std::string, double>> rcounts;
            rcounts.reserve(ref_toks.size());
            for (const auto& rt : ref_toks) rcounts.push_back(count_map(ngrams(rt, n)));
            const auto pcount = count_map(pgrams);
            double clipped = 0.0;
            for (const auto& [g, c] : pcount) {
                double best_ref = 0.0;
                for (const auto& rc : rcounts) best_ref = std::max(best_ref, count_of(rc, g));
                clipped += std::min(c, best_ref);
            }
            const double denom = static_cast<double>(pgrams.size());
            p_n = (clipped > 0.0 ? clipped : kBleuEps) / denom;
        }
        log_sum += std::log(p_n);
    }

    const double c = static_cast<double>(pred.size());
    double r = static_cast<double>(ref_toks.front().size());
    for (const auto& rt : ref_toks) {
        const double len = static_cast<double>(rt.size());
        if (std::abs(len - c) < std::abs(r - c) || (std::abs(len - c) == std::abs(r - c) && len < r)) {
            r = len;
        }
    }
    const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
    return bp * std::exp(log_sum / 4.0);
}

double rouge1(const std::string& prediction, const std::string& reference) {
    const auto pred = split_ws(prediction);
    const auto ref = split_ws(reference);
    if (pred.empty() || ref.empty()) return 0.0;

    const auto pcount = count_map(pred);
    const auto rcount = count_map(ref);
    double overlap = 0.0;
    for (const auto& [w, c] : pcount) overlap += std::min(c, count_of(rcount, w));

    const double p = overlap / static_cast<double>(pred.size());
    const double r = overlap / static_cast<double>(ref.size());
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

double sari(const std::string& source, const std::string& prediction,
            const std::vector<std::string>& references) {
    const auto src = split_ws(source);
    if (src.empty()) throw std::invalid_argument("sari: empty source");
    if (references.empty()) throw std::invalid_argument("sari: no references");
    const auto pred = split_ws(prediction);

    const double nref = static_cast<double>(references.size());
    std::vector<std::vector<std::string>> ref_toks;
    for (const auto& r : references) ref_toks.push_back(split_ws(r));

    double total = 0.0;
    for (size_t n = 1; n <= 4; ++n) {
        const auto s_counts = count_map(ngrams(src, n), nref);
        const auto c_counts = count_map(ngrams(pred, n), nref);
        std::map<std::string, double> g_counts;
        for (const auto& rt : ref_toks) {
            for (const auto& g : ngrams(rt, n)) g_counts[g] += 1.0;
        }

        std::set<std::string> grams;
        for (const auto& [g, _] : s_counts) grams.insert(g);
        for (const auto& [g, _] : c_counts) grams.insert(g);
        for (const auto& [g, _] : g_counts) grams.insert(g);

        double keep_cand = 0.0, keep_good = 0.0, keep_all = 0.0;
        double del_cand = 0.0, del_good = 0.0;
        double add_cand = 0.0, add_good = 0.0, add_all = 0.0;
        for (const auto& g : grams) {
            const double s = count_of(s_counts, g);
            const double c = count_of(c_counts, g);
            const double r = count_of(g_counts, g);

            const double kc = std::min(s, c);
            keep_cand += kc;
            keep_good += std::min(kc, r);
            keep_all += std::min(s, r);

            const double dc = std::max(s - c, 0.0);
            const double dr = std::max(s - r, 0.0);
            del_cand += dc;
            del_good += std::min(dc, dr);

            if (s == 0.0) {
                if (c > 0.0) {
                    add_cand += 1.0;
                    if (r > 0.0) add_good += 1.0;
                }
                if (r > 0.0) add_all += 1.0;
            }
        }

        const double keep_p = keep_cand > 0.0 ? keep_good / keep_cand : 1.0;
        const double keep_r = keep_all > 0.0 ? keep_good / keep_all : 1.0;
        const double f_keep = keep_p + keep_r > 0.0 ? 2.0 * keep_p * keep_r / (keep_p + keep_r) : 0.0;

        const double p_del = del_cand > 0.0 ? del_good / del_cand : 1.0;

        const double add_p = add_cand > 0.0 ? add_good / add_cand : 0.0;
        const double add_r = add_all > 0.0 ? add_good / add_all : 0.0;
        const double f_add = add_p + add_r > 0.0 ? 2.0 * add_p * add_r / (add_p + add_r) : 0.0;

        total += (f_add + f_keep + p_del) / 3.0;
    }
    return 100.0 * total / 4.0;
}

double exact_match_accuracy(const std::vector<std::string>& predictions,
                            const std::vector<std::string>& golds) {
    if (predictions.size() != golds.size()) {
        throw std::invalid_argument("exact_match_accuracy: length mismatch");
    }
    if (predictions.empty()) return 0.0;
    size_t hit = 0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        if (normalize_for_match(predictions[i]) == normalize_for_match(golds[i])) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(predictions.size());
}

ConstraintResult constraint_satisfaction(const std::string& prediction,
                                         const ConstraintSet& constraints) {
    if (constraints.empty()) throw std::invalid_argument("constraint_satisfaction: empty constraint set");
    const auto toks = split_ws(prediction);

    ConstraintResult res;
    res.per_constraint.reserve(constraints.size());
    for (const auto& c : constraints) {
        const std::string kw = lower(c.keyword);
        bool ok = false;
        switch (c.position) {
            case Position::Start:
                ok = !toks.empty() && lower(toks.front()) == kw;
                break;
            case Position::End:
                ok = !toks.empty() && lower(strip_terminal_punct(toks.back())) == kw;
                break;
            case Position::Contain:
                for (const auto& t : toks) {
                    if (lower(t) == kw || lower(strip_terminal_punct(t)) == kw) {
                        ok = true;
                        break;
                    }
                }
                break;
        }
        res.per_constraint.push_back(ok);
    }
    res.fully_respected = std::all_of(res.per_constraint.begin(), res.per_constraint.end(),
                                      [](bool b) { return b; });
    return res;
}

double inverse_first_token_jsd(const std::vector<std::string>& predictions,
                               const std::vector<std::string>& golds) {
    if (predictions.empty() || golds.empty()) {
        throw std::invalid_argument("inverse_first_token_jsd: empty input");
    }
    auto first_token_dist = [](const std::vector<std::string>& texts) {
        std::map<std::string, double> freq;
        for (const auto& t : texts) {
            const auto toks = split_ws(t);
            freq[toks.empty() ? std::string() : lower(toks.front())] += 1.0;
        }
        for (auto& [_, v] : freq) v /= static_cast<double>(texts.size());
        return freq;
    };
    const auto p = first_token_dist(predictions);
    const auto q = first_token_dist(golds);

    std::set<std::string> vocab;
    for (const auto& [w, _] : p) vocab.insert(w);
    for (const auto& [w, _] : q) vocab.insert(w);

    double jsd = 0.0;
    for (const auto& w : vocab) {
        const double pw = count_of(p, w);
        const double qw = count_of(q, w);
        const double mw = 0.5 * (pw + qw);
        if (pw > 0.0) jsd += 0.5 * pw * std::log(pw / mw);
        if (qw > 0.0) jsd += 0.5 * qw * std::log(qw / mw);
    }
    return 1.0 / std::max(jsd, kJsdFloor);
}

int syllable_count(const std::string& text) {
    int total = 0;
    for (const auto& w : split_ws(text)) total += word_syllables(w);
    return total;
}

double haiku_score(const std::string& prediction, const std::string& gold,
                   const std::string& topic) {
    if (gold.empty()) throw std::invalid_argument("haiku_score: empty gold");
    const std::string pred = strip_tail(prediction);
    const std::string ref = strip_tail(gold);

    const double dl = std::abs(static_cast<double>(line_count(pred)) -
                               static_cast<double>(line_count(ref)));
    const double ds = std::abs(static_cast<double>(syllable_count(pred)) -
                               static_cast<double>(syllable_count(ref)));
    const double line_score = std::max(0.0, 1.0 - dl / 3.0);
    const double syl_score = std::max(0.0, 1.0 - ds / 17.0);
    const double b = ref.empty() ? 0.0 : bleu4(pred, {ref});
    const double topic_score =
        topic.empty() || lower(pred).find(lower(topic)) != std::string::npos ? 1.0 : 0.0;

    return 100.0 * (line_score + syl_score + b + topic_score) / 4.0;
}

// ---------------------------------------------------------------------------
// StyleClassifier
// ---------------------------------------------------------------------------

std::vector<std::pair<size_t, double>> StyleClassifier::featurize(const std::string& text) const {
    std::map<size_t, double> counts;
    for (const auto& t : split_ws(text)) {
        auto it = vocab_index_.find(t);
        if (it != vocab_index_.end()) counts[it->second] += 1.0;
    }
    std::vector<std::pair<size_t, double>> feats;
    feats.reserve(counts.size());
    for (const auto& [j, c] : counts) feats.emplace_back(j, c * idf_[j]);
    return feats;
}

std::vector<double> StyleClassifier::scores(const std::string& text) const {
    const auto feats = featurize(text);
    std::vector<double> s(authors_.size(), 0.0);
    for (size_t a = 0; a < authors_.size(); ++a) {
        double acc = 0.0;
        for (const auto& [j, v] : feats) acc += weights_[a][j] * v;
        s[a] = acc;
    }
    return s;
}

std::string StyleClassifier::predict(const std::string& text) const {
    const auto s = scores(text);
    size_t best = 0;
    for (size_t a = 1; a < s.size(); ++a) {
        if (s[a] > s[best]) best = a;
    }
    return authors_[best];
}

bool StyleClassifier::has_author(const std::string& a) const {
    return std::find(authors_.begin(), authors_.end(), a) != authors_.end();
}

StyleClassifier fit_author_classifier(
    const std::vector<std::pair<std::string, std::string>>& corpus, double l2) {
    std::map<std::string, size_t> author_counts;
    for (const auto& [_, a] : corpus) ++author_counts[a];
    if (author_counts.size() < 2) throw std::invalid_argument("fit_author_classifier: need >= 2 authors");
    for (const auto& [a, c] : author_counts) {
        if (c < 2) throw std::invalid_argument("fit_author_classifier: author '" + a + "' has < 2 examples");
    }

    StyleClassifier clf;
    for (const auto& [a, _] : author_counts) clf.authors_.push_back(a);

    // Vocabulary and document frequencies.
    std::map<std::string, size_t> df;
    std::vector<std::map<std::string, double>> doc_counts(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        for (const auto& t : split_ws(corpus[i].first)) doc_counts[i][t] += 1.0;
        for (const auto& [t, _] : doc_counts[i]) ++df[t];
    }
    for (const auto& [t, _] : df) {
        clf.vocab_index_.emplace(t, clf.vocab_.size());
        clf.vocab_.push_back(t);
    }
    const double nd = static_cast<double>(corpus.size());
    clf.idf_.resize(clf.vocab_.size());
    for (const auto& [t, d] : df) {
        clf.idf_[clf.vocab_index_[t]] = std::log((1.0 + nd) / (1.0 + static_cast<double>(d))) + 1.0;
    }

    // Sparse design matrix rows.
    const size_t dim = clf.vocab_.size();
    std::vector<std::vector<std::pair<size_t, double>>> rows(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        for (const auto& [t, c] : doc_counts[i]) {
            const size_t j = clf.vocab_index_[t];
            rows[i].emplace_back(j, c * clf.idf_[j]);
        }
    }

    auto matvec = [&](const std::vector<double>& v, std::vector<double>& out) {
        // out = (X^T X + l2 I) v
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& row : rows) {
            double dot = 0.0;
            for (const auto& [j, x] : row) dot += x * v[j];
            for (const auto& [j, x] : row) out[j] += x * dot;
        }
        for (size_t j = 0; j < out.size(); ++j) out[j] += l2 * v[j];
    };

    clf.weights_.assign(clf.authors_.size(), std::vector<double>(dim, 0.0));
    std::vector<double> b(dim), r(dim), p(dim), ap(dim);
    for (size_t a = 0; a < clf.authors_.size(); ++a) {
        std::fill(b.begin(), b.end(), 0.0);
        for (size_t i = 0; i < corpus.size(); ++i) {
            const double y = corpus[i].second == clf.authors_[a] ? 1.0 : -1.0;
            for (const auto& [j, x] : rows[i]) b[j] += x * y;
        }

        // Conjugate gradient on the normal equations; the residual is the
        // gradient of the ridge objective.
        auto& w = clf.weights_[a];
        r = b;
        p = b;
        double rr = 0.0;
        for (double v : r) rr += v * v;
        double bnorm = std::sqrt(rr);
        const double tol = 1e-9 * std::max(1.0, bnorm);
        for (size_t it = 0; it < 2 * dim + 16 && std::sqrt(rr) > tol; ++it) {
            matvec(p, ap);
            double pap = 0.0;
            for (size_t j = 0; j < dim; ++j) pap += p[j] * ap[j];
            if (pap <= 0.0) break;
            const double alpha = rr / pap;
            for (size_t j = 0; j < dim; ++j) {
                w[j] += alpha * p[j];
                r[j] -= alpha * ap[j];
            }
            double rr_new = 0.0;
            for (double v : r) rr_new += v * v;
            const double beta = rr_new / rr;
            for (size_t j = 0; j < dim; ++j) p[j] = r[j] + beta * p[j];
            rr = rr_new;
        }
    }
    return clf;
}

double author_style_accuracy(
    const StyleClassifier& clf,
    const std::vector<std::pair<std::string, std::string>>& generations) {
    if (generations.empty()) return 0.0;
    size_t hit = 0;
    for (const auto& [text, intended] : generations) {
        if (!clf.has_author(intended)) {
            throw std::invalid_argument("author_style_accuracy: unknown author '" + intended + "'");
        }
        if (clf.predict(text) == intended) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(generations.size());
}

// ---------------------------------------------------------------------------
// Sentiment
// ---------------------------------------------------------------------------

namespace {

const std::set<std::string>& positive_lexicon() {
    static const std::set<std::string> lex = {
        "good", "great", "happy", "joy", "joyful", "love", "lovely", "wonderful",
        "bright", "sweet", "calm", "peace", "peaceful", "gentle", "warm", "smile",
        "smiles", "hope", "hopeful", "faithful", "kind", "beautiful", "delight",
        "cheer", "cheerful", "serene", "bliss", "glad", "shine", "sunny", "soft",
        "spring", "bloom", "blossom", "laugh", "friend", "light"};
    return lex;
}

const std::set<std::string>& negative_lexicon() {
    static const std::set<std::string> lex = {
        "bad", "sad", "angry", "hate", "terrible", "awful", "dark", "bitter",
        "cold", "fear", "cry", "crying", "tears", "gloom", "gloomy", "pain",
        "lonely", "storm", "dead", "death", "broken", "hurt", "lost", "winter",
        "grief", "sorrow", "empty", "ache"};
    return lex;
}

} // namespace

std::vector<double> lexicon_sentiment(const std::vector<std::string>& texts) {
    std::vector<double> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        double score = 0.0;
        for (const auto& w : split_ws(t)) {
            const std::string key = lower(strip_terminal_punct(w));
            if (positive_lexicon().count(key)) score += 1.0;
            else if (negative_lexicon().count(key)) score -= 1.0;
        }
        out.push_back(score);
    }
    return out;
}

double sentiment_positive_rate(const std::vector<std::string>& texts,
                               const SentimentScorer& scorer) {
    if (texts.empty()) return 0.0;
    const auto scores = scorer ? scorer(texts) : lexicon_sentiment(texts);
    if (scores.size() != texts.size()) {
        throw std::runtime_error("sentiment scorer returned wrong count");
    }
    size_t pos = 0;
    for (double s : scores) {
        if (s > 0.0) ++pos;
    }
    return static_cast<double>(pos) / static_cast<double>(texts.size());
}

// ---------------------------------------------------------------------------
// Batch scoring
// ---------------------------------------------------------------------------

namespace {

double item_score(const std::string& id, const ScoreItem& it) {
    if (id == "bleu4") return bleu4(it.prediction, it.references);
    if (id == "rouge1") return rouge1(it.prediction, it.references.front());
    if (id == "sari") return sari(it.source, it.prediction, it.references);
    if (id == "exact_match") {
        return normalize_for_match(it.prediction) == normalize_for_match(it.references.front())
                   ? 1.0
                   : 0.0;
    }
    if (id == "constraint") {
        if (it.constraints.empty()) return 1.0;
        return constraint_satisfaction(it.prediction, it.constraints).fully_respected ? 1.0 : 0.0;
    }
    if (id == "haiku") return haiku_score(it.prediction, it.references.front(), it.topic);
    throw std::invalid_argument("unhandled metric id: " + id);
}

MetricValue finalize(const std::string& id, double value, size_t n) {
    MetricValue mv;
    mv.metric_id = id;
    mv.value = value;
    mv.n = n;
    mv.scale = (id == "sari" || id == "haiku") ? "x100" : "unit";
    return mv;
}

MetricValue score_impl(const std::string& id, const std::vector<ScoreItem>& items, bool parallel) {
    const auto known = known_metric_ids();
    if (std::find(known.begin(), known.end(), id) == known.end()) {
        std::string msg = "unknown metric id '" + id + "'; known:";
        for (const auto& k : known) msg += " " + k;
        throw std::invalid_argument(msg);
    }
    if (items.empty()) throw std::invalid_argument("score_metric: no items");

    if (id == "1tok") {
        std::vector<std::string> preds, golds;
        preds.reserve(items.size());
        golds.reserve(items.size());
        for (const auto& it : items) {
            preds.push_back(it.prediction);
            golds.push_back(it.references.front());
        }
        return finalize(id, inverse_first_token_jsd(preds, golds), items.size());
    }

    std::vector<double> per_item(items.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long long i = 0; i < static_cast<long long>(items.size()); ++i) {
            per_item[static_cast<size_t>(i)] = item_score(id, items[static_cast<size_t>(i)]);
        }
    } else {
        for (size_t i = 0; i < items.size(); ++i) per_item[i] = item_score(id, items[i]);
    }
    double sum = 0.0;
    for (double v : per_item) sum += v;
    return finalize(id, sum / static_cast<double>(items.size()), items.size());
}

} // namespace

std::vector<std::string> known_metric_ids() {
    return {"bleu4", "rouge1", "sari", "exact_match", "constraint", "1tok", "haiku"};
}

MetricValue score_metric(const std::string& metric_id, const std::vector<ScoreItem>& items) {
    return score_impl(metric_id, items, true);
}

MetricValue score_metric_serial(const std::string& metric_id, const std::vector<ScoreItem>& items) {
    return score_impl(metric_id, items, false);
}

} // namespace clh::metrics
