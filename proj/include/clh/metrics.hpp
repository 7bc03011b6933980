#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace clh::metrics {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class Position { Start, End, Contain };

struct Constraint {
    std::string keyword;
    Position position = Position::Contain;
    bool operator==(const Constraint&) const = default;
};
using ConstraintSet = std::vector<Constraint>;

Position position_from_string(const std::string& s);
std::string position_to_string(Position p);

struct ConstraintResult {
    bool fully_respected = false;
    std::vector<bool> per_constraint;
};

struct MetricValue {
    std::string metric_id;
    double value = 0.0;
    std::string scale;  // "unit" for [0,1] metrics, "x100" for percentage-style
    size_t n = 0;       // sample count
};

// ---------------------------------------------------------------------------
// Scalar metrics. All are pure and deterministic; tokenization is whitespace
// splitting unless noted.
// ---------------------------------------------------------------------------

// BLEU-4: geometric mean of modified n-gram precisions (n = 1..4) times the
// brevity penalty. Clipping uses the max reference count per n-gram. Smoothing
// is add-epsilon (1e-9): a zero clipped count contributes eps/denominator, and
// an order with no prediction n-grams contributes eps. The brevity-penalty
// reference length is the one closest to the prediction length (ties go to
// the shorter reference). Empty prediction scores 0.
double bleu4(const std::string& prediction, const std::vector<std::string>& references);

// ROUGE-1 F1 with clipped unigram counts. Both-empty scores 0.
double rouge1(const std::string& prediction, const std::string& reference);

// SARI, reported x100. Mean over n-gram orders 1..4 of
// (F1_add + F1_keep + P_del) / 3 with reference-scaled multiset clipping:
//   keep: candidates = min(src, pred) counts (both scaled by #refs), good =
//         clipped against the combined reference counts; F1 of aggregate
//         precision/recall, with empty candidate/denominator sides = 1.
//   del:  precision only, over n-grams the prediction dropped from the
//         source, good = those the references also dropped; empty = 1.
//   add:  set-based precision/recall over n-grams absent from the source;
//         degenerate (no addition candidates) = 0.
// Empty source throws.
double sari(const std::string& source, const std::string& prediction,
            const std::vector<std::string>& references);

// Fraction of pairs equal after case and whitespace normalization.
double exact_match_accuracy(const std::vector<std::string>& predictions,
                            const std::vector<std::string>& golds);

// Keyword position checks, case-insensitive token comparison:
//   start   - first token equals the keyword
//   end     - last token equals the keyword after stripping terminal punctuation
//   contain - any token equals the keyword (raw or punctuation-stripped)
ConstraintResult constraint_satisfaction(const std::string& prediction,
                                         const ConstraintSet& constraints);

// Inverse Jensen-Shannon divergence (natural log) between the first-token
// distributions of predictions and golds, lowercased. Returns
// 1 / max(JSD, 0.01), so identical distributions hit the cap of 100.
double inverse_first_token_jsd(const std::vector<std::string>& predictions,
                               const std::vector<std::string>& golds);

// Heuristic syllables: per word, count vowel groups (aeiouy; non-letters
// break groups), subtract a silent terminal 'e' unless it follows
// consonant+'l', minimum 1 for any word containing a letter.
int syllable_count(const std::string& text);

// Composite haiku score, reported x100: mean of the line-count score
// (1 - |lines_pred - lines_gold| / 3, floored at 0), the syllable score
// (1 - |syl_pred - syl_gold| / 17, floored at 0), BLEU-4 against the gold,
// and topic presence (case-insensitive substring). Lines split on newlines
// and '/'; commas do not split. Trailing whitespace and terminal punctuation
// of both strings are stripped first.
double haiku_score(const std::string& prediction, const std::string& gold,
                   const std::string& topic);

// ---------------------------------------------------------------------------
// Author-style classifier (ridge, one-vs-rest)
// ---------------------------------------------------------------------------

class StyleClassifier {
public:
    // Score vector over authors for a text, in author order.
    std::vector<double> scores(const std::string& text) const;
    // Argmax author; ties resolve to the lexicographically first author.
    std::string predict(const std::string& text) const;

    const std::vector<std::string>& authors() const { return authors_; }
    bool has_author(const std::string& a) const;

private:
    friend StyleClassifier fit_author_classifier(
        const std::vector<std::pair<std::string, std::string>>& corpus, double l2);

    std::vector<std::string> authors_;                    // sorted
    std::vector<std::string> vocab_;                      // sorted unigrams
    std::unordered_map<std::string, size_t> vocab_index_;
    std::vector<double> idf_;
    std::vector<std::vector<double>> weights_;            // authors x vocab

    std::vector<std::pair<size_t, double>> featurize(const std::string& text) const;
};

// One-vs-rest L2-regularized least squares on +-1 targets over unigram
// count features with IDF weighting. Solved by conjugate gradient on the
// normal equations to gradient norm < 1e-9. Throws if fewer than two
// authors or fewer than two examples for any author.
StyleClassifier fit_author_classifier(
    const std::vector<std::pair<std::string, std::string>>& corpus, double l2);

// Fraction of generations whose predicted author equals the intended one.
// Unknown intended author throws.
double author_style_accuracy(
    const StyleClassifier& clf,
    const std::vector<std::pair<std::string, std::string>>& generations);

// ---------------------------------------------------------------------------
// Pluggable scorer interfaces
// ---------------------------------------------------------------------------

// Sentiment: text -> signed score, positive means positive sentiment.
using SentimentScorer = std::function<std::vector<double>(const std::vector<std::string>&)>;
// Similarity: (prediction, reference) pairs -> scores. Extension point for
// external embedding-based scorers; no built-in neural implementation.
using SimilarityScorer = std::function<std::vector<double>(
    const std::vector<std::pair<std::string, std::string>>&)>;

// Built-in fallback scorer: signed lexicon word counts.
std::vector<double> lexicon_sentiment(const std::vector<std::string>& texts);

// Fraction of texts scored strictly positive. Null scorer uses the lexicon
// fallback; empty text counts as non-positive.
double sentiment_positive_rate(const std::vector<std::string>& texts,
                               const SentimentScorer& scorer = nullptr);

// ---------------------------------------------------------------------------
// Batch scoring
// ---------------------------------------------------------------------------

struct ScoreItem {
    std::string prediction;
    std::vector<std::string> references;  // at least one
    std::string source;                   // for sari
    ConstraintSet constraints;            // for constraint
    std::string topic;                    // for haiku
};

std::vector<std::string> known_metric_ids();

// Mean-aggregated per-item score for one metric (1tok is corpus-level).
// The OpenMP entry point computes per-item scores in parallel and reduces
// serially so results are bit-identical to the serial reference.
MetricValue score_metric(const std::string& metric_id, const std::vector<ScoreItem>& items);
MetricValue score_metric_serial(const std::string& metric_id, const std::vector<ScoreItem>& items);

} // namespace clh::metrics
