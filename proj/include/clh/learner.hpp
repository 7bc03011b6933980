#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "clh/corpus.hpp"
#include "clh/rehearsal.hpp"

namespace clh::learner {

// ---------------------------------------------------------------------------
// Toy sequence learner: a hashed-feature linear next-token model trained with
// SGD and decoded greedily. Features for a decoding step are the union of
//   - hashed word n-grams of the input text (orders 1..max_order),
//   - hashed suffix n-grams of the gold/generated prefix (BOS-padded),
//   - conjunctions of the instruction head token (first input token) with
//     each input n-gram and each prefix suffix n-gram,
//   - a bias feature.
// The shared n-gram features create cross-task interference (the forgetting
// this harness studies); the head-token conjunctions give the model enough
// capacity to hold several tasks at once when rehearsal keeps them alive.
// ---------------------------------------------------------------------------

struct FeatureConfig {
    size_t max_order = 3;
    size_t hash_dim = 1u << 18;
    bool operator==(const FeatureConfig&) const = default;
};

struct TrainHyper {
    double learning_rate = 0.1;
    size_t epochs = 1;
    size_t batch_size = 16;
    double l2 = 0.0;

    void validate() const;
};

class Vocab {
public:
    static constexpr uint32_t kBos = 0;
    static constexpr uint32_t kEos = 1;
    static constexpr uint32_t kUnk = 2;

    Vocab();
    explicit Vocab(const std::vector<std::string>& sorted_tokens);

    uint32_t id(const std::string& token) const;  // kUnk when absent
    const std::string& token(uint32_t id) const;
    size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    bool operator==(const Vocab& o) const { return tokens_ == o.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, uint32_t> index_;
};

struct LearnerState {
    Vocab vocab;
    FeatureConfig feature_config;
    // Touched feature rows, dense over the vocabulary. Absent rows are zero.
    std::unordered_map<uint32_t, std::vector<double>> weights;
    uint64_t rng_state = 0;
    uint64_t step_count = 0;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Vocabulary is the sorted union of whitespace tokens over all provided
// datasets (inputs and targets) plus BOS/EOS/UNK; weights start at zero.
LearnerState init_learner(uint64_t seed, const std::vector<const corpus::Dataset*>& vocab_source,
                          const FeatureConfig& feature_config);

// Trains on the shuffled union of the mixture datasets. epochs = 0 is a no-op.
LearnerState pretrain_on_mixture(LearnerState state, const std::vector<corpus::Dataset>& mixture,
                                 const TrainHyper& hyper, uint64_t seed);

struct TrainResult {
    LearnerState state;
    std::vector<double> batch_losses;  // one entry per batch
};

// Teacher-forced next-token cross-entropy over target tokens (EOS appended),
// one SGD update per item from the item's mean-per-token gradient. Throws on
// a non-finite loss, naming the step index.
TrainResult train_on_stream(LearnerState state, const rehearsal::TrainStream& stream,
                            const TrainHyper& hyper);

// One batch of the same update; returns the mean pre-update item loss.
// Single-writer: callers own the interleaving of batches and evaluations.
double train_on_batch(LearnerState& state, const std::vector<rehearsal::StreamItem>& batch,
                      const TrainHyper& hyper);

// Greedy decoding until EOS or max_len tokens; ties break to the lowest
// vocabulary id.
std::string generate(const LearnerState& state, const std::string& input_text, size_t max_len);

// Mean per-token cross-entropy of one example under the current weights.
double example_loss(const LearnerState& state, const corpus::Example& ex);

// Analytic gradient of example_loss for every touched (feature, vocab) pair,
// keyed as feature * vocab_size + vocab_id.
std::unordered_map<uint64_t, double> example_gradient(const LearnerState& state,
                                                      const corpus::Example& ex);

// Next-token probability distribution for an input and a decoded prefix.
std::vector<double> next_token_distribution(const LearnerState& state,
                                            const std::string& input_text,
                                            const std::vector<std::string>& prefix_tokens);

// Versioned binary snapshot: little-endian header (magic, version, counts),
// vocabulary table, and sparse weight triples. restore() of a snapshot is
// behaviorally identical to the source state; corrupt payloads throw with
// the byte offset.
std::vector<uint8_t> snapshot(const LearnerState& state);
LearnerState restore(const std::vector<uint8_t>& bytes);

void save_snapshot_file(const LearnerState& state, const std::string& path);
LearnerState load_snapshot_file(const std::string& path);

} // namespace clh::learner
