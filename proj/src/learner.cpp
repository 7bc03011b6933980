#include "clh/learner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include "clh/rng.hpp"
#include "clh/text.hpp"

namespace clh::learner {

namespace {

constexpr const char* kBosToken = "<s>";
constexpr const char* kEosToken = "</s>";
constexpr const char* kUnkToken = "<unk>";

// ---------------------------------------------------------------------------
// Feature extraction
// ---------------------------------------------------------------------------

uint32_t hash_feature(const FeatureConfig& cfg, std::string_view tag, std::string_view text) {
    uint64_t h = fnv1a64(tag);
    h = fnv1a64(text, h);
    return static_cast<uint32_t>(h % cfg.hash_dim);
}

std::string join_range(const std::vector<std::string>& toks, size_t begin, size_t n) {
    std::string out;
    for (size_t i = 0; i < n; ++i) {
        if (i) out += '\x1f';
        out += toks[begin + i];
    }
    return out;
}

// Per-example context shared across decoding steps.
struct ExampleFeatures {
    std::vector<uint32_t> input_feats;  // deduped, includes bias
    std::string head;                   // first input token, may be empty
};

ExampleFeatures input_features(const FeatureConfig& cfg, const std::string& input_text) {
    ExampleFeatures ef;
    const auto toks = split_ws(input_text);
    if (!toks.empty()) ef.head = toks.front();

    ef.input_feats.push_back(hash_feature(cfg, "bias", ""));
    for (size_t n = 1; n <= cfg.max_order; ++n) {
        if (toks.size() < n) break;
        const std::string tag = "i" + std::to_string(n);
        const std::string ctag = "ci" + std::to_string(n);
        for (size_t i = 0; i + n <= toks.size(); ++i) {
            const std::string gram = join_range(toks, i, n);
            ef.input_feats.push_back(hash_feature(cfg, tag, gram));
            // Head-token conjunction: task-conditioned reading of the content.
            if (!ef.head.empty()) {
                ef.input_feats.push_back(hash_feature(cfg, ctag, ef.head + '\x1f' + gram));
            }
        }
    }
    std::sort(ef.input_feats.begin(), ef.input_feats.end());
    ef.input_feats.erase(std::unique(ef.input_feats.begin(), ef.input_feats.end()),
                         ef.input_feats.end());
    return ef;
}

// Features active for one decoding step: input features plus suffix n-grams
// of the BOS-padded prefix and their head-token conjunctions.
void step_features(const FeatureConfig& cfg, const ExampleFeatures& ef,
                   const std::vector<std::string>& prefix, std::vector<uint32_t>& out) {
    out = ef.input_feats;
    for (size_t n = 1; n <= cfg.max_order; ++n) {
        if (prefix.size() < n) break;
        const std::string gram = join_range(prefix, prefix.size() - n, n);
        out.push_back(hash_feature(cfg, "p" + std::to_string(n), gram));
        if (!ef.head.empty()) {
            out.push_back(hash_feature(cfg, "c" + std::to_string(n), ef.head + '\x1f' + gram));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

void scores_for(const LearnerState& state, const std::vector<uint32_t>& feats,
                std::vector<double>& scores) {
    const size_t v = state.vocab.size();
    scores.assign(v, 0.0);
    for (uint32_t f : feats) {
        auto it = state.weights.find(f);
        if (it == state.weights.end()) continue;
        const auto& row = it->second;
        for (size_t j = 0; j < v; ++j) scores[j] += row[j];
    }
}

void softmax_inplace(std::vector<double>& s) {
    double mx = s[0];
    for (double x : s) mx = std::max(mx, x);
    double sum = 0.0;
    for (double& x : s) {
        x = std::exp(x - mx);
        sum += x;
    }
    for (double& x : s) x /= sum;
}

uint32_t argmax_lowest(const std::vector<double>& s) {
    uint32_t best = 0;
    for (uint32_t j = 1; j < s.size(); ++j) {
        if (s[j] > s[best]) best = j;
    }
    return best;
}

std::vector<uint32_t> target_ids(const LearnerState& state, const std::string& target_text) {
    std::vector<uint32_t> ids;
    for (const auto& t : split_ws(target_text)) ids.push_back(state.vocab.id(t));
    ids.push_back(Vocab::kEos);
    return ids;
}

std::vector<double>& weight_row(LearnerState& state, uint32_t f) {
    auto it = state.weights.find(f);
    if (it == state.weights.end()) {
        it = state.weights.emplace(f, std::vector<double>(state.vocab.size(), 0.0)).first;
    }
    return it->second;
}

// One teacher-forced pass. Accumulates the mean-per-token gradient when grad
// is non-null and returns the mean per-token cross-entropy.
double forward_example(const LearnerState& state, const corpus::Example& ex,
                       std::unordered_map<uint64_t, double>* grad) {
    const auto ef = input_features(state.feature_config, ex.input_text);
    const auto gold = target_ids(state, ex.target_text);
    const size_t v = state.vocab.size();

    std::vector<std::string> prefix = {kBosToken};
    std::vector<uint32_t> feats;
    std::vector<double> probs;
    const auto gold_toks = split_ws(ex.target_text);

    double loss = 0.0;
    const double inv_t = 1.0 / static_cast<double>(gold.size());
    for (size_t t = 0; t < gold.size(); ++t) {
        step_features(state.feature_config, ef, prefix, feats);
        scores_for(state, feats, probs);
        softmax_inplace(probs);
        loss += -std::log(std::max(probs[gold[t]], 1e-300));

        if (grad) {
            for (uint32_t f : feats) {
                const uint64_t base = static_cast<uint64_t>(f) * v;
                for (size_t j = 0; j < v; ++j) {
                    const double g = (probs[j] - (j == gold[t] ? 1.0 : 0.0)) * inv_t;
                    if (g != 0.0) (*grad)[base + j] += g;
                }
            }
        }
        if (t < gold_toks.size()) prefix.push_back(gold_toks[t]);
    }
    return loss * inv_t;
}

// Mean-gradient SGD update for one example; returns its pre-update loss.
double train_example(LearnerState& state, const corpus::Example& ex, double lr, double l2) {
    const auto ef = input_features(state.feature_config, ex.input_text);
    const auto gold = target_ids(state, ex.target_text);
    const size_t v = state.vocab.size();
    const auto gold_toks = split_ws(ex.target_text);

    // (feature -> gradient row) accumulated at the current weights.
    std::vector<uint32_t> touched;
    std::unordered_map<uint32_t, std::vector<double>> grad;

    std::vector<std::string> prefix = {kBosToken};
    std::vector<uint32_t> feats;
    std::vector<double> probs;
    double loss = 0.0;
    const double inv_t = 1.0 / static_cast<double>(gold.size());

    for (size_t t = 0; t < gold.size(); ++t) {
        step_features(state.feature_config, ef, prefix, feats);
        scores_for(state, feats, probs);
        softmax_inplace(probs);
        loss += -std::log(std::max(probs[gold[t]], 1e-300));

        for (uint32_t f : feats) {
            auto it = grad.find(f);
            if (it == grad.end()) {
                it = grad.emplace(f, std::vector<double>(v, 0.0)).first;
                touched.push_back(f);
            }
            auto& row = it->second;
            for (size_t j = 0; j < v; ++j) row[j] += (probs[j] - (j == gold[t] ? 1.0 : 0.0)) * inv_t;
        }
        if (t < gold_toks.size()) prefix.push_back(gold_toks[t]);
    }

    if (lr != 0.0) {
        std::sort(touched.begin(), touched.end());
        for (uint32_t f : touched) {
            auto& w = weight_row(state, f);
            const auto& g = grad.at(f);
            for (size_t j = 0; j < v; ++j) w[j] -= lr * (g[j] + l2 * w[j]);
        }
    }
    ++state.step_count;
    return loss * inv_t;
}

// ---------------------------------------------------------------------------
// Snapshot encoding
// ---------------------------------------------------------------------------

constexpr uint32_t kMagic = 0x434c4853;  // "CLHS"
constexpr uint32_t kVersion = 1;

void put_u32(std::vector<uint8_t>& b, uint32_t x) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>(x >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& b, uint64_t x) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<uint8_t>(x >> (8 * i)));
}

void put_f64(std::vector<uint8_t>& b, double x) { put_u64(b, std::bit_cast<uint64_t>(x)); }

void put_str(std::vector<uint8_t>& b, const std::string& s) {
    put_u32(b, static_cast<uint32_t>(s.size()));
    b.insert(b.end(), s.begin(), s.end());
}

struct Reader {
    const std::vector<uint8_t>& b;
    size_t off = 0;

    void need(size_t n) const {
        if (off + n > b.size()) {
            throw std::runtime_error("snapshot: truncated payload at offset " + std::to_string(off));
        }
    }
    uint32_t u32() {
        need(4);
        uint32_t x = 0;
        for (int i = 0; i < 4; ++i) x |= static_cast<uint32_t>(b[off + i]) << (8 * i);
        off += 4;
        return x;
    }
    uint64_t u64() {
        need(8);
        uint64_t x = 0;
        for (int i = 0; i < 8; ++i) x |= static_cast<uint64_t>(b[off + i]) << (8 * i);
        off += 8;
        return x;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const uint32_t n = u32();
        need(n);
        std::string s(b.begin() + static_cast<long>(off), b.begin() + static_cast<long>(off + n));
        off += n;
        return s;
    }
};

} // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

void TrainHyper::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("TrainHyper: learning_rate must be finite and >= 0");
    }
    if (batch_size < 1) throw std::invalid_argument("TrainHyper: batch_size must be >= 1");
    if (l2 < 0.0) throw std::invalid_argument("TrainHyper: l2 must be >= 0");
}

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(const std::vector<std::string>& sorted_tokens) {
    tokens_ = {kBosToken, kEosToken, kUnkToken};
    for (const auto& t : sorted_tokens) {
        if (t == kBosToken || t == kEosToken || t == kUnkToken) continue;
        tokens_.push_back(t);
    }
    for (uint32_t i = 0; i < tokens_.size(); ++i) index_[tokens_[i]] = i;
}

uint32_t Vocab::id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(uint32_t id) const {
    if (id >= tokens_.size()) throw std::out_of_range("Vocab: bad token id");
    return tokens_[id];
}

LearnerState init_learner(uint64_t seed, const std::vector<const corpus::Dataset*>& vocab_source,
                          const FeatureConfig& feature_config) {
    if (vocab_source.empty()) throw std::invalid_argument("init_learner: empty vocab source");

    std::set<std::string> toks;
    for (const auto* d : vocab_source) {
        for (const auto& ex : d->examples) {
            for (const auto& t : split_ws(ex.input_text)) toks.insert(t);
            for (const auto& t : split_ws(ex.target_text)) toks.insert(t);
        }
    }

    LearnerState state;
    state.vocab = Vocab(std::vector<std::string>(toks.begin(), toks.end()));
    state.feature_config = feature_config;
    state.rng_state = seed;
    return state;
}

LearnerState pretrain_on_mixture(LearnerState state, const std::vector<corpus::Dataset>& mixture,
                                 const TrainHyper& hyper, uint64_t seed) {
    hyper.validate();
    if (hyper.epochs == 0 || mixture.empty()) return state;

    corpus::Dataset pool;
    pool.task_id = "pretrain-mixture";
    pool.split = corpus::Split::Train;
    for (const auto& d : mixture) {
        for (const auto& ex : d.examples) pool.examples.push_back(ex);
    }
    if (pool.empty()) return state;

    const auto stream =
        rehearsal::compose_training_stream(pool, {}, hyper.batch_size, hyper.epochs, seed);
    return train_on_stream(std::move(state), stream, hyper).state;
}

double train_on_batch(LearnerState& state, const std::vector<rehearsal::StreamItem>& batch,
                      const TrainHyper& hyper) {
    if (batch.empty()) throw std::invalid_argument("train_on_batch: empty batch");
    double batch_loss = 0.0;
    for (const auto& item : batch) {
        batch_loss += train_example(state, item.example, hyper.learning_rate, hyper.l2);
    }
    return batch_loss / static_cast<double>(batch.size());
}

TrainResult train_on_stream(LearnerState state, const rehearsal::TrainStream& stream,
                            const TrainHyper& hyper) {
    hyper.validate();
    if (stream.batches.empty()) throw std::invalid_argument("train_on_stream: empty stream");

    TrainResult out;
    out.batch_losses.reserve(stream.batches.size());
    for (size_t b = 0; b < stream.batches.size(); ++b) {
        const double batch_loss = train_on_batch(state, stream.batches[b], hyper);
        if (!std::isfinite(batch_loss)) {
            throw std::runtime_error("train_on_stream: non-finite loss at batch " + std::to_string(b));
        }
        out.batch_losses.push_back(batch_loss);
    }
    out.state = std::move(state);
    return out;
}

std::string generate(const LearnerState& state, const std::string& input_text, size_t max_len) {
    if (max_len < 1) throw std::invalid_argument("generate: max_len must be >= 1");
    const auto ef = input_features(state.feature_config, input_text);

    std::vector<std::string> prefix = {kBosToken};
    std::vector<uint32_t> feats;
    std::vector<double> scores;
    std::vector<std::string> emitted;

    for (size_t t = 0; t < max_len; ++t) {
        step_features(state.feature_config, ef, prefix, feats);
        scores_for(state, feats, scores);
        const uint32_t next = argmax_lowest(scores);
        if (next == Vocab::kEos) break;
        const std::string& tok = state.vocab.token(next);
        emitted.push_back(tok);
        prefix.push_back(tok);
    }
    return join(emitted);
}

double example_loss(const LearnerState& state, const corpus::Example& ex) {
    return forward_example(state, ex, nullptr);
}

std::unordered_map<uint64_t, double> example_gradient(const LearnerState& state,
                                                      const corpus::Example& ex) {
    std::unordered_map<uint64_t, double> grad;
    forward_example(state, ex, &grad);
    return grad;
}

std::vector<double> next_token_distribution(const LearnerState& state,
                                            const std::string& input_text,
                                            const std::vector<std::string>& prefix_tokens) {
    const auto ef = input_features(state.feature_config, input_text);
    std::vector<std::string> prefix = {kBosToken};
    prefix.insert(prefix.end(), prefix_tokens.begin(), prefix_tokens.end());

    std::vector<uint32_t> feats;
    std::vector<double> probs;
    step_features(state.feature_config, ef, prefix, feats);
    scores_for(state, feats, probs);
    softmax_inplace(probs);
    return probs;
}

std::vector<uint8_t> snapshot(const LearnerState& state) {
    std::vector<uint8_t> b;
    put_u32(b, kMagic);
    put_u32(b, kVersion);
    put_u64(b, state.rng_state);
    put_u64(b, state.step_count);
    put_u32(b, static_cast<uint32_t>(state.feature_config.max_order));
    put_u64(b, state.feature_config.hash_dim);
    put_u32(b, static_cast<uint32_t>(state.vocab.size()));
    for (const auto& t : state.vocab.tokens()) put_str(b, t);

    std::vector<uint32_t> feats;
    feats.reserve(state.weights.size());
    for (const auto& [f, _] : state.weights) feats.push_back(f);
    std::sort(feats.begin(), feats.end());

    uint64_t triples = 0;
    for (uint32_t f : feats) {
        for (double w : state.weights.at(f)) {
            if (w != 0.0) ++triples;
        }
    }
    put_u64(b, triples);
    for (uint32_t f : feats) {
        const auto& row = state.weights.at(f);
        for (uint32_t j = 0; j < row.size(); ++j) {
            if (row[j] != 0.0) {
                put_u32(b, f);
                put_u32(b, j);
                put_f64(b, row[j]);
            }
        }
    }
    return b;
}

LearnerState restore(const std::vector<uint8_t>& bytes) {
    Reader r{bytes};
    if (r.u32() != kMagic) throw std::runtime_error("snapshot: bad magic at offset 0");
    const uint32_t version = r.u32();
    if (version != kVersion) {
        throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
    }

    LearnerState state;
    state.rng_state = r.u64();
    state.step_count = r.u64();
    state.feature_config.max_order = r.u32();
    state.feature_config.hash_dim = r.u64();

    const uint32_t vsize = r.u32();
    if (vsize < 3) throw std::runtime_error("snapshot: vocab too small");
    std::vector<std::string> toks;
    toks.reserve(vsize);
    for (uint32_t i = 0; i < vsize; ++i) toks.push_back(r.str());
    state.vocab = Vocab(std::vector<std::string>(toks.begin() + 3, toks.end()));
    if (state.vocab.size() != vsize) throw std::runtime_error("snapshot: inconsistent vocab");

    const uint64_t triples = r.u64();
    for (uint64_t i = 0; i < triples; ++i) {
        const uint32_t f = r.u32();
        const uint32_t j = r.u32();
        const double w = r.f64();
        if (j >= vsize) throw std::runtime_error("snapshot: bad vocab id at offset " +
                                                 std::to_string(r.off));
        weight_row(state, f)[j] = w;
    }
    if (r.off != bytes.size()) {
        throw std::runtime_error("snapshot: trailing bytes at offset " + std::to_string(r.off));
    }
    return state;
}

void save_snapshot_file(const LearnerState& state, const std::string& path) {
    const auto bytes = snapshot(state);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
}

LearnerState load_snapshot_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return restore(bytes);
}

} // namespace clh::learner
