#include "clh/rehearsal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "clh/rng.hpp"

namespace clh::rehearsal {

RehearsalBuffer build_rehearsal_buffer(const corpus::Dataset& prior,
                                       const corpus::TaskSpec& spec,
                                       const RehearsalConfig& cfg) {
    if (cfg.r < 0.0 || cfg.r > 1.0) {
        throw std::invalid_argument("build_rehearsal_buffer: r must be in [0, 1]");
    }
    if (spec.zero_shot_only || !spec.rehearsable) {
        throw std::invalid_argument("zero-shot tasks are never rehearsed (task " + spec.task_id + ")");
    }
    if (prior.split != corpus::Split::Train) {
        throw std::invalid_argument("build_rehearsal_buffer: prior must be a train split");
    }

    RehearsalBuffer buf;
    buf.task_id = prior.task_id;
    buf.source_size = prior.size();
    if (cfg.r == 0.0 || prior.empty()) return buf;

    size_t k = static_cast<size_t>(std::floor(cfg.r * static_cast<double>(prior.size())));
    if (k == 0) k = 1;  // r > 0 keeps at least one example

    Rng rng(derive_seed(cfg.seed, "buffer:" + prior.task_id));
    auto idx = rng.sample_without_replacement(prior.size(), k);
    std::sort(idx.begin(), idx.end());
    buf.examples.reserve(k);
    for (size_t i : idx) buf.examples.push_back(prior.examples[i]);
    return buf;
}

TrainStream compose_training_stream(const corpus::Dataset& current,
                                    const std::vector<RehearsalBuffer>& buffers,
                                    size_t batch_size, size_t epochs, uint64_t seed) {
    if (current.empty()) throw std::invalid_argument("compose_training_stream: empty current dataset");
    if (batch_size < 1) throw std::invalid_argument("compose_training_stream: batch_size must be >= 1");

    std::vector<StreamItem> pool;
    pool.reserve(current.size());
    for (const auto& ex : current.examples) pool.push_back({ex, current.task_id});
    for (const auto& b : buffers) {
        for (const auto& ex : b.examples) pool.push_back({ex, b.task_id});
    }

    TrainStream stream;
    stream.batch_size = batch_size;
    stream.epochs = epochs;
    stream.items_per_epoch = pool.size();

    std::vector<size_t> order(pool.size());
    for (size_t e = 0; e < epochs; ++e) {
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(derive_seed(seed, "epoch:" + std::to_string(e)));
        rng.shuffle(order);
        for (size_t off = 0; off < order.size(); off += batch_size) {
            std::vector<StreamItem> batch;
            const size_t end = std::min(off + batch_size, order.size());
            batch.reserve(end - off);
            for (size_t i = off; i < end; ++i) batch.push_back(pool[order[i]]);
            stream.batches.push_back(std::move(batch));
        }
    }
    return stream;
}

TaskSchedule build_task_schedule(const std::vector<std::string>& task_ids,
                                 const std::vector<std::string>& zero_shot_ids,
                                 const std::string& direction) {
    if (task_ids.empty()) throw std::invalid_argument("build_task_schedule: empty schedule");
    if (direction != "forward" && direction != "reversed") {
        throw std::invalid_argument("build_task_schedule: direction must be forward or reversed");
    }

    std::set<std::string> seen;
    for (const auto& t : task_ids) {
        if (!seen.insert(t).second) {
            throw std::invalid_argument("build_task_schedule: duplicate task id " + t);
        }
    }
    for (const auto& z : zero_shot_ids) {
        if (seen.count(z)) {
            throw std::invalid_argument("build_task_schedule: task " + z +
                                        " cannot be both scheduled and zero-shot");
        }
    }

    TaskSchedule s;
    s.task_ids = task_ids;
    s.zero_shot_eval_ids = zero_shot_ids;
    s.reversed = direction == "reversed";
    if (s.reversed) std::reverse(s.task_ids.begin(), s.task_ids.end());
    return s;
}

std::string buffer_filename(const std::string& task_id, double r, uint64_t seed) {
    char rbuf[32];
    std::snprintf(rbuf, sizeof(rbuf), "%g", r);
    return "buffer_" + task_id + "_" + rbuf + "_" + std::to_string(seed) + ".jsonl";
}

} // namespace clh::rehearsal
