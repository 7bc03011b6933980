#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clh/corpus.hpp"

namespace clh::rehearsal {

struct RehearsalConfig {
    double r = 0.0;     // rehearsal fraction in [0, 1]
    uint64_t seed = 0;  // buffer sampling seed
};

// Frozen sample of a completed task's train split. Size is floor(r * |prior|)
// with a minimum of 1 when r > 0 and the floor is 0.
struct RehearsalBuffer {
    std::string task_id;
    std::vector<corpus::Example> examples;
    size_t source_size = 0;
};

struct StreamItem {
    corpus::Example example;
    std::string origin_task_id;
};

// Ordered, seed-deterministic batch sequence: per epoch the union multiset of
// the current task's data and all buffers, shuffled and chunked.
struct TrainStream {
    std::vector<std::vector<StreamItem>> batches;
    size_t batch_size = 0;
    size_t epochs = 0;
    size_t items_per_epoch = 0;

    size_t total_steps() const { return batches.size(); }
};

struct TaskSchedule {
    std::vector<std::string> task_ids;
    std::vector<std::string> zero_shot_eval_ids;
    bool reversed = false;
};

// Seeded uniform sample without replacement from a completed task's train
// split. Throws for zero-shot tasks: their data never enters any buffer.
RehearsalBuffer build_rehearsal_buffer(const corpus::Dataset& prior,
                                       const corpus::TaskSpec& spec,
                                       const RehearsalConfig& cfg);

TrainStream compose_training_stream(const corpus::Dataset& current,
                                    const std::vector<RehearsalBuffer>& buffers,
                                    size_t batch_size, size_t epochs, uint64_t seed);

TaskSchedule build_task_schedule(const std::vector<std::string>& task_ids,
                                 const std::vector<std::string>& zero_shot_ids,
                                 const std::string& direction);

// Canonical on-disk name for a persisted buffer, so re-runs can load instead
// of resampling.
std::string buffer_filename(const std::string& task_id, double r, uint64_t seed);

} // namespace clh::rehearsal
