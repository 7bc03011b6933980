// Scratch probe for tuning fixture dynamics. Not installed.
#include <cstdio>
#include <string>

#include "clh/corpus.hpp"
#include "clh/evaluation.hpp"
#include "clh/learner.hpp"
#include "clh/metrics.hpp"
#include "clh/rehearsal.hpp"
#include "clh/rng.hpp"

using namespace clh;

int main(int argc, char** argv) {
    double lr = argc > 1 ? std::atof(argv[1]) : 0.3;
    size_t epochs = argc > 2 ? static_cast<size_t>(std::atoi(argv[2])) : 3;
    size_t dim = argc > 3 ? static_cast<size_t>(std::atoi(argv[3])) : (1u << 18);
    double r_small = argc > 4 ? std::atof(argv[4]) : 0.01;
    size_t orders = argc > 5 ? static_cast<size_t>(std::atoi(argv[5])) : 3;

    corpus::FixtureConfig fc;
    fc.vocab_size = 24;
    fc.min_len = 3;
    fc.max_len = 8;
    fc.tasks = {
        {"copy", "copy", 2000, 300, 2000, false},
        {"reverse", "reverse", 1500, 300, 1500, false},
        {"keyword-insertion", "kwins", 1000, 300, 1000, false},
        {"reverse", "echo", 50, 250, 50, true},  // zero-shot analog
    };
    auto suite = corpus::generate_synthetic_suite(fc, 7);

    eval::TaskSet tasks;
    for (auto& ft : suite) tasks.tasks.push_back({ft.spec, ft.train, ft.test});

    std::vector<const corpus::Dataset*> vocab_src;
    for (auto& t : tasks.tasks) {
        vocab_src.push_back(&t.train);
        vocab_src.push_back(&t.test);
    }
    learner::FeatureConfig fcfg;
    fcfg.hash_dim = dim;
    fcfg.max_order = orders;
    auto base = learner::init_learner(11, vocab_src, fcfg);

    learner::TrainHyper hyper;
    hyper.learning_rate = lr;
    hyper.epochs = epochs;
    hyper.batch_size = 16;

    eval::EvalSettings settings;
    settings.eval_cap = 300;
    settings.seed = 3;

    eval::UpperBounds ubs;
    for (auto& t : tasks.tasks) {
        auto ub = eval::compute_upper_bound(t, base, hyper, 1, settings);
        ubs.values[t.spec.task_id] = ub.values;
        std::printf("UB %-8s", t.spec.task_id.c_str());
        for (auto& [m, v] : ub.values) std::printf("  %s=%.4f", m.c_str(), v);
        std::printf("\n");
    }

    auto schedule = rehearsal::build_task_schedule({"copy", "reverse", "kwins"}, {"echo"}, "forward");

    for (double r : {0.0, r_small, 1.0}) {
        eval::RunConfig rc;
        rc.run_id = "probe-r" + std::to_string(r);
        rc.schedule = schedule;
        rc.r = r;
        rc.seeds = {1, 11, 3};
        rc.hyper = hyper;
        rc.eval = settings;
        auto res = eval::run_continual_sequence(rc, tasks, base, ubs);
        std::printf("r=%-6g final RG:", r);
        for (auto& t : schedule.task_ids)
            std::printf(" %s=%.4f", t.c_str(), res.series.final_rg(t, "exact_match"));
        std::printf(" | echo raw=%.4f", res.series.series.at({"echo", "exact_match"}).back().raw);
        std::printf("\n  trajectories:");
        for (auto& t : schedule.task_ids) {
            std::printf(" %s=[", t.c_str());
            for (auto& p : res.series.series.at({t, "exact_match"})) std::printf("%.2f ", p.rg);
            std::printf("]");
        }
        std::printf("\n");

        if (r == r_small) {
            auto rep = eval::compositionality_sweep(res.final_state, tasks.by_id("kwins"), 3, 5, settings);
            std::printf("  comp: n1=%.3f n2=%.3f n3=%.3f | ctl: %.3f/%.3f/%.3f\n",
                        rep.constrained[1], rep.constrained[2], rep.constrained[3],
                        rep.control[1], rep.control[2], rep.control[3]);
        }
    }
    return 0;
}
