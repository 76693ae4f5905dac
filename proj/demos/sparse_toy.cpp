// Trains the two-layer task with AdamW and HORST under AC/DC and prints
// held-out accuracy plus the weight distribution of the dense models.
#include <cstdio>

#include "horst/sparsify.hpp"

using namespace horst;

int main(int argc, char** argv) {
    std::size_t steps = argc > 1 ? std::stoul(argv[1]) : 1000;
    TwoLayerTaskConfig tc;
    tc.N = 1000;
    tc.N_val = 500;
    auto task = two_layer_task(0, tc);
    auto sched = AcdcSchedule::make_default(steps, 0.9);

    std::printf("%-8s %10s %10s %10s %12s\n", "opt", "dense_acc", "acdc_acc", "near_zero", "kurtosis");
    for (auto kind : {OptimizerKind::adamw, OptimizerKind::horst}) {
        TrainSettings ts;
        ts.kind = kind;
        ts.cfg.eta = 1e-3;
        ts.cfg.lambda = 0.05;
        ts.cfg.alpha = kind == OptimizerKind::horst ? 5.0 : 0.0;
        ts.cfg.schedule = ScheduleKind::cosine;
        ts.cfg.warmup = steps / 20;
        ts.steps = steps;
        auto dense = dense_train(task, ts, 1);
        auto acdc = acdc_train(task, ts, sched, 1);
        Vec w;
        for (const char* s : {"W1", "W2"}) {
            const Segment& seg = dense.segment(s);
            w.insert(w.end(), dense.values().begin() + seg.start, dense.values().begin() + seg.start + seg.length);
        }
        auto dist = weight_distribution_report(w);
        std::printf("%-8s %10.4f %10.4f %10.4f %12.4f\n", to_string(kind), task.net.accuracy(dense.values(), task.val),
                    task.net.accuracy(acdc.theta.values(), task.val), dist.frac_near_zero, dist.excess_kurtosis);
    }
    return 0;
}
