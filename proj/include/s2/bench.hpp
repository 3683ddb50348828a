#pragma once

#include "s2/backbone.hpp"
#include "s2/wrapper.hpp"

#include <functional>
#include <string>
#include <vector>

namespace s2 {

struct BenchReport {
    std::string label;
    std::vector<std::int64_t> scales;
    int threads = 0;
    std::int64_t images = 0;
    std::int64_t total_forwards = 0;
    double wall_seconds = 0.0;
    double images_per_second = 0.0;
    std::vector<double> per_thread_utilization; // busy / wall per worker
};

// Deterministic pseudo-random RGB image, the fixed input for benchmarks
// and determinism checks.
Image synthetic_image(std::int64_t side, std::uint64_t seed);

// Repeats whole extractions of a fixed synthetic image until min_seconds
// of wall time elapse (after one untimed warmup extraction) and reports
// the steady-state rate.
BenchReport run_throughput(const ViTConfig& cfg, const WeightStore& w, const ScaleSet& scales,
                           int threads, double min_seconds, const std::string& label = "");

// True iff `run` produces byte-identical tensors for 1..max_threads.
bool outputs_identical_across_threads(const std::function<Tensor(int)>& run, int max_threads);

// Applies the check above to s2_extract on a fixed random image with
// default options. False signals a broken scheduling/merge contract.
bool verify_parallel_determinism(const ViTConfig& cfg, const WeightStore& w, const ScaleSet& scales,
                                 int max_threads);

} // namespace s2
