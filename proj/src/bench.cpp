#include "s2/bench.hpp"

#include "s2/errors.hpp"
#include "s2/rng.hpp"

#include <chrono>

namespace s2 {

Image synthetic_image(std::int64_t side, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Tensor t({3, side, side});
    for (float& v : t.data()) v = rng.next_float();
    return Image(std::move(t));
}

BenchReport run_throughput(const ViTConfig& cfg, const WeightStore& w, const ScaleSet& scales,
                           int threads, double min_seconds, const std::string& label) {
    if (threads < 1) throw InputError("throughput run needs at least 1 thread");
    if (!(min_seconds > 0.0)) throw InputError("throughput run needs a positive duration");

    const Image input = synthetic_image(scales.base, 0xBE7C5EEDull);
    const S2Options opts; // split + concat, interpolate from base
    WorkerPool pool(threads);

    s2_extract(cfg, w, input, scales, opts, pool); // warmup
    pool.reset_busy();

    using clock = std::chrono::steady_clock;
    const auto begin = clock::now();
    std::int64_t images = 0;
    double wall = 0.0;
    do {
        s2_extract(cfg, w, input, scales, opts, pool);
        ++images;
        wall = std::chrono::duration<double>(clock::now() - begin).count();
    } while (wall < min_seconds);

    BenchReport report;
    report.label = label;
    report.scales = scales.sizes;
    report.threads = threads;
    report.images = images;
    report.total_forwards = images * total_forwards(scales);
    report.wall_seconds = wall;
    report.images_per_second = static_cast<double>(images) / wall;
    for (double busy : pool.busy_seconds()) report.per_thread_utilization.push_back(busy / wall);
    return report;
}

bool outputs_identical_across_threads(const std::function<Tensor(int)>& run, int max_threads) {
    if (max_threads < 2) throw InputError("determinism check needs max_threads >= 2");
    const Tensor reference = run(1);
    for (int t = 2; t <= max_threads; ++t) {
        if (!reference.same_bits(run(t))) return false;
    }
    return true;
}

bool verify_parallel_determinism(const ViTConfig& cfg, const WeightStore& w, const ScaleSet& scales,
                                 int max_threads) {
    const Image input = synthetic_image(scales.base, 0xD00DF1Dull);
    const S2Options opts;
    return outputs_identical_across_threads(
        [&](int threads) { return s2_extract(cfg, w, input, scales, opts, threads).features; }, max_threads);
}

} // namespace s2
