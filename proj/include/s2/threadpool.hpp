#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace s2 {

// Fixed-size pool executing an indexed batch of tasks. The calling thread
// participates as worker 0, so a 1-thread pool runs everything inline.
// Tasks are handed out through an atomic counter; callers get determinism
// by having each task write only to its own pre-assigned output slot.
class WorkerPool {
public:
    explicit WorkerPool(int threads);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    // Runs task(i) for i in [0, count) and blocks until all complete.
    // The first exception thrown by any task is rethrown here; remaining
    // tasks are abandoned.
    void run(std::int64_t count, const std::function<void(std::int64_t)>& task);

    int threads() const { return thread_count_; }

    // Accumulated per-worker task time since construction or the last
    // reset, in seconds. Slot 0 is the calling thread.
    std::vector<double> busy_seconds() const;
    void reset_busy();

private:
    struct Batch;

    void worker_loop(std::size_t slot);
    void work(Batch& batch, std::size_t slot);

    int thread_count_;
    std::vector<std::thread> workers_;
    std::vector<std::atomic<std::int64_t>> busy_ns_;

    std::mutex mutex_;
    std::condition_variable start_cv_;
    std::uint64_t generation_ = 0;
    bool shutdown_ = false;
    std::shared_ptr<Batch> current_;
};

} // namespace s2
