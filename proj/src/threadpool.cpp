#include "s2/threadpool.hpp"

#include "s2/errors.hpp"

#include <chrono>

namespace s2 {

// One dispatched batch. Workers clock in on a shared_ptr snapshot taken
// under the pool mutex, so a worker can never observe a half-published
// batch or touch a newer one than it signed up for. A task only executes
// while its index keeps `remaining` above zero, which keeps the caller
// (and the task functor it owns) alive until the last task finishes.
struct WorkerPool::Batch {
    std::int64_t count = 0;
    const std::function<void(std::int64_t)>* task = nullptr;
    std::atomic<std::int64_t> next{0};
    std::atomic<std::int64_t> remaining{0};

    std::mutex done_mutex;
    std::condition_variable done_cv;
    std::exception_ptr first_error;
};

WorkerPool::WorkerPool(int threads) : thread_count_(threads), busy_ns_(static_cast<std::size_t>(threads)) {
    if (threads < 1) throw InputError("worker pool needs at least 1 thread");
    for (auto& b : busy_ns_) b.store(0, std::memory_order_relaxed);
    workers_.reserve(static_cast<std::size_t>(threads - 1));
    for (int i = 1; i < threads; ++i) {
        workers_.emplace_back([this, i] { worker_loop(static_cast<std::size_t>(i)); });
    }
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        shutdown_ = true;
    }
    start_cv_.notify_all();
    for (std::thread& t : workers_) t.join();
}

void WorkerPool::work(Batch& batch, std::size_t slot) {
    using clock = std::chrono::steady_clock;
    for (;;) {
        const std::int64_t idx = batch.next.fetch_add(1, std::memory_order_relaxed);
        if (idx >= batch.count) return;
        const auto begin = clock::now();
        try {
            (*batch.task)(idx);
        } catch (...) {
            {
                std::lock_guard<std::mutex> lock(batch.done_mutex);
                if (!batch.first_error) batch.first_error = std::current_exception();
            }
            // Drain the queue; unclaimed tasks still owe a completion
            // tick, settled here in one subtraction.
            const std::int64_t claimed = batch.next.exchange(batch.count, std::memory_order_relaxed);
            if (claimed < batch.count) {
                const std::int64_t skipped = batch.count - claimed;
                if (batch.remaining.fetch_sub(skipped, std::memory_order_acq_rel) == skipped) {
                    std::lock_guard<std::mutex> lock(batch.done_mutex);
                    batch.done_cv.notify_all();
                }
            }
        }
        const auto end = clock::now();
        busy_ns_[slot].fetch_add(std::chrono::duration_cast<std::chrono::nanoseconds>(end - begin).count(),
                                 std::memory_order_relaxed);
        if (batch.remaining.fetch_sub(1, std::memory_order_acq_rel) == 1) {
            std::lock_guard<std::mutex> lock(batch.done_mutex);
            batch.done_cv.notify_all();
        }
    }
}

void WorkerPool::worker_loop(std::size_t slot) {
    std::uint64_t seen_generation = 0;
    for (;;) {
        std::shared_ptr<Batch> batch;
        {
            std::unique_lock<std::mutex> lock(mutex_);
            start_cv_.wait(lock, [&] { return shutdown_ || generation_ != seen_generation; });
            if (shutdown_) return;
            seen_generation = generation_;
            batch = current_;
        }
        if (batch) work(*batch, slot);
    }
}

void WorkerPool::run(std::int64_t count, const std::function<void(std::int64_t)>& task) {
    if (count <= 0) return;
    if (thread_count_ == 1) {
        // Inline path: indices strictly in order, no synchronization.
        using clock = std::chrono::steady_clock;
        const auto begin = clock::now();
        for (std::int64_t i = 0; i < count; ++i) task(i);
        const auto end = clock::now();
        busy_ns_[0].fetch_add(std::chrono::duration_cast<std::chrono::nanoseconds>(end - begin).count(),
                              std::memory_order_relaxed);
        return;
    }

    auto batch = std::make_shared<Batch>();
    batch->count = count;
    batch->task = &task;
    batch->remaining.store(count, std::memory_order_relaxed);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        current_ = batch;
        ++generation_;
    }
    start_cv_.notify_all();
    work(*batch, 0);
    {
        std::unique_lock<std::mutex> lock(batch->done_mutex);
        batch->done_cv.wait(lock, [&] { return batch->remaining.load(std::memory_order_acquire) == 0; });
    }
    if (batch->first_error) std::rethrow_exception(batch->first_error);
}

std::vector<double> WorkerPool::busy_seconds() const {
    std::vector<double> out(busy_ns_.size());
    for (std::size_t i = 0; i < busy_ns_.size(); ++i) {
        out[i] = static_cast<double>(busy_ns_[i].load(std::memory_order_relaxed)) * 1e-9;
    }
    return out;
}

void WorkerPool::reset_busy() {
    for (auto& b : busy_ns_) b.store(0, std::memory_order_relaxed);
}

} // namespace s2
