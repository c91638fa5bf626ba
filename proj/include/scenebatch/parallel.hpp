#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace scenebatch {

// Persistent worker pool with a blocking parallel_for. Chunks are disjoint,
// so any writes into per-index slots are race-free and schedule-independent.
class ThreadPool {
 public:
  // n <= 0 selects hardware concurrency. n == 1 keeps everything on the
  // calling thread (no workers spawned).
  explicit ThreadPool(int n = 0);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return static_cast<int>(workers_.size()) + 1; }

  // Runs fn(begin, end) over [0, count) split into roughly equal chunks.
  // Blocks until every chunk completed. Safe to call with count == 0.
  void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn);

 private:
  void worker_loop();
  bool run_chunk();  // returns false when pool is shutting down

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_work_;
  std::condition_variable cv_done_;
  const std::function<void(std::size_t, std::size_t)>* fn_ = nullptr;
  std::size_t count_ = 0;
  std::size_t chunk_ = 0;
  std::size_t next_ = 0;
  std::size_t pending_ = 0;
  uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace scenebatch
