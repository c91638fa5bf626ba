#include "scenebatch/parallel.hpp"

#include <algorithm>

namespace scenebatch {

ThreadPool::ThreadPool(int n) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int total = n <= 0 ? hw : n;
  for (int i = 1; i < total; ++i) {
    workers_.emplace_back([this] { worker_loop(); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    stop_ = true;
  }
  cv_work_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::parallel_for(std::size_t count,
                              const std::function<void(std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  if (workers_.empty() || count == 1) {
    fn(0, count);
    return;
  }
  std::size_t parts = std::min<std::size_t>(count, static_cast<std::size_t>(size()) * 4);
  {
    std::lock_guard<std::mutex> lk(mu_);
    fn_ = &fn;
    count_ = count;
    chunk_ = (count + parts - 1) / parts;
    next_ = 0;
    pending_ = (count + chunk_ - 1) / chunk_;
    ++generation_;
  }
  cv_work_.notify_all();
  // The caller participates too.
  while (run_chunk()) {
  }
  std::unique_lock<std::mutex> lk(mu_);
  cv_done_.wait(lk, [this] { return pending_ == 0; });
  fn_ = nullptr;
  count_ = 0;
}

bool ThreadPool::run_chunk() {
  std::size_t begin, end;
  const std::function<void(std::size_t, std::size_t)>* fn;
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (fn_ == nullptr || next_ >= count_) return false;
    begin = next_;
    end = std::min(count_, begin + chunk_);
    next_ = end;
    fn = fn_;
  }
  (*fn)(begin, end);
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (--pending_ == 0) cv_done_.notify_all();
  }
  return true;
}

void ThreadPool::worker_loop() {
  uint64_t seen = 0;
  for (;;) {
    {
      std::unique_lock<std::mutex> lk(mu_);
      cv_work_.wait(lk, [&] { return stop_ || (fn_ != nullptr && generation_ != seen && next_ < count_); });
      if (stop_) return;
      seen = generation_;
    }
    while (run_chunk()) {
    }
  }
}

}  // namespace scenebatch
