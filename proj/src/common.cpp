#include "fsg/common.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace fsg {

namespace {

std::atomic<unsigned> g_workers{0};

unsigned default_workers() {
  if (const char* env = std::getenv("FSG_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// Runs `work` on `workers` threads, rethrowing the first captured exception.
void run_workers(unsigned workers, const std::function<void()>& work) {
  if (workers <= 1) {
    work();
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  auto guarded = [&] {
    try {
      work();
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) threads.emplace_back(guarded);
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

void set_worker_count(unsigned n) { g_workers.store(n); }

unsigned worker_count() {
  unsigned n = g_workers.load();
  return n == 0 ? default_workers() : n;
}

void parallel_chunks(std::size_t begin, std::size_t end,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  std::size_t total = end > begin ? end - begin : 0;
  if (total == 0) return;
  unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), total));
  if (workers <= 1) {
    fn(begin, end);
    return;
  }
  std::size_t chunk = (total + workers - 1) / workers;
  std::atomic<unsigned> next{0};
  run_workers(workers, [&] {
    for (;;) {
      unsigned t = next.fetch_add(1);
      std::size_t lo = begin + std::size_t(t) * chunk;
      if (lo >= end) return;
      fn(lo, std::min(end, lo + chunk));
    }
  });
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
  parallel_chunks(begin, end, [&fn](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  });
}

void parallel_blocks(std::size_t n_items, std::size_t n_blocks,
                     const std::function<void(std::size_t, std::size_t,
                                              std::size_t)>& fn) {
  if (n_items == 0 || n_blocks == 0) return;
  n_blocks = std::min(n_blocks, n_items);
  std::size_t chunk = (n_items + n_blocks - 1) / n_blocks;
  std::atomic<std::size_t> next{0};
  unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), n_blocks));
  run_workers(workers, [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      std::size_t lo = b * chunk;
      std::size_t hi = std::min(n_items, lo + chunk);
      if (lo < hi) fn(b, lo, hi);
    }
  });
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::size_t peak_rss_bytes() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream ss(line.substr(6));
      std::size_t kb = 0;
      ss >> kb;
      return kb * 1024;
    }
  }
  return 0;
}

}  // namespace fsg
