#include "smoothcat/util.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace smoothcat {

std::uint64_t fnv1a(std::uint64_t seed, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed ? seed : 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a(std::uint64_t seed, const std::string& s) {
  return fnv1a(seed, s.data(), s.size());
}

std::uint64_t fnv1a(std::uint64_t seed, std::uint64_t v) {
  return fnv1a(seed, &v, sizeof v);
}

namespace {
std::atomic<int> g_default_threads{1};
}

void set_default_threads(int threads) {
  g_default_threads.store(threads < 1 ? 1 : threads);
}

int default_threads() { return g_default_threads.load(); }

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 0) threads = default_threads();
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  int count = std::min<std::size_t>(threads, n);
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace smoothcat
