#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace smoothcat {

/// Base class for all hard failures raised by the engine.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (unknown ids, carrier mismatch, bad syntax).
struct InputError : Error {
  using Error::Error;
};

/// A configured resource bound was exceeded.
struct CapError : Error {
  std::uint64_t bound = 0;
  std::uint64_t requested = 0;
  CapError(const std::string& what, std::uint64_t bound_, std::uint64_t requested_)
      : Error(what), bound(bound_), requested(requested_) {}
};

/// Resource bounds for the exponential parts of the engine.
struct Caps {
  int max_carrier = 6;          // elements per carrier
  int max_test_objects = 4;     // objects in a test category
  int probe_carrier = 3;        // carrier sizes swept when checking "for all objects" laws
  int max_topology_scan = 4;    // carrier size for exhaustive topology enumeration
  std::uint64_t max_enum_candidates = (1ull << 24);  // structures considered per fibre
  std::uint64_t max_fibre_elements = 8192;           // structures stored per fibre
};

std::uint64_t fnv1a(std::uint64_t seed, const void* data, std::size_t len);
std::uint64_t fnv1a(std::uint64_t seed, const std::string& s);
std::uint64_t fnv1a(std::uint64_t seed, std::uint64_t v);

/// Runs fn(0..n-1), possibly on several threads. Callers get deterministic
/// results by writing to index-addressed slots only.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Thread count used by parallel_for when callers pass 0.
void set_default_threads(int threads);
int default_threads();

}  // namespace smoothcat
