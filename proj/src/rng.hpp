#pragma once

#include <cstdint>
#include <random>

namespace bnbar {

// splitmix64 finalizer, used for seed conditioning and stream derivation
std::uint64_t mix64(std::uint64_t z);

// seed for a derived stream, e.g. one Monte Carlo replication.
// The chain is mix64(mix64(base) ^ mix64(a + C1) ^ mix64(b + C2)) with
// fixed odd constants C1, C2, so (base, a, b) triples map to well
// separated seeds and the mapping is stable across platforms.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

// Deterministic random stream. The samplers are hand rolled on top of
// mt19937_64 so that a given seed produces identical draws regardless of
// platform or standard library; std::*_distribution makes no such promise.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(mix64(seed)) {}

  static RngStream derive(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return RngStream(derive_seed(base, a, b));
  }

  std::uint64_t next_u64() { return gen_(); }

  // uniform on (0, 1); zero is rejected so logs are always safe
  double uniform();

  // standard normal, polar rejection
  double normal();

  // Gamma(shape, scale), Marsaglia-Tsang for shape >= 1 with the usual
  // power-of-uniform boost below 1
  double gamma(double shape, double scale);

  // Beta(a, b) as a gamma ratio
  double beta(double a, double b);

  // Poisson(mean): product inversion below mean 10, transformed
  // rejection (PTRS) above
  long long poisson(double mean);

 private:
  std::mt19937_64 gen_;
};

}  // namespace bnbar
