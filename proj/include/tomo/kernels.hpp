#pragma once

// Numeric hot spots. Each kernel has an OpenMP version and a plain serial
// reference; both give bit-identical output for the same inputs because every
// random draw comes from a substream keyed by what it simulates, never by the
// thread that happens to run it.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "tomo/linsolve.hpp"

namespace tomo {

enum class Backend { Serial, Parallel };

/// 64-bit mixer used to derive substream seeds.
std::uint64_t splitmix64(std::uint64_t x);
/// FNV-1a over the bytes of `key`.
std::uint64_t hash_key(std::string_view key);
/// Generator for the substream (seed, key).
std::mt19937_64 substream(std::uint64_t seed, std::string_view key);

/// Received-packet fractions, windows x paths.
/// drop(k, e): drop probability of edge e in window k; paths: edge indices;
/// keys: one stable name per path (substream key). Each entry is a
/// Binomial(packets, prod(1 - p_e)) count over `packets`, which has the same
/// law as sending the packets one by one through independent edges.
Matrix simulate_received(const Matrix& drop, const std::vector<std::vector<std::size_t>>& paths,
                         const std::vector<std::string>& keys, int packets, std::uint64_t seed,
                         Backend backend = Backend::Parallel);

/// Packet-by-packet Bernoulli reference for the above (slow; tests only).
Matrix simulate_received_packets(const Matrix& drop, const std::vector<std::vector<std::size_t>>& paths,
                                 const std::vector<std::string>& keys, int packets, std::uint64_t seed);

/// Unbiased sample covariance of the columns of x (rows are observations).
Matrix covariance_matrix(const Matrix& x, Backend backend = Backend::Parallel);

}  // namespace tomo
