#include "tomo/kernels.hpp"

#include <string>

#include "tomo/errors.hpp"

namespace tomo {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_key(std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::mt19937_64 substream(std::uint64_t seed, std::string_view key) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ hash_key(key)));
}

namespace {

void check_inputs(const Matrix& drop, const std::vector<std::vector<std::size_t>>& paths,
                  const std::vector<std::string>& keys, int packets) {
  if (paths.size() != keys.size()) throw TomoError(ErrorKind::DimensionMismatch, "one key per path required");
  if (packets < 1) throw TomoError(ErrorKind::InvalidArgument, "packets per window must be >= 1");
  for (const auto& p : paths)
    for (auto e : p)
      if (static_cast<Eigen::Index>(e) >= drop.cols()) throw TomoError(ErrorKind::DimensionMismatch, "edge index out of range");
}

void simulate_column(const Matrix& drop, const std::vector<std::size_t>& path, const std::string& key, int packets,
                     std::uint64_t seed, Matrix& out, Eigen::Index col) {
  auto gen = substream(seed, key);
  for (Eigen::Index k = 0; k < drop.rows(); ++k) {
    double survive = 1.0;
    for (auto e : path) survive *= 1.0 - drop(k, static_cast<Eigen::Index>(e));
    std::binomial_distribution<int> draw(packets, survive);
    out(k, col) = static_cast<double>(draw(gen)) / packets;
  }
}

}  // namespace

Matrix simulate_received(const Matrix& drop, const std::vector<std::vector<std::size_t>>& paths,
                         const std::vector<std::string>& keys, int packets, std::uint64_t seed, Backend backend) {
  check_inputs(drop, paths, keys, packets);
  const auto np = static_cast<Eigen::Index>(paths.size());
  Matrix out(drop.rows(), np);
  if (backend == Backend::Serial) {
    for (Eigen::Index p = 0; p < np; ++p) simulate_column(drop, paths[p], keys[p], packets, seed, out, p);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index p = 0; p < np; ++p) simulate_column(drop, paths[p], keys[p], packets, seed, out, p);
  }
  return out;
}

Matrix simulate_received_packets(const Matrix& drop, const std::vector<std::vector<std::size_t>>& paths,
                                 const std::vector<std::string>& keys, int packets, std::uint64_t seed) {
  check_inputs(drop, paths, keys, packets);
  Matrix out(drop.rows(), static_cast<Eigen::Index>(paths.size()));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    auto gen = substream(seed, keys[p] + "/packets");
    for (Eigen::Index k = 0; k < drop.rows(); ++k) {
      int received = 0;
      for (int i = 0; i < packets; ++i) {
        bool alive = true;
        for (auto e : paths[p])
          if (u(gen) < drop(k, static_cast<Eigen::Index>(e))) alive = false;
        received += alive;
      }
      out(k, static_cast<Eigen::Index>(p)) = static_cast<double>(received) / packets;
    }
  }
  return out;
}

Matrix covariance_matrix(const Matrix& x, Backend backend) {
  const Eigen::Index n = x.rows(), s = x.cols();
  if (n < 2) throw TomoError(ErrorKind::TooShort, "need at least two observations");
  const Matrix centered = x.rowwise() - x.colwise().mean();
  Matrix c(s, s);
  auto entry = [&](Eigen::Index i, Eigen::Index j) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) acc += centered(k, i) * centered(k, j);
    return acc / static_cast<double>(n - 1);
  };
  if (backend == Backend::Serial) {
    for (Eigen::Index i = 0; i < s; ++i)
      for (Eigen::Index j = i; j < s; ++j) c(i, j) = c(j, i) = entry(i, j);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index i = 0; i < s; ++i)
      for (Eigen::Index j = i; j < s; ++j) c(i, j) = c(j, i) = entry(i, j);
  }
  return c;
}

}  // namespace tomo
