#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mcmccoup {

// Philox4x32-10 counter-based generator. The key is the 64-bit seed and the
// upper half of the 128-bit counter is the stream id, so every (seed, stream)
// pair owns a disjoint block of 2^64 counter values.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64();
  // uniform on the open interval (0, 1); log(u) is always finite
  double uniform();
  double normal();
  // sum of k squared standard normals without drawing them one by one
  double chi_squared(double k);
  double gamma(double shape);

  void fill_normal(Eigen::Ref<Eigen::VectorXd> out);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::vector<double> sample_gaussians(std::size_t n, RngStream& rng);

}  // namespace mcmccoup
