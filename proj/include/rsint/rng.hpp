#pragma once

// Counter-based random streams.
//
// Every Monte Carlo path draws from its own stream identified by
// (experiment seed, path index, substream).  Streams are pure functions of
// their id, so ensembles do not depend on thread count or execution order.

#include <array>
#include <cstdint>
#include <span>

namespace rsint {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Substream tags reserved by the library.
enum class Substream : std::uint32_t {
  path = 0,
  eval_rule = 1,
  bootstrap = 2,
  partition = 3,
  marginal = 4,
};

struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  std::uint32_t substream = 0;

  StreamId() = default;
  StreamId(std::uint64_t seed_, std::uint64_t path_, std::uint32_t sub = 0)
      : seed(seed_), path(path_), substream(sub) {}
  StreamId(std::uint64_t seed_, std::uint64_t path_, Substream sub)
      : seed(seed_), path(path_), substream(static_cast<std::uint32_t>(sub)) {}

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

class RandomStream {
 public:
  explicit RandomStream(StreamId id);

  std::uint32_t next_u32();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  void fill_normal(std::span<double> out);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  const StreamId& id() const noexcept { return id_; }

 private:
  void refill();

  StreamId id_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rsint
