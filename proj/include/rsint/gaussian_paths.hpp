#pragma once

// Exact fractional Brownian motion samplers.
//
// Two samplers are provided: a dense Cholesky factorisation of the fBm
// covariance on an arbitrary grid, and circulant embedding of the fractional
// Gaussian noise autocovariance on uniform grids.  Both are exact in
// distribution; they differ only in cost.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rsint/rng.hpp"

namespace rsint {

class HurstIndex {
 public:
  /// Throws ArgumentError unless 0 < h < 1.
  explicit HurstIndex(double h);
  double value() const noexcept { return h_; }
  operator double() const noexcept { return h_; }

 private:
  double h_;
};

class TimeGrid {
 public:
  /// Strictly increasing, first point >= 0, at least one point.
  explicit TimeGrid(std::vector<double> points);
  /// n + 1 points i * t_max / n, i = 0..n.
  static TimeGrid uniform(std::size_t n, double t_max);

  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  std::span<const double> points() const noexcept { return points_; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

  /// Index of the grid point equal to t up to 1e-12 relative (of the grid
  /// span); empty when absent.
  std::ptrdiff_t find(double t) const;

 private:
  std::vector<double> points_;
};

struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;
  StreamId seed_tag;
};

/// Cov(B_H(s), B_H(t)) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(double s, double t, HurstIndex h);

/// Autocovariance of unit-spaced fractional Gaussian noise at lag k.
double fgn_autocovariance(std::size_t lag, HurstIndex h);

struct CholeskyOptions {
  std::size_t max_points = 4096;
  double jitter = 1e-12;  ///< relative to the largest diagonal entry
};

class CholeskySampler {
 public:
  CholeskySampler(TimeGrid grid, HurstIndex h, CholeskyOptions opts = {});

  SamplePath draw(StreamId id) const;
  /// Writes one path into `out` (size == grid().size()).
  void draw_into(StreamId id, std::span<double> out) const;

  const TimeGrid& grid() const noexcept { return grid_; }

 private:
  TimeGrid grid_;
  std::size_t zero_offset_ = 0;  ///< 1 when the grid starts at t = 0
  Eigen::MatrixXd lower_;
};

SamplePath generate_cholesky(const TimeGrid& grid, HurstIndex h, std::uint64_t seed,
                             CholeskyOptions opts = {});

struct CirculantOptions {
  int max_doublings = 5;
  double negative_tolerance = 1e-9;  ///< relative to the largest eigenvalue
};

class CirculantSampler {
 public:
  CirculantSampler(std::size_t n, double t_max, HurstIndex h, CirculantOptions opts = {});

  SamplePath draw(StreamId id) const;
  /// Writes B_H at the n + 1 grid points into `out`.
  void draw_into(StreamId id, std::span<double> out) const;

  std::size_t intervals() const noexcept { return n_; }
  std::size_t embedding_size() const noexcept { return sqrt_eigen_.size(); }
  const TimeGrid& grid() const noexcept { return grid_; }

 private:
  std::size_t n_;
  double scale_;
  TimeGrid grid_;
  std::vector<double> sqrt_eigen_;  ///< sqrt(lambda_k / m)
};

SamplePath generate_circulant(std::size_t n, double t_max, HurstIndex h, std::uint64_t seed,
                              CirculantOptions opts = {});

/// CSV with header `t,value`, 17 significant digits.
void write_path_csv(std::ostream& os, const SamplePath& path);

namespace detail {

/// Lower Cholesky factor of a symmetric matrix after adding
/// jitter * max(diag) to the diagonal.  On failure throws NumericalError
/// naming the first pivot whose leading block is not positive definite.
Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& cov, double jitter);

struct Embedding {
  std::vector<double> sqrt_eigen;  ///< sqrt(lambda_k / m), m = size
  int doublings = 0;
};

/// Circulant embedding of a stationary autocovariance with n lags needed.
Embedding circulant_embedding(const std::function<double(std::size_t)>& autocov, std::size_t n,
                              const CirculantOptions& opts);

}  // namespace detail

}  // namespace rsint
