#include "rsint/gaussian_paths.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <string>

#include "rsint/errors.hpp"

namespace rsint {

HurstIndex::HurstIndex(double h) : h_(h) {
  if (!(h > 0.0 && h < 1.0)) throw ArgumentError("Hurst index must satisfy 0 < H < 1, got " + std::to_string(h));
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw ArgumentError("time grid is empty");
  if (!(points_.front() >= 0.0)) throw ArgumentError("time grid must start at t >= 0");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1]))
      throw ArgumentError("time grid must be strictly increasing (index " + std::to_string(i) + ")");
  }
  if (!std::isfinite(points_.back())) throw ArgumentError("time grid has a non-finite point");
}

TimeGrid TimeGrid::uniform(std::size_t n, double t_max) {
  if (n == 0) throw ArgumentError("uniform grid needs n >= 1 intervals");
  if (!(t_max > 0.0)) throw ArgumentError("uniform grid needs t_max > 0");
  std::vector<double> pts(n + 1);
  for (std::size_t i = 0; i <= n; ++i) pts[i] = t_max * static_cast<double>(i) / static_cast<double>(n);
  pts[n] = t_max;
  return TimeGrid(std::move(pts));
}

std::ptrdiff_t TimeGrid::find(double t) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(points_.back()));
  auto it = std::lower_bound(points_.begin(), points_.end(), t - tol);
  if (it != points_.end() && std::abs(*it - t) <= tol) return it - points_.begin();
  return -1;
}

double fbm_covariance(double s, double t, HurstIndex h) {
  if (s < 0.0 || t < 0.0) throw ArgumentError("fbm_covariance: times must be non-negative");
  if (s > t) std::swap(s, t);
  const double two_h = 2.0 * h.value();
  return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(t - s, two_h));
}

double fgn_autocovariance(std::size_t lag, HurstIndex h) {
  const double two_h = 2.0 * h.value();
  const double k = static_cast<double>(lag);
  if (lag == 0) return 1.0;
  return 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(k - 1.0, two_h));
}

// ---------------------------------------------------------------------------
// Cholesky sampler

namespace detail {

Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& cov, double jitter) {
  const Eigen::Index n = cov.rows();
  if (n != cov.cols()) throw ArgumentError("covariance matrix must be square");
  Eigen::MatrixXd a = cov;
  if (n == 0) return a;
  const double max_diag = a.diagonal().maxCoeff();
  a.diagonal().array() += jitter * std::max(max_diag, 0.0);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  // Smallest leading block that fails: its last row is the offending pivot.
  Eigen::Index lo = 1, hi = n;
  while (lo < hi) {
    const Eigen::Index mid = lo + (hi - lo) / 2;
    Eigen::LLT<Eigen::MatrixXd> sub(a.topLeftCorner(mid, mid));
    if (sub.info() == Eigen::Success) lo = mid + 1;
    else hi = mid;
  }
  throw NumericalError("covariance matrix is not positive definite after jitter: pivot " +
                       std::to_string(lo - 1));
}

}  // namespace detail

CholeskySampler::CholeskySampler(TimeGrid grid, HurstIndex h, CholeskyOptions opts)
    : grid_(std::move(grid)) {
  if (grid_.size() > opts.max_points)
    throw ArgumentError("Cholesky sampler limited to " + std::to_string(opts.max_points) + " grid points");
  zero_offset_ = grid_.front() == 0.0 ? 1 : 0;
  const auto m = static_cast<Eigen::Index>(grid_.size() - zero_offset_);
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = fbm_covariance(grid_[static_cast<std::size_t>(j) + zero_offset_],
                                      grid_[static_cast<std::size_t>(i) + zero_offset_], h);
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  try {
    lower_ = detail::jittered_cholesky(cov, opts.jitter);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " (grid index offset " + std::to_string(zero_offset_) + ")");
  }
}

void CholeskySampler::draw_into(StreamId id, std::span<double> out) const {
  if (out.size() != grid_.size()) throw ArgumentError("draw_into: output size mismatch");
  RandomStream rng(id);
  const auto m = lower_.rows();
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = rng.normal();
  const Eigen::VectorXd x = lower_.triangularView<Eigen::Lower>() * z;
  if (zero_offset_) out[0] = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) out[static_cast<std::size_t>(i) + zero_offset_] = x(i);
}

SamplePath CholeskySampler::draw(StreamId id) const {
  SamplePath path{grid_, std::vector<double>(grid_.size()), id};
  draw_into(id, path.values);
  return path;
}

SamplePath generate_cholesky(const TimeGrid& grid, HurstIndex h, std::uint64_t seed, CholeskyOptions opts) {
  return CholeskySampler(grid, h, opts).draw(StreamId(seed, 0, Substream::path));
}

// ---------------------------------------------------------------------------
// Circulant embedding

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer make_buffer(std::size_t m) {
  FftwBuffer buf(fftw_alloc_complex(m));
  if (!buf) throw NumericalError("fftw_alloc_complex failed");
  return buf;
}

// Planner calls are not thread-safe; executes with fresh arrays are.
fftw_plan forward_plan(std::size_t m) {
  static std::mutex mu;
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard lock(mu);
  auto it = plans.find(m);
  if (it != plans.end()) return it->second;
  FftwBuffer in = make_buffer(m), out = make_buffer(m);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  if (!plan) throw NumericalError("fftw plan creation failed");
  plans.emplace(m, plan);
  return plan;
}

}  // namespace

namespace detail {

Embedding circulant_embedding(const std::function<double(std::size_t)>& autocov, std::size_t n,
                              const CirculantOptions& opts) {
  if (n == 0) throw ArgumentError("circulant embedding needs n >= 1");
  std::size_t half = n;
  for (int doublings = 0;; ++doublings) {
    const std::size_t m = 2 * half;
    FftwBuffer row = make_buffer(m), eig = make_buffer(m);
    for (std::size_t k = 0; k <= half; ++k) {
      row[k][0] = autocov(k);
      row[k][1] = 0.0;
    }
    for (std::size_t k = half + 1; k < m; ++k) {
      row[k][0] = row[m - k][0];
      row[k][1] = 0.0;
    }
    fftw_execute_dft(forward_plan(m), row.get(), eig.get());
    double max_eig = 0.0, min_eig = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      max_eig = std::max(max_eig, eig[k][0]);
      min_eig = std::min(min_eig, eig[k][0]);
    }
    if (max_eig > 0.0 && min_eig >= -opts.negative_tolerance * max_eig) {
      Embedding out;
      out.doublings = doublings;
      out.sqrt_eigen.resize(m);
      for (std::size_t k = 0; k < m; ++k)
        out.sqrt_eigen[k] = std::sqrt(std::max(eig[k][0], 0.0) / static_cast<double>(m));
      return out;
    }
    if (doublings >= opts.max_doublings) {
      throw NumericalError("circulant embedding has a negative eigenvalue (" + std::to_string(min_eig) +
                           ") after " + std::to_string(doublings) + " doublings");
    }
    half *= 2;
  }
}

}  // namespace detail

CirculantSampler::CirculantSampler(std::size_t n, double t_max, HurstIndex h, CirculantOptions opts)
    : n_(n), scale_(0.0), grid_(TimeGrid::uniform(n, t_max)) {
  scale_ = std::pow(t_max / static_cast<double>(n), h.value());
  auto emb = detail::circulant_embedding([h](std::size_t k) { return fgn_autocovariance(k, h); }, n, opts);
  sqrt_eigen_ = std::move(emb.sqrt_eigen);
}

void CirculantSampler::draw_into(StreamId id, std::span<double> out) const {
  if (out.size() != n_ + 1) throw ArgumentError("draw_into: output size mismatch");
  const std::size_t m = sqrt_eigen_.size();
  FftwBuffer in = make_buffer(m), res = make_buffer(m);
  RandomStream rng(id);
  for (std::size_t k = 0; k < m; ++k) {
    in[k][0] = sqrt_eigen_[k] * rng.normal();
    in[k][1] = sqrt_eigen_[k] * rng.normal();
  }
  fftw_execute_dft(forward_plan(m), in.get(), res.get());
  out[0] = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    acc += res[i][0];
    out[i + 1] = scale_ * acc;
  }
}

SamplePath CirculantSampler::draw(StreamId id) const {
  SamplePath path{grid_, std::vector<double>(n_ + 1), id};
  draw_into(id, path.values);
  return path;
}

SamplePath generate_circulant(std::size_t n, double t_max, HurstIndex h, std::uint64_t seed, CirculantOptions opts) {
  return CirculantSampler(n, t_max, h, opts).draw(StreamId(seed, 0, Substream::path));
}

void write_path_csv(std::ostream& os, const SamplePath& path) {
  os << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,", path.grid[i]);
    os << buf;
    std::snprintf(buf, sizeof buf, "%.17g\n", path.values[i]);
    os << buf;
  }
}

}  // namespace rsint
