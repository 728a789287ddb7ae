#include "rsint/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "rsint/errors.hpp"
#include "rsint/parallel.hpp"
#include "rsint/rng.hpp"
#include "rsint/stats.hpp"

namespace rsint {

namespace {

std::string fmt_time(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

double value_at(const SamplePath& path, double t, const char* which) {
  const std::ptrdiff_t i = path.grid.find(t);
  if (i < 0) throw ArgumentError(std::string("time t=") + fmt_time(t) + " is absent from the " + which + " grid");
  return path.values[static_cast<std::size_t>(i)];
}

void check_path(const SamplePath& p, const char* which) {
  if (p.values.size() != p.grid.size())
    throw ArgumentError(std::string(which) + " path: grid and value lengths differ");
}

}  // namespace

Partition::Partition(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ArgumentError("a partition needs at least two points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw ArgumentError("partition points must be finite");
    if (i > 0) {
      if (!(points_[i] > points_[i - 1])) throw ArgumentError("partition points must be strictly increasing");
      mesh_ = std::max(mesh_, points_[i] - points_[i - 1]);
    }
  }
}

Partition Partition::uniform(std::size_t intervals, double a, double b) {
  if (intervals == 0 || !(b > a)) throw ArgumentError("uniform partition needs n >= 1 and a < b");
  std::vector<double> pts(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    pts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(intervals);
  pts.back() = b;
  return Partition(std::move(pts));
}

std::vector<double> evaluation_points(const Partition& part, const EvalRule& rule, std::uint64_t path_index) {
  const std::size_t n = part.intervals();
  std::vector<double> s(n);
  switch (rule.kind) {
    case EvalRule::Kind::forward:
      for (std::size_t i = 0; i < n; ++i) s[i] = part[i];
      break;
    case EvalRule::Kind::midpoint:
      for (std::size_t i = 0; i < n; ++i) s[i] = 0.5 * (part[i] + part[i + 1]);
      break;
    case EvalRule::Kind::random_uniform: {
      RandomStream rng(StreamId(rule.seed, path_index, Substream::eval_rule));
      for (std::size_t i = 0; i < n; ++i) s[i] = std::min(part[i] + rng.uniform() * (part[i + 1] - part[i]), part[i + 1]);
      break;
    }
    case EvalRule::Kind::custom:
      if (rule.custom_points.size() != n)
        throw ArgumentError("custom evaluation rule needs one point per interval");
      for (std::size_t i = 0; i < n; ++i) {
        const double si = rule.custom_points[i];
        if (!(si >= part[i] && si <= part[i + 1]))
          throw ArgumentError("evaluation point " + fmt_time(si) + " lies outside [" + fmt_time(part[i]) + ", " +
                              fmt_time(part[i + 1]) + "]");
        s[i] = si;
      }
      break;
  }
  return s;
}

double rs_sum(const SamplePath& x, const SamplePath& y, const Partition& part, const EvalRule& rule,
              std::uint64_t path_index) {
  check_path(x, "X");
  check_path(y, "Y");
  const std::vector<double> s = evaluation_points(part, rule, path_index);
  double acc = 0.0;
  double x_prev = value_at(x, part[0], "X");
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x_next = value_at(x, part[i + 1], "X");
    acc += value_at(y, s[i], "Y") * (x_next - x_prev);
    x_prev = x_next;
  }
  return acc;
}

double forward_sum(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("forward_sum needs equal lengths >= 2");
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += y[i - 1] * (x[i] - x[i - 1]);
  return acc;
}

double refinement_cross_terms(const SamplePath& x, const SamplePath& y, const Partition& coarse,
                              const Partition& fine) {
  if (coarse.front() != fine.front() || coarse.back() != fine.back())
    throw ArgumentError("refinement must share the endpoints of the coarse partition");
  double acc = 0.0;
  std::size_t i = 1;  // q_j lies in (t_{i-1}, t_i]
  for (std::size_t j = 1; j < fine.points().size(); ++j) {
    while (fine[j] > coarse[i]) {
      if (fine[j - 1] < coarse[i]) throw ArgumentError("fine partition misses the point " + fmt_time(coarse[i]));
      ++i;
    }
    const double y_anchor = value_at(y, coarse[i - 1], "Y");
    acc += (value_at(y, fine[j - 1], "Y") - y_anchor) * (value_at(x, fine[j], "X") - value_at(x, fine[j - 1], "X"));
  }
  return acc;
}

NormSpec NormSpec::lp_norm(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ArgumentError("L_p norms need p >= 1");
  return {Kind::lp, p};
}

NormEstimate norm_of_samples(std::span<const double> errors, const NormSpec& norm) {
  if (errors.empty()) throw ArgumentError("norm of an empty sample");
  NormEstimate out;
  std::vector<double> terms;
  terms.reserve(errors.size());
  for (double e : errors) {
    if (!std::isfinite(e)) {
      ++out.non_finite;
      continue;
    }
    const double a = std::abs(e);
    terms.push_back(norm.kind == NormSpec::Kind::lp ? std::pow(a, norm.p) : a / (1.0 + a));
  }
  if (out.non_finite * 1000 > errors.size())
    throw NumericalError(std::to_string(out.non_finite) + " of " + std::to_string(errors.size()) +
                         " per-path errors are not finite (limit 0.1%)");
  const MeanStderr ms = mean_and_stderr(terms);
  if (norm.kind == NormSpec::Kind::zero) {
    out.estimate = ms.mean;
    out.stderr_ = ms.stderr_;
  } else {
    out.estimate = std::pow(ms.mean, 1.0 / norm.p);
    out.stderr_ = ms.mean > 0.0 ? out.estimate / (norm.p * ms.mean) * ms.stderr_ : 0.0;
  }
  return out;
}

NormEstimate estimate_error_norm(const PathMaker& make_paths, const Partition& part, const EvalRule& rule,
                                 const Reference& reference, const NormSpec& norm, std::size_t paths,
                                 std::uint64_t seed, int threads) {
  if (paths < 100) throw ArgumentError("estimate_error_norm needs at least 100 paths");
  std::vector<double> err(paths);
  parallel_for(paths, threads, [&](std::size_t i) {
    const auto [x, y] = make_paths(StreamId(seed, i, Substream::path));
    err[i] = rs_sum(x, y, part, rule, i) - reference(x, y);
  });
  return norm_of_samples(err, norm);
}

double thm2_bound(const DominatingFunction& f, const Partition& part, const QuadConfig& cfg) {
  return 8.0 * eval_If(f, part.front(), part.back(), cfg).total;
}

double thm1_error_bound(const DominatingFunction& f, const Partition& part, const QuadConfig& cfg, double constant) {
  return constant * eval_Ig_truncated(f, part.front(), part.back(), part.mesh(), cfg).total;
}

DominatingFunction theorem3_dominating(double k, HurstIndex h, double q) {
  const double beta = h.value() / q;
  return DominatingFunction::power_law(k, beta + h.value(), beta);
}

double gaussian_abs_moment_norm(double r) {
  if (!(r > 0.0)) throw ArgumentError("absolute moments need r > 0");
  const double log_m = 0.5 * r * std::numbers::ln2 + std::lgamma(0.5 * (r + 1.0)) - 0.5 * std::log(std::numbers::pi);
  return std::exp(log_m / r);
}

// E|(B_u - B_s)(B_t - B_u)|^p <= c_{2p}^{2p} ((u-s)(t-u))^{pH} by Cauchy-Schwarz,
// and (u-s)(t-u) <= (t-s)^2/4.  Then (t-s)^{2H} <= T^H (t-s)^{H/q+H} t^{-H/q}
// because (t-s)^{H-H/q} <= t^{H-H/q} for q >= 1.
double identity_certified_k(HurstIndex h, double p, double t_total) {
  if (!(p >= 1.0)) throw ArgumentError("identity_certified_k needs p >= 1");
  const double c = gaussian_abs_moment_norm(2.0 * p);
  return c * c * std::pow(t_total, h.value()) * std::pow(4.0, -h.value());
}

namespace {

void check_theorem3_regime(double h, double p, double q) {
  if (!(h > 0.5 && h < 1.0)) throw RegimeError("Hurst index outside the rate theorem's range", "1/2 < H < 1");
  const double q_max = h / (1.0 - h);
  if (!(p >= 1.0 && p < q && q < q_max)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "need 1 <= p < q < H/(1-H) = %.6g, got p = %g, q = %g", q_max, p, q);
    throw RegimeError(buf, "p∈[1,H/(1−H))");
  }
}

bool within_two_stderr(const NormEstimate& coarse, const NormEstimate& fine) {
  return fine.estimate <= coarse.estimate + 2.0 * std::hypot(coarse.stderr_, fine.stderr_);
}

}  // namespace

std::vector<DominanceCell> theorem2_dominance(const Theorem2Config& cfg) {
  check_theorem3_regime(cfg.h, cfg.p, cfg.q);
  if (!(cfg.t_total > 0.0)) throw ArgumentError("theorem 2 check needs T > 0");
  if (cfg.paths < 100) throw ArgumentError("theorem 2 check needs at least 100 paths");
  if (cfg.partitions == 0) throw ArgumentError("theorem 2 check needs at least one partition");
  if (cfg.min_intervals < 1 || cfg.max_intervals < cfg.min_intervals)
    throw ArgumentError("theorem 2 check needs 1 <= min_intervals <= max_intervals");
  const HurstIndex h(cfg.h);
  const DominatingFunction f = theorem3_dominating(identity_certified_k(h, cfg.p, cfg.t_total), h, cfg.q);
  const NormSpec norm = NormSpec::lp_norm(cfg.p);

  std::vector<DominanceCell> cells;
  for (std::size_t j = 0; j < cfg.partitions; ++j) {
    RandomStream rng(StreamId(cfg.seed, j, Substream::partition));
    const std::size_t n = cfg.min_intervals + rng.below(cfg.max_intervals - cfg.min_intervals + 1);
    std::vector<double> pts{0.0, cfg.t_total};
    while (pts.size() < n + 1) {
      const double u = rng.uniform() * cfg.t_total;
      if (std::find(pts.begin(), pts.end(), u) == pts.end()) pts.push_back(u);
    }
    std::sort(pts.begin(), pts.end());
    const Partition part(pts);
    const CholeskySampler sampler(TimeGrid(pts), h);

    std::vector<double> sums(cfg.paths);
    parallel_for(cfg.paths, cfg.threads, [&](std::size_t i) {
      std::vector<double> b(pts.size());
      sampler.draw_into(StreamId(cfg.seed, j * cfg.paths + i, Substream::path), b);
      double acc = 0.0;
      for (std::size_t k = 1; k < b.size(); ++k) acc += (b[k - 1] - b[0]) * (b[k] - b[k - 1]);
      sums[i] = acc;
    });
    const NormEstimate e = norm_of_samples(sums, norm);
    DominanceCell cell;
    cell.partition = j;
    cell.n_intervals = n;
    cell.mesh = part.mesh();
    cell.empirical = e.estimate;
    cell.stderr_ = e.stderr_;
    cell.bound = thm2_bound(f, part, cfg.quad);
    cell.ratio = cell.empirical / cell.bound;
    cells.push_back(cell);
  }
  return cells;
}

RateReport theorem3_experiment(const MonotoneDriver& driver, const RateConfig& cfg) {
  check_theorem3_regime(cfg.h, cfg.p, cfg.q);
  if (!(cfg.t_total > 0.0)) throw ArgumentError("rate experiment needs T > 0");
  const auto& ex = cfg.mesh_exponents;
  if (ex.size() < 4) throw ArgumentError("rate experiment needs at least 4 meshes");
  for (std::size_t k = 0; k < ex.size(); ++k) {
    if (ex[k] < 1 || ex[k] > 22) throw ArgumentError("mesh exponents must lie in [1, 22]");
    if (k > 0 && ex[k] <= ex[k - 1]) throw ArgumentError("meshes must be strictly decreasing");
  }
  if (cfg.paths < 100) throw ArgumentError("rate experiment needs at least 100 paths");
  if (cfg.bootstrap < 100) throw ArgumentError("rate experiment needs at least 100 bootstrap resamples");
  if (!(cfg.bound_constant > 0.0)) throw ArgumentError("bound constant must be positive");
  cfg.quad.validate();

  const HurstIndex h(cfg.h);
  const std::size_t nm = ex.size(), paths = cfg.paths;
  const int top = ex.back();
  const std::size_t n_fine = std::size_t{1} << top;
  const CirculantSampler sampler(n_fine, cfg.t_total, h);

  std::vector<double> err(nm * paths), diff((nm - 1) * paths);
  parallel_for(paths, cfg.threads, [&](std::size_t i) {
    std::vector<double> b(n_fine + 1), fb(n_fine + 1);
    sampler.draw_into(StreamId(cfg.seed, i, Substream::path), b);
    for (std::size_t j = 0; j <= n_fine; ++j) fb[j] = driver(b[j]);
    const double ref = driver.primitive(b[n_fine]);
    double prev_sum = 0.0;
    for (std::size_t k = 0; k < nm; ++k) {
      const std::size_t stride = std::size_t{1} << (top - ex[k]);
      double s = 0.0;
      for (std::size_t j = stride; j <= n_fine; j += stride) s += fb[j - stride] * (b[j] - b[j - stride]);
      err[k * paths + i] = s - ref;
      if (k > 0) diff[(k - 1) * paths + i] = prev_sum - s;
      prev_sum = s;
    }
  });

  const NormSpec norm = NormSpec::lp_norm(cfg.p);
  RateReport rep;
  rep.paths = paths;
  rep.theoretical_slope = h.value() / cfg.q + h.value() - 1.0;
  rep.bound_constant = cfg.bound_constant;
  std::vector<NormEstimate> errs;
  for (std::size_t k = 0; k < nm; ++k) {
    errs.push_back(norm_of_samples(std::span<const double>(err).subspan(k * paths, paths), norm));
    rep.non_finite += errs.back().non_finite;
  }

  // Bound curve: I_g for K = 1, then K certified or calibrated on the
  // coarsest mesh against the nominal constant 92.
  const DominatingFunction f1 = theorem3_dominating(1.0, h, cfg.q);
  std::vector<double> ig(nm);
  for (std::size_t k = 0; k < nm; ++k)
    ig[k] = eval_Ig_truncated(f1, 0.0, cfg.t_total, std::ldexp(cfg.t_total, -ex[k]), cfg.quad).total;
  if (driver.label() == "identity") {
    rep.k_mode = "certified";
    rep.k_constant = identity_certified_k(h, cfg.p, cfg.t_total);
  } else {
    rep.k_mode = "calibrated";
    rep.k_constant = (errs[0].estimate + 3.0 * errs[0].stderr_) / (92.0 * ig[0]);
  }

  for (std::size_t k = 0; k < nm; ++k) {
    RateRow row;
    row.d = std::ldexp(cfg.t_total, -ex[k]);
    row.n_intervals = std::size_t{1} << ex[k];
    row.error = errs[k].estimate;
    row.stderr_ = errs[k].stderr_;
    row.bound92 = cfg.bound_constant * rep.k_constant * ig[k];
    if (k + 1 < nm) row.cauchy = norm_of_samples(std::span<const double>(diff).subspan(k * paths, paths), norm);
    rep.rows.push_back(row);
  }

  rep.errors_monotone = rep.cauchy_monotone = true;
  for (std::size_t k = 0; k + 1 < nm; ++k) {
    rep.errors_monotone = rep.errors_monotone && within_two_stderr(errs[k], errs[k + 1]);
    if (k + 2 < nm) rep.cauchy_monotone = rep.cauchy_monotone && within_two_stderr(*rep.rows[k].cauchy, *rep.rows[k + 1].cauchy);
  }

  const bool all_zero = std::all_of(errs.begin(), errs.end(), [](const NormEstimate& e) { return e.estimate == 0.0; });
  const bool any_zero = std::any_of(errs.begin(), errs.end(), [](const NormEstimate& e) { return !(e.estimate > 0.0); });
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (all_zero || any_zero) {
    rep.slope = rep.intercept = rep.ci_lo = rep.ci_hi = nan;
    rep.verdict = all_zero ? "zero_error" : "degenerate";
    return rep;
  }

  std::vector<double> x(nm), y(nm), w(nm);
  bool weighted = true;
  for (std::size_t k = 0; k < nm; ++k) {
    x[k] = std::log(rep.rows[k].d);
    y[k] = std::log(errs[k].estimate);
    weighted = weighted && errs[k].stderr_ > 0.0;
    w[k] = weighted ? std::pow(errs[k].estimate / errs[k].stderr_, 2) : 1.0;
  }
  if (!weighted) std::fill(w.begin(), w.end(), 1.0);
  const LineFit fit = fit_line(x, y, w);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;

  // Paired bootstrap over paths: every mesh is recomputed from the same
  // resampled path indices.
  std::vector<double> pw(nm * paths);
  for (std::size_t j = 0; j < pw.size(); ++j) pw[j] = std::isfinite(err[j]) ? std::pow(std::abs(err[j]), cfg.p) : nan;
  std::vector<double> slopes(cfg.bootstrap);
  parallel_for(cfg.bootstrap, cfg.threads, [&](std::size_t r) {
    RandomStream rng(StreamId(cfg.seed, r, Substream::bootstrap));
    std::vector<std::size_t> idx(paths);
    for (auto& v : idx) v = rng.below(paths);
    std::vector<double> yb(nm), terms;
    terms.reserve(paths);
    for (std::size_t k = 0; k < nm; ++k) {
      terms.clear();
      for (std::size_t v : idx) {
        const double t = pw[k * paths + v];
        if (!std::isnan(t)) terms.push_back(t);
      }
      yb[k] = std::log(pairwise_sum(terms) / static_cast<double>(terms.size())) / cfg.p;
    }
    slopes[r] = fit_line(x, yb, w).slope;
  });
  rep.ci_lo = quantile(slopes, 0.025);
  rep.ci_hi = quantile(slopes, 0.975);
  rep.verdict = rep.ci_lo > 0.0 ? "decaying" : "inconclusive";
  return rep;
}

}  // namespace rsint
