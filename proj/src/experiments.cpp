#include "rsint/experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "rsint/errors.hpp"
#include "rsint/fbm_bounds.hpp"
#include "rsint/stieltjes.hpp"
#include "rsint/variation.hpp"
#include "rsint/young_functional.hpp"

namespace rsint {

using json = nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw NumericalError("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw NumericalError("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

// Small CSV builder: every number goes through format_number.
class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      text_ += first ? "" : ",";
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }
  Csv& num(double x) { return field(format_number(x)); }
  Csv& count(std::uint64_t n) { return field(std::to_string(n)); }
  Csv& str(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return field(s);
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return field(q + "\"");
  }
  void end_row() {
    text_ += '\n';
    fresh_ = true;
  }
  const std::string& text() const { return text_; }

 private:
  Csv& field(const std::string& s) {
    if (!fresh_) text_ += ',';
    text_ += s;
    fresh_ = false;
    return *this;
  }
  std::string text_;
  bool fresh_ = true;
};

const std::set<std::string> kCommonKeys = {"experiment", "seed", "output_dir", "threads"};
const std::set<std::string> kQuadKeys = {"graded_levels", "gauss_points", "diagonal_cutoff"};

std::set<std::string> with_common(std::initializer_list<std::string> keys, bool quad = false) {
  std::set<std::string> out = kCommonKeys;
  out.insert(keys.begin(), keys.end());
  if (quad) out.insert(kQuadKeys.begin(), kQuadKeys.end());
  return out;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"rate", with_common({"driver", "h", "p", "q", "T", "mesh_exponents", "paths", "bootstrap"}, true)},
      {"variation_divergence", with_common({"h", "phi", "depths", "paths"})},
      {"ll1_sweep", with_common({"hs", "s_ratios", "v_scaled", "ts", "c", "quad_points"})},
      {"young_table", with_common({"ps", "qs", "n_terms"})},
      {"bounds_audit", with_common({"families", "h", "p", "q", "T", "paths", "partitions", "driver", "mesh_exponents",
                                    "bootstrap", "thm1_constant", "ll1_c", "quad_points", "hs", "s_ratios",
                                    "v_scaled", "ts"},
                                   true)},
  };
  return keys;
}

int threads_of(const Config& cfg) {
  const std::int64_t t = cfg.get_int("threads", 1);
  if (t < 1 || t > 1024) throw ConfigError("key 'threads' must lie in [1, 1024]");
  return static_cast<int>(t);
}

std::size_t count_of(const Config& cfg, const std::string& key, std::size_t fallback) {
  return static_cast<std::size_t>(cfg.get_uint(key, fallback));
}

QuadConfig quad_of(const Config& cfg) {
  QuadConfig q;
  q.graded_levels = static_cast<int>(cfg.get_int("graded_levels", q.graded_levels));
  q.gauss_points = static_cast<int>(cfg.get_int("gauss_points", q.gauss_points));
  q.diagonal_cutoff = cfg.get_double("diagonal_cutoff", q.diagonal_cutoff);
  q.validate();
  return q;
}

RateConfig rate_config_of(const Config& cfg, std::size_t default_paths, std::size_t default_bootstrap,
                          std::vector<int> default_meshes) {
  RateConfig rc;
  rc.driver = cfg.get_string("driver", rc.driver);
  rc.h = cfg.get_double("h", rc.h);
  rc.p = cfg.get_double("p", rc.p);
  rc.q = cfg.get_double("q", rc.q);
  rc.t_total = cfg.get_double("T", rc.t_total);
  rc.mesh_exponents = cfg.get_ints("mesh_exponents", default_meshes);
  rc.paths = count_of(cfg, "paths", default_paths);
  rc.bootstrap = count_of(cfg, "bootstrap", default_bootstrap);
  rc.seed = cfg.get_uint("seed");
  rc.threads = threads_of(cfg);
  rc.quad = quad_of(cfg);
  return rc;
}

CrossingGridSpec grid_of(const Config& cfg) {
  CrossingGridSpec g = CrossingGridSpec::default_grid();
  g.hs = cfg.get_doubles("hs", g.hs);
  g.s_ratios = cfg.get_doubles("s_ratios", g.s_ratios);
  g.v_scaled = cfg.get_doubles("v_scaled", g.v_scaled);
  g.ts = cfg.get_doubles("ts", g.ts);
  return g;
}

json query_json(const CrossingQuery& q) { return json{{"h", q.h}, {"s", q.s}, {"t", q.t}, {"v", q.v}}; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

ExperimentOutcome run_rate(const Config& cfg) {
  const RateConfig rc = rate_config_of(cfg, 10000, 1000, {4, 5, 6, 7, 8, 9, 10, 11, 12});
  const MonotoneDriver driver = MonotoneDriver::from_label(rc.driver);
  const RateReport rep = theorem3_experiment(driver, rc);

  Csv csv({"d", "n_intervals", "error", "stderr", "bound92"});
  json cauchy = json::array();
  for (const RateRow& r : rep.rows) {
    csv.num(r.d).count(r.n_intervals).num(r.error).num(r.stderr_).num(r.bound92);
    csv.end_row();
    if (r.cauchy) cauchy.push_back(json{{"d", r.d}, {"norm", r.cauchy->estimate}, {"stderr", r.cauchy->stderr_}});
  }
  json summary{{"slope", rep.slope},
               {"ci_lo", rep.ci_lo},
               {"ci_hi", rep.ci_hi},
               {"theoretical_slope", rep.theoretical_slope},
               {"intercept", rep.intercept},
               {"verdict", rep.verdict},
               {"driver", rc.driver},
               {"norm", "L" + format_number(rc.p)},
               {"paths", rep.paths},
               {"bootstrap", rc.bootstrap},
               {"non_finite", rep.non_finite},
               {"errors_monotone", rep.errors_monotone},
               {"cauchy_monotone", rep.cauchy_monotone},
               {"k_mode", rep.k_mode},
               {"k_constant", rep.k_constant},
               {"cauchy", cauchy}};
  ExperimentOutcome out;
  out.files = {{"rate.csv", csv.text()}, {"rate_summary.json", dump(summary)}};
  std::ostringstream rs;
  rs << "rate: slope " << format_number(rep.slope) << " CI [" << format_number(rep.ci_lo) << ", "
     << format_number(rep.ci_hi) << "], theoretical " << format_number(rep.theoretical_slope) << ", verdict "
     << rep.verdict;
  out.report = rs.str();
  return out;
}

ExperimentOutcome run_variation(const Config& cfg) {
  const HurstIndex h(cfg.get_double("h", 0.75));
  const PhiFunction phi = PhiFunction::from_label(cfg.get_string("phi", "identity"));
  std::vector<int> depths_default;
  for (int d = 6; d <= 14; ++d) depths_default.push_back(d);
  const std::vector<int> depths = cfg.get_ints("depths", depths_default);
  const std::size_t paths = count_of(cfg, "paths", 500);
  const auto rows = indicator_variation_experiment(h, phi, depths, paths, cfg.get_uint("seed"), threads_of(cfg));

  Csv csv({"depth", "n_grid", "mean_variation", "std_variation", "paths"});
  bool increasing = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    csv.count(static_cast<std::uint64_t>(rows[k].depth)).count(rows[k].n_grid).num(rows[k].mean).num(rows[k].std).count(rows[k].paths);
    csv.end_row();
    if (k > 0 && !(rows[k].mean > rows[k - 1].mean)) increasing = false;
  }
  const double growth = rows.front().mean > 0.0 ? rows.back().mean / rows.front().mean : std::nan("");
  json summary{{"quantity", "grid-restricted phi-variation (a lower bound for the continuum value)"},
               {"phi", phi.label()},
               {"h", h.value()},
               {"strictly_increasing", increasing},
               {"growth_last_over_first", growth}};
  ExperimentOutcome out;
  out.files = {{"variation.csv", csv.text()}, {"variation_summary.json", dump(summary)}};
  out.report = "variation_divergence: mean grid variation " + format_number(rows.front().mean) + " -> " +
               format_number(rows.back().mean) + (increasing ? " (strictly increasing)" : " (not monotone)");
  return out;
}

struct Ll1Result {
  ConstantSweep sweep;
  double c = 10.0;
  std::size_t violations = 0;
  std::size_t worst = 0;
  double max_ratio = 0.0;
};

Ll1Result ll1_run(const Config& cfg) {
  const CrossingGridSpec grid = grid_of(cfg);
  Ll1Result r;
  r.c = cfg.get_double(cfg.has("ll1_c") ? "ll1_c" : "c", 10.0);
  if (!(r.c > 0.0)) throw ConfigError("the crossing-bound constant must be positive");
  r.sweep = empirical_constant_sweep(grid.queries(), count_of(cfg, "quad_points", 256), threads_of(cfg));
  for (std::size_t i = 0; i < r.sweep.cells.size(); ++i) {
    const SweepCell& cell = r.sweep.cells[i];
    const double ratio = cell.exact / (r.c * cell.unit_bound);
    if (ratio > 1.0) ++r.violations;
    if (i == 0 || ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.worst = i;
    }
  }
  return r;
}

ExperimentOutcome run_ll1(const Config& cfg) {
  const Ll1Result r = ll1_run(cfg);
  Csv csv({"h", "s", "t", "v", "exact", "bound", "ratio"});
  for (const SweepCell& cell : r.sweep.cells) {
    const double bound = r.c * cell.unit_bound;
    csv.num(cell.query.h).num(cell.query.s).num(cell.query.t).num(cell.query.v).num(cell.exact).num(bound).num(
        cell.exact / bound);
    csv.end_row();
  }
  json summary{{"cells", r.sweep.cells.size()},
               {"c_min", r.sweep.c_min},
               {"query", query_json(r.sweep.argmax)},
               {"c", r.c},
               {"violations", r.violations},
               {"grid_spec_hash", git_blob_sha1(grid_of(cfg).canonical())},
               {"note", "c_min is the largest ratio on this finite grid, not a supremum"}};
  ExperimentOutcome out;
  out.files = {{"ll1_sweep.csv", csv.text()}, {"ll1_summary.json", dump(summary)}};
  out.report = "ll1_sweep: " + std::to_string(r.sweep.cells.size()) + " cells, c_min " + format_number(r.sweep.c_min) +
               ", violations of c = " + format_number(r.c) + ": " + std::to_string(r.violations);
  return out;
}

ExperimentOutcome run_young(const Config& cfg) {
  std::vector<double> grid;
  for (int i = 6; i <= 15; ++i) grid.push_back(i / 5.0);
  const std::vector<double> ps = cfg.get_doubles("ps", grid), qs = cfg.get_doubles("qs", grid);
  const std::size_t n_terms = count_of(cfg, "n_terms", 1000000);
  (void)cfg.get_uint("seed");

  Csv csv({"p", "q", "inv_sum", "partial_sum", "tail_slope", "verdict", "expected", "I_f"});
  std::size_t checked = 0, matched = 0;
  for (double p : ps) {
    for (double q : qs) {
      const YoungTest t = young_convergence_test(PhiFunction::power(p), PhiFunction::power(q), n_terms);
      const double s = 1.0 / p + 1.0 / q;
      const bool boundary = std::abs(s - 1.0) <= 0.05;
      const YoungVerdict expected = s > 1.0 ? YoungVerdict::converges : YoungVerdict::diverges;
      const double i_f = eval_If(DominatingFunction::simple_power(1.0, s), 0.0, 1.0).total;
      csv.num(p).num(q).num(s).num(t.partial_sum).num(t.tail_slope).str(to_string(t.verdict));
      csv.str(boundary ? "boundary" : to_string(expected)).num(i_f);
      csv.end_row();
      if (!boundary) {
        ++checked;
        if (t.verdict == expected) ++matched;
      }
    }
  }
  json summary{{"cells", ps.size() * qs.size()}, {"checked", checked}, {"matched", matched}, {"boundary_band", 0.05},
               {"n_terms", n_terms}};
  ExperimentOutcome out;
  out.files = {{"young_table.csv", csv.text()}, {"young_summary.json", dump(summary)}};
  out.report = "young_table: " + std::to_string(matched) + "/" + std::to_string(checked) +
               " off-boundary verdicts match sign(1/p+1/q-1)";
  return out;
}

struct FamilyResult {
  std::string family;
  std::size_t cells = 0;
  double max_ratio = 0.0;
  std::size_t violations = 0;
  bool pass = true;
  std::string offender;
};

ExperimentOutcome run_audit(const Config& cfg) {
  const std::vector<std::string> families = cfg.get_strings("families", {"thm2", "thm1", "ll1"});
  const std::uint64_t seed = cfg.get_uint("seed");
  std::vector<FamilyResult> results;
  for (const std::string& fam : families) {
    FamilyResult fr;
    fr.family = fam;
    if (fam == "thm2") {
      Theorem2Config tc;
      tc.h = cfg.get_double("h", tc.h);
      tc.p = cfg.get_double("p", tc.p);
      tc.q = cfg.get_double("q", tc.q);
      tc.t_total = cfg.get_double("T", tc.t_total);
      tc.paths = count_of(cfg, "paths", 1000);
      tc.partitions = count_of(cfg, "partitions", 20);
      tc.seed = seed;
      tc.threads = threads_of(cfg);
      tc.quad = quad_of(cfg);
      for (const DominanceCell& c : theorem2_dominance(tc)) {
        ++fr.cells;
        if (fr.cells == 1 || c.ratio > fr.max_ratio) fr.max_ratio = c.ratio;
        if (c.ratio > 1.0) ++fr.violations;
        if (c.ratio > 1.0 && fr.pass) {
          fr.pass = false;
          fr.offender = "partition " + std::to_string(c.partition) + " (n=" + std::to_string(c.n_intervals) +
                        ", mesh=" + format_number(c.mesh) + "): norm " + format_number(c.empirical) + " > bound " +
                        format_number(c.bound);
        }
      }
    } else if (fam == "thm1") {
      RateConfig rc = rate_config_of(cfg, 1000, 200, {4, 5, 6, 7, 8, 9, 10});
      rc.bound_constant = cfg.get_double("thm1_constant", 92.0);
      const RateReport rep = theorem3_experiment(MonotoneDriver::from_label(rc.driver), rc);
      for (const RateRow& r : rep.rows) {
        ++fr.cells;
        const double ratio = r.bound92 > 0.0 ? r.error / r.bound92 : (r.error > 0.0 ? INFINITY : 0.0);
        if (fr.cells == 1 || ratio > fr.max_ratio) fr.max_ratio = ratio;
        if (ratio > 1.0) ++fr.violations;
        if (ratio > 1.0 && fr.pass) {
          fr.pass = false;
          fr.offender = "mesh d=" + format_number(r.d) + ": error " + format_number(r.error) + " > bound " +
                        format_number(r.bound92);
        }
      }
    } else if (fam == "ll1") {
      const Ll1Result r = ll1_run(cfg);
      fr.cells = r.sweep.cells.size();
      fr.max_ratio = r.max_ratio;
      fr.violations = r.violations;
      if (r.violations > 0) {
        const CrossingQuery& q = r.sweep.cells[r.worst].query;
        fr.pass = false;
        fr.offender = "H=" + format_number(q.h) + " s=" + format_number(q.s) + " t=" + format_number(q.t) +
                      " v=" + format_number(q.v) + ": ratio " + format_number(r.max_ratio);
      }
    } else {
      throw ConfigError("unknown audit family '" + fam + "' (thm2, thm1, ll1)");
    }
    results.push_back(fr);
  }

  Csv csv({"family", "cells", "violations", "max_ratio", "status", "offender"});
  json fams = json::array();
  bool all_pass = true;
  std::ostringstream rs;
  for (const FamilyResult& fr : results) {
    csv.str(fr.family).count(fr.cells).count(fr.violations).num(fr.max_ratio).str(fr.pass ? "pass" : "fail").str(fr.offender);
    csv.end_row();
    fams.push_back(json{{"family", fr.family}, {"cells", fr.cells}, {"violations", fr.violations}, {"max_ratio", fr.max_ratio}, {"pass", fr.pass},
                        {"offender", fr.offender}});
    all_pass = all_pass && fr.pass;
    rs << "audit " << fr.family << ": " << fr.cells << " cells, " << fr.violations << " violations, max ratio " << format_number(fr.max_ratio) << ", "
       << (fr.pass ? "pass" : "FAIL at " + fr.offender) << '\n';
  }
  rs << "audit: " << (all_pass ? "pass" : "fail");
  ExperimentOutcome out;
  out.files = {{"audit.csv", csv.text()}, {"audit_summary.json", dump(json{{"pass", all_pass}, {"families", fams}})}};
  out.audit_failed = !all_pass;
  out.report = rs.str();
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"rate", "variation_divergence", "ll1_sweep", "young_table",
                                                 "bounds_audit"};
  return names;
}

ExperimentOutcome run_experiment(const Config& cfg) {
  const std::string name = cfg.get_string("experiment");
  const auto it = allowed_keys().find(name);
  if (it == allowed_keys().end()) throw ConfigError("unknown experiment '" + name + "'");
  cfg.require_known(it->second);
  if (!cfg.has("seed")) throw ConfigError("missing required key 'seed'");
  (void)cfg.get_uint("seed");
  if (name == "rate") return run_rate(cfg);
  if (name == "variation_divergence") return run_variation(cfg);
  if (name == "ll1_sweep") return run_ll1(cfg);
  if (name == "young_table") return run_young(cfg);
  return run_audit(cfg);
}

namespace {

void write_all(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::pair<fs::path, fs::path>> staged;
  try {
    for (const OutputFile& f : files) {
      const fs::path final_path = dir / f.name;
      fs::path tmp = final_path;
      tmp += ".partial";
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      os << f.content;
      os.close();
      if (!os) throw NumericalError("cannot write " + tmp.string());
      staged.emplace_back(tmp, final_path);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& [tmp, _] : staged) fs::remove(tmp, ec);
    throw;
  }
  for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
}

}  // namespace

int run_config_file(const std::filesystem::path& config_path, const RunOptions& opts, std::ostream& out,
                    std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Config cfg = Config::load(config_path);
    if (opts.seed_override) cfg.set("seed", std::to_string(*opts.seed_override));
    if (opts.threads) cfg.set("threads", std::to_string(*opts.threads));
    if (opts.paths_override) {
      const std::string name = cfg.get_string("experiment");
      const auto it = allowed_keys().find(name);
      if (it != allowed_keys().end() && !it->second.count("paths"))
        throw ConfigError("--paths-override: experiment '" + name + "' has no paths parameter");
      cfg.set("paths", std::to_string(*opts.paths_override));
    }

    std::filesystem::path out_dir = "rsint_out";
    if (opts.output_dir) {
      out_dir = *opts.output_dir;
    } else if (const char* env = std::getenv("RSINT_OUTPUT_DIR"); env && *env) {
      out_dir = env;
    } else if (cfg.has("output_dir")) {
      out_dir = cfg.get_string("output_dir");
    }

    ExperimentOutcome outcome = run_experiment(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json config_echo = json::object();
    for (const auto& [k, v] : cfg.entries()) config_echo[k] = v.text;
    json outputs = json::array();
    for (const OutputFile& f : outcome.files)
      outputs.push_back(json{{"file", f.name}, {"bytes", f.content.size()}, {"git_sha1", git_blob_sha1(f.content)}});
    json manifest{{"experiment", cfg.get_string("experiment")},
                  {"config", config_echo},
                  {"outputs", outputs},
                  {"wall_time_seconds", wall},
                  {"exit_code", outcome.audit_failed ? int{kExitAudit} : int{kExitOk}}};
    outcome.files.push_back({"manifest.json", dump(manifest)});
    write_all(out_dir, outcome.files);

    out << outcome.report << '\n' << "outputs written to " << out_dir.string() << '\n';
    return outcome.audit_failed ? kExitAudit : kExitOk;
  } catch (const RegimeError& e) {
    err << "regime violation: " << e.what() << '\n';
    return kExitRegime;
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace rsint
