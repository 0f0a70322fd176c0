#ifndef COVL_SCENARIO_HPP
#define COVL_SCENARIO_HPP

// Simulation scenarios (Gaussian compressed-sensing dictionaries and ULA
// steering grids), snapshot synthesis, recovery metrics and the seeded
// Monte-Carlo engine that runs every requested method on identical data.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "covl/baselines.hpp"
#include "covl/clbcd.hpp"
#include "covl/clomp.hpp"
#include "covl/model.hpp"
#include "covl/sparsity.hpp"
#include "covl/ula.hpp"

namespace covl {

using Rng = std::mt19937_64;

/// Independent stream for (master seed, stream index); the same pair always
/// yields the same stream regardless of which thread draws from it.
inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x636f766cU};
  return Rng(seq);
}

/// Circular complex Gaussian CN(0, variance) matrix.
inline CMatrix complex_gaussian(Index rows, Index cols, double variance, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
  CMatrix z(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      z(i, j) = Complex(re, im);
    }
  return z;
}

/// i.i.d. CN(0, 1) entries, columns normalized to unit norm.
inline Dictionary gaussian_dictionary(Index n, Index m, Rng& rng) {
  detail::require(n >= 1 && m >= 1, ErrorKind::InvalidInput, "dictionary dimensions must be positive");
  CMatrix a = complex_gaussian(n, m, 1.0, rng);
  a.colwise().normalize();
  return Dictionary(std::move(a), AtomNorm::Unit);
}

inline Dictionary gaussian_dictionary(Index n, Index m, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  return gaussian_dictionary(n, m, rng);
}

/// Equicorrelated source covariance: diag(p) with rho sqrt(p_k p_j) off the diagonal.
inline CMatrix source_covariance(const RVector& powers, double rho) {
  const Index k = powers.size();
  CMatrix s(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) s(i, j) = (i == j ? 1.0 : rho) * std::sqrt(powers[i] * powers[j]);
  return s;
}

/// Symmetric PSD square root of the source covariance; rejects matrices with
/// eigenvalues below -1e-12 times the largest.
inline CMatrix source_covariance_root(const CMatrix& cov) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov);
  const RVector& ev = eig.eigenvalues();
  detail::require(ev.minCoeff() >= -1e-12 * std::max(ev.maxCoeff(), 0.0), ErrorKind::Domain,
                  "source covariance is not positive semidefinite");
  return eig.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal() * eig.eigenvectors().adjoint();
}

/// Y = A_s Sigma_s^{1/2} Z + sigma E for unit-variance innovations Z (K x L)
/// and E (N x L).
inline SnapshotMatrix synthesize_snapshots(const CMatrix& sources, const RVector& powers, double rho, double sigma2,
                                           const CMatrix& z, const CMatrix& e) {
  detail::require(powers.size() == sources.cols() && z.rows() == sources.cols() && e.rows() == sources.rows() &&
                      z.cols() == e.cols(),
                  ErrorKind::InvalidInput, "inconsistent snapshot synthesis dimensions");
  detail::require((powers.array() >= 0.0).all(), ErrorKind::Domain, "source powers must be nonnegative");
  detail::require(std::abs(rho) < 1.0, ErrorKind::Domain, "|rho| must be below 1");
  detail::require(sigma2 >= 0.0, ErrorKind::Domain, "noise variance must be nonnegative");
  const CMatrix root = source_covariance_root(source_covariance(powers, rho));
  return SnapshotMatrix(sources * (root * z) + std::sqrt(sigma2) * e);
}

/// Y = A_s X + E with x_l ~ CN(0, Sigma_s) and e_l ~ CN(0, sigma2 I).
/// `sources` holds the true atoms or exact steering vectors as columns.
inline SnapshotMatrix generate_snapshots(const CMatrix& sources, const RVector& powers, double rho, double sigma2,
                                         Index l, Rng& rng) {
  detail::require(l >= 1, ErrorKind::InvalidInput, "need L >= 1");
  const CMatrix z = complex_gaussian(sources.cols(), l, 1.0, rng);
  const CMatrix e = complex_gaussian(sources.rows(), l, 1.0, rng);
  return synthesize_snapshots(sources, powers, rho, sigma2, z, e);
}

/// Fraction of trials whose estimated support equals the true one exactly.
inline double per_metric(const std::vector<SupportSet>& est, const std::vector<SupportSet>& truth) {
  detail::require(est.size() == truth.size() && !est.empty(), ErrorKind::InvalidInput,
                  "need matching, non-empty trial lists");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < est.size(); ++t) hits += est[t] == truth[t] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(est.size());
}

/// sqrt(mean_t ||sort(est_t) - sort(truth_t)||^2), degrees.
inline double doa_rmse(const std::vector<std::vector<double>>& est, const std::vector<std::vector<double>>& truth) {
  detail::require(est.size() == truth.size() && !est.empty(), ErrorKind::InvalidInput,
                  "need matching, non-empty trial lists");
  double acc = 0.0;
  for (std::size_t t = 0; t < est.size(); ++t) {
    detail::require(est[t].size() == truth[t].size(), ErrorKind::InvalidInput, "angle count mismatch");
    auto e = est[t];
    auto g = truth[t];
    std::sort(e.begin(), e.end());
    std::sort(g.begin(), g.end());
    for (std::size_t k = 0; k < e.size(); ++k) acc += (e[k] - g[k]) * (e[k] - g[k]);
  }
  return std::sqrt(acc / static_cast<double>(est.size()));
}

/// sqrt(mean_t ||est_t - truth_t||^2 / ||truth_t||^2).
inline double power_nmse(const std::vector<RVector>& est, const std::vector<RVector>& truth) {
  detail::require(est.size() == truth.size() && !est.empty(), ErrorKind::InvalidInput,
                  "need matching, non-empty trial lists");
  double acc = 0.0;
  for (std::size_t t = 0; t < est.size(); ++t) {
    detail::require(est[t].size() == truth[t].size(), ErrorKind::InvalidInput, "power count mismatch");
    const double den = truth[t].squaredNorm();
    detail::require(den > 0.0, ErrorKind::InvalidInput, "true powers are all zero");
    acc += (est[t] - truth[t]).squaredNorm() / den;
  }
  return std::sqrt(acc / static_cast<double>(est.size()));
}

enum class ScenarioKind { GaussianSsr, UlaDoa };

/// How snr_db maps to per-source powers.
enum class SnrMode {
  FirstSource,  // first source at snr_db, others offset relative to it
  Mean,         // snr_db is the mean of the per-source SNRs in dB
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::GaussianSsr;
  Index n = 32;
  Index m = 256;
  Index l = 32;
  Index k = 4;
  std::vector<double> snr_db{0.0};
  std::vector<double> source_offsets_db;  // empty: all sources equal
  SnrMode snr_mode = SnrMode::FirstSource;
  double rho = 0.0;
  double sigma2 = 1.0;
  std::vector<double> true_doas_deg;  // ula-doa only
  double grid_step_deg = 0.1;         // ula-doa only
  std::uint64_t seed = 1;
  int trials = 100;

  void validate() const {
    using detail::require;
    require(trials >= 1, ErrorKind::Validation, "trials must be >= 1");
    require(!snr_db.empty(), ErrorKind::Validation, "snr_db must list at least one value");
    require(n >= 1 && l >= 1 && k >= 1, ErrorKind::Validation, "N, L and K must be >= 1");
    require(k < n, ErrorKind::Validation, "K must be smaller than N");
    require(std::abs(rho) < 1.0, ErrorKind::Validation, "|rho| must be below 1");
    require(sigma2 > 0.0, ErrorKind::Validation, "sigma2 must be positive");
    require(source_offsets_db.empty() || static_cast<Index>(source_offsets_db.size()) == k, ErrorKind::Validation,
            "source_offsets_db needs one entry per source");
    if (kind == ScenarioKind::UlaDoa) {
      require(static_cast<Index>(true_doas_deg.size()) == k, ErrorKind::Validation, "doas_deg needs K angles");
      for (double d : true_doas_deg)
        require(d >= -90.0 && d <= 90.0, ErrorKind::Validation, "DOAs must lie within [-90, 90] degrees");
      require(static_cast<Index>(angle_grid(grid_step_deg).size()) == m, ErrorKind::Validation,
              "M must equal the number of grid points implied by grid_step_deg");
    }
    require(n <= m, ErrorKind::Validation, "N must not exceed M");
  }

  /// Source powers for one SNR value, noise variance sigma2.
  RVector source_powers(double snr) const {
    RVector off = RVector::Zero(k);
    for (std::size_t i = 0; i < source_offsets_db.size(); ++i) off[static_cast<Index>(i)] = source_offsets_db[i];
    if (snr_mode == SnrMode::Mean) off.array() -= off.mean();
    RVector p(k);
    for (Index i = 0; i < k; ++i) p[i] = sigma2 * std::pow(10.0, (snr + off[i]) / 10.0);
    return p;
  }
};

enum class MethodKind { ClOmp, ClBcd, Iaa, Samv2, Sbl, Sbl1, Cwo, Msbl, Somp, Music, Mle };

struct MethodInfo {
  MethodKind kind;
  const char* tag;
  const char* summary;
};

inline const std::vector<MethodInfo>& method_table() {
  static const std::vector<MethodInfo> table{
      {MethodKind::ClOmp, "cl-omp", "greedy covariance-learning pursuit"},
      {MethodKind::ClBcd, "cl-bcd", "fixed-point block-coordinate descent"},
      {MethodKind::Iaa, "iaa", "iterative adaptive approach power recursion"},
      {MethodKind::Samv2, "samv2", "ratio update (b=1) with SAMV2 noise rule"},
      {MethodKind::Sbl, "sbl", "ratio update (b=1) with support-based noise"},
      {MethodKind::Sbl1, "sbl1", "ratio update (b=1/2) with support-based noise"},
      {MethodKind::Cwo, "cwo", "cyclic coordinatewise likelihood optimization"},
      {MethodKind::Msbl, "msbl", "M-SBL expectation-maximization, known noise"},
      {MethodKind::Somp, "somp", "simultaneous orthogonal matching pursuit"},
      {MethodKind::Music, "music", "grid MUSIC pseudospectrum peaks"},
      {MethodKind::Mle, "mle", "single-source grid maximum likelihood (0.01 deg)"},
  };
  return table;
}

inline std::optional<MethodKind> method_from_tag(std::string_view tag) {
  for (const auto& m : method_table())
    if (tag == m.tag) return m.kind;
  return std::nullopt;
}

inline const char* method_tag(MethodKind kind) {
  for (const auto& m : method_table())
    if (m.kind == kind) return m.tag;
  return "?";
}

struct MethodSpec {
  MethodKind kind = MethodKind::ClOmp;
  int max_iter = 500;
  double tol = 0.5e-4;
  std::optional<bool> peak;  // default: true for ula-doa, false otherwise
  double prune_threshold = 0.0;
  std::optional<double> sigma2_floor;  // cl-omp early stop
  std::optional<double> known_sigma2;  // msbl; defaults to the scenario noise

  std::string tag() const { return method_tag(kind); }
};

struct MetricsRecord {
  std::string method;
  double snr_db = 0.0;
  int trials = 0;  // successful trials
  int failures = 0;
  double per = 0.0;
  std::optional<double> rmse_theta_deg;  // ula-doa only
  double nmse_gamma = 0.0;
  double mean_iters = 0.0;
  double mean_runtime_s = 0.0;
  /// Structural checks over every successful trial.
  bool nonneg_powers = true;
  bool positive_noise = true;
  bool distinct_growth = true;
};

/// Everything drawn for one trial; shared by all methods at all SNR points.
struct TrialDraw {
  std::optional<Dictionary> dictionary;  // gaussian-ssr: fresh per trial
  std::vector<Index> support;            // true support (gaussian-ssr)
  CMatrix z;                             // unit source innovations, K x L
  CMatrix e;                             // unit noise, N x L
};

struct TrialOutcome {
  bool ok = false;
  SupportSet support;
  std::vector<double> angles;  // ula-doa, ascending
  RVector powers;              // aligned with the truth ordering
  int iterations = 0;
  double runtime_s = 0.0;
  IterateBounds bounds;
  bool distinct_growth = true;
};

struct MonteCarloOptions {
  unsigned threads = 1;
  bool record_timing = false;
  /// Called with (done, total) trial counts after each finished trial.
  std::function<void(int, int)> progress;
};

/// Shared fixed context for a Monte-Carlo campaign.
class Experiment {
 public:
  explicit Experiment(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.kind == ScenarioKind::UlaDoa) {
      grid_angles_ = angle_grid(cfg_.grid_step_deg);
      grid_ = ula_dictionary(cfg_.n, grid_angles_);
      CMatrix s(cfg_.n, cfg_.k);
      for (Index i = 0; i < cfg_.k; ++i) s.col(i) = ula_steering(cfg_.n, cfg_.true_doas_deg[static_cast<std::size_t>(i)]);
      steering_ = std::move(s);
      std::vector<Index> near;
      for (double d : cfg_.true_doas_deg) near.push_back(nearest_grid_index(d));
      truth_support_ = SupportSet(near, cfg_.m);
      if (cfg_.k == 1) {
        fine_angles_ = angle_grid(0.01);
        fine_grid_ = ula_dictionary(cfg_.n, fine_angles_);
      }
    }
  }

  const ScenarioConfig& config() const noexcept { return cfg_; }
  const std::vector<double>& grid_angles() const noexcept { return grid_angles_; }

  Index nearest_grid_index(double deg) const {
    const double pos = (deg + 90.0) / cfg_.grid_step_deg;
    const auto idx = static_cast<Index>(std::llround(pos));
    return std::clamp<Index>(idx, 0, static_cast<Index>(grid_angles_.size()) - 1);
  }

  TrialDraw draw(int trial) const {
    Rng rng = make_rng(cfg_.seed, static_cast<std::uint64_t>(trial));
    TrialDraw d;
    if (cfg_.kind == ScenarioKind::GaussianSsr) {
      d.dictionary = gaussian_dictionary(cfg_.n, cfg_.m, rng);
      std::vector<Index> all(static_cast<std::size_t>(cfg_.m));
      std::iota(all.begin(), all.end(), Index{0});
      // Partial Fisher-Yates: the first K entries are a uniform K-subset, in draw order.
      for (Index i = 0; i < cfg_.k; ++i) {
        std::uniform_int_distribution<Index> pick(i, cfg_.m - 1);
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
      }
      d.support.assign(all.begin(), all.begin() + cfg_.k);
    }
    d.z = complex_gaussian(cfg_.k, cfg_.l, 1.0, rng);
    d.e = complex_gaussian(cfg_.n, cfg_.l, 1.0, rng);
    return d;
  }

  /// Snapshots of a drawn trial at one SNR.
  SnapshotMatrix snapshots(const TrialDraw& d, double snr) const {
    const CMatrix s = cfg_.kind == ScenarioKind::UlaDoa ? steering_ : d.dictionary->columns(d.support);
    return synthesize_snapshots(s, cfg_.source_powers(snr), cfg_.rho, cfg_.sigma2, d.z, d.e);
  }

  SupportSet true_support(const TrialDraw& d) const {
    return cfg_.kind == ScenarioKind::UlaDoa ? truth_support_ : SupportSet(d.support, cfg_.m);
  }

  /// True powers in the order outcomes report them: ascending DOA for
  /// ula-doa, ascending atom index for gaussian-ssr.
  RVector true_powers(const TrialDraw& d, double snr) const {
    const RVector p = cfg_.source_powers(snr);
    std::vector<Index> order(static_cast<std::size_t>(cfg_.k));
    std::iota(order.begin(), order.end(), Index{0});
    if (cfg_.kind == ScenarioKind::UlaDoa) {
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return cfg_.true_doas_deg[static_cast<std::size_t>(a)] < cfg_.true_doas_deg[static_cast<std::size_t>(b)];
      });
    } else {
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return d.support[static_cast<std::size_t>(a)] < d.support[static_cast<std::size_t>(b)];
      });
    }
    RVector out(cfg_.k);
    for (Index i = 0; i < cfg_.k; ++i) out[i] = p[order[static_cast<std::size_t>(i)]];
    return out;
  }

  std::vector<double> true_angles_sorted() const {
    auto t = cfg_.true_doas_deg;
    std::sort(t.begin(), t.end());
    return t;
  }

  TrialOutcome run_method(const MethodSpec& spec, const TrialDraw& d, const SnapshotMatrix& y) const;

 private:
  ScenarioConfig cfg_;
  std::vector<double> grid_angles_;
  std::optional<Dictionary> grid_;
  std::vector<double> fine_angles_;
  std::optional<Dictionary> fine_grid_;
  CMatrix steering_;
  SupportSet truth_support_;
};

inline TrialOutcome Experiment::run_method(const MethodSpec& spec, const TrialDraw& d, const SnapshotMatrix& y) const {
  const bool doa = cfg_.kind == ScenarioKind::UlaDoa;
  const Dictionary& a = doa ? *grid_ : *d.dictionary;
  const bool peak = spec.peak.value_or(doa);
  const Index k = cfg_.k;

  TrialOutcome out;
  SolverResult res;
  bool have_result = true;
  switch (spec.kind) {
    case MethodKind::ClOmp: res = run_clomp(y, a, k, spec.sigma2_floor); break;
    case MethodKind::ClBcd: {
      ClBcdConfig c;
      c.max_iter = spec.max_iter;
      c.tol = spec.tol;
      c.peak = peak;
      c.prune_threshold = spec.prune_threshold;
      res = run_clbcd(y, a, k, c);
      break;
    }
    case MethodKind::Iaa:
    case MethodKind::Samv2:
    case MethodKind::Sbl:
    case MethodKind::Sbl1:
    case MethodKind::Cwo:
    case MethodKind::Msbl: {
      static constexpr BaselineMethod map[] = {BaselineMethod::Iaa, BaselineMethod::Samv2, BaselineMethod::Sbl,
                                               BaselineMethod::Sbl1, BaselineMethod::Cwo, BaselineMethod::Msbl};
      const auto which = map[static_cast<int>(spec.kind) - static_cast<int>(MethodKind::Iaa)];
      BaselineConfig c = make_baseline_config(which, peak);
      c.max_iter = spec.max_iter;
      c.tol = spec.tol;
      if (which == BaselineMethod::Msbl) c.known_sigma2 = spec.known_sigma2.value_or(cfg_.sigma2);
      res = run_baseline(y, a, k, c);
      break;
    }
    case MethodKind::Somp: res = somp(y, a, k); break;
    case MethodKind::Music: {
      const SampleCovariance scm = sample_covariance(y);
      res.support = music_doas(scm, a, k);
      const auto fit = provisional_mle(scm, support_columns(a, res.support), a.rows());
      res.gamma = RVector::Zero(a.atoms());
      const auto idx = res.support.indices();
      for (std::size_t j = 0; j < idx.size(); ++j) res.gamma[idx[j]] = fit.first[static_cast<Index>(j)];
      res.sigma2 = fit.second;
      res.bounds.observe(res.gamma, res.sigma2);
      break;
    }
    case MethodKind::Mle: {
      detail::require(doa && k == 1, ErrorKind::InvalidInput, "mle applies to single-source ula-doa scenarios only");
      have_result = false;
      const SampleCovariance scm = sample_covariance(y);
      const double theta = mle_single_source(scm, *fine_grid_, fine_angles_);
      CMatrix at(cfg_.n, 1);
      at.col(0) = ula_steering(cfg_.n, theta);
      const auto fit = provisional_mle(scm, at, cfg_.n);
      out.angles = {theta};
      out.powers = fit.first;
      out.support = SupportSet({nearest_grid_index(theta)}, cfg_.m);
      out.bounds.observe(fit.first, fit.second);
      break;
    }
  }
  if (have_result) {
    out.support = res.support;
    out.iterations = res.iterations;
    out.bounds = res.bounds;
    const auto idx = res.support.indices();
    out.powers.resize(static_cast<Index>(idx.size()));
    // Support indices are ascending, which is also ascending angle on the grid.
    for (std::size_t j = 0; j < idx.size(); ++j) out.powers[static_cast<Index>(j)] = res.gamma[idx[j]];
    if (doa)
      for (Index i : idx) out.angles.push_back(grid_angles_[static_cast<std::size_t>(i)]);
    if (!res.selection_order.empty()) {
      std::vector<Index> ord = res.selection_order;
      std::sort(ord.begin(), ord.end());
      out.distinct_growth = std::adjacent_find(ord.begin(), ord.end()) == ord.end() &&
                            res.selection_order.size() == static_cast<std::size_t>(res.iterations);
    }
  }
  if (!doa) {
    // Powers at the true atoms, ascending index, so the error also counts misses.
    const SupportSet truth = true_support(d);
    RVector at_truth(k);
    const RVector full = have_result ? res.gamma : RVector::Zero(a.atoms());
    for (Index j = 0; j < k; ++j) at_truth[j] = full[truth.indices()[static_cast<std::size_t>(j)]];
    out.powers = at_truth;
  }
  out.ok = true;
  return out;
}

/// Runs every method at every SNR on the same per-trial draws. Trials are
/// seeded from (seed, trial index) only, so the aggregated records do not
/// depend on the thread count or schedule.
inline std::vector<MetricsRecord> run_monte_carlo(const ScenarioConfig& cfg, const std::vector<MethodSpec>& methods,
                                                  const MonteCarloOptions& opt = {}) {
  detail::require(!methods.empty(), ErrorKind::InvalidInput, "at least one method required");
  const Experiment exp(cfg);
  const auto n_snr = cfg.snr_db.size();
  const auto n_meth = methods.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials);

  // slot[(trial * n_snr + s) * n_meth + m]
  std::vector<TrialOutcome> slots(n_trials * n_snr * n_meth);
  std::vector<RVector> truth_powers(n_trials * n_snr);
  std::vector<SupportSet> truth_support(n_trials);

  std::atomic<std::size_t> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= n_trials) return;
      const TrialDraw d = exp.draw(static_cast<int>(t));
      truth_support[t] = exp.true_support(d);
      for (std::size_t s = 0; s < n_snr; ++s) {
        truth_powers[t * n_snr + s] = exp.true_powers(d, cfg.snr_db[s]);
        const SnapshotMatrix y = exp.snapshots(d, cfg.snr_db[s]);
        for (std::size_t m = 0; m < n_meth; ++m) {
          TrialOutcome& o = slots[(t * n_snr + s) * n_meth + m];
          const auto t0 = std::chrono::steady_clock::now();
          try {
            o = exp.run_method(methods[m], d, y);
          } catch (const Error&) {
            o = TrialOutcome{};
          }
          if (opt.record_timing)
            o.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
      }
      const int finished = ++done;
      if (opt.progress) {
        std::lock_guard lock(progress_mu);
        opt.progress(finished, static_cast<int>(n_trials));
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(n_trials)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  std::vector<MetricsRecord> records;
  const auto truth_angles = cfg.kind == ScenarioKind::UlaDoa ? exp.true_angles_sorted() : std::vector<double>{};
  for (std::size_t m = 0; m < n_meth; ++m) {
    for (std::size_t s = 0; s < n_snr; ++s) {
      MetricsRecord r;
      r.method = methods[m].tag();
      r.snr_db = cfg.snr_db[s];
      std::vector<SupportSet> est_sup, tru_sup;
      std::vector<std::vector<double>> est_ang, tru_ang;
      std::vector<RVector> est_pow, tru_pow;
      double iters = 0.0, runtime = 0.0;
      for (std::size_t t = 0; t < n_trials; ++t) {
        const TrialOutcome& o = slots[(t * n_snr + s) * n_meth + m];
        if (!o.ok) {
          ++r.failures;
          continue;
        }
        est_sup.push_back(o.support);
        tru_sup.push_back(truth_support[t]);
        est_pow.push_back(o.powers);
        tru_pow.push_back(truth_powers[t * n_snr + s]);
        if (cfg.kind == ScenarioKind::UlaDoa) {
          est_ang.push_back(o.angles);
          tru_ang.push_back(truth_angles);
        }
        iters += o.iterations;
        runtime += o.runtime_s;
        r.nonneg_powers = r.nonneg_powers && o.bounds.min_gamma >= 0.0;
        r.positive_noise = r.positive_noise && o.bounds.min_sigma2 > 0.0;
        r.distinct_growth = r.distinct_growth && o.distinct_growth;
      }
      r.trials = static_cast<int>(est_sup.size());
      if (r.trials > 0) {
        r.per = per_metric(est_sup, tru_sup);
        r.nmse_gamma = power_nmse(est_pow, tru_pow);
        if (cfg.kind == ScenarioKind::UlaDoa) r.rmse_theta_deg = doa_rmse(est_ang, tru_ang);
        r.mean_iters = iters / r.trials;
        r.mean_runtime_s = runtime / r.trials;
      }
      records.push_back(std::move(r));
    }
  }
  return records;
}

}  // namespace covl

#endif  // COVL_SCENARIO_HPP
