#include <secsi/montecarlo.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <thread>

#include <secsi/linalg.hpp>

namespace secsi {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

MatrixR scenario2_f1() {
  MatrixR f1(5, 4);
  f1 << 1, 1, 1, 1,
        1, 0.95, 0.95, 0.95,
        1, 0.95, 1, 1,
        1, 1, 0.95, 1,
        0.95, 1, 1, 1;
  return f1;
}

void validate_config(const ScenarioConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  const Index min_dim = std::min({cfg.dims[0], cfg.dims[1], cfg.dims[2]});
  if (cfg.rank < 1 || cfg.rank > min_dim) {
    throw std::invalid_argument("rank must satisfy 1 <= d <= min(dims)");
  }
  if (cfg.snr_db.empty()) throw std::invalid_argument("empty SNR grid");
  if (cfg.fixed_f1 &&
      (cfg.fixed_f1->rows() != cfg.dims[0] || cfg.fixed_f1->cols() != cfg.rank)) {
    throw std::invalid_argument("fixed F1 shape does not match (M1, d)");
  }
  if (cfg.redraw_each_trial && cfg.snr_db.size() != 1) {
    throw std::invalid_argument("fixed-SNR mode takes a single SNR value");
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c) {
  std::uint64_t state = master;
  (void)splitmix64(state);
  state ^= a * 0xA24BAED4963EE407ULL;
  (void)splitmix64(state);
  state ^= b * 0x9FB21C651E98DF25ULL;
  (void)splitmix64(state);
  state ^= c * 0xC2B2AE3D27D4EB4FULL;
  return splitmix64(state);
}

ScenarioConfig ScenarioConfig::named(const std::string& id) {
  ScenarioConfig cfg;
  cfg.name = id;
  if (id == "I") {
    cfg.dims = {5, 5, 5};
    cfg.rank = 4;
    cfg.field = Field::Real;
    cfg.snr_db = {30, 40, 50, 60};
    cfg.trials = 500;
    cfg.realizations = 3;
  } else if (id == "II") {
    cfg.dims = {5, 8, 7};
    cfg.rank = 4;
    cfg.field = Field::Complex;
    cfg.snr_db = {40, 50, 60};
    cfg.trials = 500;
    cfg.realizations = 3;
    cfg.fixed_f1 = scenario2_f1();
  } else if (id == "III") {
    cfg.dims = {3, 15, 70};
    cfg.rank = 3;
    cfg.field = Field::Real;
    cfg.snr_db = {50};
    cfg.trials = 200;
    cfg.realizations = 1;
  } else if (id == "IV") {
    cfg.dims = {5, 5, 5};
    cfg.rank = 3;
    cfg.field = Field::Real;
    cfg.snr_db = {50};
    cfg.trials = 500;
    cfg.redraw_each_trial = true;
  } else if (id == "V") {
    cfg.dims = {3, 15, 70};
    cfg.rank = 3;
    cfg.field = Field::Real;
    cfg.snr_db = {40};
    cfg.trials = 200;
    cfg.redraw_each_trial = true;
  } else {
    throw std::invalid_argument("unknown scenario '" + id + "'");
  }
  return cfg;
}

std::array<MatrixC, 3> gen_factors(const ScenarioConfig& cfg,
                                   std::uint64_t realization_seed) {
  std::mt19937_64 rng(realization_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::array<MatrixC, 3> f;
  for (int r = 0; r < 3; ++r) {
    if (r == 0 && cfg.fixed_f1) {
      f[0] = cfg.fixed_f1->cast<Complex>();
      continue;
    }
    f[r].resize(cfg.dims[r], cfg.rank);
    for (Index l = 0; l < cfg.rank; ++l) {
      for (Index i = 0; i < cfg.dims[r]; ++i) {
        if (cfg.field == Field::Complex) {
          f[r](i, l) = Complex(gauss(rng), gauss(rng)) * inv_sqrt2;
        } else {
          f[r](i, l) = gauss(rng);
        }
      }
    }
  }
  return f;
}

Tensor3 gen_noise(const Dims3& dims, Field field, double sigma2,
                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Tensor3 n(dims);
  if (field == Field::Complex) {
    const double s = std::sqrt(sigma2 / 2.0);
    for (Index i = 0; i < n.size(); ++i) {
      n.vec1()(i) = Complex(s * gauss(rng), s * gauss(rng));
    }
  } else {
    const double s = std::sqrt(sigma2);
    for (Index i = 0; i < n.size(); ++i) n.vec1()(i) = s * gauss(rng);
  }
  return n;
}

double sigma_from_snr(double x0_energy, double snr_linear,
                      Index total_entries) {
  if (x0_energy <= 0.0 || snr_linear <= 0.0 || total_entries < 1) {
    throw std::invalid_argument("sigma_from_snr requires positive inputs");
  }
  return x0_energy / (snr_linear * static_cast<double>(total_entries));
}

namespace {

double scaled_column_error(const VectorC& z, const VectorC& zhat) {
  const double zh2 = zhat.squaredNorm();
  if (zh2 == 0.0) throw std::invalid_argument("zero column in estimate");
  const Complex p = (zhat.adjoint() * z).value() / zh2;
  return (z - p * zhat).squaredNorm();
}

}  // namespace

double empirical_rmsfe(const MatrixC& f_true, const MatrixC& f_hat) {
  if (f_true.rows() != f_hat.rows() || f_true.cols() != f_hat.cols()) {
    throw std::invalid_argument("factor shape mismatch");
  }
  const Index d = f_true.cols();
  MatrixR corr(d, d);
  for (Index a = 0; a < d; ++a) {
    const double na = f_true.col(a).norm();
    for (Index c = 0; c < d; ++c) {
      const double nc = f_hat.col(c).norm();
      if (nc == 0.0) throw std::invalid_argument("zero column in estimate");
      corr(a, c) =
          na > 0.0
              ? std::abs((f_hat.col(c).adjoint() * f_true.col(a)).value()) /
                    (na * nc)
              : 0.0;
    }
  }
  const auto assign = greedy_assignment(corr);
  double err = 0.0;
  for (Index a = 0; a < d; ++a) {
    err += scaled_column_error(f_true.col(a), f_hat.col(assign[a]));
  }
  return err / f_true.squaredNorm();
}

double empirical_rmsfe_exact(const MatrixC& f_true, const MatrixC& f_hat) {
  if (f_true.rows() != f_hat.rows() || f_true.cols() != f_hat.cols()) {
    throw std::invalid_argument("factor shape mismatch");
  }
  const Index d = f_true.cols();
  if (d > 5) throw std::invalid_argument("exact enumeration limited to d <= 5");
  std::vector<Index> idx(d);
  for (Index i = 0; i < d; ++i) idx[i] = i;
  double best = std::numeric_limits<double>::infinity();
  do {
    double err = 0.0;
    for (Index a = 0; a < d; ++a) {
      err += scaled_column_error(f_true.col(a), f_hat.col(idx[a]));
      if (err >= best) break;
    }
    best = std::min(best, err);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best / f_true.squaredNorm();
}

double resolved_rmsfe(const MatrixC& f_true, const MatrixC& f_hat) {
  return f_true.cols() <= 5 ? empirical_rmsfe_exact(f_true, f_hat)
                            : empirical_rmsfe(f_true, f_hat);
}

std::vector<CcdfPoint> ccdf(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::vector<CcdfPoint> curve;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    curve.push_back({values[i], static_cast<double>(values.size() - j) / n});
    i = j;
  }
  return curve;
}

double ccdf_eval(const std::vector<CcdfPoint>& curve, double x) {
  if (curve.empty() || x < curve.front().value) return 1.0;
  double frac = curve.front().fraction_above;
  for (const auto& p : curve) {
    if (p.value <= x) {
      frac = p.fraction_above;
    } else {
      break;
    }
  }
  return frac;
}

namespace {

struct TrialOutput {
  std::vector<BranchFactorRow> rows;
  std::vector<SchemeRow> schemes;
  std::string failure;  // empty on success
};

struct AnalyticalTable {
  // unit-variance closed forms, scaled by sigma^2 per SNR point
  std::array<std::array<double, 3>, 6> by_branch;  // NaN when unavailable

  static int slot(const BranchId& b) {
    return (b.mode - 1) * 2 + (b.side == Side::Rhs ? 0 : 1);
  }
};

AnalyticalTable analytical_unit(const Tensor3& x0,
                                const std::array<MatrixC, 3>& factors,
                                std::vector<std::string>* log) {
  AnalyticalTable t;
  const NoiseModel unit = NoiseModel::white_noise(1.0);
  for (const auto& b : BranchId::all()) {
    auto& row = t.by_branch[AnalyticalTable::slot(b)];
    try {
      const BranchRmsfe r = analyze_branch(x0, factors, b, unit);
      row = r.by_factor;
    } catch (const std::exception& e) {
      row = {std::nan(""), std::nan(""), std::nan("")};
      if (log) log->push_back("analysis " + b.str() + ": " + e.what());
    }
  }
  return t;
}

}  // namespace

MonteCarloReport run_monte_carlo(const ScenarioConfig& cfg, int threads) {
  validate_config(cfg);
  MonteCarloReport report;
  report.cfg = cfg;
  const Index total = cfg.dims[0] * cfg.dims[1] * cfg.dims[2];

  if (!cfg.redraw_each_trial) {
    // Varying-SNR mode: the noiseless tensor is held fixed per realization,
    // fresh noise per trial.
    for (int rz = 0; rz < cfg.realizations; ++rz) {
      const auto factors = gen_factors(cfg, derive_seed(cfg.seed, 1, rz, 0));
      const Tensor3 x0 = cp_construct(factors[0], factors[1], factors[2]);
      const double energy = x0.norm() * x0.norm();
      const AnalyticalTable ana =
          analytical_unit(x0, factors, &report.failure_log);

      for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
        const double snr_lin = std::pow(10.0, cfg.snr_db[si] / 10.0);
        const double sigma2 = sigma_from_snr(energy, snr_lin, total);

        std::vector<TrialOutput> outs(cfg.trials);
        parallel_for(cfg.trials, threads, [&](int t) {
          TrialOutput& out = outs[t];
          try {
            const Tensor3 noise = gen_noise(
                cfg.dims, cfg.field, sigma2,
                derive_seed(cfg.seed, 2 + 16 * rz, si, static_cast<std::uint64_t>(t)));
            const Tensor3 x = x0 + noise;
            std::vector<BranchFailure> failures;
            const auto runs = run_all_full(x, cfg.rank, cfg.jevd, &failures);
            if (!failures.empty()) {
              out.failure = "branch failure: " + failures.front().reason;
              return;
            }
            for (const auto& run : runs) {
              const FactorTriple triple = run.to_triple();
              const auto& arow = ana.by_branch[AnalyticalTable::slot(run.branch)];
              for (int f = 0; f < 3; ++f) {
                out.rows.push_back({rz, cfg.snr_db[si], t, run.branch, f + 1,
                                    resolved_rmsfe(factors[f], triple.f[f]),
                                    sigma2 * arow[f]});
              }
            }
          } catch (const std::exception& e) {
            out.failure = e.what();
          }
        });

        for (auto& out : outs) {
          if (!out.failure.empty()) {
            ++report.failed_trials;
            report.failure_log.push_back(out.failure);
            continue;
          }
          report.rows.insert(report.rows.end(), out.rows.begin(),
                             out.rows.end());
        }
      }
    }
    return report;
  }

  // Fixed-SNR mode: fresh tensor and noise per trial, selection schemes on.
  const double snr_lin = std::pow(10.0, cfg.snr_db[0] / 10.0);
  std::vector<TrialOutput> outs(cfg.trials);
  parallel_for(cfg.trials, threads, [&](int t) {
    TrialOutput& out = outs[t];
    try {
      const auto factors =
          gen_factors(cfg, derive_seed(cfg.seed, 3, static_cast<std::uint64_t>(t), 0));
      const Tensor3 x0 = cp_construct(factors[0], factors[1], factors[2]);
      const double energy = x0.norm() * x0.norm();
      const double sigma2 = sigma_from_snr(energy, snr_lin, total);
      const Tensor3 noise =
          gen_noise(cfg.dims, cfg.field, sigma2,
                    derive_seed(cfg.seed, 4, static_cast<std::uint64_t>(t), 1));
      const Tensor3 x = x0 + noise;

      std::vector<BranchFailure> failures;
      const auto runs = run_all_full(x, cfg.rank, cfg.jevd, &failures);
      if (!failures.empty()) {
        out.failure = "branch failure: " + failures.front().reason;
        return;
      }

      const AnalyticalTable ana = analytical_unit(x0, factors, nullptr);

      SecsiEstimates est;
      std::array<std::array<double, 3>, 6> emp{};
      for (const auto& run : runs) {
        const FactorTriple triple = run.to_triple();
        const auto& arow = ana.by_branch[AnalyticalTable::slot(run.branch)];
        for (int f = 0; f < 3; ++f) {
          emp[AnalyticalTable::slot(run.branch)][f] =
              resolved_rmsfe(factors[f], triple.f[f]);
          out.rows.push_back({0, cfg.snr_db[0], t, run.branch, f + 1,
                              emp[AnalyticalTable::slot(run.branch)][f],
                              sigma2 * arow[f]});
        }
        est.triples.push_back(triple);
      }

      auto trmsfe_of = [&](const SelectionResult& sel) {
        double s = 0.0;
        for (int f = 0; f < 3; ++f) {
          s += resolved_rmsfe(factors[f], sel.triple.f[f]);
        }
        return s;
      };
      auto push_scheme = [&](const SelectionResult& sel, double score) {
        out.schemes.push_back(
            {t, sel.scheme, trmsfe_of(sel), score, sel.chosen});
      };

      const auto pas = pas_select_from_runs(x, runs, NoiseModel::white_noise(1.0));
      push_scheme(pas, 0.0);

      const auto bm = bm_select(x, est);
      double bm_score = std::numeric_limits<double>::infinity();
      for (const auto& e : bm.trace) bm_score = std::min(bm_score, e.score);
      push_scheme(bm, bm_score);

      const auto rec = rec_ps_select(x, est);
      double rec_score = std::numeric_limits<double>::infinity();
      for (const auto& e : rec.trace) rec_score = std::min(rec_score, e.score);
      push_scheme(rec, rec_score);

      push_scheme(con_ps_select(est), 0.0);
      push_scheme(dummyr_select(est, derive_seed(cfg.seed, 5,
                                                 static_cast<std::uint64_t>(t), 2)),
                  0.0);

      // Oracle: per factor, the branch with the smallest actual error.
      SelectionResult oracle;
      oracle.scheme = "oracle";
      double oracle_trmsfe = 0.0;
      for (int f = 0; f < 3; ++f) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& run : runs) {
          const double e = emp[AnalyticalTable::slot(run.branch)][f];
          if (e < best) {
            best = e;
            oracle.chosen[f] = run.branch;
          }
        }
        oracle_trmsfe += best;
      }
      out.schemes.push_back({t, "oracle", oracle_trmsfe, 0.0, oracle.chosen});
    } catch (const std::exception& e) {
      out.failure = e.what();
    }
  });

  for (auto& out : outs) {
    if (!out.failure.empty()) {
      ++report.failed_trials;
      report.failure_log.push_back(out.failure);
      continue;
    }
    report.rows.insert(report.rows.end(), out.rows.begin(), out.rows.end());
    report.scheme_rows.insert(report.scheme_rows.end(), out.schemes.begin(),
                              out.schemes.end());
  }
  (void)mean_of;
  return report;
}

}  // namespace secsi
