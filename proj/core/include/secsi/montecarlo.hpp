#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <secsi/perturbation.hpp>
#include <secsi/selection.hpp>

namespace secsi {

enum class Field { Real, Complex };

struct ScenarioConfig {
  std::string name = "custom";
  Dims3 dims{5, 5, 5};
  Index rank = 3;
  Field field = Field::Real;
  std::vector<double> snr_db{50.0};
  int trials = 500;
  int realizations = 3;          // distinct noiseless tensors (sweep mode)
  bool redraw_each_trial = false;  // fixed-SNR mode: new tensor per trial
  std::optional<MatrixR> fixed_f1;
  std::uint64_t seed = 1;
  JevdOptions jevd;

  // Built-in scenarios "I".."V" at desk-scale trial counts.
  static ScenarioConfig named(const std::string& id);
};

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c);

std::array<MatrixC, 3> gen_factors(const ScenarioConfig& cfg,
                                   std::uint64_t realization_seed);

Tensor3 gen_noise(const Dims3& dims, Field field, double sigma2,
                  std::uint64_t seed);

// sigma^2 = ||X0||_H^2 / (SNR * M), SNR linear, M the total entry count.
double sigma_from_snr(double x0_energy, double snr_linear,
                      Index total_entries);

// Relative squared factor error after resolving the monomial ambiguity:
// greedy |correlation| column assignment, then the per-column least-squares
// scale. empirical_rmsfe_exact enumerates all d! permutations (d <= 5).
double empirical_rmsfe(const MatrixC& f_true, const MatrixC& f_hat);
double empirical_rmsfe_exact(const MatrixC& f_true, const MatrixC& f_hat);
// Exact when d <= 5, greedy beyond. The rMSFE definition is a minimum over
// monomial matrices, so exact enumeration is preferred whenever affordable.
double resolved_rmsfe(const MatrixC& f_true, const MatrixC& f_hat);

struct CcdfPoint {
  double value;
  double fraction_above;  // fraction of samples strictly greater
};
std::vector<CcdfPoint> ccdf(std::vector<double> values);
double ccdf_eval(const std::vector<CcdfPoint>& curve, double x);

struct BranchFactorRow {
  int realization;
  double snr_db;
  int trial;
  BranchId branch;
  int factor;  // 1..3, original modes
  double empirical;
  double analytical;
};

struct SchemeRow {
  int trial;
  std::string scheme;
  double trmsfe;
  double score;  // scheme-specific (reconstruction residual for bm/rec-ps)
  std::array<BranchId, 3> chosen;
};

struct MonteCarloReport {
  ScenarioConfig cfg;
  std::vector<BranchFactorRow> rows;
  std::vector<SchemeRow> scheme_rows;  // fixed-SNR mode only
  int failed_trials = 0;
  std::vector<std::string> failure_log;
};

MonteCarloReport run_monte_carlo(const ScenarioConfig& cfg, int threads = 1);

}  // namespace secsi
