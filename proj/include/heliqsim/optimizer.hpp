#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "heliqsim/analysis.hpp"
#include "heliqsim/pipeline.hpp"

namespace heliqsim {

/// Frequencies in GHz.
struct ConfigITargets {
  double omega_left = 11.0;
  double omega_right = 9.0;
  double beta_left = 1.0;
  double beta_right = -1.0;
};

struct ConfigIIITargets {
  double s3 = 1.5;
  double s4 = 1.0;
  double s5 = 1.5;
  double beta_left = 1.0;
  double beta_right = -1.0;
  double detuning = -1.0;
};

double cost_config_I(const SpectralObservables& obs, const ConfigITargets& t = {});
double cost_config_III(const SpectralObservables& obs, const ConfigIIITargets& t = {});

/// Scalar objective over electrode voltages (mV). A NaN return marks a
/// configuration that cannot be evaluated (no double well, SCF failure).
using CostFunction = std::function<double(std::span<const double>)>;

CostFunction make_cost_I(const Pipeline& pipeline, const ConfigITargets& t = {});
CostFunction make_cost_III(const Pipeline& pipeline, const ConfigIIITargets& t = {});

struct FdGradient {
  Eigen::VectorXd gradient;
  int one_sided = 0;  // coordinates that fell back to a one-sided stencil
  bool ok = true;     // false if some coordinate had no finite stencil
};

/// Central differences with step h; a coordinate whose +h or -h point is
/// invalid uses the one-sided difference against `f0` (the cost at v).
FdGradient fd_gradient(const CostFunction& cost, std::span<const double> v, double h,
                       double f0 = std::numeric_limits<double>::quiet_NaN(), int jobs = 1);

struct OptimizerConfig {
  double learning_rate_mv = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_iters = 400;
  double cost_tol = 1e-3;
  double fd_step_mv = 1e-3;
  /// Halve the learning rate after this many iterations without a new best
  /// cost; 0 disables the schedule.
  int plateau_patience = 15;
  double lr_decay = 0.5;
  double min_learning_rate_mv = 1e-3;
  int jobs = 1;
};

struct AdamRecord {
  int iter = 0;
  double cost = 0.0;
  double learning_rate_mv = 0.0;
  std::vector<double> voltages_mv;
};

struct AdamResult {
  std::vector<double> best;
  double best_cost = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool reached_tol = false;
  bool failed = false;
  std::string message;
  std::vector<AdamRecord> history;
};

/// ADAM descent on finite-difference gradients. Returns the best iterate
/// seen. An update that lands on an invalid configuration is retried with a
/// 10x smaller step.
AdamResult adam_minimize(const CostFunction& cost, std::span<const double> v0,
                         const OptimizerConfig& cfg,
                         const std::function<void(const AdamRecord&)>& on_iter = {});

/// Runs adam_minimize from v0 and from `restarts` seeds drawn uniformly in
/// v0 +- radius_mv with a fixed RNG seed; returns the best run. Histories of
/// all runs are concatenated.
AdamResult multi_start(const CostFunction& cost, std::span<const double> v0,
                       const OptimizerConfig& cfg, int restarts, double radius_mv,
                       std::uint64_t rng_seed,
                       const std::function<void(const AdamRecord&)>& on_iter = {});

/// (1 - lambda) V_I + lambda V_III.
std::vector<double> parametrize(std::span<const double> v_i, std::span<const double> v_iii,
                                double lambda);

std::vector<double> lambda_grid(double lo, double hi, std::size_t n);

struct SweepRecord {
  double lambda = 0.0;
  std::vector<double> voltages_mv;
  bool ok = false;
  std::string error;
  SpectralObservables observables;  // energies/entropies in ascending order
  std::vector<Eigen::Index> tracked;  // tracked[n]: index continuing state n of the previous point
  double min_overlap = 1.0;
  double zeta_eff = std::numeric_limits<double>::quiet_NaN();
};

/// Evaluates V(lambda) on the grid, concurrently when jobs > 1. Failures are
/// recorded and do not stop the sweep. Where consecutive eigenvectors of the
/// lowest `tracked_states` overlap by less than 0.5, midpoints are inserted
/// (at most `max_refinements` times per interval).
std::vector<SweepRecord> sweep(const Pipeline& pipeline, std::span<const double> v_i,
                               std::span<const double> v_iii, std::span<const double> lambdas,
                               int jobs = 1, Eigen::Index tracked_states = 6,
                               int max_refinements = 3);

/// Fills zeta_eff with the effective-model value at fixed coupling g (GHz),
/// using each record's Hartree detuning and anharmonicities.
void annotate_effective_zeta(std::vector<SweepRecord>& records, double g_ghz);

/// E2 - E1 gap in GHz of each successful record.
std::vector<double> first_gap(const std::vector<SweepRecord>& records,
                              std::vector<double>* lambdas);

struct GapMinimum {
  double lambda = 0.0;
  double g = 0.0;  // GHz, half the gap
  SweepRecord record;
};

/// Brent minimisation of E2 - E1 over lambda in [lo, hi] on the full
/// pipeline. Tightens the parabola estimate of a coarse sweep.
GapMinimum refine_gap_minimum(const Pipeline& pipeline, std::span<const double> v_i,
                              std::span<const double> v_iii, double lo, double hi,
                              double tol = 1e-5);

}  // namespace heliqsim
