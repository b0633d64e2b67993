#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qtt/grid.hpp"
#include "qtt/operators.hpp"
#include "qtt/scale_ops.hpp"
#include "qtt/tensor_train.hpp"

namespace qtt {

enum class LocalSolver { Auto, Direct, Krylov };

struct SweepRecord {
  int level = 0;
  int sweep = 0;
  std::size_t sites = 0;
  double residual = 0.0;  // ALS
  double energy = 0.0;    // DMRG (without penalties)
  double objective = 0.0; // DMRG energy including penalties, ALS cost
  Index max_bond = 0;
  std::size_t parameters = 0;
  long updates = 0;
  long local_iterations = 0;
  double seconds = 0.0;
};

struct SweepConfig {
  int max_sweeps = 20;
  int min_sweeps = 1;
  /// ALS: relative residual ||Lx - g|| / ||g||. DMRG: energy change per full sweep.
  double tol = 1e-10;
  TruncationPolicy truncation;
  LocalSolver local_solver = LocalSolver::Auto;
  /// Auto uses a dense local solve up to this window size, Krylov above it.
  Index direct_limit = 512;
  int krylov_max_iter = 200;
  double krylov_tol = 1e-10;
  /// Stop after this many local updates (0 = unlimited); used for equal-budget comparisons.
  long max_local_updates = 0;
  /// DMRG with penalties only: random perturbation (relative to the window norm) added to each two-site
  /// window before the split during the first `noise_sweeps` sweeps, so sectors lost to truncation can re-enter.
  double noise = 1e-6;
  int noise_sweeps = 2;
  std::uint64_t noise_seed = 0x5eed;
  int verbosity = 0;
  /// Called after every sweep with the sweep record and the current state.
  std::function<void(const SweepRecord&, const TensorTrain&)> observer;

  void validate() const;
};

/// One local 2-site update.
struct UpdateRecord {
  int level = 0;
  int sweep = 0;
  std::size_t site = 0;
  char direction = 'R';
  double value = 0.0;  // ALS: quadratic cost, DMRG: local eigenvalue
  Index bond = 0;
  double discarded = 0.0;
  int iterations = 0;
  double time = 0.0;  // seconds since the solve started
};

/// State after a full sweep.

struct LevelRecord {
  int level = 0;
  std::size_t sites = 0;
  double initial = 0.0;  // residual or energy right after prolongation, before sweeping
  double final = 0.0;
  int sweeps = 0;
  long updates = 0;
  bool converged = false;
  Index max_bond = 0;
  std::size_t parameters = 0;
  double seconds = 0.0;
};

struct SolveReport {
  std::string kind;  // "als" or "dmrg"
  std::vector<UpdateRecord> updates;
  std::vector<SweepRecord> sweeps;
  std::vector<LevelRecord> levels;
  std::vector<std::string> warnings;
  bool converged = false;

  long total_updates() const { return static_cast<long>(updates.size()); }
  void append(const SolveReport& other);
  /// One JSON object per local update.
  void write_log(std::ostream& os) const;
  /// Per-sweep and per-level summary without wall-clock data (deterministic for a fixed seed).
  void write_summary(std::ostream& os) const;
};

struct LinearResult {
  TensorTrain solution;
  SolveReport report;
};

struct EigenResult {
  double energy = 0.0;
  TensorTrain state;
  SolveReport report;
};

/// 2-site ALS for L x = g with L symmetric positive definite.
LinearResult als_solve(const TensorTrainOperator& op, const TensorTrain& rhs, const TensorTrain& x0,
                       const SweepConfig& cfg, int level = 0);

/// 2-site DMRG for the lowest eigenpair of H + sum_b w_b |psi_b><psi_b|.
EigenResult dmrg_solve(const TensorTrainOperator& op, const TensorTrain& x0, const SweepConfig& cfg,
                       const std::vector<Penalty>& penalties = {}, int level = 0);

/// Standard-normal cores at the given bond, scaled to unit norm.
TensorTrain random_initial_state(std::size_t sites, Index bond, std::uint64_t seed);

struct CycleSchedule {
  /// Total bits at the coarsest level; levels step by one bit per dimension up to the problem grid.
  int n_min = 0;
  SweepConfig sweep;
  /// Overrides `sweep` on the finest level when set.
  std::optional<SweepConfig> final_sweep;
  /// Per-level bond caps (coarsest first); empty keeps sweep.truncation.
  std::vector<Index> level_max_bond;
  /// Per-level truncation tolerances (coarsest first); empty keeps sweep.truncation.
  std::vector<double> level_rel_tol;
  RestrictionKind restriction = RestrictionKind::Avg;
  ProlongationKind prolongation = ProlongationKind::linear();
  Index init_bond = 2;
  std::uint64_t seed = 1;
  /// Static resolution: skip the cycle and solve on the finest grid from a random start.
  bool static_mode = false;

  int level_count(const QuanticsGrid& fine) const;
};

struct LinearLevel {
  TensorTrainOperator op;
  TensorTrain rhs;
};

struct LinearProblem {
  QuanticsGrid grid;  // finest grid
  /// Data restricted down the levels and handed to `build` (e.g. a charge density).
  std::optional<TensorTrain> source;
  std::function<LinearLevel(const QuanticsGrid&, const TensorTrain* source)> build;
  std::vector<EdgeMode> edges;
};

struct EigenProblem {
  QuanticsGrid grid;
  std::optional<TensorTrain> potential;
  std::function<TensorTrainOperator(const QuanticsGrid&, const TensorTrain* potential)> build;
  std::vector<EdgeMode> edges;
};

struct CycleResult {
  TensorTrain solution;
  SolveReport report;
  /// Restricted data (finest first) as handed to the level builders.
  std::vector<TensorTrain> descended;
};

CycleResult vcycle_linear(const LinearProblem& problem, const CycleSchedule& schedule);

struct EigenState {
  double energy = 0.0;
  TensorTrain state;
};

struct EigenCycleResult {
  std::vector<EigenState> states;  // sorted by energy
  std::vector<SolveReport> reports;  // in computation order
};

/// States are computed one after another; each later state is penalized against the earlier ones
/// on every level (restricted, renormalized copies). Empty `weights` uses default_penalty_weight.
EigenCycleResult vcycle_eigen(const EigenProblem& problem, const CycleSchedule& schedule, int n_states,
                              const std::vector<double>& weights = {});

/// Lowest eigenpair of a dense symmetric matrix-free operator by restarted Lanczos.
struct LanczosResult {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
  bool converged = false;
};
LanczosResult lanczos_lowest(const std::function<Vector(const Vector&)>& apply, const Vector& start, int max_iter,
                             double tol, int krylov_dim = 40);

struct CgResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
};
/// Preconditioned conjugate gradient (Jacobi preconditioner when `diagonal` is non-empty).
CgResult conjugate_gradient(const std::function<Vector(const Vector&)>& apply, const Vector& b, const Vector& x0,
                            const Vector& diagonal, int max_iter, double tol);

}  // namespace qtt
