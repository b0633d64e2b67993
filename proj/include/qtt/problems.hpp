#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtt/grid.hpp"
#include "qtt/operators.hpp"
#include "qtt/solvers.hpp"
#include "qtt/tci.hpp"

namespace qtt {

// ---------------------------------------------------------------------------- Poisson strip

/// Strip 0 < y < h, periodic along x in [-half_length, half_length). V = 0 on y = 0;
/// on y = h, V = v_top for |x| < c and v_gate elsewhere.
struct PoissonBenchmark {
  double h = 1.0;
  double c = 0.25;
  double v_top = 1.0;
  double v_gate = -1.0;
  double half_length = 4.0;

  void validate() const;
};

/// Closed-form solution of the infinite strip; boundary points return the boundary datum.
double analytic_benchmark(double x, double y, const PoissonBenchmark& p);

/// x uses 2^bits_x points over [-L, L); y holds the 2^bits_y interior points of a vertex grid
/// with spacing h / (2^bits_y + 1).
QuanticsGrid strip_grid(const PoissonBenchmark& p, int bits_x, int bits_y, BitOrdering ordering = BitOrdering::Interleaved);
/// The same layout at another resolution (the y domain depends on the bit count).
QuanticsGrid strip_grid_like(const PoissonBenchmark& p, const QuanticsGrid& like);

/// Periodic x, Dirichlet data in y (zero below, gate voltages above). `zero_top` gives V = 0 on both faces.
BoundaryCondition strip_boundary(const PoissonBenchmark& p, const QuanticsGrid& grid, bool zero_top = false);

/// -Laplacian f = rhs - source on the strip; `source` may be null.
LinearLevel strip_level(const PoissonBenchmark& p, const QuanticsGrid& grid, const TensorTrain* source, bool zero_top = false);

LinearProblem benchmark_problem(const PoissonBenchmark& p, const QuanticsGrid& fine);

/// Analytic solution sampled on the grid by cross interpolation.
TensorTrain benchmark_reference(const PoissonBenchmark& p, const QuanticsGrid& grid, Index max_bond = 160,
                                double tol = 1e-12);
double relative_error(const TensorTrain& f, const TensorTrain& reference);
double benchmark_error(const TensorTrain& f, const PoissonBenchmark& p, const QuanticsGrid& grid);

/// cos(8 pi (x^2 + (y - h/2)^2) / h^2) sin(pi x / w)
double oscillatory_density(double x, double y, double h, double w);

struct DensityProblem {
  PoissonBenchmark geometry;
  double w = 0.5;
  /// true: V = 0 on both faces, false: the benchmark gate voltages.
  bool grounded = true;
  Index tci_bond = 64;
  double tci_tol = 1e-10;
};

/// The density on the finest grid (by cross interpolation).
TciResult density_train(const DensityProblem& d, const QuanticsGrid& grid);
/// Laplacian f = rho with rho restricted down the levels.
LinearProblem density_problem(const DensityProblem& d, const QuanticsGrid& fine, const TensorTrain& rho);

/// Mean of the grid values, sum_a f_a / 2^N.
double grid_mean(const TensorTrain& f);

/// ||f_N - R' f_ref|| / ||f_ref|| with both norms taken on the grid measure (mean of squares), so
/// trains at different resolution compare on the same scale.
double cross_restriction_error(const TensorTrain& f_n, const QuanticsGrid& grid_n, const TensorTrain& f_ref,
                               const QuanticsGrid& grid_ref, RestrictionKind r_prime);

// ---------------------------------------------------------------------------- H2+

inline constexpr double kProtonMass = 1836.152701;
inline constexpr double kHartreeToWavenumber = 219474.6313632;

/// 1/R - 1/|r - R/2 e_x| - 1/|r + R/2 e_x|. Throws on an exact singularity.
double coulomb_kernel(double R, double x, double y, double z);

/// Cell centre of grid point `index` along `dim` (points sit half a step inside each cell).
double cell_center(const QuanticsGrid& grid, int dim, std::uint64_t index);

struct H2PlusSpec {
  double R = 2.0;          // clamped nuclear distance (3D)
  double box = 25.0;       // electron box [-box, box) per dimension
  int bits = 8;            // per electron dimension
  BitOrdering ordering = BitOrdering::Sequential;
  double mass = kProtonMass;
  double field = 0.0;      // amplitude W of W sin(pi x / 2)
  // 4D only
  double r_lo = 0.2;
  double r_hi = 100.2;
  int r_bits = 8;
  // potential ingestion
  Index potential_bond = 80;
  double potential_tol = 1e-9;
  int potential_sweeps = 8;

  double reduced_mass() const { return 0.5 * mass; }
  void validate() const;
};

/// Electron grid (x, y, z); coordinates are cell centres so symmetric points pair up under inversion.
QuanticsGrid h2_grid_3d(const H2PlusSpec& s);
/// (R, x, y, z) with R and x bits interleaved, then y, then z.
QuanticsGrid h2_grid_4d(const H2PlusSpec& s);

/// Clamped-nuclei potential (including 1/R) by cross interpolation.
TciResult h2_potential_3d(const H2PlusSpec& s, const QuanticsGrid& grid);
/// Full kernel as a function of (R, x, y, z).
TciResult h2_potential_4d(const H2PlusSpec& s, const QuanticsGrid& grid);

/// Smeared electron attraction of effective_potential_ha on the electron grid (cell centres, no 1/R term).
TciResult ha_potential_3d(const H2PlusSpec& s, const QuanticsGrid& grid, double r0, double sigma);

/// Clamped-nuclei ground energies E(R) (including 1/R) by 3D V-cycle solves at each R, run `jobs` at a time.
/// Every solve uses `base` with R replaced.
std::vector<double> electronic_curve(const std::vector<double>& r_values, const H2PlusSpec& base,
                                     const CycleSchedule& schedule, int jobs = 1, std::vector<SolveReport>* reports = nullptr);

/// -1/2 Laplacian + V (+ W sin(pi x / 2)) with zero Dirichlet walls.
EigenProblem h2_problem_3d(const H2PlusSpec& s, const QuanticsGrid& grid, const TensorTrain& potential);
/// -(1 + 1/(4 mu))/2 Laplacian_r - 1/(2 mu) d^2/dR^2 + V on u(r, R) = R Psi(r, R).
EigenProblem h2_problem_4d(const H2PlusSpec& s, const QuanticsGrid& grid, const TensorTrain& potential);

/// HA-smeared electron attraction -int dR |Psi(R)|^2 (1/|r - R/2| + 1/|r + R/2|) with |Psi|^2 a
/// Gaussian of centre r0 and standard deviation sigma. The 1/|R - R*| peak is subtracted and
/// integrated in closed form; the remainder uses Gauss-Legendre panels over r0 +- 10 sigma.
FunctionAdaptor effective_potential_ha(double r0, double sigma, int nodes = 48);
/// Same with a sampled nuclear density (trapezoid rule on the given R points; normalized internally).
FunctionAdaptor effective_potential(const std::vector<double>& r_points, const std::vector<double>& density);

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// ---------------------------------------------------------------------------- vibrations

struct ParabolaFit {
  double r_min = 0.0;
  double e_min = 0.0;
  double curvature = 0.0;  // a in E ~ e_min + a (R - r_min)^2
  double omega = 0.0;      // sqrt(2 a / mu), Hartree
  double omega_cm() const { return omega * kHartreeToWavenumber; }
  double ha_energy() const { return e_min + 0.5 * omega; }
};

/// Least-squares parabola through the `points` samples closest to the sampled minimum.
ParabolaFit fit_parabola(const std::vector<double>& r, const std::vector<double>& e, double mu, int points = 5);

/// Natural cubic spline through (x, y), evaluated at `at`.
std::vector<double> cubic_spline(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& at);

struct VibrationalResult {
  std::vector<double> energies;  // lowest levels of -1/(2 mu) d^2/dR^2 + E(R)
  std::vector<TensorTrain> states;
  QuanticsGrid grid;
  ParabolaFit fit;
  std::vector<SolveReport> reports;
};

/// Sweep settings used by vibrational_1d when no schedule is given.
CycleSchedule vibrational_schedule(const QuanticsGrid& grid);

/// 1D nuclear problem on `grid` (one dimension, zero walls) with E(R) interpolated from samples.
VibrationalResult vibrational_1d(const std::vector<double>& r, const std::vector<double>& e, double mu,
                                 const QuanticsGrid& grid, int n_states = 1, int fit_points = 5,
                                 const CycleSchedule* schedule = nullptr, double penalty_weight = 1.0);

// ---------------------------------------------------------------------------- observables

struct Observables {
  double energy = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double virial = 0.0;  // <V>/<T>: +1 for a harmonic well, -2 for a Coulomb system at equilibrium
};

/// Expectation values for a state under separate kinetic and potential operators.
Observables observables(const TensorTrain& psi, const TensorTrainOperator& kinetic, const TensorTrainOperator& potential);

/// Bit flip on every site of the listed dimensions: index a -> 2^R - 1 - a (a reflection on cell-centred grids).
TensorTrainOperator reflection_mpo(const QuanticsGrid& grid, const std::vector<int>& dims);
/// <psi|P psi> / <psi|psi> for the reflection of the listed dimensions.
double parity_overlap(const TensorTrain& psi, const QuanticsGrid& grid, const std::vector<int>& dims);

/// Train over the remaining dimensions with the listed bits fixed.
TensorTrain fix_dimensions(const TensorTrain& psi, const QuanticsGrid& grid, const std::vector<int>& dims,
                           const std::vector<std::uint64_t>& values);
/// Values of psi along `dim` with every other dimension fixed at `at` (entries for `dim` ignored).
std::vector<double> slice(const TensorTrain& psi, const QuanticsGrid& grid, int dim, const MultiIndex& at);
/// sum over all other dimensions of |psi|^2, divided by the spacing of `dim` (a density on that axis).
std::vector<double> marginal_density(const TensorTrain& psi, const QuanticsGrid& grid, int dim);
/// |psi|^2 summed over the `traced` dimensions, as a train on the remaining grid (exact up to `policy`).
TensorTrain partial_density(const TensorTrain& psi, const QuanticsGrid& grid, const std::vector<int>& traced,
                            const TruncationPolicy& policy = TruncationPolicy::exact());

/// Delimiter-separated slice file with a self-describing header.
void write_slice(const std::string& path, const QuanticsGrid& grid, int dim, const std::vector<double>& values,
                 const std::string& quantity, int level = 0);
struct SliceFile {
  std::vector<double> coordinates;
  std::vector<double> values;
  std::string quantity;
};
SliceFile read_slice(const std::string& path);

}  // namespace qtt
