#pragma once

#include <optional>
#include <vector>

#include "qtt/grid.hpp"
#include "qtt/scale_ops.hpp"
#include "qtt/tensor_train.hpp"

namespace qtt {

enum class BoundaryKind { DirichletZero, DirichletData, Periodic };

std::string to_string(BoundaryKind kind);
BoundaryKind boundary_from_string(const std::string& name);

/// Boundary treatment of one dimension. Boundary values sit one step outside the grid
/// (at index -1 and 2^R); a face is either a constant or a train over the remaining dimensions.
struct DimBoundary {
  BoundaryKind kind = BoundaryKind::DirichletZero;
  double lower_value = 0.0;
  double upper_value = 0.0;
  std::optional<TensorTrain> lower_face;
  std::optional<TensorTrain> upper_face;

  EdgeMode edge() const { return kind == BoundaryKind::Periodic ? EdgeMode::Periodic : EdgeMode::Open; }
};

struct BoundaryCondition {
  std::vector<DimBoundary> dims;

  static BoundaryCondition uniform(int dims, BoundaryKind kind);
  std::vector<EdgeMode> edges() const;
};

/// Grid with one dimension removed (same ordering of the remaining bit slots).
QuanticsGrid drop_dimension(const QuanticsGrid& grid, int dim);

/// Second difference (f_(a-1) - 2 f_a + f_(a+1)) / h^2 along `dim`, operator bond 3.
TensorTrainOperator laplacian_mpo(const QuanticsGrid& grid, const BoundaryCondition& bc, int dim);
/// sum_d coeff[d] * (-Laplacian_d), compressed.
TensorTrainOperator kinetic_mpo(const QuanticsGrid& grid, const BoundaryCondition& bc, const std::vector<double>& coeff,
                                double rel_tol = 1e-26);
/// Boundary data moved to the right-hand side: the part of the full Laplacian that acts on the
/// out-of-grid values, i.e. Laplacian_full f = laplacian_mpo f + dirichlet_rhs.
TensorTrain dirichlet_rhs(const QuanticsGrid& grid, const BoundaryCondition& bc);

/// Diagonal operator with entries v_a.
TensorTrainOperator diagonal_mpo(const TensorTrain& v);
/// Rank-one projector |psi><psi|.
TensorTrainOperator projector_mpo(const TensorTrain& psi);

struct Penalty {
  TensorTrain state;
  double weight = 0.0;
};

struct HamiltonianSpec {
  std::vector<double> kinetic;           // coefficient of -Laplacian per dimension
  std::optional<TensorTrain> potential;  // diagonal V
  std::optional<TensorTrain> external;   // diagonal V_ext
  std::vector<Penalty> penalties;
  double compress_tol = 1e-26;
};

/// Penalty weight when none is given: ten times the magnitude of the previous energy.
double default_penalty_weight(double previous_energy);

/// Kinetic + diagonal parts as one compressed MPO. Penalties are left out unless requested
/// (the solvers handle them through overlaps).
TensorTrainOperator assemble_hamiltonian(const HamiltonianSpec& spec, const QuanticsGrid& grid,
                                         const BoundaryCondition& bc, bool include_penalties = false);

/// W sin(pi x / 2) as a train along `dim` (the external field term).
TensorTrain external_field(const QuanticsGrid& grid, int dim, double amplitude);

}  // namespace qtt
