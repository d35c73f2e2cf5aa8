#pragma once

#include "blockheat/mesh.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace blockheat {

/// CSR matrix. Within each row the diagonal comes first, then off-diagonals in
/// ascending column order.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_offsets;
  std::vector<std::size_t> columns;
  std::vector<double> values;

  double at(std::size_t row, std::size_t col) const noexcept;
  double diagonal(std::size_t row) const noexcept { return values[row_offsets[row]]; }
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  /// Row-major dense copy, for tests and small diagnostics.
  std::vector<double> to_dense() const;
};

/// M with M_ij = U_ij / C_i for neighbours and M_ii = -sum_j U_ij / C_i.
SparseMatrix assemble_operator(const Mesh& mesh);

/// dT/dt by edge traversal, without assembling M.
std::vector<double> rhs(const Mesh& mesh, const TemperatureField& field);
void rhs_into(const Mesh& mesh, std::span<const double> temps, std::span<double> rates) noexcept;

/// S = C^{1/2} M C^{-1/2}, i.e. S_ij = U_ij / sqrt(C_i C_j); same spectrum as M.
SparseMatrix symmetrize(const Mesh& mesh);

/// Largest mesh handled by the dense spectral engine.
inline constexpr std::size_t kMaxSpectralBlocks = 10000;

/// Eigenpairs of S. `vectors` is column-major n x n (empty when not requested).
struct SymmetricEigen {
  std::vector<double> values;  // ascending
  std::vector<double> vectors;
};

/// LAPACK-backed eigensolve of the symmetrized operator; uses the banded
/// driver when the lattice bandwidth is small. Throws too_large above the guard.
SymmetricEigen eigendecompose(const Mesh& mesh, bool want_vectors);

/// Relative band |lambda| <= kZeroModeTolerance * |lambda_m| counted as zero.
inline constexpr double kZeroModeTolerance = 1e-9;

struct SpectralReport {
  std::vector<double> eigenvalues;  // ascending, non-positive
  double lambda_max_abs = 0.0;      // |lambda_m|
  double smallest_nonzero_abs = 0.0;
  double stiffness_ratio = 0.0;
  double euler_h_max = 0.0;  // 2 / |lambda_m|
  std::size_t zero_mode_count = 0;
  std::size_t component_count = 0;

  bool connected() const noexcept { return component_count == 1; }
};

/// Throws too_large above kMaxSpectralBlocks. Disconnected meshes are reported
/// through zero_mode_count / component_count rather than rejected.
SpectralReport spectral_report(const Mesh& mesh);

/// sum C_i T_i / sum C_i. Throws disconnected_mesh when the mesh has more than one component.
double equilibrium_temperature(const Mesh& mesh, const TemperatureField& initial);

}  // namespace blockheat
