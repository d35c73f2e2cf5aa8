#include "blockheat/system.hpp"

#include "blockheat/error.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace blockheat {
namespace {

SparseMatrix pattern_of(const Mesh& mesh) {
  SparseMatrix m;
  m.n = mesh.size();
  m.row_offsets.resize(m.n + 1);
  const auto offsets = mesh.row_offsets();
  for (std::size_t i = 0; i <= m.n; ++i) m.row_offsets[i] = offsets[i] + i;
  m.columns.resize(m.row_offsets[m.n]);
  m.values.resize(m.row_offsets[m.n]);
  return m;
}

void check_size(std::size_t n) {
  if (n > kMaxSpectralBlocks)
    throw Error(ErrorCode::too_large, "mesh has " + std::to_string(n) +
                                          " blocks; dense spectral analysis is limited to " +
                                          std::to_string(kMaxSpectralBlocks));
}

}  // namespace

double SparseMatrix::at(std::size_t row, std::size_t col) const noexcept {
  for (std::size_t k = row_offsets[row]; k < row_offsets[row + 1]; ++k)
    if (columns[k] == col) return values[k];
  return 0.0;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n || y.size() != n)
    throw Error(ErrorCode::size_mismatch, "operand length does not match matrix size");
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) sum += values[k] * x[columns[k]];
    y[i] = sum;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n);
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> dense(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
      dense[i * n + columns[k]] = values[k];
  return dense;
}

SparseMatrix assemble_operator(const Mesh& mesh) {
  mesh.require_no_isolated();
  SparseMatrix m = pattern_of(mesh);
  for (std::size_t i = 0; i < m.n; ++i) {
    const double c = mesh.capacity(i);
    std::size_t k = m.row_offsets[i];
    m.columns[k] = i;
    m.values[k] = -mesh.total_conductance(i) / c;
    for (const auto& nb : mesh.neighbors(BlockId{i})) {
      ++k;
      m.columns[k] = nb.id.index;
      m.values[k] = nb.conductance / c;
    }
  }
  return m;
}

void rhs_into(const Mesh& mesh, std::span<const double> temps, std::span<double> rates) noexcept {
  const auto offsets = mesh.row_offsets();
  const auto adj = mesh.adjacency();
  const auto caps = mesh.capacities();
  for (std::size_t i = 0; i < caps.size(); ++i) {
    double flux = 0.0;
    const double ti = temps[i];
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k)
      flux += adj[k].conductance * (temps[adj[k].id.index] - ti);
    rates[i] = flux / caps[i];
  }
}

std::vector<double> rhs(const Mesh& mesh, const TemperatureField& field) {
  if (field.size() != mesh.size())
    throw Error(ErrorCode::size_mismatch, "field length does not match mesh");
  std::vector<double> rates(mesh.size());
  rhs_into(mesh, field.values, rates);
  return rates;
}

SparseMatrix symmetrize(const Mesh& mesh) {
  mesh.require_no_isolated();
  SparseMatrix s = pattern_of(mesh);
  for (std::size_t i = 0; i < s.n; ++i) {
    const double ci = mesh.capacity(i);
    std::size_t k = s.row_offsets[i];
    s.columns[k] = i;
    s.values[k] = -mesh.total_conductance(i) / ci;
    for (const auto& nb : mesh.neighbors(BlockId{i})) {
      ++k;
      s.columns[k] = nb.id.index;
      s.values[k] = nb.conductance / std::sqrt(ci * mesh.capacity(nb.id.index));
    }
  }
  return s;
}

SymmetricEigen eigendecompose(const Mesh& mesh, bool want_vectors) {
  const std::size_t n = mesh.size();
  check_size(n);
  const SparseMatrix s = symmetrize(mesh);
  const auto ln = static_cast<lapack_int>(n);
  SymmetricEigen result;
  result.values.resize(n);

  const std::size_t kd = mesh.bandwidth();
  lapack_int info = 0;
  if (kd + 1 < n / 4) {
    // Lower band storage: ab[(i - j) + j * (kd + 1)] = S_ij for 0 <= i - j <= kd.
    const std::size_t ldab = kd + 1;
    std::vector<double> ab(ldab * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = s.row_offsets[i]; k < s.row_offsets[i + 1]; ++k) {
        const std::size_t j = s.columns[k];
        if (j <= i) ab[(i - j) + j * ldab] = s.values[k];
      }
    if (want_vectors) result.vectors.assign(n * n, 0.0);
    double dummy = 0.0;
    info = LAPACKE_dsbevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', ln,
                          static_cast<lapack_int>(kd), ab.data(), static_cast<lapack_int>(ldab),
                          result.values.data(), want_vectors ? result.vectors.data() : &dummy,
                          want_vectors ? ln : 1);
  } else {
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = s.row_offsets[i]; k < s.row_offsets[i + 1]; ++k)
        a[i + s.columns[k] * n] = s.values[k];
    info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', ln, a.data(), ln,
                          result.values.data());
    if (want_vectors) result.vectors = std::move(a);
  }
  if (info != 0)
    throw Error(ErrorCode::degenerate, "symmetric eigensolver failed, info = " + std::to_string(info));
  return result;
}

SpectralReport spectral_report(const Mesh& mesh) {
  check_size(mesh.size());
  SpectralReport report;
  report.eigenvalues = eigendecompose(mesh, false).values;
  report.component_count = mesh.component_count();
  const auto& ev = report.eigenvalues;
  report.lambda_max_abs = std::max(std::abs(ev.front()), std::abs(ev.back()));
  const double band = kZeroModeTolerance * report.lambda_max_abs;

  double smallest = 0.0;
  for (double lambda : ev) {
    const double mag = std::abs(lambda);
    if (mag <= band) {
      ++report.zero_mode_count;
    } else if (smallest == 0.0 || mag < smallest) {
      smallest = mag;
    }
  }
  report.smallest_nonzero_abs = smallest;
  report.stiffness_ratio = smallest > 0.0 ? report.lambda_max_abs / smallest : 1.0;
  report.euler_h_max = 2.0 / report.lambda_max_abs;
  return report;
}

double equilibrium_temperature(const Mesh& mesh, const TemperatureField& initial) {
  if (initial.size() != mesh.size())
    throw Error(ErrorCode::size_mismatch, "field length does not match mesh");
  if (mesh.component_count() != 1)
    throw Error(ErrorCode::disconnected_mesh,
                "equilibrium temperature is undefined on a disconnected mesh");
  double energy = 0.0, capacity = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    energy += mesh.capacity(i) * initial.values[i];
    capacity += mesh.capacity(i);
  }
  return energy / capacity;
}

}  // namespace blockheat
