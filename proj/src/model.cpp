#include "staircase/model.hpp"

#include "staircase/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace staircase {

namespace {

std::vector<std::uint32_t> combinations(int sites, int particles) {
  std::vector<std::uint32_t> out;
  const std::uint32_t end = 1u << sites;
  for (std::uint32_t s = 0; s < end; ++s) {
    if (std::popcount(s) == particles) {
      out.push_back(s);
    }
  }
  return out;
}

// (-1)^(number of occupied sites strictly between i and j)
int hop_sign(std::uint32_t occ, int i, int j) {
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);
  if (hi - lo < 2) {
    return 1;
  }
  const std::uint32_t mask = ((1u << hi) - 1u) & ~((1u << (lo + 1)) - 1u);
  return (std::popcount(occ & mask) % 2 == 0) ? 1 : -1;
}

// Groups ascending eigenvalues into distinct levels; returns level index per value.
std::vector<Index> group_levels(const Eigen::VectorXd& sorted, double tol, std::vector<double>& centers,
                                std::vector<int>& counts) {
  std::vector<Index> level_of(static_cast<std::size_t>(sorted.size()));
  std::vector<double> sums;
  for (Index i = 0; i < sorted.size(); ++i) {
    // Compare against the first member of the current group so a chain of
    // near-equal values cannot drift beyond the tolerance.
    if (centers.empty() || std::abs(sorted[i] - centers.back()) >= tol) {
      centers.push_back(sorted[i]);
      sums.push_back(0.0);
      counts.push_back(0);
    }
    sums.back() += sorted[i];
    counts.back() += 1;
    level_of[static_cast<std::size_t>(i)] = static_cast<Index>(centers.size()) - 1;
  }
  for (std::size_t j = 0; j < centers.size(); ++j) {
    centers[j] = sums[j] / counts[j];
  }
  return level_of;
}

}  // namespace

double SpectrumModel::min_half_gap() const {
  if (levels.size() < 2) {
    return std::numeric_limits<double>::infinity();
  }
  return 0.5 * (levels.tail(levels.size() - 1) - levels.head(levels.size() - 1)).minCoeff();
}

double SpectrumModel::half_gap_at(Index j) const {
  double gap = std::numeric_limits<double>::infinity();
  if (j > 0) {
    gap = std::min(gap, 0.5 * (levels[j] - levels[j - 1]));
  }
  if (j + 1 < levels.size()) {
    gap = std::min(gap, 0.5 * (levels[j + 1] - levels[j]));
  }
  return gap;
}

SpectrumModel SpectrumModel::as_trace() const {
  SpectrumModel out = *this;
  out.populations = Eigen::VectorXd::Ones(levels.size());
  out.mode = SpectrumMode::trace;
  return out;
}

Index binomial(int n, int k) {
  if (k < 0 || k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  Index result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

Index sector_dimension(const LatticeSpec& spec) {
  return binomial(spec.sites(), spec.n_up) * binomial(spec.sites(), spec.n_down);
}

std::vector<std::pair<int, int>> lattice_bonds(const LatticeSpec& spec) {
  std::vector<std::pair<int, int>> bonds;
  for (int y = 0; y < spec.ly; ++y) {
    for (int x = 0; x < spec.lx; ++x) {
      const int s = y * spec.lx + x;
      if (x + 1 < spec.lx) {
        bonds.emplace_back(s, s + 1);
      } else if (spec.periodic_x && spec.lx > 2) {
        bonds.emplace_back(y * spec.lx, s);
      }
      if (y + 1 < spec.ly) {
        bonds.emplace_back(s, s + spec.lx);
      } else if (spec.periodic_y && spec.ly > 2) {
        bonds.emplace_back(x, s);
      }
    }
  }
  std::sort(bonds.begin(), bonds.end());
  return bonds;
}

HamiltonianMatrix build_fermi_hubbard(const LatticeSpec& spec, Index dimension_cap) {
  if (spec.lx < 1 || spec.ly < 1) {
    throw ModelError("lattice dimensions must be positive");
  }
  const int sites = spec.sites();
  if (sites > 16) {
    throw ModelError("lattice has more than 16 sites; occupation bitstrings are 16-bit per spin");
  }
  if (spec.n_up < 0 || spec.n_up > sites || spec.n_down < 0 || spec.n_down > sites) {
    throw ModelError("particle numbers must lie in [0, lx*ly]");
  }
  if (!std::isfinite(spec.t_hop) || !std::isfinite(spec.u) || !std::isfinite(spec.mu)) {
    throw ModelError("model parameters must be finite");
  }
  const Index dim = sector_dimension(spec);
  if (dim > dimension_cap) {
    throw ModelError("sector dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(dimension_cap));
  }

  const auto ups = combinations(sites, spec.n_up);
  const auto downs = combinations(sites, spec.n_down);
  const auto n_down_states = static_cast<Index>(downs.size());
  auto index_of = [&](const std::vector<std::uint32_t>& list, std::uint32_t occ) {
    return static_cast<Index>(std::lower_bound(list.begin(), list.end(), occ) - list.begin());
  };

  HamiltonianMatrix h;
  h.entries = Eigen::MatrixXcd::Zero(dim, dim);
  h.basis.reserve(static_cast<std::size_t>(dim));
  for (auto up : ups) {
    for (auto down : downs) {
      h.basis.push_back({up, down});
    }
  }

  const auto bonds = lattice_bonds(spec);
  for (Index row = 0; row < dim; ++row) {
    const auto [up, down] = h.basis[static_cast<std::size_t>(row)];
    const int doubles = std::popcount(up & down);
    const int total = spec.n_up + spec.n_down;
    h.entries(row, row) = spec.u * doubles - spec.mu * total;

    const Index iu = row / n_down_states;
    const Index id = row % n_down_states;
    for (const auto& [i, j] : bonds) {
      const std::uint32_t bi = 1u << i;
      const std::uint32_t bj = 1u << j;
      // c+_i c_j + c+_j c_i acting on each spin species independently.
      if (((up & bi) != 0) != ((up & bj) != 0)) {
        const std::uint32_t next = up ^ bi ^ bj;
        const Index col = index_of(ups, next) * n_down_states + id;
        h.entries(col, row) += spec.t_hop * hop_sign(up, i, j);
      }
      if (((down & bi) != 0) != ((down & bj) != 0)) {
        const std::uint32_t next = down ^ bi ^ bj;
        const Index col = iu * n_down_states + index_of(downs, next);
        h.entries(col, row) += spec.t_hop * hop_sign(down, i, j);
      }
    }
  }
  h.norm_bound = h.entries.cwiseAbs().rowwise().sum().maxCoeff();
  return h;
}

SpectrumModel build_synthetic_spectrum(const std::vector<std::pair<double, int>>& levels, double tolerance) {
  if (levels.empty()) {
    throw ModelError("synthetic spectrum needs at least one level");
  }
  std::vector<std::pair<double, int>> sorted = levels;
  for (const auto& [e, g] : sorted) {
    if (!std::isfinite(e)) {
      throw ModelError("synthetic level energies must be finite");
    }
    if (g < 1) {
      throw ModelError("synthetic level degeneracies must be positive");
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<double> energies;
  std::vector<int> degeneracies;
  double anchor = 0.0;
  double weighted = 0.0;
  for (const auto& [e, g] : sorted) {
    if (energies.empty() || std::abs(e - anchor) >= tolerance) {
      if (!energies.empty()) {
        energies.back() = weighted / degeneracies.back();
      }
      anchor = e;
      weighted = 0.0;
      energies.push_back(e);
      degeneracies.push_back(0);
    }
    weighted += e * g;
    degeneracies.back() += g;
  }
  energies.back() = weighted / degeneracies.back();

  SpectrumModel out;
  out.levels = Eigen::Map<const Eigen::VectorXd>(energies.data(), static_cast<Index>(energies.size()));
  out.degeneracies = Eigen::Map<const Eigen::VectorXi>(degeneracies.data(), static_cast<Index>(degeneracies.size()));
  out.populations = Eigen::VectorXd::Ones(out.levels.size());
  out.mode = SpectrumMode::trace;
  return out;
}

double degeneracy_tolerance(double norm) { return 1e-9 * std::max(1.0, norm); }

EigenSystem diagonalize(const HamiltonianMatrix& h, const std::optional<InitialState>& psi0) {
  const Index dim = h.dim();
  if (dim == 0 || h.entries.cols() != dim) {
    throw ModelError("Hamiltonian must be a non-empty square matrix");
  }
  const double scale = std::max(1.0, h.entries.cwiseAbs().maxCoeff());
  if ((h.entries - h.entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ModelError("Hamiltonian is not Hermitian");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.entries);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("dense Hermitian eigensolver did not converge");
  }

  EigenSystem out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();

  std::vector<double> centers;
  std::vector<int> counts;
  const double norm = out.eigenvalues.cwiseAbs().maxCoeff();
  out.level_of = group_levels(out.eigenvalues, degeneracy_tolerance(norm), centers, counts);

  SpectrumModel& spec = out.spectrum;
  spec.levels = Eigen::Map<const Eigen::VectorXd>(centers.data(), static_cast<Index>(centers.size()));
  spec.degeneracies = Eigen::Map<const Eigen::VectorXi>(counts.data(), static_cast<Index>(counts.size()));
  spec.populations = Eigen::VectorXd::Ones(spec.levels.size());
  spec.mode = SpectrumMode::trace;
  if (psi0) {
    spec = project_state(out, *psi0);
  }
  return out;
}

SpectrumModel diagonalize_spectrum(const HamiltonianMatrix& h, const std::optional<InitialState>& psi0) {
  return diagonalize(h, psi0).spectrum;
}

EigenSystem eigen_system_from_spectrum(const SpectrumModel& spec) {
  const Index dim = spec.dimension();
  EigenSystem out;
  out.eigenvalues.resize(dim);
  out.level_of.reserve(static_cast<std::size_t>(dim));
  Index pos = 0;
  for (Index j = 0; j < spec.size(); ++j) {
    for (int g = 0; g < spec.degeneracies[j]; ++g) {
      out.eigenvalues[pos++] = spec.levels[j];
      out.level_of.push_back(j);
    }
  }
  out.eigenvectors = Eigen::MatrixXcd::Identity(dim, dim);
  out.spectrum = spec.as_trace();
  return out;
}

SpectrumModel project_state(const EigenSystem& eig, const InitialState& psi0) {
  if (psi0.amplitudes.size() != eig.dim()) {
    throw ModelError("initial state dimension does not match the Hamiltonian");
  }
  const Eigen::VectorXd overlaps = (eig.eigenvectors.adjoint() * psi0.amplitudes).cwiseAbs2();
  SpectrumModel out = eig.spectrum;
  out.populations = Eigen::VectorXd::Zero(out.levels.size());
  for (Index i = 0; i < eig.dim(); ++i) {
    out.populations[eig.level_of[static_cast<std::size_t>(i)]] += overlaps[i];
  }
  out.mode = SpectrumMode::state;
  return out;
}

InitialState make_initial_state(InitialStateKind kind, Index dim, std::uint64_t seed) {
  if (dim < 1) {
    throw ModelError("state dimension must be positive");
  }
  InitialState out;
  out.kind = kind;
  switch (kind) {
    case InitialStateKind::uniform:
      out.amplitudes = Eigen::VectorXcd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
      break;
    case InitialStateKind::seeded_random: {
      auto engine = substream(seed, 0);
      out.amplitudes.resize(dim);
      for (Index i = 0; i < dim; ++i) {
        const double re = standard_normal(engine);
        const double im = standard_normal(engine);
        out.amplitudes[i] = {re, im};
      }
      out.amplitudes.normalize();
      break;
    }
    case InitialStateKind::custom:
      throw ModelError("custom states are built with make_custom_state");
  }
  return out;
}

InitialState make_custom_state(const Eigen::VectorXcd& amplitudes) {
  const double norm = amplitudes.norm();
  if (amplitudes.size() == 0 || !(norm > 0.0)) {
    throw ModelError("custom state must be non-zero");
  }
  return {amplitudes / norm, InitialStateKind::custom};
}

}  // namespace staircase
