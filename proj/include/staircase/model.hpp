#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace staircase {

using Index = Eigen::Index;

/// Raised when a model definition cannot be turned into a Hamiltonian.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by numerical routines that fail to converge or meet a precondition
/// at run time (as opposed to malformed input).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rectangular Fermi-Hubbard lattice in a fixed (n_up, n_down) sector.
/// Sites are numbered row-major, s = y * lx + x.
struct LatticeSpec {
  int lx = 2;
  int ly = 2;
  double t_hop = 1.0;
  double u = 2.0;
  double mu = 0.0;
  int n_up = 2;
  int n_down = 2;
  bool periodic_x = false;
  bool periodic_y = false;

  [[nodiscard]] int sites() const { return lx * ly; }
};

/// Occupation bitstrings for one basis state; bit s is site s.
struct BasisLabel {
  std::uint32_t up = 0;
  std::uint32_t down = 0;
};

struct HamiltonianMatrix {
  Eigen::MatrixXcd entries;
  std::vector<BasisLabel> basis;
  /// Gershgorin bound on the spectral norm.
  double norm_bound = 0.0;

  [[nodiscard]] Index dim() const { return entries.rows(); }
};

enum class SpectrumMode { state, trace };

/// Distinct levels E_j, their degeneracies g_j and populations p_j.
/// In state mode p_j is already summed over the degenerate eigenspace, so the
/// weight of level j is p_j itself. In trace mode p_j == 1 and the weight is g_j.
struct SpectrumModel {
  Eigen::VectorXd levels;
  Eigen::VectorXi degeneracies;
  Eigen::VectorXd populations;
  SpectrumMode mode = SpectrumMode::trace;

  [[nodiscard]] Index size() const { return levels.size(); }
  /// Hilbert-space dimension, sum of degeneracies.
  [[nodiscard]] Index dimension() const { return degeneracies.sum(); }
  /// Per-level weight entering every Gaussian sum.
  [[nodiscard]] Eigen::VectorXd weights() const {
    if (mode == SpectrumMode::state) {
      return populations;
    }
    return degeneracies.cast<double>();
  }
  [[nodiscard]] double total_weight() const { return weights().sum(); }
  [[nodiscard]] double spectral_norm() const { return levels.cwiseAbs().maxCoeff(); }
  [[nodiscard]] double e_min() const { return levels.minCoeff(); }
  [[nodiscard]] double e_max() const { return levels.maxCoeff(); }
  /// Smallest half-gap 0.5 * (E_{j+1} - E_j); +inf for a single level.
  [[nodiscard]] double min_half_gap() const;
  /// Smallest half-gap adjacent to level j.
  [[nodiscard]] double half_gap_at(Index j) const;
  /// Same levels with p_j = 1.
  [[nodiscard]] SpectrumModel as_trace() const;
};

enum class InitialStateKind { uniform, seeded_random, custom };

struct InitialState {
  Eigen::VectorXcd amplitudes;
  InitialStateKind kind = InitialStateKind::uniform;
};

/// Full eigendecomposition kept alongside the grouped spectrum so sampled
/// states can be projected onto eigenvectors.
struct EigenSystem {
  Eigen::VectorXd eigenvalues;   // ascending, one per eigenvector
  Eigen::MatrixXcd eigenvectors;  // columns
  std::vector<Index> level_of;   // eigenvector index -> distinct level index
  SpectrumModel spectrum;

  [[nodiscard]] Index dim() const { return eigenvalues.size(); }
};

inline constexpr Index kDefaultDimensionCap = 4096;

/// Binomial coefficient C(n, k); exact for the sector sizes allowed here.
[[nodiscard]] Index binomial(int n, int k);

/// Dimension C(L, n_up) * C(L, n_down) of the particle-number sector.
[[nodiscard]] Index sector_dimension(const LatticeSpec& spec);

/// Nearest-neighbour bonds (i < j). A periodic wrap is only added along an
/// axis longer than two sites, so no bond is counted twice.
[[nodiscard]] std::vector<std::pair<int, int>> lattice_bonds(const LatticeSpec& spec);

/// H = sum_<ij>,s t (c+_is c_js + h.c.) + U sum_i n_iu n_id - mu sum_is n_is in
/// the occupation basis. Modes are ordered with all spin-up sites before all
/// spin-down sites; the hopping sign is the parity of occupied same-spin sites
/// strictly between i and j.
[[nodiscard]] HamiltonianMatrix build_fermi_hubbard(const LatticeSpec& spec,
                                                    Index dimension_cap = kDefaultDimensionCap);

/// Trace-mode spectrum from (E, g) pairs. Levels closer than `tolerance` are
/// merged; the merged energy is the degeneracy-weighted mean.
[[nodiscard]] SpectrumModel build_synthetic_spectrum(const std::vector<std::pair<double, int>>& levels,
                                                     double tolerance = 1e-12);

/// Degeneracy tolerance used when grouping eigenvalues: 1e-9 * max(1, norm).
[[nodiscard]] double degeneracy_tolerance(double norm);

/// Dense Hermitian eigendecomposition with degeneracy grouping. With a state
/// the result is in state mode, p_j summed over each degenerate eigenspace.
[[nodiscard]] EigenSystem diagonalize(const HamiltonianMatrix& h,
                                      const std::optional<InitialState>& psi0 = std::nullopt);

/// Convenience wrapper returning only the grouped spectrum.
[[nodiscard]] SpectrumModel diagonalize_spectrum(const HamiltonianMatrix& h,
                                                 const std::optional<InitialState>& psi0 = std::nullopt);

/// Eigen system of a diagonal Hamiltonian realising a synthetic spectrum
/// (levels expanded by degeneracy, identity eigenvectors).
[[nodiscard]] EigenSystem eigen_system_from_spectrum(const SpectrumModel& spec);

/// Re-weights an existing eigen system for a new initial state.
[[nodiscard]] SpectrumModel project_state(const EigenSystem& eig, const InitialState& psi0);

[[nodiscard]] InitialState make_initial_state(InitialStateKind kind, Index dim, std::uint64_t seed = 0);
[[nodiscard]] InitialState make_custom_state(const Eigen::VectorXcd& amplitudes);

}  // namespace staircase
