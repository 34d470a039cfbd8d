#include "fixtures/fh_reference.hpp"
#include "staircase/model.hpp"

#include <doctest.h>

#include <bit>
#include <map>

using namespace staircase;

namespace {

// Brute-force second quantization on the full Fock space of 2L modes
// (spin-up modes 0..L-1, spin-down L..2L-1). c+_a c_b acting on a bitstring,
// sign from the number of occupied modes below each operator.
struct FockResult {
  std::uint32_t state = 0;
  int sign = 0;
};

FockResult apply_annihilate(std::uint32_t s, int mode) {
  if ((s >> mode & 1u) == 0) {
    return {0, 0};
  }
  const int below = std::popcount(s & ((1u << mode) - 1u));
  return {s & ~(1u << mode), below % 2 == 0 ? 1 : -1};
}

FockResult apply_create(std::uint32_t s, int mode) {
  if ((s >> mode & 1u) != 0) {
    return {0, 0};
  }
  const int below = std::popcount(s & ((1u << mode) - 1u));
  return {s | (1u << mode), below % 2 == 0 ? 1 : -1};
}

Eigen::MatrixXd brute_force_hubbard(const LatticeSpec& spec, const std::vector<BasisLabel>& basis) {
  const int l = spec.sites();
  std::map<std::uint32_t, Index> index;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    index[basis[i].up | (basis[i].down << l)] = static_cast<Index>(i);
  }
  const auto n = static_cast<Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [s, col] : index) {
    for (const auto& [i, j] : lattice_bonds(spec)) {
      for (int sp = 0; sp < 2; ++sp) {
        for (auto [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
          const auto r1 = apply_annihilate(s, b + sp * l);
          if (r1.sign == 0) {
            continue;
          }
          const auto r2 = apply_create(r1.state, a + sp * l);
          if (r2.sign == 0) {
            continue;
          }
          h(index.at(r2.state), col) += spec.t_hop * r1.sign * r2.sign;
        }
      }
    }
    const std::uint32_t up = s & ((1u << l) - 1u);
    const std::uint32_t dn = s >> l;
    h(col, col) += spec.u * std::popcount(up & dn) - spec.mu * std::popcount(s);
  }
  return h;
}

}  // namespace

TEST_CASE("sector dimensions") {
  LatticeSpec s;
  CHECK(build_fermi_hubbard(s).dim() == 36);
  s.ly = 3;
  s.n_up = s.n_down = 3;
  CHECK(build_fermi_hubbard(s).dim() == 400);
  CHECK(sector_dimension(s) == 400);
}

TEST_CASE("hopping-free lattice is diagonal with U times double occupancy") {
  LatticeSpec s;
  s.t_hop = 0.0;
  s.u = 3.0;
  const auto h = build_fermi_hubbard(s);
  CHECK((h.entries - Eigen::MatrixXcd(h.entries.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  for (Index i = 0; i < h.dim(); ++i) {
    const auto b = h.basis[static_cast<std::size_t>(i)];
    CHECK(h.entries(i, i).real() == doctest::Approx(3.0 * std::popcount(b.up & b.down)));
  }
}

TEST_CASE("errors: particle numbers and dimension cap") {
  LatticeSpec s;
  s.n_up = 5;
  CHECK_THROWS_AS((void)build_fermi_hubbard(s), ModelError);
  LatticeSpec t;
  t.ly = 3;
  t.n_up = t.n_down = 3;
  CHECK_THROWS_AS((void)build_fermi_hubbard(t, 100), ModelError);
}

TEST_CASE("hopping signs match brute-force second quantization") {
  for (int lx : {2, 3, 4}) {
    for (int ly : {1, 2}) {
      if (lx * ly > 4) {
        continue;
      }
      for (bool periodic : {false, true}) {
        LatticeSpec s;
        s.lx = lx;
        s.ly = ly;
        s.t_hop = 0.7;
        s.u = 1.3;
        s.mu = 0.4;
        s.n_up = lx * ly / 2;
        s.n_down = (lx * ly + 1) / 2;
        s.periodic_x = periodic;
        const auto h = build_fermi_hubbard(s);
        const Eigen::MatrixXd ref = brute_force_hubbard(s, h.basis);
        CAPTURE(lx);
        CAPTURE(ly);
        CAPTURE(periodic);
        CHECK((h.entries.real() - ref).cwiseAbs().maxCoeff() < 1e-14);
      }
    }
  }
}

TEST_CASE("built Hamiltonians are Hermitian and norm-bounded") {
  LatticeSpec s;
  s.lx = 3;
  s.ly = 2;
  s.n_up = 2;
  s.n_down = 3;
  s.periodic_x = true;
  const auto h = build_fermi_hubbard(s);
  CHECK((h.entries - h.entries.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * h.entries.cwiseAbs().maxCoeff());
  const auto spec = diagonalize_spectrum(h);
  CHECK(spec.spectral_norm() <= h.norm_bound);
  CHECK(spec.dimension() == h.dim());
}

TEST_CASE("periodic wrap only on axes longer than two") {
  LatticeSpec s;
  s.periodic_x = s.periodic_y = true;
  CHECK(lattice_bonds(s).size() == 4);
  s.lx = 3;
  CHECK(lattice_bonds(s).size() == 3 * 2 + 3);  // x ring per row plus vertical bonds
}

TEST_CASE("2x2 and 2x3 spectra match the frozen oracle") {
  LatticeSpec s;
  auto eig = diagonalize(build_fermi_hubbard(s));
  for (std::size_t i = 0; i < fixtures::fh_2x2_u2_half.size(); ++i) {
    CHECK(std::abs(eig.eigenvalues[static_cast<Index>(i)] - fixtures::fh_2x2_u2_half[i]) < 1e-10);
  }
  s.ly = 3;
  s.n_up = s.n_down = 3;
  eig = diagonalize(build_fermi_hubbard(s));
  for (std::size_t i = 0; i < fixtures::fh_2x3_u2_half.size(); ++i) {
    CHECK(std::abs(eig.eigenvalues[static_cast<Index>(i)] - fixtures::fh_2x3_u2_half[i]) < 1e-10);
  }
}

TEST_CASE("synthetic spectra sort and merge") {
  auto a = build_synthetic_spectrum({{0, 1}, {1, 2}});
  CHECK(a.levels == Eigen::Vector2d(0, 1));
  CHECK(a.degeneracies == Eigen::Vector2i(1, 2));
  CHECK(a.mode == SpectrumMode::trace);
  auto b = build_synthetic_spectrum({{1, 1}, {0, 1}});
  CHECK(b.levels == Eigen::Vector2d(0, 1));
  auto c = build_synthetic_spectrum({{0, 1}, {1e-14, 1}}, 1e-12);
  CHECK(c.size() == 1);
  CHECK(c.degeneracies[0] == 2);
  CHECK_THROWS_AS((void)build_synthetic_spectrum({{std::nan(""), 1}}), ModelError);
}

TEST_CASE("diagonalize groups levels and projects states") {
  HamiltonianMatrix h;
  h.entries = Eigen::MatrixXcd::Identity(5, 5) * 2.5;
  auto s = diagonalize_spectrum(h, make_initial_state(InitialStateKind::uniform, 5));
  CHECK(s.size() == 1);
  CHECK(s.levels[0] == doctest::Approx(2.5));
  CHECK(s.degeneracies[0] == 5);
  CHECK(s.populations[0] == doctest::Approx(1.0));

  h.entries = Eigen::Vector2cd(0, 1).asDiagonal();
  Eigen::VectorXcd psi(2);
  psi << 1, 1;
  s = diagonalize_spectrum(h, make_custom_state(psi));
  CHECK(s.mode == SpectrumMode::state);
  CHECK(s.populations[0] == doctest::Approx(0.5));
  CHECK(s.populations[1] == doctest::Approx(0.5));

  LatticeSpec fh;
  const auto e = diagonalize(build_fermi_hubbard(fh), make_initial_state(InitialStateKind::seeded_random, 36, 3));
  CHECK(std::abs(e.spectrum.populations.sum() - 1.0) < 1e-10);
  CHECK(e.spectrum.dimension() == 36);
  for (Index j = 1; j < e.spectrum.size(); ++j) {
    CHECK(e.spectrum.levels[j] > e.spectrum.levels[j - 1]);
  }
}

TEST_CASE("non-Hermitian input is rejected") {
  HamiltonianMatrix h;
  h.entries = Eigen::MatrixXcd::Zero(2, 2);
  h.entries(0, 1) = 1.0;
  CHECK_THROWS_AS((void)diagonalize(h), ModelError);
}

TEST_CASE("initial states") {
  const auto u = make_initial_state(InitialStateKind::uniform, 4);
  for (Index i = 0; i < 4; ++i) {
    CHECK(u.amplitudes[i] == std::complex<double>(0.5, 0.0));
  }
  const auto a = make_initial_state(InitialStateKind::seeded_random, 17, 7);
  const auto b = make_initial_state(InitialStateKind::seeded_random, 17, 7);
  CHECK(a.amplitudes == b.amplitudes);
  CHECK(std::abs(a.amplitudes.norm() - 1.0) < 1e-12);
  CHECK_THROWS((void)make_initial_state(InitialStateKind::uniform, 0));
}
