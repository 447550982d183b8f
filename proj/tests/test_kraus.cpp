#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "krauslab/kraus.hpp"
#include "support.hpp"

using namespace krauslab;
using namespace krauslab::testing;

namespace {

constexpr double kTol = kDefaultTol;

/// Kraus set read off the first d columns of a random (n d) x (n d) unitary.
KrausSet random_kraus_set(Rng& rng, std::size_t d, std::size_t n) {
  const auto u = random_unitary(rng, d * n);
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < n; ++k) {
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) = u(k * d + i, j);
    ops.push_back(m);
  }
  return KrausSet(ops);
}

double action_gap(const KrausSet& a, const KrausSet& b, const ComplexMatrix& rho) {
  return max_diff(apply_kraus(a, rho), apply_kraus(b, rho));
}

}  // namespace

TEST_CASE("KrausSet construction") {
  CHECK_THROWS_AS(KrausSet({}), std::invalid_argument);
  CHECK_THROWS_AS(KrausSet({ComplexMatrix::identity(2), ComplexMatrix::identity(3)}), std::invalid_argument);
  const KrausSet rect({ComplexMatrix(3, 2)});
  CHECK(rect.d_in() == 2);
  CHECK(rect.d_out() == 3);
}

TEST_CASE("apply_channel") {
  Rng rng(1);
  SUBCASE("identity channel") {
    const auto rho = random_state(rng, 3);
    CHECK(max_diff(apply_channel(KrausSet({ComplexMatrix::identity(3)}), rho).mat(), rho.mat()) == 0.0);
  }
  SUBCASE("diagonal pair maps the rotated initial state to the rotated final state") {
    for (double r0 : {0.0, 0.2, 0.9}) {
      for (double r : {0.0, 0.4, 1.0}) {
        const auto k = diagonal_pair_kraus(r0, r);
        const auto in = DensityMatrix::from_matrix(ComplexMatrix::diagonal({0.5 * (1 - r0), 0.5 * (1 + r0)}));
        CHECK(max_diff(apply_channel(k, in).mat(), ComplexMatrix::diagonal({0.5 * (1 + r), 0.5 * (1 - r)})) <
              1e-15);
      }
    }
  }
  SUBCASE("unsigned CNOT pair at r0 = 1/2, t = pi/4") {
    const auto k = KrausSet(cnot_kraus_unsigned(0.5, pi / 4));
    const auto rho0 = DensityMatrix::from_matrix(cnot_marginal_reference(0.5));
    const ComplexMatrix expected{{0.625, -0.375 * kI}, {0.375 * kI, 0.375}};
    CHECK(max_diff(apply_channel(k, rho0).mat(), expected) < 1e-15);
  }
  SUBCASE("errors") {
    const auto rho = random_state(rng, 2);
    CHECK_THROWS_AS(apply_channel(KrausSet({ComplexMatrix::identity(3)}), rho), std::invalid_argument);
    CHECK_THROWS_AS(apply_channel(KrausSet({0.9 * ComplexMatrix::identity(2)}), rho), std::domain_error);
  }
  SUBCASE("outputs stay density matrices") {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t d = 2 + rng.index(3);
      const auto k = random_kraus_set(rng, d, 1 + rng.index(4));
      const auto out = apply_kraus(k, random_state(rng, d).mat());
      CHECK(hermiticity_residual(out) <= 10 * kTol);
      CHECK(std::abs(out.trace() - 1.0) <= 10 * kTol);
      CHECK(eigvalsh(hermitian_part(out)).back() >= -10 * kTol);
    }
  }
}

TEST_CASE("diagonal_pair_kraus") {
  SUBCASE("r0 = r = 0 is the identity channel on the mixed state") {
    const auto k = diagonal_pair_kraus(0.0, 0.0);
    CHECK(k.size() == 2);
    CHECK(max_diff(k[0], ComplexMatrix::identity(2)) == 0.0);
    CHECK(max_diff(k[1], ComplexMatrix::zeros(2, 2)) == 0.0);
  }
  SUBCASE("r0 = 1, r = 0") {
    const auto k = diagonal_pair_kraus(1.0, 0.0);
    CHECK(max_diff(k[0], ComplexMatrix::diagonal({1.0, std::sqrt(0.5)})) < 1e-16);
    CHECK(std::abs(k[1](0, 1) - std::sqrt(0.5)) < 1e-16);
    const auto out = apply_channel(k, DensityMatrix::from_matrix(ComplexMatrix::diagonal({0.0, 1.0})));
    CHECK(max_diff(out.mat(), 0.5 * ComplexMatrix::identity(2)) < 1e-15);
  }
  SUBCASE("completeness on a grid") {
    for (double r0 = 0.0; r0 <= 1.0; r0 += 0.125)
      for (double r = 0.0; r <= 1.0; r += 0.125) CHECK(completeness_residual(diagonal_pair_kraus(r0, r)) < 1e-15);
  }
  SUBCASE("rejects radii outside the unit interval") {
    CHECK_THROWS_AS(diagonal_pair_kraus(-0.1, 0.5), std::domain_error);
    CHECK_THROWS_AS(diagonal_pair_kraus(0.5, 1.01), std::domain_error);
    CHECK_NOTHROW(diagonal_pair_kraus(0.5, 1.0 + 0.5 * kTol));
  }
}

TEST_CASE("conjugate_kraus") {
  Rng rng(4);
  const auto pair = diagonal_pair_kraus(0.3, 0.6);
  SUBCASE("identity unitaries leave the set unchanged") {
    const auto same = conjugate_kraus(pair, ComplexMatrix::identity(2), ComplexMatrix::identity(2));
    for (std::size_t i = 0; i < pair.size(); ++i) CHECK(max_diff(same[i], pair[i]) == 0.0);
  }
  SUBCASE("rotating the diagonal pair gives the closed form") {
    for (int trial = 0; trial < 50; ++trial) {
      const auto b0 = random_bloch(rng, 0.05, 0.95), bt = random_bloch(rng, 0.05, 0.95);
      const auto rotated = conjugate_kraus(diagonal_pair_kraus(b0.r, bt.r), reference_final_basis(bt),
                                           reference_initial_basis(b0));
      const auto closed = closed_form_qubit_kraus(b0, bt);
      for (std::size_t i = 0; i < 2; ++i) CHECK(max_diff(rotated[i], closed[i]) < 1e-14);
    }
  }
  SUBCASE("completeness preserved under random unitaries") {
    for (int trial = 0; trial < 50; ++trial) {
      const auto k = random_kraus_set(rng, 3, 3);
      const auto conj = conjugate_kraus(k, random_unitary(rng, 3), random_unitary(rng, 3));
      CHECK(completeness_residual(conj) <= 10 * kTol);
    }
  }
  SUBCASE("non-unitary input") {
    CHECK_THROWS_AS(conjugate_kraus(pair, 2.0 * ComplexMatrix::identity(2), ComplexMatrix::identity(2)),
                    std::domain_error);
    CHECK_THROWS_AS(conjugate_kraus(pair, ComplexMatrix::identity(3), ComplexMatrix::identity(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("general_qubit_kraus") {
  Rng rng(12);
  SUBCASE("pure state to itself") {
    const auto rho = bloch_to_density({1.0, 1.0, 0.4});
    const auto k = general_qubit_kraus(rho, rho);
    CHECK(max_diff(apply_channel(k, rho).mat(), rho.mat()) < 1e-14);
  }
  SUBCASE("CNOT reduced state pair") {
    const auto rho0 = DensityMatrix::from_matrix(cnot_marginal_reference(0.5));
    const auto rhot = DensityMatrix::from_matrix(cnot_rho_reference(0.5, pi / 4));
    const auto k = general_qubit_kraus(rho0, rhot);
    CHECK(k.size() == 2);
    CHECK(max_diff(apply_kraus(k, rho0.mat()), rhot.mat()) <= 1e-9);
  }
  SUBCASE("maximally mixed initial state") {
    const auto rho0 = DensityMatrix::from_matrix(0.5 * ComplexMatrix::identity(2));
    const auto rhot = bloch_to_density({0.7, 2.0, 1.0});
    const auto k = general_qubit_kraus(rho0, rhot);
    CHECK(max_diff(apply_kraus(k, rho0.mat()), rhot.mat()) <= 10 * kTol);
    CHECK(completeness_residual(k) <= 10 * kTol);
  }
  SUBCASE("random pairs") {
    for (int trial = 0; trial < 300; ++trial) {
      const auto rho0 = random_qubit_state(rng), rhot = random_qubit_state(rng);
      const auto k = general_qubit_kraus(rho0, rhot);
      CHECK(completeness_residual(k) <= 1e-9);
      CHECK(max_diff(apply_kraus(k, rho0.mat()), rhot.mat()) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(general_qubit_kraus(random_state(rng, 3), random_state(rng, 3)), std::invalid_argument);
}

TEST_CASE("closed_form_qubit_kraus") {
  Rng rng(21);
  SUBCASE("north pole to itself") {
    // theta = theta0 = 0, r = r0 = 1: keep factor 0, flip factor 1.
    const auto k = closed_form_qubit_kraus({1, 0, 0}, {1, 0, 0});
    CHECK(max_diff(k[0], ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}) < 1e-16);
    CHECK(max_diff(k[1], ComplexMatrix::diagonal({1.0, 0.0})) < 1e-16);
    CHECK(completeness_residual(k) < 1e-16);
  }
  SUBCASE("fixed point") {
    for (int trial = 0; trial < 50; ++trial) {
      const auto b = random_bloch(rng);
      const auto rho = bloch_to_density(b);
      CHECK(max_diff(apply_kraus(closed_form_qubit_kraus(b, b), rho.mat()), rho.mat()) <= 10 * kTol);
    }
  }
  SUBCASE("matches the diagonalization pipeline") {
    for (int trial = 0; trial < 200; ++trial) {
      const auto rho0 = bloch_to_density(random_bloch(rng, 0.01, 0.99));
      const auto rhot = bloch_to_density(random_bloch(rng, 0.01, 0.99));
      const auto closed = closed_form_qubit_kraus(density_to_bloch(rho0), density_to_bloch(rhot));
      const auto general = general_qubit_kraus(rho0, rhot);
      for (std::size_t i = 0; i < 2; ++i) CHECK(max_diff(closed[i], general[i]) <= 1e-8);
    }
  }
  SUBCASE("same action on degenerate inputs") {
    for (int trial = 0; trial < 200; ++trial) {
      const auto rho0 = random_qubit_state(rng), rhot = random_qubit_state(rng);
      const auto closed = closed_form_qubit_kraus(density_to_bloch(rho0), density_to_bloch(rhot));
      CHECK(completeness_residual(closed) <= 1e-9);
      CHECK(action_gap(closed, general_qubit_kraus(rho0, rhot), rho0.mat()) <= 1e-9);
    }
  }
  SUBCASE("invalid Bloch vectors") {
    CHECK_THROWS_AS(closed_form_qubit_kraus({1.2, 0, 0}, {0.5, 0, 0}), std::domain_error);
    CHECK_THROWS_AS(closed_form_qubit_kraus({0.5, 0, 0}, {1.0 + 1e-6, 0, 0}), std::domain_error);
  }
}

TEST_CASE("factorable_kraus") {
  Rng rng(31);
  SUBCASE("local unitary acts by conjugation") {
    const auto ui = random_unitary(rng, 2);
    const auto k = factorable_kraus(kron(ui, ComplexMatrix::identity(3)), random_state(rng, 3));
    const auto rho = random_state(rng, 2);
    CHECK(max_diff(apply_kraus(k, rho.mat()), sandwich(ui, rho.mat())) < 1e-13);
  }
  SUBCASE("pure environment leaves only nu = 0 operators") {
    const auto k = factorable_kraus(random_unitary(rng, 4), DensityMatrix::from_matrix(ComplexMatrix::diagonal({1.0, 0.0})));
    REQUIRE(k.size() == 4);
    CHECK(norm_max(k[0]) > 0.1);
    CHECK(norm_max(k[1]) == 0.0);
    CHECK(norm_max(k[2]) > 0.1);
    CHECK(norm_max(k[3]) == 0.0);
  }
  SUBCASE("CNOT model: factorable part differs from the true dynamics by delta rho") {
    const double r0 = 0.4;
    for (double t : {0.3, 1.0, 2.2}) {
      const auto u = cnot_unitary_reference(t);
      const auto marginal = DensityMatrix::from_matrix(cnot_marginal_reference(r0));
      const auto k = factorable_kraus(u, marginal);
      const auto product = kron(marginal.mat(), marginal.mat());
      const auto reduced_product = partial_trace_by_projection(sandwich(u, product), {2, 2}, Keep::system);
      const auto factorable = apply_kraus(k, marginal.mat());
      CHECK(max_diff(factorable, reduced_product) < 1e-14);
      CHECK(max_diff(cnot_rho_reference(r0, t) - factorable, cnot_delta_reference(r0, t)) < 1e-14);
    }
  }
  SUBCASE("matches partial-trace dynamics for product states") {
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t di = 2 + rng.index(2), de = 2 + rng.index(2);
      const auto u = random_unitary(rng, di * de);
      const auto rho_i = random_state(rng, di), rho_e = random_state(rng, de);
      const auto k = factorable_kraus(u, rho_e);
      CHECK(k.size() == de * de);
      CHECK(completeness_residual(k) <= 10 * kTol);
      const auto expected =
          partial_trace_by_projection(sandwich(u, kron(rho_i.mat(), rho_e.mat())), {di, de}, Keep::system);
      CHECK(max_diff(apply_kraus(k, rho_i.mat()), expected) <= 1e-9);
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(factorable_kraus(ComplexMatrix::identity(5), random_state(rng, 2)), std::invalid_argument);
  }
}

TEST_CASE("measure_prepare_kraus") {
  Rng rng(51);
  SUBCASE("qubit replace channel") {
    const auto rho0 = DensityMatrix::from_matrix(0.5 * ComplexMatrix::identity(2));
    const auto rhot = DensityMatrix::from_matrix(ComplexMatrix::diagonal({1.0, 0.0}));
    const auto k = measure_prepare_kraus(rho0, rhot);
    CHECK(k.size() == 4);
    for (int trial = 0; trial < 10; ++trial) {
      CHECK(max_diff(apply_kraus(k, random_state(rng, 2).mat()), rhot.mat()) < 1e-14);
    }
  }
  SUBCASE("qutrit diagonal pair") {
    const auto rho0 = DensityMatrix::from_matrix(ComplexMatrix::diagonal({0.2, 0.5, 0.3}));
    const auto rhot = DensityMatrix::from_matrix(ComplexMatrix::diagonal({0.6, 0.0, 0.4}));
    const auto k = measure_prepare_kraus(rho0, rhot);
    CHECK(k.size() == 9);
    CHECK(completeness_residual(k) <= 1e-12);
    CHECK(max_diff(apply_kraus(k, rho0.mat()), rhot.mat()) <= 1e-12);
  }
  SUBCASE("constant on two different inputs") {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t d = 2 + rng.index(3);
      const auto k = measure_prepare_kraus(random_state(rng, d), random_state(rng, d));
      CHECK(action_gap(k, k, random_state(rng, d).mat()) == 0.0);
      CHECK(max_diff(apply_kraus(k, random_state(rng, d).mat()), apply_kraus(k, random_state(rng, d).mat())) <=
            1e-12);
    }
  }
  CHECK_THROWS_AS(measure_prepare_kraus(random_state(rng, 2), random_state(rng, 3)), std::invalid_argument);
}

TEST_CASE("unitary_remix") {
  Rng rng(61);
  const auto pair = diagonal_pair_kraus(0.2, 0.7);
  SUBCASE("identity") {
    const auto same = unitary_remix(pair, ComplexMatrix::identity(2));
    for (std::size_t i = 0; i < 2; ++i) CHECK(max_diff(same[i], pair[i]) == 0.0);
  }
  SUBCASE("sigma_x swaps the operators") {
    const auto swapped = unitary_remix(pair, pauli::x());
    CHECK(max_diff(swapped[0], pair[1]) == 0.0);
    CHECK(max_diff(swapped[1], pair[0]) == 0.0);
  }
  SUBCASE("action invariant on random states") {
    const auto remixed = unitary_remix(pair, random_unitary(rng, 2));
    for (int trial = 0; trial < 100; ++trial) {
      CHECK(action_gap(remixed, pair, random_state(rng, 2).mat()) <= 10 * kTol);
    }
  }
  SUBCASE("padding with a larger unitary") {
    const auto remixed = unitary_remix(pair, random_unitary(rng, 4));
    CHECK(remixed.size() == 4);
    CHECK(completeness_residual(remixed) <= 10 * kTol);
    CHECK(action_gap(remixed, pair, random_state(rng, 2).mat()) <= 10 * kTol);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(unitary_remix(pair, ComplexMatrix::identity(1)), std::invalid_argument);
    CHECK_THROWS_AS(unitary_remix(pair, 1.1 * ComplexMatrix::identity(2)), std::domain_error);
  }
}

TEST_CASE("verify_channel and the Choi matrix") {
  Rng rng(71);
  SUBCASE("perfect inputs") {
    const auto rho0 = bloch_to_density({0.3, 0.5, 0.1}), rhot = bloch_to_density({0.8, 2.5, 4.0});
    const auto report = verify_channel(general_qubit_kraus(rho0, rhot), rho0, rhot);
    CHECK(report.completeness_residual <= 10 * kTol);
    CHECK(report.reconstruction_residual <= 10 * kTol);
    CHECK(report.choi_min_eigenvalue >= -10 * kTol);
    CHECK(report.output_trace_residual <= 10 * kTol);
    CHECK(report.output_min_eigenvalue >= -10 * kTol);
    CHECK(report.passes());
  }
  SUBCASE("missing operator shows up in completeness") {
    const auto full = random_kraus_set(rng, 2, 3);
    const KrausSet partial({full[0], full[1]});
    const auto rho = random_state(rng, 2);
    const auto report = verify_channel(partial, rho, rho);
    CHECK(report.completeness_residual == doctest::Approx(norm_max(full[2].adjoint() * full[2])).epsilon(1e-12));
    CHECK_FALSE(report.passes());
  }
  SUBCASE("Choi matrix matches its definition") {
    for (int trial = 0; trial < 20; ++trial) {
      const auto k = random_kraus_set(rng, 2 + rng.index(2), 1 + rng.index(3));
      CHECK(max_diff(choi_matrix(k), choi_by_definition(k)) < 1e-14);
    }
    const KrausSet rect({random_matrix(rng, 3, 2), random_matrix(rng, 3, 2)});
    CHECK(max_diff(choi_matrix(rect), choi_by_definition(rect)) < 1e-13);
  }
  SUBCASE("every constructor yields a positive Choi matrix") {
    for (int trial = 0; trial < 50; ++trial) {
      const auto rho0 = random_qubit_state(rng), rhot = random_qubit_state(rng);
      for (const auto& k : {general_qubit_kraus(rho0, rhot),
                            closed_form_qubit_kraus(density_to_bloch(rho0), density_to_bloch(rhot)),
                            measure_prepare_kraus(rho0, rhot),
                            factorable_kraus(random_unitary(rng, 4), rho0),
                            unitary_remix(general_qubit_kraus(rho0, rhot), random_unitary(rng, 3))}) {
        CHECK(verify_channel(k, rho0, rhot).choi_min_eigenvalue >= -1e-9);
      }
    }
  }
  SUBCASE("non-positive map") {
    // Transpose is positive but not completely positive; its Choi matrix is
    // the swap operator with eigenvalue -1.
    ComplexMatrix swap(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) swap(i * 2 + j, j * 2 + i) = 1.0;
    CHECK(eigvalsh(swap).back() == doctest::Approx(-1.0));
  }
}
