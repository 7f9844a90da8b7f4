// Copyright 2026 The qtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qtomo/reconstruction.hpp"

using namespace qtomo;

namespace {

double roundtrip_error(const DensityState& rho, double R, std::size_t nodes) {
  const auto res = inverse_radon(TomogramSource::from_state(rho), 32, R, nodes);
  return (res.rho - linalg::embed(rho.matrix(), 32)).norm();
}

}  // namespace

TEST(InverseRadon, VacuumSource) {
  const auto res = inverse_radon(TomogramSource::vacuum(), 32, 8.0, 128);
  EXPECT_NEAR(res.rho(0, 0).real(), 1.0, 1e-3);
  CMatrix off = res.rho;
  off(0, 0) = 0.0;
  EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-3);
  // e^{-R^2/4} = 1.1e-7 at the default R = 8: above the 1e-8 precondition, so flagged.
  EXPECT_NEAR(res.edge_magnitude, std::exp(-16.0), 1e-12);
  EXPECT_EQ(res.diagnostics.size(), 1u);
  EXPECT_EQ(res.quadrature.nodes, 128u);
  EXPECT_GT(res.nodes_in_disk, 12000u);
}

TEST(InverseRadon, DiagnosticsRecomputedFromMatrix) {
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 0) = 0.7;
  m(2, 2) = -0.1;
  m(0, 1) = 0.05;
  const auto r = ReconstructionResult::from_matrix(m);
  EXPECT_NEAR(r.trace, 0.6, 1e-15);
  EXPECT_NEAR(r.hermiticity_defect, linalg::hermiticity_defect(m), 0.0);
  EXPECT_NEAR(r.min_eigenvalue, linalg::hermitian_eigenvalues(m)(0), 1e-15);
}

TEST(InverseRadon, RequiredRadiusGrowsWithDimension) {
  EXPECT_LT(required_disk_radius(3), required_disk_radius(8));
  // Vacuum: |psi| = e^{-s^2/4} < 1e-8 needs s > 8.59.
  EXPECT_NEAR(required_disk_radius(1), 8.75, 0.25);
}

TEST(InverseRadon, RoundtripWithinPrecondition) {
  // Disk sized as inverse_radon requires: |psi| < 1e-8 outside.
  std::mt19937_64 rng(41);
  const double R = required_disk_radius(8);
  for (int i = 0; i < 4; ++i) {
    const auto rho = oracle::random_state(rng, 8);
    EXPECT_LE(roundtrip_error(rho, R, 128), 1e-3);
  }
  const auto pure = oracle::random_pure(rng, 6);
  EXPECT_LE(roundtrip_error(pure, required_disk_radius(6), 128), 1e-3);
}

TEST(InverseRadon, SmallDiskIsFlagged) {
  // |5> has |psi| ~ 3e-2 at s = 8: the default disk cuts off real signal.
  const auto res = inverse_radon(TomogramSource::from_state(make_fock(5, 6)), 32, 8.0, 128);
  EXPECT_FALSE(res.diagnostics.empty());
  EXPECT_GT(res.edge_magnitude, 1e-3);
}

TEST(InverseRadon, RefinementDoesNotIncreaseError) {
  std::mt19937_64 rng(42);
  const auto rho = oracle::random_state(rng, 5, 5);
  const double R = required_disk_radius(5);
  const double coarse = roundtrip_error(rho, R, 64);
  const double fine = roundtrip_error(rho, R, 128);
  EXPECT_LE(fine, coarse + 1e-9);
}

TEST(InverseRadon, TraceIsOneForQuantumSources) {
  std::mt19937_64 rng(43);
  EXPECT_NEAR(inverse_radon(TomogramSource::vacuum(), 16).trace, 1.0, 1e-3);
  const auto th = TomogramSource::from_state(make_thermal(1.0, thermal_min_dim(1.0)));
  EXPECT_NEAR(inverse_radon(th, 48, 12.0, 128).trace, 1.0, 1e-3);
  for (int i = 0; i < 2; ++i)
    EXPECT_NEAR(inverse_radon(TomogramSource::from_state(oracle::random_state(rng, 4)), 16).trace, 1.0, 1e-3);
}

TEST(InverseRadon, CounterexampleIsNotAState) {
  const auto res = inverse_radon(TomogramSource::counterexample(), 16, 12.0, 128);
  EXPECT_LT(min_eig_of_reconstruction(res), -1e-3);
  // Diagonal closed form: rho_nn = sqrt(pi) 3^{-n} (32 - 16 n) / 9.
  for (int n = 0; n < 6; ++n)
    EXPECT_NEAR(res.rho(n, n).real(), std::sqrt(std::numbers::pi) * std::pow(3.0, -n) * (32 - 16 * n) / 9, 1e-6);
  const auto v = validate_as_state(res, 1e-3);
  EXPECT_FALSE(v.accepted);
  EXPECT_FALSE(v.state.has_value());
  EXPECT_LT(v.min_eigenvalue, -1e-3);
  bool mentions_eigenvalue = false;
  for (const auto& r : v.reasons) mentions_eigenvalue |= r.find("eigenvalue") != std::string::npos;
  EXPECT_TRUE(mentions_eigenvalue);
}

TEST(ValidateAsState, VacuumAccepted) {
  const auto v = validate_as_state(inverse_radon(TomogramSource::vacuum(), 32, 8.0, 128), 1e-3);
  ASSERT_TRUE(v.accepted);
  EXPECT_GE(state_fidelity(*v.state, make_fock(0, 1)), 1.0 - 1e-3);
  EXPECT_TRUE(DensityState::violations(v.state->matrix()).empty());
}

TEST(ValidateAsState, ZeroMatrixRejected) {
  const auto v = validate_as_state(ReconstructionResult::from_matrix(CMatrix::Zero(4, 4)), 1e-3);
  EXPECT_FALSE(v.accepted);
  EXPECT_NEAR(v.trace_defect, 1.0, 1e-15);
}

TEST(ValidateAsState, ClipsNegligibleNegativeEigenvalues) {
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 0) = 0.6;
  m(1, 1) = 0.4002;
  m(2, 2) = -0.0002;
  const auto v = validate_as_state(ReconstructionResult::from_matrix(m), 1e-3);
  ASSERT_TRUE(v.accepted);
  EXPECT_GE(linalg::hermitian_eigenvalues(v.state->matrix())(0), -1e-15);
  EXPECT_NEAR(v.state->matrix().trace().real(), 1.0, 1e-14);
}

TEST(Purity, FromCharacteristic) {
  EXPECT_NEAR(purity_from_characteristic(TomogramSource::vacuum()), 1.0, 1e-4);
  const auto th = TomogramSource::from_state(make_thermal(1.0, thermal_min_dim(1.0)));
  EXPECT_NEAR(purity_from_characteristic(th), 1.0 / 3.0, 1e-3);
  std::mt19937_64 rng(44);
  const auto pure = oracle::random_pure(rng, 5);
  EXPECT_NEAR(purity_from_characteristic(TomogramSource::from_state(pure)), 1.0, 1e-3);
}

TEST(Purity, FactorizedModeIsTheCharacteristicSum) {
  const auto th = TomogramSource::from_state(make_thermal(0.4, thermal_min_dim(0.4)));
  EXPECT_EQ(purity_from_tomogram(th, 8.0, 64, PurityMode::factorized), purity_from_characteristic(th, 8.0, 64));
}

TEST(Purity, ModesAgree) {
  const std::vector<TomogramSource> srcs{TomogramSource::vacuum(), TomogramSource::from_state(make_fock(1, 2)),
                                         TomogramSource::from_state(make_thermal(1.0, thermal_min_dim(1.0)))};
  const std::vector<double> want{1.0, 1.0, 1.0 / 3.0};
  for (std::size_t i = 0; i < srcs.size(); ++i) {
    const double f = purity_from_tomogram(srcs[i], 8.0, 96, PurityMode::factorized);
    const double d = purity_from_tomogram(srcs[i], 8.0, 96, PurityMode::direct);
    EXPECT_NEAR(f, d, 1e-3);
    EXPECT_NEAR(f, want[i], 1e-3);
  }
}

TEST(Purity, BoundsAndPureIff) {
  std::mt19937_64 rng(45);
  for (int i = 0; i < 5; ++i) {
    const auto rho = oracle::random_state(rng, 5);
    const double p = purity_from_characteristic(TomogramSource::from_state(rho), required_disk_radius(5), 128);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0 + 1e-3);
    EXPECT_NEAR(p, rho.purity(), 1e-3);
    EXPECT_EQ(std::abs(p - 1.0) <= 1e-3, std::abs(rho.purity() - 1.0) <= 1e-3);
  }
}

TEST(Fidelity, Examples) {
  const auto th = make_thermal(1.0, thermal_min_dim(1.0));
  EXPECT_NEAR(state_fidelity(th, th), 1.0, 1e-10);
  EXPECT_NEAR(state_fidelity(make_fock(0, 2), make_fock(1, 2)), 0.0, 1e-10);
  // <0|rho_th|0> = 1/2 and the vacuum is pure, so F = sqrt(1/2).
  EXPECT_NEAR(state_fidelity(make_fock(0, 1), th), std::sqrt(0.5), 1e-10);
  EXPECT_NEAR(state_fidelity(th, make_fock(0, 1)), std::sqrt(0.5), 1e-10);
  std::mt19937_64 rng(46);
  const auto a = oracle::random_state(rng, 6), b = oracle::random_state(rng, 6);
  const double f = state_fidelity(a, b);
  EXPECT_GE(f, 0.0);
  EXPECT_LE(f, 1.0);
  EXPECT_NEAR(f, state_fidelity(b, a), 1e-8);
}
