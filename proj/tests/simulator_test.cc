// Copyright 2026 The qmqo Authors
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

#include "qmqo/simulator.hpp"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "oracles.hpp"

using namespace qmqo;
namespace t = qmqo::testing;

TEST(simulator, uniform_superposition) {
    auto s1 = uniform_superposition(1);
    EXPECT_NEAR(s1[0].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s1[1].real(), 1 / std::sqrt(2.0), 1e-15);
    auto s4 = uniform_superposition(4);
    for (std::size_t k = 0; k < 16; ++k) {
        EXPECT_NEAR(s4[k].real(), 0.25, 1e-15);
        EXPECT_NEAR(s4[k].imag(), 0.0, 1e-15);
        EXPECT_NEAR(s4.probabilities()[k], 1.0 / 16, 1e-15);
    }
}

TEST(simulator, single_gate_contracts) {
    auto s = StateVector(1);
    s.apply(Gate::rz(0, 1.234));
    EXPECT_NEAR(std::norm(s[0]), 1.0, 1e-15);
    auto x = StateVector(1);
    x.apply(Gate::rx(0, std::numbers::pi));
    EXPECT_NEAR(std::norm(x[1]), 1.0, 1e-15);
    EXPECT_THROW(x.apply(Gate::rz(1, 0.1)), std::out_of_range);
    EXPECT_THROW(StateVector(2).apply(Gate::rzz(0, 2, 0.1)), std::out_of_range);
    EXPECT_THROW(StateVector(kMaxSimulatedQubits + 1), std::length_error);
}

TEST(simulator, hadamard_is_involution) {
    auto rng = make_rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        auto s = t::random_state(rng, 3);
        auto before = s.amplitudes();
        const std::size_t q = trial % 3;
        s.apply(Gate::h(q));
        s.apply(Gate::h(q));
        for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(std::abs(s[k] - before[k]), 0.0, 1e-12);
    }
}

TEST(simulator, diagonal_gates_keep_probabilities) {
    auto rng = make_rng(4);
    auto s = t::random_state(rng, 3);
    auto p = s.probabilities();
    s.apply(Gate::rz(1, 0.7));
    s.apply(Gate::rzz(0, 2, -1.9));
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(s.probabilities()[k], p[k], 1e-14);
}

TEST(simulator, matches_dense_unitary_oracle) {
    auto rng = make_rng(5);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            QaoaCircuit c{n, {}, {}, AngleConvention::kIsingExact};
            for (int g = 0; g < 25; ++g) c.gates.push_back(t::random_gate(rng, n));
            auto u = t::identity(std::size_t{1} << n);
            for (const auto& g : c.gates) u = t::matmul(t::gate_matrix(g, n), u);
            std::vector<std::complex<double>> zero(std::size_t{1} << n, 0.0);
            zero[0] = 1.0;
            auto expected = t::apply_matrix(u, zero);
            auto got = run(c);
            for (std::size_t k = 0; k < expected.size(); ++k) {
                EXPECT_NEAR(std::abs(got[k] - expected[k]), 0.0, 1e-10);
            }
        }
    }
}

TEST(simulator, norm_preserved_over_many_gates) {
    auto rng = make_rng(6);
    StateVector s = t::random_state(rng, 5);
    for (int g = 0; g < 10000; ++g) {
        s.apply(t::random_gate(rng, 5));
        ASSERT_LT(std::abs(s.norm_squared() - 1.0), 1e-12) << "after gate " << g;
    }
}

TEST(simulator, zero_angle_circuit_is_uniform) {
    auto q = encode(t::example2());
    auto s = run(build(q, {{0.0}, {0.0}}));
    for (double p : s.probabilities()) EXPECT_NEAR(p, 1.0 / 16, 1e-12);
}

TEST(simulator, zero_gamma_stays_uniform_for_any_beta) {
    auto q = encode(t::example2());
    for (double beta : {0.3, -1.1, 2.5}) {
        auto s = run(build(q, {{0.0, 0.0}, {beta, 0.5 * beta}}));
        for (double p : s.probabilities()) EXPECT_NEAR(p, 1.0 / 16, 1e-10);
    }
}

TEST(simulator, expectation) {
    auto q = encode(t::example2());
    // Mean of the 16 F_C values: sum(linear)/2 + sum(quadratic)/4 = -25 + 14.5.
    EXPECT_NEAR(expectation(uniform_superposition(4), q), -10.5, 1e-12);
    EXPECT_NEAR(expectation(StateVector::basis(4, 0b1001), q), -40.0, 1e-12);
    Qubo zero{3, {0, 0, 0}, {}, 0, 0};
    auto rng = make_rng(7);
    EXPECT_EQ(expectation(t::random_state(rng, 3), zero), 0.0);
}

TEST(simulator, sampling_basis_state) {
    auto rec = sample(StateVector::basis(3, 5), 1000, 1);
    ASSERT_EQ(rec.histogram.size(), 1u);
    EXPECT_EQ(rec.histogram.at(5), 1000u);
}

TEST(simulator, sampling_uniform_frequencies) {
    auto rec = sample(uniform_superposition(2), 100000, 2);
    std::size_t total = 0;
    for (auto [k, c] : rec.histogram) {
        total += c;
        EXPECT_NEAR(rec.frequency(k), 0.25, 0.01);
    }
    EXPECT_EQ(total, 100000u);
}

TEST(simulator, sampling_is_deterministic) {
    auto rng = make_rng(8);
    auto s = t::random_state(rng, 4);
    EXPECT_EQ(sample(s, 500, 9).histogram, sample(s, 500, 9).histogram);
}

TEST(simulator, sampled_expectation_within_statistical_bound) {
    auto rng = make_rng(10);
    auto q = encode(t::example2());
    auto energies = DiagonalHamiltonian(q).materialize();
    for (int trial = 0; trial < 10; ++trial) {
        auto s = t::random_state(rng, 4);
        const double exact = expectation(s, energies);
        double second = 0;
        for (std::size_t k = 0; k < 16; ++k) second += std::norm(s[k]) * energies[k] * energies[k];
        const double sd = std::sqrt(std::max(0.0, second - exact * exact));
        const std::size_t shots = 20000;
        const double est = sampled_expectation(sample(s, shots, 100 + trial), energies);
        EXPECT_LE(std::abs(est - exact), 3.0 * sd / std::sqrt(static_cast<double>(shots)) + 1e-12);
    }
}
