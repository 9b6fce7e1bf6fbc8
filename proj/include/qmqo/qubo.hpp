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

#pragma once

// QUBO encoding of an MQO instance:
//   F_C(b) = sum_i (c_i - w_min) b_i            (plan costs, selection incentive)
//          - sum_{(i,j) in S} s_ij b_i b_j        (savings)
//          + sum_q sum_{k<j in q} w_max b_k b_j   (one-plan-per-query penalty)
// with w_min = max(c) + epsilon and w_max = w_min + sum of all savings.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmqo/problem.hpp"

namespace qmqo {

enum class TermOrigin { kSaving, kPenalty };

struct QuadraticTerm {
    std::size_t i = 0;
    std::size_t j = 0;
    double coefficient = 0.0;
    TermOrigin origin = TermOrigin::kSaving;
};

/// Quadratic terms are kept in emission order: savings first (in the
/// problem's savings order), then the within-query penalty pairs.
struct Qubo {
    std::size_t n = 0;
    std::vector<double> linear;
    std::vector<QuadraticTerm> quadratic;
    double w_min = 0.0;
    double w_max = 0.0;

    /// Coefficient of b_i b_j (i != j, either order); 0 when absent.
    double coefficient(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        double sum = 0.0;
        for (const auto& t : quadratic) {
            if (t.i == i && t.j == j) sum += t.coefficient;
        }
        return sum;
    }
};

inline Qubo encode(const MqoProblem& problem) {
    Qubo q;
    q.n = problem.num_plans();
    double max_cost = 0.0;
    for (double c : problem.plan_costs()) max_cost = std::max(max_cost, c);
    double total_savings = 0.0;
    for (const auto& s : problem.savings()) total_savings += s.value;
    q.w_min = max_cost + problem.epsilon();
    q.w_max = q.w_min + total_savings;

    q.linear.resize(q.n);
    for (std::size_t i = 0; i < q.n; ++i) q.linear[i] = problem.plan_costs()[i] - q.w_min;
    for (const auto& s : problem.savings()) {
        q.quadratic.push_back({s.i, s.j, -s.value, TermOrigin::kSaving});
    }
    std::size_t offset = 0;
    for (std::size_t count : problem.query_plan_counts()) {
        for (std::size_t a = 0; a < count; ++a) {
            for (std::size_t b = a + 1; b < count; ++b) {
                q.quadratic.push_back({offset + a, offset + b, q.w_max, TermOrigin::kPenalty});
            }
        }
        offset += count;
    }
    return q;
}

inline double qubo_eval(const Qubo& qubo, const std::vector<std::uint8_t>& bits) {
    if (bits.size() != qubo.n) {
        throw std::invalid_argument("bitstring length " + std::to_string(bits.size()) +
                                    " != qubo size " + std::to_string(qubo.n));
    }
    double value = 0.0;
    for (std::size_t i = 0; i < qubo.n; ++i) {
        if (bits[i]) value += qubo.linear[i];
    }
    for (const auto& t : qubo.quadratic) {
        if (bits[t.i] && bits[t.j]) value += t.coefficient;
    }
    return value;
}

inline double qubo_eval(const Qubo& qubo, const Solution& solution) {
    return qubo_eval(qubo, solution.bits);
}

/// qubo_eval on a basis-state index (bit i of the index is b_i).
inline double qubo_eval_index(const Qubo& qubo, std::uint64_t index) {
    double value = 0.0;
    for (std::size_t i = 0; i < qubo.n; ++i) {
        if ((index >> i) & 1U) value += qubo.linear[i];
    }
    for (const auto& t : qubo.quadratic) {
        if (((index >> t.i) & 1U) && ((index >> t.j) & 1U)) value += t.coefficient;
    }
    return value;
}

inline constexpr std::size_t kMaxDiagonalQubits = 24;

/// The cost Hamiltonian H_C, diagonal in the computational basis.
class DiagonalHamiltonian {
   public:
    explicit DiagonalHamiltonian(Qubo qubo) : qubo_(std::move(qubo)) {}

    std::size_t num_qubits() const { return qubo_.n; }
    double energy(std::uint64_t index) const { return qubo_eval_index(qubo_, index); }

    /// All 2^n energies indexed by basis state.
    std::vector<double> materialize(std::size_t cap = kMaxDiagonalQubits) const {
        if (qubo_.n > cap) {
            throw std::length_error("cannot materialize 2^" + std::to_string(qubo_.n) +
                                    " energies (cap 2^" + std::to_string(cap) + ")");
        }
        const std::uint64_t dim = std::uint64_t{1} << qubo_.n;
        std::vector<double> energies(dim, 0.0);
        // Built term by term so the cost is O(2^n (n + |terms|)) with
        // sequential memory access.
        for (std::size_t i = 0; i < qubo_.n; ++i) {
            const std::uint64_t bit = std::uint64_t{1} << i;
            for (std::uint64_t z = 0; z < dim; ++z) {
                if (z & bit) energies[z] += qubo_.linear[i];
            }
        }
        for (const auto& t : qubo_.quadratic) {
            const std::uint64_t mask = (std::uint64_t{1} << t.i) | (std::uint64_t{1} << t.j);
            for (std::uint64_t z = 0; z < dim; ++z) {
                if ((z & mask) == mask) energies[z] += t.coefficient;
            }
        }
        return energies;
    }

    const Qubo& qubo() const { return qubo_; }

   private:
    Qubo qubo_;
};

/// Ising form over spins z_i = 1 - 2 b_i (bit 1 maps to spin -1):
///   qubo_eval(b) = offset + sum_i h_i z_i + sum_t J_t z_i z_j
/// Couplings follow the qubo's quadratic term order.
struct IsingModel {
    std::vector<double> h;
    std::vector<QuadraticTerm> couplings;
    double offset = 0.0;

    double energy(std::uint64_t index) const {
        auto spin = [&](std::size_t k) { return ((index >> k) & 1U) ? -1.0 : 1.0; };
        double e = offset;
        for (std::size_t i = 0; i < h.size(); ++i) e += h[i] * spin(i);
        for (const auto& c : couplings) e += c.coefficient * spin(c.i) * spin(c.j);
        return e;
    }
};

inline IsingModel to_ising(const Qubo& qubo) {
    IsingModel m;
    m.h.assign(qubo.n, 0.0);
    // a b = a (1 - z)/2
    for (std::size_t i = 0; i < qubo.n; ++i) {
        m.offset += qubo.linear[i] / 2.0;
        m.h[i] -= qubo.linear[i] / 2.0;
    }
    // a b_i b_j = a (1 - z_i - z_j + z_i z_j)/4
    for (const auto& t : qubo.quadratic) {
        const double quarter = t.coefficient / 4.0;
        m.offset += quarter;
        m.h[t.i] -= quarter;
        m.h[t.j] -= quarter;
        m.couplings.push_back({t.i, t.j, quarter, t.origin});
    }
    return m;
}

/// z_min: the least qubo_eval over admissible selections.
inline BruteForceResult argmin_admissible_energy(const Qubo& qubo, const MqoProblem& problem,
                                                 std::uint64_t cap = kDefaultEnumerationCap) {
    if (qubo.n != problem.num_plans()) {
        throw std::invalid_argument("qubo and problem disagree on plan count");
    }
    return brute_force_min(
        problem, [&](const Solution& s) { return qubo_eval(qubo, s.bits); }, cap);
}

}  // namespace qmqo
