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

// Dense state-vector simulation. Basis index bit i is qubit i (little
// endian): qubit 0 is the least significant bit.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmqo/circuit.hpp"

namespace qmqo {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kMaxSimulatedQubits = 24;

class StateVector {
   public:
    /// |0...0> on n qubits.
    explicit StateVector(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("state needs at least one qubit");
        if (n > kMaxSimulatedQubits) {
            throw std::length_error("dense simulation capped at " +
                                    std::to_string(kMaxSimulatedQubits) + " qubits, requested " +
                                    std::to_string(n));
        }
        amps_.assign(std::size_t{1} << n, Amplitude{0.0, 0.0});
        amps_[0] = 1.0;
    }

    static StateVector basis(std::size_t n, std::uint64_t index) {
        StateVector s(n);
        if (index >= s.dim()) throw std::out_of_range("basis index out of range");
        s.amps_[0] = 0.0;
        s.amps_[index] = 1.0;
        return s;
    }

    static StateVector from_amplitudes(std::vector<Amplitude> amps) {
        std::size_t n = 0;
        while ((std::size_t{1} << n) < amps.size()) ++n;
        if (amps.size() < 2 || (std::size_t{1} << n) != amps.size()) {
            throw std::invalid_argument("amplitude count must be a power of two >= 2");
        }
        StateVector s(n);
        s.amps_ = std::move(amps);
        return s;
    }

    std::size_t num_qubits() const { return n_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<Amplitude>& amplitudes() const { return amps_; }
    const Amplitude& operator[](std::size_t k) const { return amps_[k]; }

    double norm_squared() const {
        double sum = 0.0;
        for (const auto& a : amps_) sum += std::norm(a);
        return sum;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t k = 0; k < amps_.size(); ++k) p[k] = std::norm(amps_[k]);
        return p;
    }

    /// Most probable basis state; lowest index on ties.
    std::uint64_t argmax() const {
        std::uint64_t best = 0;
        double best_p = -1.0;
        for (std::size_t k = 0; k < amps_.size(); ++k) {
            const double p = std::norm(amps_[k]);
            if (p > best_p) {
                best_p = p;
                best = k;
            }
        }
        return best;
    }

    void apply(const Gate& gate) {
        check_target(gate.targets[0]);
        if (gate.two_qubit()) check_target(gate.targets[1]);
        switch (gate.kind) {
            case GateKind::kH: apply_h(gate.targets[0]); break;
            case GateKind::kRZ: apply_rz(gate.targets[0], gate.angle); break;
            case GateKind::kRZZ: apply_rzz(gate.targets[0], gate.targets[1], gate.angle); break;
            case GateKind::kRX: apply_rx(gate.targets[0], gate.angle); break;
        }
    }

   private:
    void check_target(std::size_t q) const {
        if (q >= n_) {
            throw std::out_of_range("gate target q" + std::to_string(q) + " out of range for " +
                                    std::to_string(n_) + " qubits");
        }
    }

    template <typename PairOp>
    void for_each_pair(std::size_t q, PairOp&& op) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t k = 0; k < amps_.size(); ++k) {
            if (k & bit) continue;
            op(amps_[k], amps_[k | bit]);
        }
    }

    void apply_h(std::size_t q) {
        const double r = 1.0 / std::numbers::sqrt2;
        for_each_pair(q, [r](Amplitude& a0, Amplitude& a1) {
            const Amplitude x = a0, y = a1;
            a0 = r * (x + y);
            a1 = r * (x - y);
        });
    }

    // RX(t) = cos(t/2) I - i sin(t/2) X
    void apply_rx(std::size_t q, double theta) {
        const double c = std::cos(theta / 2.0);
        const Amplitude ms{0.0, -std::sin(theta / 2.0)};
        for_each_pair(q, [c, ms](Amplitude& a0, Amplitude& a1) {
            const Amplitude x = a0, y = a1;
            a0 = c * x + ms * y;
            a1 = ms * x + c * y;
        });
    }

    // RZ(t) = diag(e^{-it/2}, e^{it/2})
    void apply_rz(std::size_t q, double theta) {
        const Amplitude p0 = std::polar(1.0, -theta / 2.0);
        const Amplitude p1 = std::polar(1.0, theta / 2.0);
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t k = 0; k < amps_.size(); ++k) amps_[k] *= (k & bit) ? p1 : p0;
    }

    // RZZ(t) = exp(-i t/2 Z_a Z_b): phase e^{-it/2} on even parity, e^{it/2} on odd.
    void apply_rzz(std::size_t a, std::size_t b, double theta) {
        const Amplitude even = std::polar(1.0, -theta / 2.0);
        const Amplitude odd = std::polar(1.0, theta / 2.0);
        for (std::size_t k = 0; k < amps_.size(); ++k) {
            const bool parity = (((k >> a) ^ (k >> b)) & 1U) != 0;
            amps_[k] *= parity ? odd : even;
        }
    }

    std::size_t n_ = 0;
    std::vector<Amplitude> amps_;
};

inline StateVector uniform_superposition(std::size_t n) {
    StateVector s(n);
    for (std::size_t q = 0; q < n; ++q) s.apply(Gate::h(q));
    return s;
}

inline StateVector apply(StateVector state, const Gate& gate) {
    state.apply(gate);
    return state;
}

/// Runs every gate in order on |0...0>.
inline StateVector run(const QaoaCircuit& circuit) {
    StateVector s(circuit.num_qubits);
    for (const auto& g : circuit.gates) s.apply(g);
    return s;
}

/// sum_z |amp_z|^2 energies[z], exact.
inline double expectation(const StateVector& state, const std::vector<double>& energies) {
    if (energies.size() != state.dim()) {
        throw std::invalid_argument("energy table does not match state dimension");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < state.dim(); ++k) sum += std::norm(state[k]) * energies[k];
    return sum;
}

inline double expectation(const StateVector& state, const Qubo& qubo) {
    if (qubo.n != state.num_qubits()) {
        throw std::invalid_argument("qubo and state disagree on qubit count");
    }
    return expectation(state, DiagonalHamiltonian(qubo).materialize());
}

struct MeasurementRecord {
    std::size_t shots = 0;
    std::map<std::uint64_t, std::size_t> histogram;  // basis index -> count

    double frequency(std::uint64_t index) const {
        auto it = histogram.find(index);
        return (it == histogram.end() || shots == 0)
                   ? 0.0
                   : static_cast<double>(it->second) / static_cast<double>(shots);
    }
};

/// Draws `shots` computational-basis measurements.
inline MeasurementRecord sample(const StateVector& state, std::size_t shots, Rng& rng) {
    std::vector<double> cumulative(state.dim());
    double acc = 0.0;
    for (std::size_t k = 0; k < state.dim(); ++k) {
        acc += std::norm(state[k]);
        cumulative[k] = acc;
    }
    MeasurementRecord rec;
    rec.shots = shots;
    for (std::size_t s = 0; s < shots; ++s) {
        const double u = uniform_unit(rng) * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        auto k = static_cast<std::uint64_t>(std::distance(cumulative.begin(), it));
        if (k >= state.dim()) k = state.dim() - 1;
        ++rec.histogram[k];
    }
    return rec;
}

inline MeasurementRecord sample(const StateVector& state, std::size_t shots, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return sample(state, shots, rng);
}

/// Mean energy over a shot histogram.
inline double sampled_expectation(const MeasurementRecord& rec, const std::vector<double>& energies) {
    double sum = 0.0;
    for (const auto& [k, count] : rec.histogram) sum += static_cast<double>(count) * energies[k];
    return rec.shots ? sum / static_cast<double>(rec.shots) : 0.0;
}

}  // namespace qmqo
