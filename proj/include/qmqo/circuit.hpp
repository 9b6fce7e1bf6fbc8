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

// Depth-p QAOA circuits: a Hadamard on every qubit, then per layer the cost
// block (RZ per plan, RZZ per saving, RZZ per same-query pair) followed by an
// RX driver on every qubit.

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qmqo/qubo.hpp"

namespace qmqo {

enum class GateKind { kH, kRZ, kRZZ, kRX };

inline std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::kH: return "H";
        case GateKind::kRZ: return "RZ";
        case GateKind::kRZZ: return "RZZ";
        case GateKind::kRX: return "RX";
    }
    return "?";
}

struct Gate {
    GateKind kind = GateKind::kH;
    std::array<std::size_t, 2> targets{0, 0};
    double angle = 0.0;  // radians; unused for H

    static Gate h(std::size_t q) { return {GateKind::kH, {q, q}, 0.0}; }
    static Gate rz(std::size_t q, double theta) { return {GateKind::kRZ, {q, q}, theta}; }
    static Gate rx(std::size_t q, double theta) { return {GateKind::kRX, {q, q}, theta}; }
    static Gate rzz(std::size_t a, std::size_t b, double theta) {
        if (a == b) throw std::invalid_argument("RZZ needs two distinct qubits");
        return {GateKind::kRZZ, {a, b}, theta};
    }

    bool two_qubit() const { return kind == GateKind::kRZZ; }
};

struct QaoaParams {
    std::vector<double> gammas;
    std::vector<double> betas;

    std::size_t depth() const { return gammas.size(); }

    void validate() const {
        if (gammas.size() != betas.size()) {
            throw std::invalid_argument("gamma and beta lists differ in length");
        }
        if (gammas.empty()) throw std::invalid_argument("depth p must be at least 1");
    }
};

/// How QUBO coefficients become rotation angles.
///  - kPaperDirect: RZ(gamma * linear_i), RZZ(gamma * quadratic_ij).
///  - kIsingExact: RZ(2 gamma h_i), RZZ(2 gamma J_ij) from to_ising, so the
///    cost block equals exp(-i gamma H_C) up to a global phase.
enum class AngleConvention { kPaperDirect, kIsingExact };

inline std::string_view convention_name(AngleConvention c) {
    return c == AngleConvention::kPaperDirect ? "paper-direct" : "ising-exact";
}

inline AngleConvention parse_convention(std::string_view name) {
    if (name == "paper-direct") return AngleConvention::kPaperDirect;
    if (name == "ising-exact") return AngleConvention::kIsingExact;
    throw std::invalid_argument("unknown angle convention '" + std::string(name) + "'");
}

struct QaoaCircuit {
    std::size_t num_qubits = 0;
    std::vector<Gate> gates;
    QaoaParams params;
    AngleConvention convention = AngleConvention::kIsingExact;

    std::size_t depth() const { return params.depth(); }
};

inline QaoaCircuit build(const Qubo& qubo, const QaoaParams& params,
                         AngleConvention convention = AngleConvention::kIsingExact) {
    params.validate();
    QaoaCircuit c{qubo.n, {}, params, convention};

    std::vector<double> z_angles(qubo.n);
    std::vector<double> zz_angles(qubo.quadratic.size());
    if (convention == AngleConvention::kPaperDirect) {
        z_angles = qubo.linear;
        for (std::size_t t = 0; t < qubo.quadratic.size(); ++t) {
            zz_angles[t] = qubo.quadratic[t].coefficient;
        }
    } else {
        const IsingModel ising = to_ising(qubo);
        for (std::size_t i = 0; i < qubo.n; ++i) z_angles[i] = 2.0 * ising.h[i];
        for (std::size_t t = 0; t < ising.couplings.size(); ++t) {
            zz_angles[t] = 2.0 * ising.couplings[t].coefficient;
        }
    }

    c.gates.reserve(qubo.n + params.depth() * (2 * qubo.n + qubo.quadratic.size()));
    for (std::size_t q = 0; q < qubo.n; ++q) c.gates.push_back(Gate::h(q));
    for (std::size_t layer = 0; layer < params.depth(); ++layer) {
        const double gamma = params.gammas[layer];
        for (std::size_t q = 0; q < qubo.n; ++q) c.gates.push_back(Gate::rz(q, gamma * z_angles[q]));
        for (std::size_t t = 0; t < qubo.quadratic.size(); ++t) {
            const auto& term = qubo.quadratic[t];
            c.gates.push_back(Gate::rzz(term.i, term.j, gamma * zz_angles[t]));
        }
        for (std::size_t q = 0; q < qubo.n; ++q) c.gates.push_back(Gate::rx(q, params.betas[layer]));
    }
    return c;
}

struct GateCount {
    std::size_t h = 0;
    std::size_t rz = 0;
    std::size_t rzz = 0;
    std::size_t rx = 0;
    std::size_t total() const { return h + rz + rzz + rx; }
    friend bool operator==(const GateCount&, const GateCount&) = default;
};

inline GateCount gate_count(const Qubo& qubo, std::size_t p) {
    if (p < 1) throw std::invalid_argument("depth p must be at least 1");
    return {qubo.n, p * qubo.n, p * qubo.quadratic.size(), p * qubo.n};
}

inline GateCount gate_count(const QaoaCircuit& circuit) {
    GateCount count;
    for (const auto& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::kH: ++count.h; break;
            case GateKind::kRZ: ++count.rz; break;
            case GateKind::kRZZ: ++count.rzz; break;
            case GateKind::kRX: ++count.rx; break;
        }
    }
    return count;
}

/// One gate per line, e.g. "RZ q0 -9.5" or "RZZ q1 q2 -7", preceded by a
/// comment header.
inline std::string emit_text(const QaoaCircuit& circuit) {
    std::ostringstream out;
    out << "# qubits " << circuit.num_qubits << " depth " << circuit.depth() << " convention "
        << convention_name(circuit.convention) << "\n";
    for (const auto& g : circuit.gates) {
        out << gate_name(g.kind) << " q" << g.targets[0];
        if (g.two_qubit()) out << " q" << g.targets[1];
        if (g.kind != GateKind::kH) out << " " << format_double(g.angle);
        out << "\n";
    }
    return out.str();
}

}  // namespace qmqo
