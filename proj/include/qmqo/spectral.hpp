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

// Adiabatic interpolation H(s) = (1 - s) H_B + s H_C with driver
// H_B = -sum_i X_i and H_C the diagonal cost Hamiltonian, and the minimum
// gap between its two lowest eigenvalues over s in [0, 1].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmqo/qubo.hpp"

namespace qmqo {

inline constexpr std::size_t kMaxSpectralQubits = 12;

/// kRaw uses H_C as is; kNormalized divides it by its spectral range
/// (max - min energy) so both terms are O(1).
enum class GapConvention { kRaw, kNormalized };

inline std::string_view gap_convention_name(GapConvention c) {
    return c == GapConvention::kRaw ? "raw" : "normalized";
}

inline GapConvention parse_gap_convention(std::string_view name) {
    if (name == "raw") return GapConvention::kRaw;
    if (name == "normalized") return GapConvention::kNormalized;
    throw std::invalid_argument("unknown gap convention '" + std::string(name) + "'");
}

/// Diagonal of H_C under the chosen convention.
inline std::vector<double> cost_diagonal(const Qubo& qubo, GapConvention convention) {
    if (qubo.n > kMaxSpectralQubits) {
        throw std::length_error("dense spectral analysis capped at " +
                                std::to_string(kMaxSpectralQubits) + " qubits");
    }
    auto e = DiagonalHamiltonian(qubo).materialize();
    if (convention == GapConvention::kNormalized) {
        const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
        const double range = *hi - *lo;
        if (range > 0.0) {
            for (auto& v : e) v /= range;
        }
    }
    return e;
}

/// Dense H(s) from a precomputed cost diagonal.
inline Eigen::MatrixXd interpolated_hamiltonian(const std::vector<double>& diagonal, std::size_t n,
                                                double s) {
    const std::size_t dim = std::size_t{1} << n;
    if (diagonal.size() != dim) throw std::invalid_argument("diagonal size != 2^n");
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
    for (std::size_t z = 0; z < dim; ++z) {
        const auto zi = static_cast<Eigen::Index>(z);
        h(zi, zi) = s * diagonal[z];
        for (std::size_t q = 0; q < n; ++q) {
            h(zi, static_cast<Eigen::Index>(z ^ (std::size_t{1} << q))) = -(1.0 - s);
        }
    }
    return h;
}

inline Eigen::MatrixXd build_hamiltonian(const Qubo& qubo, double s,
                                         GapConvention convention = GapConvention::kRaw) {
    if (qubo.n == 0) throw std::invalid_argument("empty qubo");
    return interpolated_hamiltonian(cost_diagonal(qubo, convention), qubo.n, s);
}

/// Two smallest eigenvalues (e0 <= e1) of a real symmetric matrix.
inline std::pair<double, double> lowest_two_eigenvalues(const Eigen::MatrixXd& h) {
    if (h.rows() != h.cols() || h.rows() < 2) {
        throw std::invalid_argument("need a square matrix of order >= 2");
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw std::invalid_argument("matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
    const auto& ev = solver.eigenvalues();  // ascending
    return {ev(0), ev(1)};
}

struct GapProfile {
    std::vector<double> s_grid;
    std::vector<double> e0;
    std::vector<double> e1;
    double delta_min = 0.0;
    double s_at_min = 0.0;
    double annealing_time = 0.0;  // 1 / delta_min^2; infinite when the gap closes
    GapConvention convention = GapConvention::kRaw;
    std::vector<std::string> warnings;
};

struct GapOptions {
    std::size_t grid_points = 201;
    bool refine = true;
    double refine_tol = 1e-6;
    GapConvention convention = GapConvention::kRaw;
    /// Gaps at or below degenerate_tol * max(1, |e0|) count as closed.
    double degenerate_tol = 1e-12;
};

/// Scans s on a uniform grid, then refines around the smallest grid gap by
/// golden-section search. The refined gap never exceeds the grid minimum.
inline GapProfile gap_profile(const Qubo& qubo, const GapOptions& options = {}) {
    if (options.grid_points < 2) throw std::invalid_argument("grid_points must be at least 2");
    const auto diagonal = cost_diagonal(qubo, options.convention);
    auto levels = [&](double s) {
        return lowest_two_eigenvalues(interpolated_hamiltonian(diagonal, qubo.n, s));
    };

    GapProfile prof;
    prof.convention = options.convention;
    const std::size_t m = options.grid_points;
    prof.s_grid.resize(m);
    prof.e0.resize(m);
    prof.e1.resize(m);
    std::size_t best = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(m - 1);
        const auto [e0, e1] = levels(s);
        prof.s_grid[k] = s;
        prof.e0[k] = e0;
        prof.e1[k] = e1;
        if (e1 - e0 < prof.e1[best] - prof.e0[best]) best = k;
    }
    prof.delta_min = prof.e1[best] - prof.e0[best];
    prof.s_at_min = prof.s_grid[best];
    double e0_at_min = prof.e0[best];

    if (options.refine) {
        auto gap = [&](double s) {
            const auto [e0, e1] = levels(s);
            return std::pair{e1 - e0, e0};
        };
        constexpr double kInvPhi = 0.6180339887498949;
        double lo = prof.s_grid[best == 0 ? 0 : best - 1];
        double hi = prof.s_grid[best + 1 == m ? m - 1 : best + 1];
        double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
        auto g1 = gap(x1), g2 = gap(x2);
        while (hi - lo > options.refine_tol) {
            if (g1.first < g2.first) {
                hi = x2;
                x2 = x1;
                g2 = g1;
                x1 = hi - kInvPhi * (hi - lo);
                g1 = gap(x1);
            } else {
                lo = x1;
                x1 = x2;
                g1 = g2;
                x2 = lo + kInvPhi * (hi - lo);
                g2 = gap(x2);
            }
        }
        const auto& [g, e0] = g1.first < g2.first ? g1 : g2;
        if (g < prof.delta_min) {
            prof.delta_min = g;
            prof.s_at_min = g1.first < g2.first ? x1 : x2;
            e0_at_min = e0;
        }
    }

    if (prof.delta_min <= options.degenerate_tol * std::max(1.0, std::abs(e0_at_min))) {
        prof.warnings.push_back("ground state degenerate at s=" + format_double(prof.s_at_min) +
                                " (gap " + format_double(prof.delta_min) + "); reported as 0");
        prof.delta_min = 0.0;
    }
    prof.annealing_time = prof.delta_min > 0.0 ? 1.0 / (prof.delta_min * prof.delta_min)
                                               : std::numeric_limits<double>::infinity();
    return prof;
}

}  // namespace qmqo
