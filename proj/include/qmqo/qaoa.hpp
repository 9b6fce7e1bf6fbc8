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

// Hybrid QAOA loop: build the circuit, simulate it, score it by the exact
// (or shot-estimated) expectation of F_C, and let a derivative-free
// optimizer adjust (gamma, beta). Parameters are either searched directly
// from a random start or through the FOURIER re-parameterisation, growing
// the depth one layer at a time.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmqo/circuit.hpp"
#include "qmqo/optimize.hpp"
#include "qmqo/problem.hpp"
#include "qmqo/qubo.hpp"
#include "qmqo/simulator.hpp"

namespace qmqo {

struct FourierParams {
    std::vector<double> u;
    std::vector<double> v;

    std::size_t depth() const { return u.size(); }
};

/// gamma_i = sum_k u_k sin((k - 1/2)(i - 1/2) pi / p)
/// beta_i  = sum_k v_k cos((k - 1/2)(i - 1/2) pi / p)
inline QaoaParams fourier_to_params(const FourierParams& fp) {
    if (fp.u.size() != fp.v.size()) throw std::invalid_argument("u and v differ in length");
    const std::size_t p = fp.u.size();
    if (p < 1) throw std::invalid_argument("depth p must be at least 1");
    QaoaParams out{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)};
    const double pd = static_cast<double>(p);
    for (std::size_t i = 1; i <= p; ++i) {
        for (std::size_t k = 1; k <= p; ++k) {
            const double arg = (static_cast<double>(k) - 0.5) * (static_cast<double>(i) - 0.5) *
                               std::numbers::pi / pd;
            out.gammas[i - 1] += fp.u[k - 1] * std::sin(arg);
            out.betas[i - 1] += fp.v[k - 1] * std::cos(arg);
        }
    }
    return out;
}

enum class Strategy { kRandomInit, kFourier };

inline std::string_view strategy_name(Strategy s) {
    return s == Strategy::kRandomInit ? "random-init" : "fourier";
}

inline Strategy parse_strategy(std::string_view name) {
    if (name == "random-init" || name == "random") return Strategy::kRandomInit;
    if (name == "fourier") return Strategy::kFourier;
    throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

struct QaoaOptions {
    std::size_t p = 1;
    OptimizerKind optimizer = OptimizerKind::kPowell;
    Strategy strategy = Strategy::kFourier;
    std::uint64_t seed = 0;
    /// Objective evaluations allowed per optimizer run (per depth stage under
    /// FOURIER). 1 evaluates only the starting point.
    std::size_t budget = 2000;
    std::size_t restarts = 1;
    /// 0: exact expectation. Otherwise the objective is a shot estimate.
    std::size_t shots = 0;
    AngleConvention convention = AngleConvention::kIsingExact;
    Tolerances tolerances{};
    /// Starting point replacing the random draw: (gamma, beta) for
    /// random-init; (u_1, v_1) taken from its first layer for FOURIER.
    std::optional<QaoaParams> initial;
};

struct TracePoint {
    std::size_t evaluation = 0;
    double best_expectation = 0.0;
};

struct QaoaResult {
    QaoaParams best_params;
    double best_expectation = 0.0;
    double z_min = 0.0;
    double approx_ratio = 0.0;
    std::uint64_t argmax_index = 0;
    std::string argmax_bitstring;
    double success_probability = 0.0;
    std::size_t evaluations = 0;
    std::size_t restart = 0;  // which restart produced the result
    std::vector<TracePoint> trace;
    /// Objective at the starting point of the final-depth optimisation.
    double initial_expectation = 0.0;
};

/// Probability mass on the optimal admissible selection(s).
inline double success_probability(const StateVector& state, const MqoProblem& problem,
                                  const Qubo& qubo) {
    if (state.num_qubits() != problem.num_plans() || qubo.n != problem.num_plans()) {
        throw std::invalid_argument("state, qubo and problem disagree on plan count");
    }
    double mass = 0.0;
    for (const auto& s : optimal_solutions(problem)) mass += std::norm(state[bits_to_index(s.bits)]);
    return mass;
}

/// Evaluates QAOA parameters against a fixed problem.
class QaoaObjective {
   public:
    QaoaObjective(const Qubo& qubo, AngleConvention convention)
        : qubo_(qubo), convention_(convention), energies_(DiagonalHamiltonian(qubo).materialize()) {}

    StateVector state(const QaoaParams& params) const { return run(build(qubo_, params, convention_)); }

    double exact(const QaoaParams& params) const { return expectation(state(params), energies_); }

    double sampled(const QaoaParams& params, std::size_t shots, Rng& rng) const {
        return sampled_expectation(sample(state(params), shots, rng), energies_);
    }

    const std::vector<double>& energies() const { return energies_; }
    const Qubo& qubo() const { return qubo_; }

   private:
    const Qubo& qubo_;
    AngleConvention convention_;
    std::vector<double> energies_;
};

namespace detail {

inline QaoaParams split_params(std::span<const double> x) {
    const std::size_t p = x.size() / 2;
    return {std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p)),
            std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(p), x.end())};
}

inline FourierParams split_fourier(std::span<const double> x) {
    auto q = split_params(x);
    return {std::move(q.gammas), std::move(q.betas)};
}

struct RunOutcome {
    QaoaParams params;
    double best = std::numeric_limits<double>::infinity();
    double initial = std::numeric_limits<double>::quiet_NaN();
    std::size_t evaluations = 0;
    std::vector<TracePoint> trace;
};

inline RunOutcome run_once(const QaoaObjective& objective, const QaoaOptions& opt, Rng& rng) {
    const double half_pi = std::numbers::pi / 2.0;
    RunOutcome out;
    Rng shot_rng = make_rng(rng());
    auto score = [&](const QaoaParams& params) {
        return opt.shots == 0 ? objective.exact(params)
                              : objective.sampled(params, opt.shots, shot_rng);
    };
    auto record = [&](double value) {
        ++out.evaluations;
        if (std::isnan(out.initial)) out.initial = value;
        const double best = out.trace.empty() ? value : std::min(out.trace.back().best_expectation, value);
        out.trace.push_back({out.evaluations, best});
    };
    EvaluationCallback on_eval = [&](std::size_t, double v) { record(v); };

    if (opt.strategy == Strategy::kRandomInit) {
        std::vector<double> x(2 * opt.p);
        if (opt.initial) {
            if (opt.initial->depth() != opt.p) throw std::invalid_argument("initial params depth != p");
            std::copy(opt.initial->gammas.begin(), opt.initial->gammas.end(), x.begin());
            std::copy(opt.initial->betas.begin(), opt.initial->betas.end(), x.begin() + static_cast<std::ptrdiff_t>(opt.p));
        } else {
            for (auto& v : x) v = uniform_real(rng, -half_pi, half_pi);
        }
        Objective f = [&](std::span<const double> v) { return score(split_params(v)); };
        auto r = minimize(opt.optimizer, f, x, opt.budget, opt.tolerances, on_eval);
        out.params = split_params(r.x);
        out.best = r.f;
        return out;
    }

    // FOURIER: optimise (u, v) at depth 1, then extend by a zero
    // coefficient pair and re-optimise, up to the target depth.
    FourierParams fp;
    if (opt.initial) {
        fp.u = {opt.initial->gammas.front()};
        fp.v = {opt.initial->betas.front()};
    } else {
        fp.u = {uniform_real(rng, -half_pi, half_pi)};
        fp.v = {uniform_real(rng, -half_pi, half_pi)};
    }
    for (std::size_t depth = 1; depth <= opt.p; ++depth) {
        if (depth > 1) {
            fp.u.push_back(0.0);
            fp.v.push_back(0.0);
        }
        // The reported starting value is the warm start of the last stage.
        out.initial = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> x(fp.u);
        x.insert(x.end(), fp.v.begin(), fp.v.end());
        Objective f = [&](std::span<const double> v) {
            return score(fourier_to_params(split_fourier(v)));
        };
        auto r = minimize(opt.optimizer, f, x, opt.budget, opt.tolerances, on_eval);
        fp = split_fourier(r.x);
        out.best = r.f;
    }
    out.params = fourier_to_params(fp);
    return out;
}

}  // namespace detail

/// Runs the hybrid loop `restarts` times (restart r seeded by (seed, r)) and
/// keeps the restart with the lowest final objective.
inline QaoaResult optimize(const Qubo& qubo, const MqoProblem& problem, const QaoaOptions& opt) {
    if (opt.p < 1) throw std::invalid_argument("depth p must be at least 1");
    if (opt.budget == 0) throw std::invalid_argument("budget must be positive");
    if (opt.restarts == 0) throw std::invalid_argument("restarts must be positive");
    if (qubo.n != problem.num_plans()) throw std::invalid_argument("qubo/problem size mismatch");

    const QaoaObjective objective(qubo, opt.convention);
    const double z_min = argmin_admissible_energy(qubo, problem).value;

    QaoaResult best;
    bool have = false;
    std::size_t total_evaluations = 0;
    for (std::size_t r = 0; r < opt.restarts; ++r) {
        Rng rng = make_rng(opt.seed, r);
        auto outcome = detail::run_once(objective, opt, rng);
        total_evaluations += outcome.evaluations;
        // Exact value at the returned parameters; with shots the optimizer's
        // own estimate is noisy.
        const double exact = objective.exact(outcome.params);
        if (!have || exact < best.best_expectation) {
            have = true;
            best.best_params = outcome.params;
            best.best_expectation = exact;
            best.trace = std::move(outcome.trace);
            best.initial_expectation = outcome.initial;
            best.restart = r;
        }
    }
    const StateVector state = objective.state(best.best_params);
    best.z_min = z_min;
    best.approx_ratio = z_min != 0.0 ? best.best_expectation / z_min
                                     : std::numeric_limits<double>::quiet_NaN();
    best.argmax_index = state.argmax();
    best.argmax_bitstring = index_to_bitstring(best.argmax_index, qubo.n);
    best.success_probability = success_probability(state, problem, qubo);
    best.evaluations = total_evaluations;
    return best;
}

}  // namespace qmqo
