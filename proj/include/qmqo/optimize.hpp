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

// Derivative-free minimisers used for the classical half of the QAOA loop:
// Nelder-Mead simplex and Powell's conjugate-direction method. Both stop on
// evaluation budget or on objective stagnation, and always return the best
// point they evaluated.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qmqo {

using Objective = std::function<double(std::span<const double>)>;

struct Tolerances {
    /// Stop once the best value moved by less than rel_tol * |f| + abs_tol
    /// over the last `stall_iterations` iterations.
    double rel_tol = 1e-6;
    double abs_tol = 1e-12;
    std::size_t stall_iterations = 10;
    /// Simplex edge / initial direction length.
    double initial_step = 0.5;
    /// Relative bracket width at which a Powell line search stops.
    double line_tol = 1e-4;
};

struct OptimizeResult {
    std::vector<double> x;
    double f = std::numeric_limits<double>::quiet_NaN();
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    bool converged = false;  // stagnation reached before the budget ran out
};

/// Called after every objective evaluation with (evaluation index, value).
using EvaluationCallback = std::function<void(std::size_t, double)>;

enum class OptimizerKind { kNelderMead, kPowell };

inline std::string_view optimizer_name(OptimizerKind k) {
    return k == OptimizerKind::kNelderMead ? "nelder-mead" : "powell";
}

inline OptimizerKind parse_optimizer(std::string_view name) {
    if (name == "nelder-mead" || name == "neldermead") return OptimizerKind::kNelderMead;
    if (name == "powell") return OptimizerKind::kPowell;
    throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

namespace detail {

struct BudgetExhausted {};

/// Counts evaluations, enforces the budget and remembers the best point.
class TrackedObjective {
   public:
    TrackedObjective(const Objective& f, std::size_t budget, const EvaluationCallback& cb)
        : f_(f), budget_(budget), cb_(cb) {}

    double operator()(std::span<const double> x) {
        if (count_ >= budget_) throw BudgetExhausted{};
        const double v = f_(x);
        ++count_;
        if (cb_) cb_(count_, v);
        if (best_x_.empty() || v < best_f_) {
            best_f_ = v;
            best_x_.assign(x.begin(), x.end());
        }
        return v;
    }

    std::size_t count() const { return count_; }
    double best_f() const { return best_f_; }
    const std::vector<double>& best_x() const { return best_x_; }

   private:
    const Objective& f_;
    std::size_t budget_;
    const EvaluationCallback& cb_;
    std::size_t count_ = 0;
    double best_f_ = std::numeric_limits<double>::infinity();
    std::vector<double> best_x_;
};

/// Best-so-far history across iterations for the stall rule.
class StallDetector {
   public:
    explicit StallDetector(const Tolerances& tol) : tol_(tol) {}

    bool stalled(double best) {
        history_.push_back(best);
        if (history_.size() <= tol_.stall_iterations) return false;
        const double old = history_[history_.size() - 1 - tol_.stall_iterations];
        return std::abs(old - best) <= tol_.rel_tol * std::abs(best) + tol_.abs_tol;
    }

   private:
    const Tolerances& tol_;
    std::vector<double> history_;
};

inline OptimizeResult finish(const TrackedObjective& obj, std::vector<double> x0,
                             std::size_t iterations, bool converged) {
    OptimizeResult r;
    if (obj.best_x().empty()) {
        r.x = std::move(x0);
    } else {
        r.x = obj.best_x();
        r.f = obj.best_f();
    }
    r.evaluations = obj.count();
    r.iterations = iterations;
    r.converged = converged;
    return r;
}

}  // namespace detail

/// Nelder-Mead with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
/// A budget of 0 returns x0 without evaluating (f is NaN).
inline OptimizeResult nelder_mead(const Objective& objective, std::vector<double> x0,
                                  std::size_t budget, const Tolerances& tol = {},
                                  const EvaluationCallback& on_eval = {}) {
    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
    const std::size_t dim = x0.size();
    if (dim == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");
    detail::TrackedObjective f(objective, budget, on_eval);
    detail::StallDetector stall(tol);
    std::size_t iterations = 0;
    bool converged = false;

    try {
        std::vector<std::vector<double>> simplex(dim + 1, x0);
        std::vector<double> values(dim + 1);
        values[0] = f(simplex[0]);
        for (std::size_t k = 0; k < dim; ++k) {
            simplex[k + 1][k] += tol.initial_step;
            values[k + 1] = f(simplex[k + 1]);
        }

        std::vector<std::size_t> order(dim + 1);
        std::vector<double> centroid(dim), trial(dim), trial2(dim);
        auto point = [&](double coeff, const std::vector<double>& worst, std::vector<double>& out) {
            for (std::size_t d = 0; d < dim; ++d) out[d] = centroid[d] + coeff * (worst[d] - centroid[d]);
        };

        while (true) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
            const std::size_t best = order.front(), worst = order.back(),
                              second = order[dim - 1];
            const double spread = values[worst] - values[best];
            double size = 0.0;
            for (std::size_t k = 0; k <= dim; ++k) {
                for (std::size_t d = 0; d < dim; ++d) {
                    size = std::max(size, std::abs(simplex[k][d] - simplex[best][d]));
                }
            }
            if (stall.stalled(values[best]) ||
                (spread <= tol.abs_tol && size <= 1e3 * tol.abs_tol)) {
                converged = true;
                break;
            }
            ++iterations;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t k = 0; k <= dim; ++k) {
                if (k == worst) continue;
                for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[k][d];
            }
            for (auto& c : centroid) c /= static_cast<double>(dim);

            point(-kReflect, simplex[worst], trial);
            const double fr = f(trial);
            if (fr < values[best]) {
                point(-kExpand, simplex[worst], trial2);
                const double fe = f(trial2);
                if (fe < fr) {
                    simplex[worst] = trial2;
                    values[worst] = fe;
                } else {
                    simplex[worst] = trial;
                    values[worst] = fr;
                }
                continue;
            }
            if (fr < values[second]) {
                simplex[worst] = trial;
                values[worst] = fr;
                continue;
            }
            if (fr < values[worst]) {
                point(-kContract, simplex[worst], trial2);  // outside
                const double fc = f(trial2);
                if (fc <= fr) {
                    simplex[worst] = trial2;
                    values[worst] = fc;
                    continue;
                }
            } else {
                point(kContract, simplex[worst], trial2);  // inside
                const double fc = f(trial2);
                if (fc < values[worst]) {
                    simplex[worst] = trial2;
                    values[worst] = fc;
                    continue;
                }
            }
            for (std::size_t k = 0; k <= dim; ++k) {
                if (k == best) continue;
                for (std::size_t d = 0; d < dim; ++d) {
                    simplex[k][d] = simplex[best][d] + kShrink * (simplex[k][d] - simplex[best][d]);
                }
                values[k] = f(simplex[k]);
            }
        }
    } catch (const detail::BudgetExhausted&) {
    }
    return detail::finish(f, std::move(x0), iterations, converged);
}

namespace detail {

inline constexpr double kGolden = 0.3819660112501051;  // 2 - phi
inline constexpr double kPhi = 1.618033988749895;

/// Minimises t -> f(base + t * dir) by bracketing then golden-section
/// search. f0 is the value at t = 0. Returns (t, f(t)).
inline std::pair<double, double> line_minimize(TrackedObjective& f, const std::vector<double>& base,
                                               const std::vector<double>& dir, double f0,
                                               double rel_tol) {
    std::vector<double> x(base.size());
    auto eval = [&](double t) {
        for (std::size_t d = 0; d < base.size(); ++d) x[d] = base[d] + t * dir[d];
        return f(x);
    };
    constexpr int kMaxExpansions = 50;

    double a = 0.0, fa = f0;
    double b = 1.0, fb = eval(b);
    if (fb > fa) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    // Now fb <= fa; march from a through b until the value rises.
    double c = b + kPhi * (b - a), fc = eval(c);
    for (int k = 0; fc < fb && k < kMaxExpansions; ++k) {
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = b + kPhi * (b - a);
        fc = eval(c);
    }
    if (fc < fb) return {c, fc};

    double lo = std::min(a, c), hi = std::max(a, c);
    double x1 = b, f1 = fb;
    // Golden-section on [lo, hi] with interior point x1.
    while (hi - lo > rel_tol * (std::abs(x1) + 1e-3)) {
        const bool right = (hi - x1) > (x1 - lo);
        const double x2 = right ? x1 + kGolden * (hi - x1) : x1 - kGolden * (x1 - lo);
        const double f2 = eval(x2);
        if (f2 < f1) {
            if (right) lo = x1; else hi = x1;
            x1 = x2;
            f1 = f2;
        } else {
            if (right) hi = x2; else lo = x2;
        }
    }
    return {x1, f1};
}

}  // namespace detail

/// Powell's conjugate-direction method; each line search brackets the
/// minimum and refines it by golden-section search. A budget of 0 returns
/// x0 without evaluating (f is NaN).
inline OptimizeResult powell(const Objective& objective, std::vector<double> x0, std::size_t budget,
                             const Tolerances& tol = {}, const EvaluationCallback& on_eval = {}) {
    const std::size_t dim = x0.size();
    if (dim == 0) throw std::invalid_argument("powell: empty parameter vector");
    detail::TrackedObjective f(objective, budget, on_eval);
    detail::StallDetector stall(tol);
    std::size_t iterations = 0;
    bool converged = false;

    try {
        std::vector<std::vector<double>> dirs(dim, std::vector<double>(dim, 0.0));
        for (std::size_t k = 0; k < dim; ++k) dirs[k][k] = tol.initial_step;
        std::vector<double> x = x0;
        double fx = f(x);
        std::vector<double> extrapolated(dim), new_dir(dim);

        while (true) {
            ++iterations;
            const std::vector<double> x_start = x;
            const double f_start = fx;
            std::size_t biggest = 0;
            double biggest_drop = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double before = fx;
                auto [t, ft] = detail::line_minimize(f, x, dirs[k], fx, tol.line_tol);
                if (ft < fx) {
                    for (std::size_t d = 0; d < dim; ++d) x[d] += t * dirs[k][d];
                    fx = ft;
                }
                if (before - fx > biggest_drop) {
                    biggest_drop = before - fx;
                    biggest = k;
                }
            }
            if (fx == f_start || stall.stalled(fx)) {
                converged = true;
                break;
            }
            // Replace the direction of largest decrease with the net
            // displacement when extrapolation says it is worthwhile.
            for (std::size_t d = 0; d < dim; ++d) {
                new_dir[d] = x[d] - x_start[d];
                extrapolated[d] = 2.0 * x[d] - x_start[d];
            }
            const double fe = f(extrapolated);
            if (fe < f_start) {
                const double t1 = f_start - fx - biggest_drop;
                const double t2 = f_start - fe;
                if (2.0 * (f_start - 2.0 * fx + fe) * t1 * t1 < biggest_drop * t2 * t2) {
                    auto [t, ft] = detail::line_minimize(f, x, new_dir, fx, tol.line_tol);
                    if (ft < fx) {
                        for (std::size_t d = 0; d < dim; ++d) x[d] += t * new_dir[d];
                        fx = ft;
                    }
                    dirs[biggest] = dirs[dim - 1];
                    dirs[dim - 1] = new_dir;
                }
            }
        }
    } catch (const detail::BudgetExhausted&) {
    }
    return detail::finish(f, std::move(x0), iterations, converged);
}

inline OptimizeResult minimize(OptimizerKind kind, const Objective& objective,
                               std::vector<double> x0, std::size_t budget,
                               const Tolerances& tol = {}, const EvaluationCallback& on_eval = {}) {
    return kind == OptimizerKind::kNelderMead ? nelder_mead(objective, std::move(x0), budget, tol, on_eval)
                                              : powell(objective, std::move(x0), budget, tol, on_eval);
}

}  // namespace qmqo
