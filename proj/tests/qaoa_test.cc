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

#include "qmqo/qaoa.hpp"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "oracles.hpp"

using namespace qmqo;
using qmqo::testing::example2;

TEST(fourier, depth_one) {
    auto p = fourier_to_params({{0.8}, {-0.6}});
    EXPECT_NEAR(p.gammas[0], 0.8 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(p.betas[0], -0.6 / std::sqrt(2.0), 1e-15);
}

TEST(fourier, zero_coefficients) {
    auto p = fourier_to_params({{0, 0, 0}, {0, 0, 0}});
    EXPECT_EQ(p.gammas, (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(p.betas, (std::vector<double>{0, 0, 0}));
}

TEST(fourier, matches_direct_sum_and_is_linear) {
    auto rng = make_rng(1);
    for (std::size_t p = 1; p <= 6; ++p) {
        FourierParams fp;
        for (std::size_t k = 0; k < p; ++k) {
            fp.u.push_back(uniform_real(rng, -2, 2));
            fp.v.push_back(uniform_real(rng, -2, 2));
        }
        auto out = fourier_to_params(fp);
        FourierParams twice = fp;
        for (auto& x : twice.u) x *= 2;
        for (auto& x : twice.v) x *= 2;
        auto out2 = fourier_to_params(twice);
        for (std::size_t i = 0; i < p; ++i) {
            double g = 0, b = 0;
            for (std::size_t k = 0; k < p; ++k) {
                const double arg = (k + 0.5) * (i + 0.5) * std::numbers::pi / static_cast<double>(p);
                g += fp.u[k] * std::sin(arg);
                b += fp.v[k] * std::cos(arg);
            }
            EXPECT_NEAR(out.gammas[i], g, 1e-12);
            EXPECT_NEAR(out.betas[i], b, 1e-12);
            EXPECT_NEAR(out2.gammas[i], 2 * out.gammas[i], 1e-12);
            EXPECT_NEAR(out2.betas[i], 2 * out.betas[i], 1e-12);
        }
        EXPECT_EQ(fourier_to_params(fp).gammas, out.gammas);
    }
    EXPECT_THROW(fourier_to_params({{1}, {1, 2}}), std::invalid_argument);
    EXPECT_THROW(fourier_to_params({{}, {}}), std::invalid_argument);
}

TEST(success_probability, basic) {
    auto p = example2();
    auto q = encode(p);
    EXPECT_NEAR(success_probability(uniform_superposition(4), p, q), 0.0625, 1e-15);
    EXPECT_NEAR(success_probability(StateVector::basis(4, 0b1001), p, q), 1.0, 1e-15);
    EXPECT_NEAR(success_probability(StateVector::basis(4, 0b0110), p, q), 0.0, 1e-15);
}

TEST(success_probability, sums_over_ties) {
    auto p = MqoProblem::from_queries({{4, 4}}, {});
    auto q = encode(p);
    EXPECT_NEAR(success_probability(uniform_superposition(2), p, q), 0.5, 1e-15);
}

TEST(success_probability, agrees_with_shot_frequency) {
    auto p = example2();
    auto q = encode(p);
    auto s = run(build(q, {{0.11, 0.05}, {0.4, 0.2}}));
    auto rec = sample(s, 200000, 3);
    EXPECT_NEAR(rec.frequency(0b1001), success_probability(s, p, q), 0.005);
}

TEST(qaoa, single_evaluation_from_zero_is_uniform) {
    auto p = example2();
    auto q = encode(p);
    for (auto strategy : {Strategy::kRandomInit, Strategy::kFourier}) {
        QaoaOptions opt;
        opt.p = 1;
        opt.budget = 1;
        opt.strategy = strategy;
        opt.initial = QaoaParams{{0.0}, {0.0}};
        auto r = optimize(q, p, opt);
        EXPECT_EQ(r.evaluations, 1u);
        EXPECT_NEAR(r.success_probability, 1.0 / 16, 1e-12);
        EXPECT_NEAR(r.best_expectation, -10.5, 1e-12);
        EXPECT_NEAR(r.approx_ratio, -10.5 / -40.0, 1e-12);
    }
}

TEST(qaoa, objective_is_expectation_of_built_circuit) {
    auto p = example2();
    auto q = encode(p);
    QaoaOptions opt;
    opt.p = 2;
    opt.budget = 60;
    opt.seed = 4;
    opt.strategy = Strategy::kRandomInit;
    auto r = optimize(q, p, opt);
    const double direct = expectation(run(build(q, r.best_params, AngleConvention::kIsingExact)), q);
    EXPECT_DOUBLE_EQ(r.best_expectation, direct);
    EXPECT_DOUBLE_EQ(r.approx_ratio, direct / r.z_min);
    EXPECT_EQ(r.z_min, -40.0);
}

TEST(qaoa, improves_on_its_start) {
    auto p = example2();
    auto q = encode(p);
    for (auto optimizer : {OptimizerKind::kNelderMead, OptimizerKind::kPowell}) {
        for (auto strategy : {Strategy::kRandomInit, Strategy::kFourier}) {
            for (std::uint64_t seed = 0; seed < 4; ++seed) {
                QaoaOptions opt;
                opt.p = 3;
                opt.optimizer = optimizer;
                opt.strategy = strategy;
                opt.seed = seed;
                opt.budget = 300;
                auto r = optimize(q, p, opt);
                EXPECT_LE(r.best_expectation, r.initial_expectation);
                EXPECT_GE(r.approx_ratio, r.initial_expectation / r.z_min);
                EXPECT_GE(r.success_probability, 0.0);
                EXPECT_LE(r.success_probability, 1.0);
                ASSERT_FALSE(r.trace.empty());
                for (std::size_t k = 1; k < r.trace.size(); ++k)
                    EXPECT_LE(r.trace[k].best_expectation, r.trace[k - 1].best_expectation);
            }
        }
    }
}

TEST(qaoa, reproducible_for_fixed_seed) {
    auto p = generate_random(2, 2, 9);
    auto q = encode(p);
    QaoaOptions opt;
    opt.p = 3;
    opt.seed = 17;
    opt.restarts = 2;
    opt.shots = 256;
    auto a = optimize(q, p, opt);
    auto b = optimize(q, p, opt);
    EXPECT_EQ(a.best_params.gammas, b.best_params.gammas);
    EXPECT_EQ(a.best_params.betas, b.best_params.betas);
    EXPECT_EQ(a.best_expectation, b.best_expectation);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(qaoa, restarts_keep_the_best) {
    auto p = generate_random(2, 2, 21);
    auto q = encode(p);
    QaoaOptions opt;
    opt.p = 2;
    opt.seed = 5;
    opt.budget = 80;
    opt.restarts = 4;
    auto best = optimize(q, p, opt);
    // The winning restart is reproducible on its own.
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < opt.restarts; ++r) {
        Rng rng = make_rng(opt.seed, r);
        const QaoaObjective objective(q, opt.convention);
        auto single = detail::run_once(objective, opt, rng);
        lowest = std::min(lowest, objective.exact(single.params));
    }
    EXPECT_EQ(best.best_expectation, lowest);
}

TEST(qaoa, example2_fourier_powell_finds_1001) {
    auto p = example2();
    auto q = encode(p);
    QaoaOptions opt;
    opt.p = 5;
    opt.optimizer = OptimizerKind::kPowell;
    opt.strategy = Strategy::kFourier;
    opt.seed = 1;
    opt.restarts = 10;
    auto r = optimize(q, p, opt);
    EXPECT_EQ(r.argmax_bitstring, "1001");
    EXPECT_GT(r.success_probability, 0.3);
}

TEST(qaoa, option_errors) {
    auto p = example2();
    auto q = encode(p);
    QaoaOptions opt;
    opt.budget = 0;
    EXPECT_THROW(optimize(q, p, opt), std::invalid_argument);
    opt.budget = 10;
    opt.p = 0;
    EXPECT_THROW(optimize(q, p, opt), std::invalid_argument);
    EXPECT_THROW(parse_strategy("annealing"), std::invalid_argument);
}
