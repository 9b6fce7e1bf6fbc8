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

#include "qmqo/optimize.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace qmqo;

namespace {

double sphere(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

double rosenbrock(std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

class OptimizerTest : public ::testing::TestWithParam<OptimizerKind> {};

}  // namespace

TEST_P(OptimizerTest, sphere_converges_to_origin) {
    Tolerances tol;
    tol.rel_tol = 0.0;
    tol.abs_tol = 1e-14;
    auto r = minimize(GetParam(), sphere, {1.0, 1.0}, 5000, tol);
    EXPECT_NEAR(r.x[0], 0.0, 1e-4);
    EXPECT_NEAR(r.x[1], 0.0, 1e-4);
    EXPECT_LE(r.f, 2.0);  // f(x0)
}

TEST_P(OptimizerTest, rosenbrock_within_2000_evaluations) {
    Tolerances tol;
    tol.rel_tol = 0.0;
    tol.abs_tol = 1e-12;
    auto r = minimize(GetParam(), rosenbrock, {-1.2, 1.0}, 2000, tol);
    EXPECT_LE(r.evaluations, 2000u);
    EXPECT_LT(r.f, 1e-3) << "x = (" << r.x[0] << ", " << r.x[1] << ")";
    EXPECT_NEAR(r.x[0], 1.0, 0.05);
    EXPECT_NEAR(r.x[1], 1.0, 0.1);
}

TEST_P(OptimizerTest, zero_budget_returns_start) {
    int calls = 0;
    Objective f = [&](std::span<const double> x) {
        ++calls;
        return sphere(x);
    };
    auto r = minimize(GetParam(), f, {0.3, -0.7}, 0);
    EXPECT_EQ(r.x, (std::vector<double>{0.3, -0.7}));
    EXPECT_EQ(r.evaluations, 0u);
    EXPECT_EQ(calls, 0);
    EXPECT_TRUE(std::isnan(r.f));
}

TEST_P(OptimizerTest, never_worse_than_start_and_respects_budget) {
    auto bumpy = [](std::span<const double> x) {
        return std::sin(3 * x[0]) * std::cos(2 * x[1]) + 0.1 * (x[0] * x[0] + x[1] * x[1]);
    };
    for (std::size_t budget : {1u, 2u, 7u, 40u, 300u}) {
        std::size_t seen = 0;
        auto r = minimize(GetParam(), bumpy, {0.4, 0.9}, budget, {},
                          [&](std::size_t k, double) { seen = k; });
        EXPECT_LE(r.evaluations, budget);
        EXPECT_EQ(seen, r.evaluations);
        EXPECT_LE(r.f, bumpy(std::vector<double>{0.4, 0.9}));
    }
}

TEST_P(OptimizerTest, deterministic) {
    auto a = minimize(GetParam(), rosenbrock, {-1.2, 1.0}, 500);
    auto b = minimize(GetParam(), rosenbrock, {-1.2, 1.0}, 500);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.f, b.f);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST_P(OptimizerTest, stops_on_stagnation) {
    auto flat = [](std::span<const double>) { return 1.0; };
    auto r = minimize(GetParam(), flat, {0.0, 0.0, 0.0}, 100000);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.evaluations, 1000u);
}

INSTANTIATE_TEST_SUITE_P(optimizers, OptimizerTest,
                         ::testing::Values(OptimizerKind::kNelderMead, OptimizerKind::kPowell),
                         [](const auto& info) {
                             return info.param == OptimizerKind::kNelderMead ? std::string("nelder_mead")
                                                                             : std::string("powell");
                         });

TEST(optimize, parse_names) {
    EXPECT_EQ(parse_optimizer("powell"), OptimizerKind::kPowell);
    EXPECT_EQ(parse_optimizer("nelder-mead"), OptimizerKind::kNelderMead);
    EXPECT_THROW(parse_optimizer("cobyla"), std::invalid_argument);
}
