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

// Multiple-query-optimization instances: a batch of queries, each with a set
// of alternative plans, per-plan costs and pairwise savings between plans of
// different queries. Plans are indexed globally and 0-based, row-major over
// the queries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "qmqo/util.hpp"

namespace qmqo {

struct Saving {
    std::size_t i = 0;
    std::size_t j = 0;
    double value = 0.0;

    friend bool operator==(const Saving&, const Saving&) = default;
};

/// Selection bitstring: bits[i] == 1 iff plan i is selected.
struct Solution {
    std::vector<std::uint8_t> bits;

    std::string str() const { return bits_to_string(bits); }
    friend bool operator==(const Solution&, const Solution&) = default;
    friend auto operator<=>(const Solution&, const Solution&) = default;
};

class MqoProblem {
   public:
    MqoProblem() = default;

    /// Validates every invariant; savings pairs are canonicalised to i < j.
    MqoProblem(std::vector<std::size_t> query_plan_counts, std::vector<double> plan_costs,
               std::vector<Saving> savings, double epsilon = 1.0)
        : counts_(std::move(query_plan_counts)),
          costs_(std::move(plan_costs)),
          savings_(std::move(savings)),
          epsilon_(epsilon) {
        validate();
    }

    /// Builds from per-query cost lists, e.g. {{3, 13}, {21, 1}}.
    static MqoProblem from_queries(const std::vector<std::vector<double>>& queries,
                                   std::vector<Saving> savings, double epsilon = 1.0) {
        std::vector<std::size_t> counts;
        std::vector<double> costs;
        for (const auto& q : queries) {
            counts.push_back(q.size());
            costs.insert(costs.end(), q.begin(), q.end());
        }
        return MqoProblem(std::move(counts), std::move(costs), std::move(savings), epsilon);
    }

    std::size_t num_queries() const { return counts_.size(); }
    std::size_t num_plans() const { return costs_.size(); }
    const std::vector<std::size_t>& query_plan_counts() const { return counts_; }
    const std::vector<double>& plan_costs() const { return costs_; }
    const std::vector<Saving>& savings() const { return savings_; }
    double epsilon() const { return epsilon_; }

    /// Global index of the first plan of query q.
    std::size_t query_offset(std::size_t q) const {
        if (q >= counts_.size()) throw std::out_of_range("query index out of range");
        std::size_t offset = 0;
        for (std::size_t k = 0; k < q; ++k) offset += counts_[k];
        return offset;
    }

    /// Query owning a plan.
    std::size_t plan_query(std::size_t plan_index) const {
        std::size_t upper = 0;
        for (std::size_t q = 0; q < counts_.size(); ++q) {
            upper += counts_[q];
            if (plan_index < upper) return q;
        }
        throw std::out_of_range("plan index " + std::to_string(plan_index) + " out of range (N=" +
                                std::to_string(num_plans()) + ")");
    }

    /// Savings whose value exceeds c_i + c_j. Allowed, but suspicious.
    std::vector<std::string> soft_warnings() const {
        std::vector<std::string> out;
        for (std::size_t k = 0; k < savings_.size(); ++k) {
            const auto& s = savings_[k];
            if (s.value > costs_[s.i] + costs_[s.j]) {
                out.push_back("savings[" + std::to_string(k) + "].value " + format_double(s.value) +
                              " exceeds the sum of both plan costs");
            }
        }
        return out;
    }

    friend bool operator==(const MqoProblem&, const MqoProblem&) = default;

   private:
    void validate() {
        if (counts_.empty()) throw std::invalid_argument("queries: at least one query required");
        std::size_t total = 0;
        for (std::size_t q = 0; q < counts_.size(); ++q) {
            if (counts_[q] == 0) {
                throw std::invalid_argument("queries[" + std::to_string(q) + "]: no plans");
            }
            total += counts_[q];
        }
        if (total != costs_.size()) {
            throw std::invalid_argument("plan_costs: length " + std::to_string(costs_.size()) +
                                        " does not match plan count " + std::to_string(total));
        }
        for (std::size_t i = 0; i < costs_.size(); ++i) {
            if (!(costs_[i] > 0.0) || !std::isfinite(costs_[i])) {
                throw std::invalid_argument("plan_costs[" + std::to_string(i) +
                                            "]: cost must be positive and finite");
            }
        }
        if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
            throw std::invalid_argument("epsilon: must be positive");
        }
        std::vector<std::pair<std::size_t, std::size_t>> seen;
        for (std::size_t k = 0; k < savings_.size(); ++k) {
            auto& s = savings_[k];
            const std::string field = "savings[" + std::to_string(k) + "]";
            if (s.i >= total || s.j >= total) {
                throw std::invalid_argument(field + ": plan index out of range");
            }
            if (s.i == s.j) throw std::invalid_argument(field + ": i and j must differ");
            if (s.i > s.j) std::swap(s.i, s.j);
            if (plan_query(s.i) == plan_query(s.j)) {
                throw std::invalid_argument(field + ": plans " + std::to_string(s.i) + " and " +
                                            std::to_string(s.j) + " belong to the same query");
            }
            if (!std::isfinite(s.value)) throw std::invalid_argument(field + ".value: not finite");
            seen.emplace_back(s.i, s.j);
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
            throw std::invalid_argument("savings: duplicate (i, j) pair");
        }
    }

    std::vector<std::size_t> counts_;
    std::vector<double> costs_;
    std::vector<Saving> savings_;
    double epsilon_ = 1.0;
};

inline std::size_t plan_query(const MqoProblem& problem, std::size_t plan_index) {
    return problem.plan_query(plan_index);
}

/// True iff every query has exactly one selected plan.
inline bool is_admissible(const MqoProblem& problem, const Solution& solution) {
    if (solution.bits.size() != problem.num_plans()) {
        throw std::invalid_argument("solution length " + std::to_string(solution.bits.size()) +
                                    " != plan count " + std::to_string(problem.num_plans()));
    }
    std::size_t plan = 0;
    for (std::size_t count : problem.query_plan_counts()) {
        std::size_t selected = 0;
        for (std::size_t k = 0; k < count; ++k, ++plan) selected += solution.bits[plan] ? 1 : 0;
        if (selected != 1) return false;
    }
    return true;
}

/// Selected plan costs minus savings of selected pairs. Rejects
/// non-admissible selections.
inline double solution_cost(const MqoProblem& problem, const Solution& solution) {
    if (!is_admissible(problem, solution)) {
        throw std::invalid_argument("solution " + solution.str() + " is not admissible");
    }
    double cost = 0.0;
    for (std::size_t i = 0; i < problem.num_plans(); ++i) {
        if (solution.bits[i]) cost += problem.plan_costs()[i];
    }
    for (const auto& s : problem.savings()) {
        if (solution.bits[s.i] && solution.bits[s.j]) cost -= s.value;
    }
    return cost;
}

/// Number of admissible selections: the product of the per-query plan counts.
inline boost::multiprecision::cpp_int enumeration_count(const MqoProblem& problem) {
    boost::multiprecision::cpp_int count = 1;
    for (std::size_t c : problem.query_plan_counts()) count *= c;
    return count;
}

inline boost::multiprecision::cpp_int enumeration_count(std::size_t queries, std::size_t plans) {
    boost::multiprecision::cpp_int count = 1;
    for (std::size_t q = 0; q < queries; ++q) count *= plans;
    return count;
}

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

struct BruteForceResult {
    Solution solution;
    double value = 0.0;
};

/// Minimises `evaluate` over admissible selections only. Ties go to the
/// lexicographically smallest bitstring (plan 0 first).
template <typename Evaluate>
BruteForceResult brute_force_min(const MqoProblem& problem, Evaluate&& evaluate,
                                 std::uint64_t cap = kDefaultEnumerationCap) {
    if (enumeration_count(problem) > cap) {
        throw std::length_error("admissible search space exceeds enumeration cap of " +
                                std::to_string(cap));
    }
    const auto& counts = problem.query_plan_counts();
    std::vector<std::size_t> offsets(counts.size());
    for (std::size_t q = 1; q < counts.size(); ++q) offsets[q] = offsets[q - 1] + counts[q - 1];

    std::vector<std::size_t> choice(counts.size(), 0);
    Solution current{std::vector<std::uint8_t>(problem.num_plans(), 0)};
    for (std::size_t q = 0; q < counts.size(); ++q) current.bits[offsets[q]] = 1;

    BruteForceResult best{current, std::numeric_limits<double>::infinity()};
    bool first = true;
    while (true) {
        const double value = evaluate(current);
        if (first || value < best.value || (value == best.value && current < best.solution)) {
            best = {current, value};
            first = false;
        }
        // Mixed-radix increment, last query fastest.
        std::size_t q = counts.size();
        while (q > 0) {
            --q;
            current.bits[offsets[q] + choice[q]] = 0;
            if (++choice[q] < counts[q]) {
                current.bits[offsets[q] + choice[q]] = 1;
                break;
            }
            choice[q] = 0;
            current.bits[offsets[q]] = 1;
            if (q == 0) return best;
        }
    }
}

/// Least-cost admissible selection.
inline BruteForceResult brute_force(const MqoProblem& problem,
                                    std::uint64_t cap = kDefaultEnumerationCap) {
    return brute_force_min(
        problem, [&](const Solution& s) { return solution_cost(problem, s); }, cap);
}

/// Every admissible selection whose cost ties the optimum (relative 1e-9).
inline std::vector<Solution> optimal_solutions(const MqoProblem& problem,
                                               std::uint64_t cap = kDefaultEnumerationCap) {
    const double best = brute_force(problem, cap).value;
    const double tol = 1e-9 * std::max(1.0, std::abs(best));
    std::vector<Solution> out;
    brute_force_min(
        problem,
        [&](const Solution& s) {
            const double c = solution_cost(problem, s);
            if (std::abs(c - best) <= tol) out.push_back(s);
            return c;
        },
        cap);
    std::sort(out.begin(), out.end());
    return out;
}

struct GeneratorConfig {
    std::int64_t min_cost = 1;
    std::int64_t max_cost = 50;
    double saving_density = 0.25;
    double epsilon = 1.0;
};

/// Seeded random instance with Q queries of P plans each. Costs are
/// integers in [min_cost, max_cost]; every cross-query pair gets a saving
/// with probability saving_density, valued in [1, min(c_i, c_j)].
inline MqoProblem generate_random(std::size_t queries, std::size_t plans, std::uint64_t seed,
                                  const GeneratorConfig& config = {}) {
    if (queries == 0 || plans == 0) throw std::invalid_argument("Q and P must be at least 1");
    if (config.min_cost < 1 || config.max_cost < config.min_cost) {
        throw std::invalid_argument("generator cost range must satisfy 1 <= min <= max");
    }
    Rng rng = make_rng(seed);
    const std::size_t n = queries * plans;
    std::vector<double> costs(n);
    for (auto& c : costs) c = static_cast<double>(uniform_int(rng, config.min_cost, config.max_cost));
    std::vector<Saving> savings;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (i / plans == j / plans) continue;
            if (uniform_unit(rng) < config.saving_density) {
                const auto cap = static_cast<std::int64_t>(std::min(costs[i], costs[j]));
                savings.push_back({i, j, static_cast<double>(uniform_int(rng, 1, cap))});
            }
        }
    }
    return MqoProblem(std::vector<std::size_t>(queries, plans), std::move(costs),
                      std::move(savings), config.epsilon);
}

// ---------------------------------------------------------------------------
// JSON file format:
//   {"queries": [[3,13],[21,1]], "savings": [{"i":1,"j":2,"value":14}], "epsilon": 1}

class ProblemParseError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline nlohmann::json number_json(double v) {
    if (std::floor(v) == v && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
    return v;
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

inline double require_number(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number()) throw ProblemParseError(field + ": expected a number");
    return j.get<double>();
}

inline std::size_t require_index(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
        throw ProblemParseError(field + ": expected a non-negative integer plan index");
    }
    return j.get<std::size_t>();
}

}  // namespace detail

inline nlohmann::json to_json(const MqoProblem& problem) {
    nlohmann::json queries = nlohmann::json::array();
    std::size_t plan = 0;
    for (std::size_t count : problem.query_plan_counts()) {
        nlohmann::json q = nlohmann::json::array();
        for (std::size_t k = 0; k < count; ++k, ++plan) {
            q.push_back(detail::number_json(problem.plan_costs()[plan]));
        }
        queries.push_back(std::move(q));
    }
    nlohmann::json savings = nlohmann::json::array();
    for (const auto& s : problem.savings()) {
        nlohmann::json e = nlohmann::json::object();
        e["i"] = s.i;
        e["j"] = s.j;
        e["value"] = detail::number_json(s.value);
        savings.push_back(std::move(e));
    }
    nlohmann::json out = nlohmann::json::object();
    out["queries"] = std::move(queries);
    out["savings"] = std::move(savings);
    out["epsilon"] = detail::number_json(problem.epsilon());
    return out;
}

inline MqoProblem from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ProblemParseError("top level: expected an object");
    if (!j.contains("queries") || !j["queries"].is_array()) {
        throw ProblemParseError("queries: missing or not an array");
    }
    std::vector<std::vector<double>> queries;
    for (std::size_t q = 0; q < j["queries"].size(); ++q) {
        const auto& row = j["queries"][q];
        const std::string field = "queries[" + std::to_string(q) + "]";
        if (!row.is_array()) throw ProblemParseError(field + ": expected an array of plan costs");
        std::vector<double> costs;
        for (std::size_t k = 0; k < row.size(); ++k) {
            costs.push_back(detail::require_number(row[k], field + "[" + std::to_string(k) + "]"));
        }
        queries.push_back(std::move(costs));
    }
    std::vector<Saving> savings;
    if (j.contains("savings")) {
        if (!j["savings"].is_array()) throw ProblemParseError("savings: expected an array");
        for (std::size_t k = 0; k < j["savings"].size(); ++k) {
            const auto& e = j["savings"][k];
            const std::string field = "savings[" + std::to_string(k) + "]";
            if (!e.is_object()) throw ProblemParseError(field + ": expected an object");
            for (const char* key : {"i", "j", "value"}) {
                if (!e.contains(key)) throw ProblemParseError(field + "." + key + ": missing");
            }
            savings.push_back({detail::require_index(e["i"], field + ".i"),
                               detail::require_index(e["j"], field + ".j"),
                               detail::require_number(e["value"], field + ".value")});
        }
    }
    double epsilon = 1.0;
    if (j.contains("epsilon")) epsilon = detail::require_number(j["epsilon"], "epsilon");
    try {
        return MqoProblem::from_queries(queries, std::move(savings), epsilon);
    } catch (const std::invalid_argument& e) {
        throw ProblemParseError(e.what());
    }
}

/// Parses problem JSON text. Syntax errors carry the line number; warnings
/// (savings larger than both plan costs together) are appended when given.
inline MqoProblem parse_problem(const std::string& text,
                                std::vector<std::string>* warnings = nullptr) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProblemParseError("line " + std::to_string(detail::line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                                e.what());
    }
    MqoProblem problem = from_json(j);
    if (warnings) {
        auto w = problem.soft_warnings();
        warnings->insert(warnings->end(), w.begin(), w.end());
    }
    return problem;
}

inline std::string serialize_problem(const MqoProblem& problem) {
    return to_json(problem).dump(2) + "\n";
}

inline MqoProblem load_problem(const std::string& path,
                               std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProblemParseError(path + ": cannot open");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_problem(text, warnings);
    } catch (const ProblemParseError& e) {
        throw ProblemParseError(path + ": " + e.what());
    }
}

inline void save_problem(const MqoProblem& problem, std::ostream& out) {
    out << serialize_problem(problem);
}

}  // namespace qmqo
