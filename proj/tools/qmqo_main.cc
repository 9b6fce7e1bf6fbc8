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

// qmqo command-line front end.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qmqo/qmqo.hpp"

namespace {

using namespace qmqo;

// ---- plumbing --------------------------------------------------------------

std::size_t thread_cap() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QMQO_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1) throw std::invalid_argument("QMQO_THREADS must be a positive integer");
        n = std::min(n, static_cast<std::size_t>(v));
    }
    return n;
}

/// Runs body(i) for i in [0, count) on up to thread_cap() workers. The first
/// exception thrown by any cell is rethrown after all workers stop.
template <typename F>
void parallel_for(std::size_t count, F&& body) {
    const std::size_t workers = std::min(thread_cap(), count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
}

/// Writes to path via a sibling temporary and rename, or to stdout when
/// path is empty.
void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
    }
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_double(v);
}

/// "1,2,5" or "1:4" or a mix ("1:3,8").
std::vector<std::uint64_t> parse_list(const std::string& text, const std::string& flag) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty() || s.front() == '-') {
            throw std::invalid_argument(flag + ": bad value '" + s + "'");
        }
        return static_cast<std::uint64_t>(v);
    };
    while (std::getline(ss, item, ',')) {
        if (const auto colon = item.find(':'); colon != std::string::npos) {
            const auto lo = number(item.substr(0, colon)), hi = number(item.substr(colon + 1));
            if (hi < lo) throw std::invalid_argument(flag + ": empty range '" + item + "'");
            for (auto v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(number(item));
        }
    }
    if (out.empty()) throw std::invalid_argument(flag + " must not be empty");
    return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw std::invalid_argument(flag + ": bad value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument(flag + " must not be empty");
    return out;
}

/// Instance seed for cell (queries, plans, index) of a sweep.
std::uint64_t instance_seed(std::uint64_t base, std::size_t queries, std::size_t plans, std::size_t index) {
    Rng rng = make_rng(base, (std::uint64_t{queries} << 40) ^ (std::uint64_t{plans} << 20) ^ index);
    return rng();
}

// ---- problem source ----------------------------------------------------------

struct ProblemSource {
    std::string file;
    std::size_t queries = 0;
    std::size_t plans = 0;
    std::uint64_t instance_seed = 0;
    double density = GeneratorConfig{}.saving_density;

    void add_to(CLI::App* cmd, bool allow_generator) {
        auto* f = cmd->add_option("--problem", file, "problem JSON file");
        if (!allow_generator) {
            f->required();
            return;
        }
        auto* q = cmd->add_option("--queries", queries, "generate: number of queries");
        auto* p = cmd->add_option("--plans", plans, "generate: plans per query");
        cmd->add_option("--instance-seed", instance_seed, "generate: instance seed");
        cmd->add_option("--density", density, "generate: saving density");
        f->excludes(q)->excludes(p);
    }

    MqoProblem load() const {
        if (!file.empty()) {
            std::vector<std::string> warnings;
            auto problem = load_problem(file, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
            return problem;
        }
        if (queries == 0 || plans == 0) {
            throw std::invalid_argument("need --problem or both --queries and --plans");
        }
        GeneratorConfig cfg;
        cfg.saving_density = density;
        return generate_random(queries, plans, instance_seed, cfg);
    }
};

// ---- commands ----------------------------------------------------------------

struct GenerateArgs {
    std::size_t queries = 2, plans = 2;
    std::uint64_t seed = 0;
    GeneratorConfig cfg;
    std::string out;
};

void cmd_generate(const GenerateArgs& a) {
    write_output(a.out, serialize_problem(generate_random(a.queries, a.plans, a.seed, a.cfg)));
}

void cmd_brute(const ProblemSource& src) {
    const auto r = brute_force(src.load());
    std::cout << bits_to_string(r.solution.bits) << " cost=" << fmt(r.value) << "\n";
}

struct QaoaArgs {
    ProblemSource source;
    std::string p = "1";
    std::string seeds = "0";
    std::string optimizer = "powell";
    std::string strategy = "fourier";
    std::string convention = "ising-exact";
    std::size_t restarts = 1;
    std::size_t budget = 2000;
    std::size_t shots = 0;
    std::string out;
};

void cmd_qaoa(const QaoaArgs& a) {
    const auto problem = a.source.load();
    const auto qubo = encode(problem);
    const auto depths = parse_list(a.p, "--p");
    const auto seeds = parse_list(a.seeds, "--seed");
    QaoaOptions base;
    base.optimizer = parse_optimizer(a.optimizer);
    base.strategy = parse_strategy(a.strategy);
    base.convention = parse_convention(a.convention);
    base.restarts = a.restarts;
    base.budget = a.budget;
    base.shots = a.shots;

    struct Cell {
        std::uint64_t seed;
        std::size_t p;
        QaoaResult result;
    };
    std::vector<Cell> cells;
    for (auto s : seeds)
        for (auto p : depths) cells.push_back({s, static_cast<std::size_t>(p), {}});
    std::sort(cells.begin(), cells.end(),
              [](const Cell& x, const Cell& y) { return std::tie(x.seed, x.p) < std::tie(y.seed, y.p); });
    parallel_for(cells.size(), [&](std::size_t i) {
        QaoaOptions opt = base;
        opt.seed = cells[i].seed;
        opt.p = cells[i].p;
        cells[i].result = optimize(qubo, problem, opt);
    });

    std::string csv = "seed,p,optimizer,strategy,approx_ratio,success_prob,evaluations,best_expectation\n";
    for (const auto& c : cells) {
        csv += std::to_string(c.seed) + "," + std::to_string(c.p) + "," +
               std::string(optimizer_name(base.optimizer)) + "," + std::string(strategy_name(base.strategy)) +
               "," + fmt(c.result.approx_ratio) + "," + fmt(c.result.success_probability) + "," +
               std::to_string(c.result.evaluations) + "," + fmt(c.result.best_expectation) + "\n";
    }
    write_output(a.out, csv);

    std::ostream& log = a.out.empty() ? std::cerr : std::cout;
    std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.p < y.p; });
    for (std::size_t i = 0; i < cells.size();) {
        std::size_t j = i;
        double ratio = 0, success = 0;
        for (; j < cells.size() && cells[j].p == cells[i].p; ++j) {
            ratio += cells[j].result.approx_ratio;
            success += cells[j].result.success_probability;
        }
        const auto k = static_cast<double>(j - i);
        log << "p=" << cells[i].p << " seeds=" << j - i << " mean_approx_ratio=" << fmt(ratio / k)
            << " mean_success_prob=" << fmt(success / k) << "\n";
        i = j;
    }
}

struct GapArgs {
    ProblemSource source;
    std::size_t grid = 201;
    std::string convention = "raw";
    std::string out;
};

void cmd_gap(const GapArgs& a) {
    GapOptions opt;
    opt.grid_points = a.grid;
    opt.convention = parse_gap_convention(a.convention);
    const auto prof = gap_profile(encode(a.source.load()), opt);
    std::string csv = "s,e0,e1,gap\n";
    for (std::size_t k = 0; k < prof.s_grid.size(); ++k) {
        csv += fmt(prof.s_grid[k]) + "," + fmt(prof.e0[k]) + "," + fmt(prof.e1[k]) + "," +
               fmt(prof.e1[k] - prof.e0[k]) + "\n";
    }
    write_output(a.out, csv);
    for (const auto& w : prof.warnings) std::cerr << "warning: " << w << "\n";
    std::ostream& log = a.out.empty() ? std::cerr : std::cout;
    log << "convention=" << gap_convention_name(prof.convention) << " delta_min=" << fmt(prof.delta_min)
        << " s_star=" << fmt(prof.s_at_min) << " T=" << fmt(prof.annealing_time) << "\n";
}

struct BenchArgs {
    std::string queries = "2";
    std::string plans = "2";
    std::string p = "1:3";
    std::size_t instances = 50;
    std::uint64_t seed = 0;
    std::string optimizer = "powell";
    std::string strategy = "fourier";
    std::size_t restarts = 1;
    std::size_t budget = 2000;
    std::string out;
};

void cmd_bench(const BenchArgs& a) {
    const auto qs = parse_list(a.queries, "--queries");
    const auto ps = parse_list(a.plans, "--plans");
    const auto depths = parse_list(a.p, "--p");
    if (a.instances == 0) throw std::invalid_argument("--instances must be positive");
    QaoaOptions base;
    base.optimizer = parse_optimizer(a.optimizer);
    base.strategy = parse_strategy(a.strategy);
    base.restarts = a.restarts;
    base.budget = a.budget;

    struct Job {
        std::size_t q, plans, p, instance;
        double ratio = 0, success = 0;
    };
    std::vector<Job> jobs;
    for (auto q : qs)
        for (auto pl : ps) {
            if (q * pl > kMaxSimulatedQubits) throw std::invalid_argument("Q*P exceeds the simulator limit");
            for (auto p : depths)
                for (std::size_t i = 0; i < a.instances; ++i) jobs.push_back({q, pl, p, i});
        }
    parallel_for(jobs.size(), [&](std::size_t k) {
        auto& j = jobs[k];
        const auto problem = generate_random(j.q, j.plans, instance_seed(a.seed, j.q, j.plans, j.instance));
        QaoaOptions opt = base;
        opt.p = j.p;
        opt.seed = instance_seed(a.seed, j.q, j.plans, j.instance) ^ j.p;
        const auto r = optimize(encode(problem), problem, opt);
        j.ratio = r.approx_ratio;
        j.success = r.success_probability;
    });

    std::string csv = "Q,P,qubits,p,mean_success_prob,mean_approx_ratio\n";
    for (std::size_t k = 0; k < jobs.size(); k += a.instances) {
        double ratio = 0, success = 0;
        for (std::size_t i = k; i < k + a.instances; ++i) {
            ratio += jobs[i].ratio;
            success += jobs[i].success;
        }
        const auto n = static_cast<double>(a.instances);
        const auto& j = jobs[k];
        csv += std::to_string(j.q) + "," + std::to_string(j.plans) + "," + std::to_string(j.q * j.plans) + "," +
               std::to_string(j.p) + "," + fmt(success / n) + "," + fmt(ratio / n) + "\n";
    }
    write_output(a.out, csv);
}

struct CircuitArgs {
    ProblemSource source;
    std::string gammas = "0.5";
    std::string betas = "0.25";
    std::string convention = "ising-exact";
    std::string out;
};

void cmd_circuit(const CircuitArgs& a) {
    QaoaParams params{parse_doubles(a.gammas, "--gamma"), parse_doubles(a.betas, "--beta")};
    const auto circuit = build(encode(a.source.load()), params, parse_convention(a.convention));
    write_output(a.out, emit_text(circuit));
}

void cmd_dump_qubo(const ProblemSource& src, const std::string& out) {
    const auto q = encode(src.load());
    std::string csv = "i,j,value\n";
    for (std::size_t i = 0; i < q.n; ++i) csv += std::to_string(i) + "," + std::to_string(i) + "," + fmt(q.linear[i]) + "\n";
    for (const auto& t : q.quadratic) {
        csv += std::to_string(t.i) + "," + std::to_string(t.j) + "," + fmt(t.coefficient) + "\n";
    }
    write_output(out, csv);
}

// ---- repro -------------------------------------------------------------------

MqoProblem example2_instance() {
    return MqoProblem::from_queries({{3, 13}, {21, 1}}, {{1, 2, 14}}, 1.0);
}

void repro_example2() {
    const auto problem = example2_instance();
    const auto q = encode(problem);
    std::cout << "w_min=" << fmt(q.w_min) << " w_max=" << fmt(q.w_max) << "\n";
    std::cout << "qubo_eval(1011)=" << fmt(qubo_eval(q, {1, 0, 1, 1})) << "\n";
    std::cout << "qubo_eval(1001)=" << fmt(qubo_eval(q, {1, 0, 0, 1})) << "\n";
    const auto b = brute_force(problem);
    std::cout << "brute_force=" << bits_to_string(b.solution.bits) << " cost=" << fmt(b.value) << "\n";
    QaoaOptions opt;
    opt.p = 5;
    opt.optimizer = OptimizerKind::kPowell;
    opt.strategy = Strategy::kFourier;
    opt.restarts = 10;
    const auto r = optimize(q, problem, opt);
    std::cout << "qaoa p=5 fourier powell restarts=10: argmax=" << r.argmax_bitstring
              << " success_prob=" << fmt(r.success_probability) << " approx_ratio=" << fmt(r.approx_ratio)
              << " evaluations=" << r.evaluations << "\n";
}

void repro_fourier_vs_random(std::uint64_t seed, std::size_t instances, const std::string& out) {
    struct Row {
        std::size_t instance;
        double fourier = 0, random = 0;
    };
    std::vector<Row> rows(instances);
    parallel_for(instances, [&](std::size_t i) {
        const auto problem = generate_random(2, 2, instance_seed(seed, 2, 2, i));
        const auto q = encode(problem);
        QaoaOptions opt;
        opt.p = 5;
        opt.seed = instance_seed(seed, 2, 2, i);
        opt.strategy = Strategy::kFourier;
        rows[i].instance = i;
        rows[i].fourier = optimize(q, problem, opt).approx_ratio;
        opt.strategy = Strategy::kRandomInit;
        rows[i].random = optimize(q, problem, opt).approx_ratio;
    });
    std::string csv = "instance,fourier_approx_ratio,random_approx_ratio\n";
    double mf = 0, mr = 0;
    for (const auto& r : rows) {
        csv += std::to_string(r.instance) + "," + fmt(r.fourier) + "," + fmt(r.random) + "\n";
        mf += r.fourier;
        mr += r.random;
    }
    write_output(out, csv);
    std::ostream& log = out.empty() ? std::cerr : std::cout;
    const auto n = static_cast<double>(instances);
    log << "instances=" << instances << " mean_fourier=" << fmt(mf / n) << " mean_random=" << fmt(mr / n) << "\n";
}

void repro_gap_example() {
    auto report = [](const std::string& label, const MqoProblem& problem) {
        const auto q = encode(problem);
        for (auto conv : {GapConvention::kRaw, GapConvention::kNormalized}) {
            GapOptions opt;
            opt.convention = conv;
            const auto prof = gap_profile(q, opt);
            std::cout << label << " convention=" << gap_convention_name(conv) << " delta_min=" << fmt(prof.delta_min)
                      << " s_star=" << fmt(prof.s_at_min) << " T=" << fmt(prof.annealing_time) << "\n";
        }
    };
    report("example2", example2_instance());
    const std::vector<std::vector<double>> hard_costs{{8, 42}, {49, 3}};
    for (double sign : {-1.0, 1.0}) {
        std::vector<Saving> savings{{0, 2, 15}, {0, 3, 12}, {1, 2, 5}, {1, 3, 14}};
        for (auto& s : savings) s.value *= sign;
        report(sign < 0 ? "hard(signed)" : "hard(absolute)", MqoProblem::from_queries(hard_costs, savings, 1.0));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmqo: multiple query optimization with simulated QAOA"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "write a seeded random problem as JSON");
    generate->add_option("--queries", gen.queries)->required();
    generate->add_option("--plans", gen.plans)->required();
    generate->add_option("--seed", gen.seed)->required();
    generate->add_option("--density", gen.cfg.saving_density);
    generate->add_option("--min-cost", gen.cfg.min_cost);
    generate->add_option("--max-cost", gen.cfg.max_cost);
    generate->add_option("--epsilon", gen.cfg.epsilon);
    generate->add_option("--out", gen.out);

    ProblemSource brute_src;
    auto* brute = app.add_subcommand("brute", "exhaustive optimum");
    brute_src.add_to(brute, true);

    QaoaArgs qa;
    auto* qaoa = app.add_subcommand("qaoa", "optimize QAOA parameters; one CSV row per (seed, p)");
    qa.source.add_to(qaoa, true);
    qaoa->add_option("--p", qa.p, "depths: list or a:b range");
    qaoa->add_option("--seed", qa.seeds, "seeds: list or a:b range");
    qaoa->add_option("--optimizer", qa.optimizer);
    qaoa->add_option("--strategy", qa.strategy);
    qaoa->add_option("--convention", qa.convention);
    qaoa->add_option("--restarts", qa.restarts);
    qaoa->add_option("--budget", qa.budget);
    qaoa->add_option("--shots", qa.shots, "0 = exact expectation");
    qaoa->add_option("--out", qa.out);

    GapArgs ga;
    auto* gap = app.add_subcommand("gap", "adiabatic spectral gap profile");
    ga.source.add_to(gap, true);
    gap->add_option("--grid", ga.grid);
    gap->add_option("--convention,--gap-convention", ga.convention, "raw | normalized");
    gap->add_option("--out", ga.out);

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "sweep over a (Q, P, p) grid of random instances");
    bench->add_option("--queries", ba.queries);
    bench->add_option("--plans", ba.plans);
    bench->add_option("--p", ba.p);
    bench->add_option("--instances", ba.instances);
    bench->add_option("--seed", ba.seed);
    bench->add_option("--optimizer", ba.optimizer);
    bench->add_option("--strategy", ba.strategy);
    bench->add_option("--restarts", ba.restarts);
    bench->add_option("--budget", ba.budget);
    bench->add_option("--out", ba.out);

    CircuitArgs ca;
    auto* circuit = app.add_subcommand("circuit", "print the QAOA circuit as text");
    ca.source.add_to(circuit, true);
    circuit->add_option("--gamma", ca.gammas, "comma-separated, one per layer");
    circuit->add_option("--beta", ca.betas, "comma-separated, one per layer");
    circuit->add_option("--convention", ca.convention, "paper-direct | ising-exact");
    circuit->add_option("--out", ca.out);

    ProblemSource dump_src;
    std::string dump_out;
    auto* dump = app.add_subcommand("dump-qubo", "QUBO coefficients as CSV (linear terms on the diagonal)");
    dump_src.add_to(dump, true);
    dump->add_option("--out", dump_out);

    std::string repro_name;
    std::uint64_t repro_seed = 0;
    std::size_t repro_instances = 30;
    std::string repro_out;
    auto* repro = app.add_subcommand("repro", "bundled reproduction runs");
    repro->add_option("name", repro_name, "example2 | fourier-vs-random | gap-example")->required();
    repro->add_option("--seed", repro_seed);
    repro->add_option("--instances", repro_instances);
    repro->add_option("--out", repro_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        thread_cap();  // validate QMQO_THREADS up front
        if (*generate) cmd_generate(gen);
        else if (*brute) cmd_brute(brute_src);
        else if (*qaoa) cmd_qaoa(qa);
        else if (*gap) cmd_gap(ga);
        else if (*bench) cmd_bench(ba);
        else if (*circuit) cmd_circuit(ca);
        else if (*dump) cmd_dump_qubo(dump_src, dump_out);
        else if (*repro) {
            if (repro_name == "example2") repro_example2();
            else if (repro_name == "fourier-vs-random") repro_fourier_vs_random(repro_seed, repro_instances, repro_out);
            else if (repro_name == "gap-example") repro_gap_example();
            else throw std::invalid_argument("unknown repro '" + repro_name + "'");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
