#include "ticp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ticp/dataset.hpp"

namespace ticp {

namespace {

std::string strategy_label(const AlgorithmSpec& a) {
    if (a.algorithm == Algorithm::ICP_LIE || a.algorithm == Algorithm::SWC_LIE)
        return a.strategy == 0 ? "0" : "1";
    return "-";
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

std::string fmt15(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

void mark_best(std::vector<SweepRow>& rows) {
    std::vector<std::string> scenarios;
    for (const SweepRow& r : rows)
        if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end())
            scenarios.push_back(r.scenario);

    for (const std::string& scn : scenarios) {
        for (int g = 0; g < 2; ++g) {
            const std::string tag = g == 0 ? "0" : "1";
            double best = std::numeric_limits<double>::infinity();
            for (const SweepRow& r : rows) {
                if (r.scenario != scn || !r.ok) continue;
                if (r.strategy != "-" && r.strategy != tag) continue;
                best = std::min(best, r.final_mrms);
            }
            if (!std::isfinite(best)) continue;
            for (SweepRow& r : rows) {
                if (r.scenario != scn || !r.ok) continue;
                if (r.strategy != "-" && r.strategy != tag) continue;
                if (r.final_mrms == best) {
                    if (!r.best.empty()) r.best += ";";
                    r.best += tag;
                }
            }
        }
    }
}

}  // namespace

std::vector<SweepRow> sweep_grid(const SweepSpec& spec) {
    if (spec.algorithms.empty() || spec.k_percents.empty() || spec.scenario_paths.empty())
        throw std::invalid_argument("sweep: algorithms, k_percents and scenarios must be nonempty");

    struct LoadedScenario {
        bool ok = false;
        Scenario scn;
        std::string error;
        std::string label;
    };
    std::vector<LoadedScenario> loaded(spec.scenario_paths.size());
    for (size_t i = 0; i < spec.scenario_paths.size(); ++i) {
        try {
            loaded[i].scn = load_scenario(spec.scenario_paths[i]);
            loaded[i].ok = true;
            loaded[i].label = loaded[i].scn.tag;
        } catch (const std::exception& e) {
            loaded[i].error = e.what();
            loaded[i].label = spec.scenario_paths[i];
        }
    }

    struct Task {
        size_t scenario_i, algo_i, k_i;
    };
    std::vector<Task> tasks;
    for (size_t s = 0; s < spec.scenario_paths.size(); ++s)
        for (size_t a = 0; a < spec.algorithms.size(); ++a)
            for (size_t k = 0; k < spec.k_percents.size(); ++k) tasks.push_back({s, a, k});

    std::vector<SweepRow> rows(tasks.size());
    auto run_task = [&](size_t ti) {
        const Task& t = tasks[ti];
        const LoadedScenario& ls = loaded[t.scenario_i];
        const AlgorithmSpec& alg = spec.algorithms[t.algo_i];
        SweepRow& row = rows[ti];
        row.scenario = ls.label;
        row.algorithm = algorithm_name(alg.algorithm, alg.strategy);
        row.strategy = strategy_label(alg);
        row.k_percent = spec.k_percents[t.k_i];
        row.final_mrms = std::numeric_limits<double>::quiet_NaN();
        if (!ls.ok) {
            row.status = sanitize(ls.error);
            return;
        }
        RegistrationConfig cfg = spec.base;
        cfg.algorithm = alg.algorithm;
        cfg.strategy = alg.strategy;
        cfg.k_percent = spec.k_percents[t.k_i];
        cfg.tau = spec.tau ? *spec.tau : (ls.scn.tag == "hole" ? 0.1 : 0.0);
        try {
            RunReport rep = run(ls.scn.source, ls.scn.target, cfg);
            row.iterations = rep.iterations_used;
            double best_match_mrms = std::numeric_limits<double>::infinity();
            for (const IterationRecord& it : rep.per_iteration)
                best_match_mrms = std::min(best_match_mrms, it.mrms);
            if (ls.scn.correspondence)
                row.final_mrms = std::sqrt(correspondence_mse(ls.scn, rep.final_transform));
            else
                row.final_mrms = best_match_mrms;
            row.ok = true;
            row.status = "ok";
        } catch (const std::exception& e) {
            row.status = sanitize(e.what());
        }
    };

    size_t jobs = static_cast<size_t>(std::max(spec.jobs, 1));
    jobs = std::min(jobs, tasks.size());
    if (jobs <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (size_t j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                    run_task(i);
            });
        for (std::thread& th : pool) th.join();
    }

    mark_best(rows);
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "strategy,scenario,algorithm,k_percent,final_mrms,best,status\n";
    for (const SweepRow& r : rows) {
        out += r.strategy;
        out += ',';
        out += sanitize(r.scenario);
        out += ',';
        out += r.algorithm;
        out += ',';
        out += fmt15(r.k_percent);
        out += ',';
        if (std::isfinite(r.final_mrms)) out += fmt15(r.final_mrms);
        out += ',';
        out += r.best;
        out += ',';
        out += r.status;
        out += '\n';
    }
    return out;
}

}  // namespace ticp
