#include "kmedoids/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

namespace kmedoids {

namespace {

struct Stats {
    double mean = 0.0, min = 0.0, sd = 0.0;
};

Stats stats_of(const std::vector<double>& values) {
    Stats s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    s.min = *std::min_element(values.begin(), values.end());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return s;
}

double mean_of(const std::vector<double>& values) { return stats_of(values).mean; }

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

BenchRow error_row(const std::string& instance, const MethodSpec& spec, std::size_t restart, std::uint64_t seed,
                   std::string error) {
    BenchRow row;
    row.instance = instance;
    row.method = std::string(to_string(spec.method));
    row.init = std::string(to_string(effective_init(spec)));
    row.restart = restart;
    row.seed = seed;
    row.error = std::move(error);
    return row;
}

struct PreparedInstance {
    std::optional<double> baseline;
    std::string error;
};

BenchRow run_one(const BenchInstance& instance, const PreparedInstance& prepared, std::size_t index,
                 const MethodSpec& spec, std::size_t restart, const BenchOptions& options) {
    const std::uint64_t seed = run_seed(options.seed, index, restart);
    if (!instance.problem) return error_row(instance.name, spec, restart, seed, instance.load_error);
    if (!prepared.error.empty()) return error_row(instance.name, spec, restart, seed, prepared.error);
    const ProblemInstance& problem = *instance.problem;
    const DissimilarityMatrix& matrix = problem.matrix;
    const std::size_t n = matrix.size();
    try {
        const auto start = detail::Clock::now();
        std::vector<PointIndex> order(n);
        std::iota(order.begin(), order.end(), PointIndex{0});
        if (options.shuffle) {
            Rng rng(derive_seed(seed, 0));
            detail::draw_without_replacement(order, n, rng);
        }
        const IndexedView view(matrix, order);
        RunOutcome outcome = run_method(view, problem.k, spec, derive_seed(seed, 1));

        std::vector<PointIndex> medoids;
        medoids.reserve(outcome.result.medoids.size());
        for (PointIndex m : outcome.result.medoids) medoids.push_back(order[m]);
        const double loss = total_deviation(matrix, MedoidSet(medoids, n));
        const double total = detail::seconds_since(start);

        BenchRow row;
        row.instance = instance.name;
        row.method = std::string(to_string(spec.method));
        row.init = std::string(to_string(outcome.init));
        row.restart = restart;
        row.seed = seed;
        row.n = n;
        row.k = problem.k;
        row.loss = loss;
        row.n_iterations = outcome.result.n_iterations;
        row.n_swaps = outcome.result.n_swaps;
        row.converged = outcome.result.converged;
        if (options.record_timings) {
            row.init_time = outcome.init_time;
            row.optimize_time = outcome.optimize_time;
            row.total_time = total;
        }
        row.medoids = std::move(medoids);
        if (problem.known_optimum) {
            const double opt = *problem.known_optimum;
            row.normalized_loss = normalized_loss(loss, opt, *prepared.baseline);
            row.optimal = std::abs(loss - opt) <= 1e-6;
            if (loss < opt - 1e-6) row.error = "loss " + format_double(loss) + " is below the known optimum";
        }
        return row;
    } catch (const std::exception& e) {
        return error_row(instance.name, spec, restart, seed, e.what());
    }
}

}  // namespace

std::uint64_t run_seed(std::uint64_t seed, std::size_t instance, std::size_t restart) noexcept {
    return derive_seed(derive_seed(seed, instance), restart);
}

BenchReport bench_run(const std::vector<BenchInstance>& instances, const std::vector<MethodSpec>& grid,
                      const BenchOptions& options) {
    if (grid.empty()) throw std::invalid_argument("benchmark grid is empty");
    if (options.restarts < 1) throw std::invalid_argument("restarts must be at least 1");

    std::vector<PreparedInstance> prepared(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& problem = instances[i].problem;
        if (!problem || !problem->known_optimum) continue;
        try {
            prepared[i].baseline = random_baseline(problem->matrix, problem->k, options.baseline_draws,
                                                   derive_seed(derive_seed(options.seed, i), ~std::uint64_t{0}));
            normalized_loss(*problem->known_optimum, *problem->known_optimum, *prepared[i].baseline);
        } catch (const std::exception& e) {
            prepared[i].error = e.what();
        }
    }

    struct Task {
        std::size_t instance, cell, restart;
        bool warmup;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (std::size_t c = 0; c < grid.size(); ++c) {
            if (options.warmup && instances[i].problem) tasks.push_back({i, c, 0, true});
            for (std::size_t r = 0; r < options.restarts; ++r) tasks.push_back({i, c, r, false});
        }
    }

    BenchReport report;
    report.rows.resize(instances.size() * grid.size() * options.restarts);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const Task& task = tasks[t];
            BenchRow row = run_one(instances[task.instance], prepared[task.instance], task.instance, grid[task.cell],
                                   task.restart, options);
            if (task.warmup) continue;
            report.rows[(task.instance * grid.size() + task.cell) * options.restarts + task.restart] = std::move(row);
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    aggregate(report);
    return report;
}

void aggregate(BenchReport& report) {
    report.cells.clear();
    report.summary.clear();

    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> cell_index;
    std::vector<std::vector<const BenchRow*>> cell_rows;
    for (const BenchRow& row : report.rows) {
        const auto key = std::make_tuple(row.instance, row.method, row.init);
        auto [it, inserted] = cell_index.try_emplace(key, report.cells.size());
        if (inserted) {
            CellAggregate cell;
            cell.instance = row.instance;
            cell.method = row.method;
            cell.init = row.init;
            report.cells.push_back(cell);
            cell_rows.emplace_back();
        }
        cell_rows[it->second].push_back(&row);
    }

    for (std::size_t c = 0; c < report.cells.size(); ++c) {
        CellAggregate& cell = report.cells[c];
        std::vector<double> losses, normalized, iterations, swaps, init_times, optimize_times;
        bool all_normalized = true;
        for (const BenchRow* row : cell_rows[c]) {
            if (!row->ok()) {
                ++cell.errors;
                continue;
            }
            ++cell.runs;
            losses.push_back(row->loss);
            if (row->normalized_loss) {
                normalized.push_back(*row->normalized_loss);
            } else {
                all_normalized = false;
            }
            if (row->optimal.value_or(false)) ++cell.optimal_count;
            iterations.push_back(static_cast<double>(row->n_iterations));
            swaps.push_back(static_cast<double>(row->n_swaps));
            init_times.push_back(row->init_time);
            optimize_times.push_back(row->optimize_time);
        }
        if (cell.runs == 0) continue;
        const Stats loss = stats_of(losses);
        cell.mean_loss = loss.mean;
        cell.min_loss = loss.min;
        cell.sd_loss = loss.sd;
        if (all_normalized) {
            const Stats norm = stats_of(normalized);
            cell.mean_normalized = norm.mean;
            cell.min_normalized = norm.min;
            cell.sd_normalized = norm.sd;
        }
        cell.mean_iterations = mean_of(iterations);
        cell.mean_swaps = mean_of(swaps);
        cell.mean_init_time = mean_of(init_times);
        cell.mean_optimize_time = mean_of(optimize_times);
    }

    std::map<std::pair<std::string, std::string>, std::size_t> summary_index;
    std::vector<std::vector<const CellAggregate*>> summary_cells;
    for (const CellAggregate& cell : report.cells) {
        auto [it, inserted] = summary_index.try_emplace({cell.method, cell.init}, report.summary.size());
        if (inserted) {
            MethodSummary summary;
            summary.method = cell.method;
            summary.init = cell.init;
            report.summary.push_back(summary);
            summary_cells.emplace_back();
        }
        summary_cells[it->second].push_back(&cell);
    }
    for (std::size_t s = 0; s < report.summary.size(); ++s) {
        MethodSummary& summary = report.summary[s];
        std::vector<double> means, mins, sds, iterations, swaps, times;
        for (const CellAggregate* cell : summary_cells[s]) {
            if (cell->runs == 0) continue;
            iterations.push_back(cell->mean_iterations);
            swaps.push_back(cell->mean_swaps);
            times.push_back(cell->mean_optimize_time);
            if (!cell->mean_normalized) continue;
            ++summary.instances;
            means.push_back(*cell->mean_normalized);
            mins.push_back(*cell->min_normalized);
            sds.push_back(*cell->sd_normalized);
            if (cell->optimal_count > 0) ++summary.optimal_instances;
        }
        if (!means.empty()) {
            const Stats across = stats_of(means);
            summary.mean_normalized = across.mean;
            summary.sigma_data = across.sd;
            summary.min_normalized = mean_of(mins);
            summary.sigma_rand = mean_of(sds);
        }
        summary.mean_iterations = mean_of(iterations);
        summary.mean_swaps = mean_of(swaps);
        summary.mean_optimize_time = mean_of(times);
    }
}

std::string report_csv(const BenchReport& report) {
    std::string out =
        "instance,method,init,restart,seed,n,k,loss,normalized_loss,optimal,iterations,swaps,converged,"
        "init_time,optimize_time,total_time,medoids,error\n";
    for (const BenchRow& row : report.rows) {
        std::string medoids;
        for (std::size_t i = 0; i < row.medoids.size(); ++i) {
            if (i) medoids += ' ';
            medoids += std::to_string(row.medoids[i]);
        }
        out += csv_field(row.instance) + ',' + row.method + ',' + row.init + ',' + std::to_string(row.restart) + ',' +
               std::to_string(row.seed) + ',' + std::to_string(row.n) + ',' + std::to_string(row.k) + ',' +
               format_double(row.loss) + ',' + (row.normalized_loss ? format_double(*row.normalized_loss) : "") +
               ',' + (row.optimal ? (*row.optimal ? "1" : "0") : "") + ',' + std::to_string(row.n_iterations) +
               ',' + std::to_string(row.n_swaps) + ',' + (row.converged ? "1" : "0") + ',' +
               format_double(row.init_time) + ',' + format_double(row.optimize_time) + ',' +
               format_double(row.total_time) + ',' + medoids + ',' + csv_field(row.error) + '\n';
    }
    return out;
}

nlohmann::json report_json(const BenchReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const BenchRow& row : report.rows) {
        rows.push_back({{"instance", row.instance},
                        {"method", row.method},
                        {"init", row.init},
                        {"restart", row.restart},
                        {"seed", row.seed},
                        {"n", row.n},
                        {"k", row.k},
                        {"loss", row.loss},
                        {"normalized_loss", optional_json(row.normalized_loss)},
                        {"optimal", optional_json(row.optimal)},
                        {"iterations", row.n_iterations},
                        {"swaps", row.n_swaps},
                        {"converged", row.converged},
                        {"init_time", row.init_time},
                        {"optimize_time", row.optimize_time},
                        {"total_time", row.total_time},
                        {"medoids", row.medoids},
                        {"error", row.error}});
    }
    nlohmann::json cells = nlohmann::json::array();
    for (const CellAggregate& c : report.cells) {
        cells.push_back({{"instance", c.instance},
                         {"method", c.method},
                         {"init", c.init},
                         {"runs", c.runs},
                         {"errors", c.errors},
                         {"mean_loss", c.mean_loss},
                         {"min_loss", c.min_loss},
                         {"sd_loss", c.sd_loss},
                         {"mean_normalized", optional_json(c.mean_normalized)},
                         {"min_normalized", optional_json(c.min_normalized)},
                         {"sd_normalized", optional_json(c.sd_normalized)},
                         {"optimal_count", c.optimal_count},
                         {"mean_iterations", c.mean_iterations},
                         {"mean_swaps", c.mean_swaps},
                         {"mean_init_time", c.mean_init_time},
                         {"mean_optimize_time", c.mean_optimize_time}});
    }
    nlohmann::json summary = nlohmann::json::array();
    for (const MethodSummary& s : report.summary) {
        summary.push_back({{"method", s.method},
                           {"init", s.init},
                           {"instances", s.instances},
                           {"mean_normalized", optional_json(s.mean_normalized)},
                           {"min_normalized", optional_json(s.min_normalized)},
                           {"optimal_instances", s.optimal_instances},
                           {"sigma_rand", optional_json(s.sigma_rand)},
                           {"sigma_data", optional_json(s.sigma_data)},
                           {"mean_iterations", s.mean_iterations},
                           {"mean_swaps", s.mean_swaps},
                           {"mean_optimize_time", s.mean_optimize_time}});
    }
    return {{"rows", rows}, {"cells", cells}, {"summary", summary}};
}

std::vector<BenchRow> rows_from_json(const nlohmann::json& json) {
    std::vector<BenchRow> rows;
    for (const auto& j : json.at("rows")) {
        BenchRow row;
        row.instance = j.at("instance").get<std::string>();
        row.method = j.at("method").get<std::string>();
        row.init = j.at("init").get<std::string>();
        row.restart = j.at("restart").get<std::size_t>();
        row.seed = j.at("seed").get<std::uint64_t>();
        row.n = j.at("n").get<std::size_t>();
        row.k = j.at("k").get<std::size_t>();
        row.loss = j.at("loss").get<double>();
        row.normalized_loss = optional_from<double>(j.at("normalized_loss"));
        row.optimal = optional_from<bool>(j.at("optimal"));
        row.n_iterations = j.at("iterations").get<std::size_t>();
        row.n_swaps = j.at("swaps").get<std::size_t>();
        row.converged = j.at("converged").get<bool>();
        row.init_time = j.at("init_time").get<double>();
        row.optimize_time = j.at("optimize_time").get<double>();
        row.total_time = j.at("total_time").get<double>();
        row.medoids = j.at("medoids").get<std::vector<PointIndex>>();
        row.error = j.at("error").get<std::string>();
        rows.push_back(std::move(row));
    }
    return rows;
}

bool verify_report_json(const nlohmann::json& json) {
    BenchReport rebuilt;
    rebuilt.rows = rows_from_json(json);
    aggregate(rebuilt);
    const nlohmann::json again = report_json(rebuilt);
    return again.at("cells") == json.at("cells") && again.at("summary") == json.at("summary");
}

std::string summary_table(const BenchReport& report) {
    auto pct = [](const std::optional<double>& v) {
        char buf[32];
        if (!v) return std::string("-");
        std::snprintf(buf, sizeof buf, "%.1f%%", *v);
        return std::string(buf);
    };
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %-13s %5s %8s %8s %8s %8s %8s %9s %8s %10s\n", "method", "init", "inst",
                  "mean", "min", "optimal", "s_rand", "s_data", "iter", "swaps", "time[s]");
    out << line;
    for (const MethodSummary& s : report.summary) {
        std::snprintf(line, sizeof line, "%-12s %-13s %5zu %8s %8s %8zu %8s %8s %9.1f %8.1f %10.4f\n",
                      s.method.c_str(), s.init.c_str(), s.instances, pct(s.mean_normalized).c_str(),
                      pct(s.min_normalized).c_str(), s.optimal_instances, pct(s.sigma_rand).c_str(),
                      pct(s.sigma_data).c_str(), s.mean_iterations, s.mean_swaps, s.mean_optimize_time);
        out << line;
    }
    return out.str();
}

}  // namespace kmedoids
