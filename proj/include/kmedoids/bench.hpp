#pragma once

// Benchmark harness: seeded restarts over shuffled inputs, per-run rows,
// per-cell and per-method aggregates, CSV and JSON reports.

#include "kmedoids/eval.hpp"
#include "kmedoids/ingest.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace kmedoids {

struct BenchRow {
    std::string instance;
    std::string method;
    std::string init;
    std::size_t restart = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t k = 0;
    double loss = 0.0;
    std::optional<double> normalized_loss;
    std::optional<bool> optimal;
    std::size_t n_iterations = 0;
    std::size_t n_swaps = 0;
    bool converged = true;
    double init_time = 0.0;
    double optimize_time = 0.0;
    double total_time = 0.0;
    std::vector<PointIndex> medoids;
    std::string error;

    bool ok() const noexcept { return error.empty(); }
    friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

/// Statistics of one (instance, method, init) cell over its successful runs.
struct CellAggregate {
    std::string instance;
    std::string method;
    std::string init;
    std::size_t runs = 0;
    std::size_t errors = 0;
    double mean_loss = 0.0;
    double min_loss = 0.0;
    double sd_loss = 0.0;
    std::optional<double> mean_normalized;
    std::optional<double> min_normalized;
    std::optional<double> sd_normalized;
    std::size_t optimal_count = 0;
    double mean_iterations = 0.0;
    double mean_swaps = 0.0;
    double mean_init_time = 0.0;
    double mean_optimize_time = 0.0;

    friend bool operator==(const CellAggregate&, const CellAggregate&) = default;
};

/// One line of the method summary: a (method, init) pair over all
/// instances that have a known optimum.
struct MethodSummary {
    std::string method;
    std::string init;
    std::size_t instances = 0;
    /// Mean over instances of the per-instance mean normalized loss.
    std::optional<double> mean_normalized;
    /// Mean over instances of the best normalized loss among restarts.
    std::optional<double> min_normalized;
    /// Instances where at least one restart hit the optimum.
    std::size_t optimal_instances = 0;
    /// Mean over instances of the standard deviation across restarts.
    std::optional<double> sigma_rand;
    /// Standard deviation over instances of the per-instance means.
    std::optional<double> sigma_data;
    double mean_iterations = 0.0;
    double mean_swaps = 0.0;
    double mean_optimize_time = 0.0;

    friend bool operator==(const MethodSummary&, const MethodSummary&) = default;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<CellAggregate> cells;
    std::vector<MethodSummary> summary;
};

struct BenchOptions {
    std::size_t restarts = 10;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    /// Run one extra untimed repetition per cell before the measured ones.
    bool warmup = true;
    /// When false, all times are reported as zero so that reports are
    /// byte-identical across invocations.
    bool record_timings = true;
    /// Shuffle the input order of every restart.
    bool shuffle = true;
    std::size_t baseline_draws = 100;
};

struct BenchInstance {
    std::string name;
    std::optional<ProblemInstance> problem;
    /// Set when the instance could not be loaded; produces error rows.
    std::string load_error;
};

/// Seed of run `restart` on instance number `instance`; shared by all cells so
/// that every method sees the same input orders and random starts.
std::uint64_t run_seed(std::uint64_t seed, std::size_t instance, std::size_t restart) noexcept;

BenchReport bench_run(const std::vector<BenchInstance>& instances, const std::vector<MethodSpec>& grid,
                      const BenchOptions& options);

/// Rebuilds cells and summary from rows. Pure; order follows first appearance.
void aggregate(BenchReport& report);

std::string report_csv(const BenchReport& report);
nlohmann::json report_json(const BenchReport& report);
/// Parses the rows of a JSON report (aggregates are ignored).
std::vector<BenchRow> rows_from_json(const nlohmann::json& json);
/// True when re-aggregating the serialized rows reproduces the serialized aggregates.
bool verify_report_json(const nlohmann::json& json);

/// Fixed-width text table of the summary.
std::string summary_table(const BenchReport& report);

}  // namespace kmedoids
