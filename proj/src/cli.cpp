#include "kmedoids/cli.hpp"

#include "kmedoids/bench.hpp"
#include "kmedoids/eval.hpp"
#include "kmedoids/ingest.hpp"
#include "kmedoids/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace kmedoids {

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::map<std::string, InputFormat> format_names{
    {"csv", InputFormat::Csv}, {"orlib", InputFormat::Orlib}, {"matrix", InputFormat::Matrix}};
const std::map<std::string, Metric> metric_names{
    {"euclidean", Metric::Euclidean}, {"manhattan", Metric::Manhattan}, {"sqeuclidean", Metric::SquaredEuclidean}};

std::string format_name(InputFormat f) {
    for (const auto& [name, value] : format_names) {
        if (value == f) return name;
    }
    return "unknown";
}

std::string metric_name(Metric m) {
    for (const auto& [name, value] : metric_names) {
        if (value == m) return name;
    }
    return "unknown";
}

std::vector<std::string> keys(const auto& map) {
    std::vector<std::string> out;
    for (const auto& entry : map) out.push_back(entry.first);
    return out;
}

std::vector<std::string> method_names() {
    std::vector<std::string> out;
    for (Method m : all_methods()) out.emplace_back(to_string(m));
    return out;
}

std::vector<std::string> init_names() {
    std::vector<std::string> out;
    for (InitMethod m : all_inits()) out.emplace_back(to_string(m));
    return out;
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InputError(std::string("invalid ") + what + " '" + text + "'");
    }
    return value;
}

// Explicit --seed, then the environment variable, then the built-in constant.
std::uint64_t resolve_seed(const std::string& flag, std::string& source) {
    if (flag == "random") {
        std::random_device device;
        source = "random";
        return (static_cast<std::uint64_t>(device()) << 32) ^ device();
    }
    if (!flag.empty()) {
        source = "--seed";
        return parse_u64(flag, "seed");
    }
    if (const char* env = std::getenv(seed_env_var); env && *env) {
        source = seed_env_var;
        return parse_u64(env, seed_env_var);
    }
    source = "default";
    return default_seed;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
    if (!out) throw InputError("failed writing " + path.string());
}

struct InputOptions {
    std::string path;
    std::string format;
    std::string metric = "euclidean";

    InputFormat resolved_format() const {
        return format.empty() ? guess_format(path) : format_names.at(format);
    }
    Metric resolved_metric() const { return metric_names.at(metric); }
};

void add_input_options(CLI::App& cmd, InputOptions& input, bool required) {
    auto* opt = cmd.add_option("--input", input.path, "Input file");
    if (required) opt->required();
    cmd.add_option("--format", input.format, "Input format (default: guessed from the extension)")
        ->check(CLI::IsMember(keys(format_names)));
    cmd.add_option("--metric", input.metric, "Metric for vector inputs")
        ->check(CLI::IsMember(keys(metric_names)))
        ->capture_default_str();
}

struct ClusterOptions {
    InputOptions input;
    std::optional<std::size_t> k;
    std::string algo = "fasterpam";
    std::string init;
    std::string seed;
    std::size_t restarts = 1;
    std::size_t max_iter = 2000;
    std::string output;
    std::size_t jobs = 1;
    bool recompute = false;
    std::string optima;
};

template <DissimilarityView V>
RunOutcome best_of_restarts(const V& d, std::size_t k, const MethodSpec& spec, std::uint64_t seed,
                            std::size_t restarts, std::size_t& best_restart, bool& all_converged) {
    std::optional<RunOutcome> best;
    all_converged = true;
    for (std::size_t r = 0; r < restarts; ++r) {
        RunOutcome run = run_method(d, k, spec, derive_seed(seed, r));
        all_converged = all_converged && run.result.converged;
        if (!best || run.result.loss < best->result.loss) {
            best = std::move(run);
            best_restart = r;
        }
    }
    return std::move(*best);
}

int cmd_cluster(const ClusterOptions& o, std::ostream& out, std::ostream& err) {
    std::string seed_source;
    const std::uint64_t seed = resolve_seed(o.seed, seed_source);
    const InputFormat format = o.input.resolved_format();
    const Metric metric = o.input.resolved_metric();
    MethodSpec spec;
    spec.method = *parse_method(o.algo);
    if (!o.init.empty()) spec.init = *parse_init(o.init);
    spec.max_iterations = o.max_iter;
    if (o.restarts < 1) throw InputError("--restarts must be at least 1");
    if (o.max_iter < 1) throw InputError("--max-iter must be at least 1");
    if (o.recompute && format != InputFormat::Csv) throw InputError("--recompute-distances needs a csv input");

    std::optional<ProblemInstance> problem;
    std::optional<VectorData> vectors;
    std::size_t k = 0, n = 0;
    if (o.recompute) {
        vectors = read_vectors_file(o.input.path);
        n = vectors->n;
        if (!o.k) throw InputError("k must be given (the input stores no cluster count)");
        k = *o.k;
        if (k < 1) throw InputError("k must be at least 1");
        if (k >= n) {
            throw InputError("k must be smaller than the number of points (k=" + std::to_string(k) +
                             ", n=" + std::to_string(n) + ")");
        }
    } else {
        const auto optima = o.optima.empty() ? std::map<std::string, double>{} : read_optima_file(o.optima);
        problem = load_instance(o.input.path, format, metric, o.k, optima);
        k = problem->k;
        n = problem->matrix.size();
    }

    out << "# kmedoids cluster\n"
        << "#   input=" << o.input.path << " format=" << format_name(format) << " metric=" << metric_name(metric)
        << " n=" << n << " k=" << k << "\n"
        << "#   algo=" << to_string(spec.method) << " init=" << to_string(effective_init(spec))
        << " max_iter=" << spec.max_iterations << " restarts=" << o.restarts << " jobs=1\n"
        << "#   rng=" << Rng::algorithm_name << " seed=" << seed << " (" << seed_source << ")"
        << " recompute_distances=" << (o.recompute ? "on" : "off")
        << " output=" << (o.output.empty() ? "-" : o.output) << "\n";
    if (o.jobs != 1) out << "#   note: cluster runs restarts sequentially; --jobs ignored\n";

    std::size_t best_restart = 0;
    bool all_converged = true;
    RunOutcome best = o.recompute
                          ? best_of_restarts(OnTheFlyView(*vectors, metric), k, spec, seed, o.restarts, best_restart,
                                             all_converged)
                          : best_of_restarts(problem->matrix, k, spec, seed, o.restarts, best_restart, all_converged);
    const ClusteringResult& r = best.result;
    const double loss = o.recompute ? total_deviation(OnTheFlyView(*vectors, metric), MedoidSet(r.medoids, n))
                                    : total_deviation(problem->matrix, MedoidSet(r.medoids, n));

    nlohmann::json json = {{"algorithm", to_string(spec.method)},
                           {"init", to_string(best.init)},
                           {"rng", Rng::algorithm_name},
                           {"seed", seed},
                           {"restart", best_restart},
                           {"n", n},
                           {"k", k},
                           {"medoids", r.medoids},
                           {"assignment", r.assignment},
                           {"loss", loss},
                           {"iterations", r.n_iterations},
                           {"swaps", r.n_swaps},
                           {"converged", r.converged},
                           {"warnings", r.warnings}};
    if (problem && problem->known_optimum) json["known_optimum"] = *problem->known_optimum;
    if (!o.output.empty()) write_file(o.output, json.dump(2) + "\n");

    out << "loss=" << loss << " iterations=" << r.n_iterations << " swaps=" << r.n_swaps
        << " init_time=" << best.init_time << "s optimize_time=" << best.optimize_time << "s"
        << " best_restart=" << best_restart << "\n";
    for (const std::string& w : r.warnings) err << "warning: " << w << "\n";
    if (!all_converged) {
        err << "error: iteration limit " << spec.max_iterations << " reached before convergence\n";
        return exit_not_converged;
    }
    return exit_ok;
}

struct BenchCliOptions {
    std::string manifest;
    std::vector<std::string> algos{"fasterpam"};
    std::vector<std::string> inits;
    std::string format;
    std::string metric = "euclidean";
    std::string seed;
    std::size_t restarts = 10;
    std::size_t max_iter = 2000;
    std::size_t jobs = 1;
    std::string output;
    bool no_timings = false;
    bool no_warmup = false;
    bool no_shuffle = false;
};

struct ManifestEntry {
    std::filesystem::path path;
    std::optional<std::size_t> k;
};

// Lines "path [k]" and "optima path"; '#' starts a comment; relative paths
// are resolved against the manifest's directory.
std::vector<ManifestEntry> parse_manifest(const std::filesystem::path& manifest,
                                          std::map<std::string, double>& optima) {
    const std::string text = read_text_file(manifest);
    const std::filesystem::path base = manifest.parent_path();
    std::vector<ManifestEntry> entries;
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::vector<std::string> t;
        for (std::string s; tokens >> s;) t.push_back(s);
        if (t.empty()) continue;
        auto resolve = [&](const std::string& p) {
            const std::filesystem::path path(p);
            return path.is_absolute() ? path : base / path;
        };
        if (t[0] == "optima") {
            if (t.size() != 2) throw ParseError(line_no, "expected 'optima PATH'");
            for (auto& [name, value] : read_optima_file(resolve(t[1]))) optima[name] = value;
            continue;
        }
        if (t.size() > 2) throw ParseError(line_no, "expected 'PATH [k]'");
        ManifestEntry entry{resolve(t[0]), std::nullopt};
        if (t.size() == 2) entry.k = parse_u64(t[1], "k");
        entries.push_back(entry);
    }
    if (entries.empty()) throw ParseError(0, "manifest lists no instances");
    return entries;
}

int cmd_bench(const BenchCliOptions& o, std::ostream& out, std::ostream& err) {
    std::string seed_source;
    BenchOptions options;
    options.seed = resolve_seed(o.seed, seed_source);
    options.restarts = o.restarts;
    options.jobs = o.jobs;
    options.warmup = !o.no_warmup;
    options.record_timings = !o.no_timings;
    options.shuffle = !o.no_shuffle;
    if (o.restarts < 1) throw InputError("--restarts must be at least 1");
    if (o.max_iter < 1) throw InputError("--max-iter must be at least 1");

    std::vector<MethodSpec> grid;
    std::set<std::pair<Method, InitMethod>> seen;
    const std::vector<std::string> inits = o.inits.empty() ? std::vector<std::string>{""} : o.inits;
    for (const std::string& a : o.algos) {
        for (const std::string& i : inits) {
            MethodSpec spec;
            spec.method = *parse_method(a);
            if (!i.empty()) spec.init = *parse_init(i);
            spec.max_iterations = o.max_iter;
            if (seen.insert({spec.method, effective_init(spec)}).second) grid.push_back(spec);
        }
    }

    std::map<std::string, double> optima;
    const std::vector<ManifestEntry> entries = parse_manifest(o.manifest, optima);
    const InputOptions input{"", o.format, o.metric};

    out << "# kmedoids bench\n"
        << "#   manifest=" << o.manifest << " instances=" << entries.size() << " optima=" << optima.size()
        << " format=" << (o.format.empty() ? "auto" : o.format) << " metric=" << o.metric << "\n"
        << "#   grid=";
    for (std::size_t c = 0; c < grid.size(); ++c) {
        out << (c ? "," : "") << to_string(grid[c].method) << "+" << to_string(effective_init(grid[c]));
    }
    out << " max_iter=" << o.max_iter << " restarts=" << o.restarts << " jobs=" << o.jobs
        << " warmup=" << (options.warmup ? "on" : "off") << " shuffle=" << (options.shuffle ? "on" : "off")
        << " timings=" << (options.record_timings ? "on" : "off") << "\n"
        << "#   rng=" << Rng::algorithm_name << " seed=" << options.seed << " (" << seed_source << ")"
        << " output=" << (o.output.empty() ? "-" : o.output) << "\n";

    std::vector<BenchInstance> instances;
    for (const ManifestEntry& entry : entries) {
        BenchInstance instance;
        instance.name = entry.path.stem().string();
        try {
            const InputFormat format = o.format.empty() ? guess_format(entry.path) : format_names.at(o.format);
            instance.problem = load_instance(entry.path, format, input.resolved_metric(), entry.k, optima);
        } catch (const std::exception& e) {
            instance.load_error = entry.path.string() + ": " + e.what();
            err << "warning: " << instance.load_error << "\n";
        }
        instances.push_back(std::move(instance));
    }

    const BenchReport report = bench_run(instances, grid, options);
    const nlohmann::json json = report_json(report);
    if (!o.output.empty()) {
        std::filesystem::path prefix(o.output);
        if (prefix.extension() == ".json" || prefix.extension() == ".csv") prefix.replace_extension();
        write_file(prefix.string() + ".csv", report_csv(report));
        write_file(prefix.string() + ".json", json.dump(2) + "\n");
        out << "# wrote " << prefix.string() << ".csv and " << prefix.string() << ".json\n";
    }
    out << summary_table(report);
    out << "report re-aggregation: " << (verify_report_json(nlohmann::json::parse(json.dump())) ? "ok" : "MISMATCH")
        << "\n";

    std::size_t failed = 0;
    for (const BenchRow& row : report.rows) {
        if (!row.ok()) ++failed;
    }
    if (failed) err << "warning: " << failed << " of " << report.rows.size() << " runs failed\n";
    return failed == report.rows.size() ? exit_input_error : exit_ok;
}

struct ConvertOptions {
    InputOptions input;
    std::string output;
};

int cmd_convert(const ConvertOptions& o, std::ostream& out) {
    const InputFormat format = o.input.format.empty() ? InputFormat::Orlib : format_names.at(o.input.format);
    out << "# kmedoids convert\n"
        << "#   input=" << o.input.path << " format=" << format_name(format) << " metric=" << o.input.metric
        << " output=" << o.output << "\n";
    std::optional<std::size_t> p;
    std::optional<DissimilarityMatrix> matrix;
    switch (format) {
        case InputFormat::Orlib: {
            const OrlibGraph graph = read_orlib_file(o.input.path);
            p = graph.p;
            matrix = graph_to_matrix(graph);
            break;
        }
        case InputFormat::Csv: matrix = load_vectors(o.input.path, o.input.resolved_metric()); break;
        case InputFormat::Matrix: {
            MatrixFile file = read_matrix_file(o.input.path);
            p = file.p;
            matrix = std::move(file.matrix);
            break;
        }
    }
    write_matrix_file(o.output, *matrix, p);
    out << "wrote " << matrix->size() << "x" << matrix->size() << " matrix";
    if (p) out << " (p=" << *p << ")";
    out << "\n";
    return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"k-medoids clustering: PAM, FastPAM1, EagerPAM, FasterPAM, Alternating, CLARA, CLARANS"};
    app.name("kmedoids");
    app.require_subcommand(1);

    ClusterOptions cluster;
    auto* cluster_cmd = app.add_subcommand("cluster", "Cluster one dataset and write the best result as JSON");
    add_input_options(*cluster_cmd, cluster.input, true);
    cluster_cmd->add_option("--k", cluster.k, "Number of clusters (default: p of an ORLib or matrix input)");
    cluster_cmd->add_option("--algo", cluster.algo, "Algorithm")
        ->check(CLI::IsMember(method_names()))
        ->capture_default_str();
    cluster_cmd->add_option("--init", cluster.init, "Initialization (default: build, lab for fastclara)")
        ->check(CLI::IsMember(init_names()));
    cluster_cmd->add_option("--seed", cluster.seed,
                            "Seed, or 'random' (default: $" + std::string(seed_env_var) + " or " +
                                std::to_string(default_seed) + ")");
    cluster_cmd->add_option("--restarts", cluster.restarts, "Independent restarts; the best is kept")
        ->capture_default_str();
    cluster_cmd->add_option("--max-iter", cluster.max_iter, "Iteration limit")->capture_default_str();
    cluster_cmd->add_option("--output", cluster.output, "Result JSON path");
    cluster_cmd->add_option("--optima", cluster.optima, "Optima file ('NAME VALUE' lines) for reporting the gap");
    cluster_cmd->add_option("--jobs", cluster.jobs, "Accepted for symmetry with bench; cluster is sequential");
    cluster_cmd->add_flag("--recompute-distances", cluster.recompute,
                          "Compute vector distances on demand instead of storing the matrix");

    BenchCliOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run an algorithm x initialization grid over a manifest");
    bench_cmd->add_option("--manifest,--input", bench.manifest, "Manifest: 'PATH [k]' lines and 'optima PATH'")
        ->required();
    bench_cmd->add_option("--algo", bench.algos, "Algorithms (comma separated)")
        ->delimiter(',')
        ->check(CLI::IsMember(method_names()))
        ->capture_default_str();
    bench_cmd->add_option("--init", bench.inits, "Initializations (comma separated)")
        ->delimiter(',')
        ->check(CLI::IsMember(init_names()));
    bench_cmd->add_option("--format", bench.format, "Format of all instances (default: guessed per file)")
        ->check(CLI::IsMember(keys(format_names)));
    bench_cmd->add_option("--metric", bench.metric, "Metric for vector inputs")
        ->check(CLI::IsMember(keys(metric_names)))
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "Seed, or 'random'");
    bench_cmd->add_option("--restarts", bench.restarts, "Restarts per cell")->capture_default_str();
    bench_cmd->add_option("--max-iter", bench.max_iter, "Iteration limit")->capture_default_str();
    bench_cmd->add_option("--jobs", bench.jobs, "Concurrent runs; use 1 for timing studies")->capture_default_str();
    bench_cmd->add_option("--output", bench.output, "Report prefix; writes PREFIX.csv and PREFIX.json");
    bench_cmd->add_flag("--no-timings", bench.no_timings, "Report zero times (byte-identical reports)");
    bench_cmd->add_flag("--no-warmup", bench.no_warmup, "Skip the untimed warm-up run per cell");
    bench_cmd->add_flag("--no-shuffle", bench.no_shuffle, "Keep the input order in every restart");

    ConvertOptions convert;
    auto* convert_cmd = app.add_subcommand("convert", "Convert an ORLib graph (or vectors) to the binary matrix");
    add_input_options(*convert_cmd, convert.input, true);
    convert_cmd->add_option("--output", convert.output, "Matrix file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input_error;
    }

    try {
        if (*cluster_cmd) return cmd_cluster(cluster, out, err);
        if (*bench_cmd) return cmd_bench(bench, out, err);
        return cmd_convert(convert, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
}

}  // namespace kmedoids
