#include "kmedoids/ingest.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace kmedoids {

namespace {

std::vector<std::string_view> split_tokens(std::string_view line, bool commas) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto is_sep = [&](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v' || (commas && c == ','); };
    while (i < line.size()) {
        while (i < line.size() && is_sep(line[i])) ++i;
        const std::size_t begin = i;
        while (i < line.size() && !is_sep(line[i])) ++i;
        if (i > begin) out.push_back(line.substr(begin, i - begin));
    }
    return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view token) {
    T value{};
    const char* first = token.data();
    if (!token.empty() && token.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    return value;
}

// Calls fn(line_number, line) for every line.
template <typename F>
void for_each_line(std::string_view text, F&& fn) {
    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        ++line_no;
        fn(line_no, text.substr(pos, end - pos));
        if (end == text.size()) break;
        pos = end + 1;
    }
}

std::size_t parse_count(std::string_view token, std::size_t line, const char* what) {
    const auto v = parse_number<std::int64_t>(token);
    if (!v || *v < 0) throw ParseError(line, std::string("malformed header: invalid ") + what + " '" + std::string(token) + "'");
    return static_cast<std::size_t>(*v);
}

template <typename T>
void put_le(std::ostream& out, T value) {
    auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
    out.write(reinterpret_cast<const char*>(bits.data()), bits.size());
}

template <typename T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bits{};
    if (!in.read(reinterpret_cast<char*>(bits.data()), bits.size())) throw ParseError(0, "truncated matrix file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
    return std::bit_cast<T>(bits);
}

constexpr std::array<char, 8> matrix_magic{'K', 'M', 'D', 'M', 'A', 'T', '0', '1'};

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

OrlibGraph parse_orlib(std::string_view text) {
    OrlibGraph graph;
    bool have_header = false;
    for_each_line(text, [&](std::size_t line, std::string_view content) {
        const auto tokens = split_tokens(content, false);
        if (tokens.empty()) return;
        if (!have_header) {
            if (tokens.size() != 3) throw ParseError(line, "malformed header: expected 'n m p'");
            graph.n_vertices = parse_count(tokens[0], line, "vertex count");
            graph.n_edges = parse_count(tokens[1], line, "edge count");
            graph.p = parse_count(tokens[2], line, "p");
            if (graph.n_vertices == 0) throw ParseError(line, "malformed header: no vertices");
            graph.edges.reserve(graph.n_edges);
            have_header = true;
            return;
        }
        if (graph.edges.size() == graph.n_edges) throw ParseError(line, "extra tokens after the last edge");
        if (tokens.size() != 3) throw ParseError(line, "expected 'i j cost', found " + std::to_string(tokens.size()) + " tokens");
        const auto i = parse_number<std::int64_t>(tokens[0]);
        const auto j = parse_number<std::int64_t>(tokens[1]);
        const auto cost = parse_number<std::int64_t>(tokens[2]);
        if (!i || !j || !cost) throw ParseError(line, "non-integer token in edge line");
        const auto n = static_cast<std::int64_t>(graph.n_vertices);
        if (*i < 1 || *i > n || *j < 1 || *j > n) throw ParseError(line, "vertex out of range 1.." + std::to_string(n));
        if (*cost < 0) throw ParseError(line, "negative cost " + std::to_string(*cost));
        graph.edges.push_back({static_cast<std::size_t>(*i), static_cast<std::size_t>(*j), *cost});
    });
    if (!have_header) throw ParseError(0, "missing header");
    if (graph.edges.size() != graph.n_edges) {
        throw ParseError(0, "expected " + std::to_string(graph.n_edges) + " edges, found " +
                                std::to_string(graph.edges.size()));
    }
    return graph;
}

OrlibGraph read_orlib_file(const std::filesystem::path& path) { return parse_orlib(read_text_file(path)); }

DissimilarityMatrix graph_to_matrix(const OrlibGraph& graph) {
    const std::size_t n = graph.n_vertices;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(n * n, inf);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
    for (const OrlibEdge& e : graph.edges) {
        const std::size_t a = e.from - 1, b = e.to - 1;
        if (a == b) continue;
        const double c = static_cast<double>(e.cost);
        d[a * n + b] = std::min(d[a * n + b], c);
        d[b * n + a] = std::min(d[b * n + a], c);
    }
    for (std::size_t l = 0; l < n; ++l) {
        const double* row_l = d.data() + l * n;
        for (std::size_t i = 0; i < n; ++i) {
            const double dil = d[i * n + l];
            if (dil == inf) continue;
            double* row_i = d.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) {
                const double via = dil + row_l[j];
                if (via < row_i[j]) row_i[j] = via;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (d[i * n + j] == inf) {
                throw ParseError(0, "disconnected graph: no path between vertices " + std::to_string(i + 1) +
                                        " and " + std::to_string(j + 1));
            }
        }
    }
    return DissimilarityMatrix(n, std::move(d));
}

double metric_distance(Metric metric, std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    switch (metric) {
        case Metric::Manhattan:
            for (std::size_t t = 0; t < a.size(); ++t) acc += std::abs(a[t] - b[t]);
            return acc;
        case Metric::Euclidean:
        case Metric::SquaredEuclidean:
            for (std::size_t t = 0; t < a.size(); ++t) {
                const double diff = a[t] - b[t];
                acc += diff * diff;
            }
            return metric == Metric::Euclidean ? std::sqrt(acc) : acc;
    }
    return acc;
}

VectorData parse_vectors(std::string_view text) {
    VectorData data;
    bool first_content = true;
    for_each_line(text, [&](std::size_t line, std::string_view content) {
        const auto tokens = split_tokens(content, true);
        if (tokens.empty()) return;
        std::vector<double> row;
        row.reserve(tokens.size());
        for (std::size_t c = 0; c < tokens.size(); ++c) {
            const auto v = parse_number<double>(tokens[c]);
            if (!v || !std::isfinite(*v)) {
                if (first_content) {
                    row.clear();
                    break;
                }
                throw ParseError(line, "non-numeric cell in column " + std::to_string(c + 1) + ": '" +
                                           std::string(tokens[c]) + "'");
            }
            row.push_back(*v);
        }
        const bool header = first_content && row.empty();
        first_content = false;
        if (header) return;
        if (data.n == 0) {
            data.dim = row.size();
        } else if (row.size() != data.dim) {
            throw ParseError(line, "row " + std::to_string(data.n + 1) + " has " + std::to_string(row.size()) +
                                       " columns, expected " + std::to_string(data.dim));
        }
        data.values.insert(data.values.end(), row.begin(), row.end());
        ++data.n;
    });
    if (data.n == 0) throw ParseError(0, "no data rows");
    return data;
}

VectorData read_vectors_file(const std::filesystem::path& path) { return parse_vectors(read_text_file(path)); }

DissimilarityMatrix vectors_to_matrix(const VectorData& data, Metric metric) {
    return DissimilarityMatrix::from_function(
        data.n, [&](std::size_t i, std::size_t j) { return metric_distance(metric, data.row(i), data.row(j)); });
}

DissimilarityMatrix load_vectors(const std::filesystem::path& path, Metric metric) {
    return vectors_to_matrix(read_vectors_file(path), metric);
}

void write_matrix_file(const std::filesystem::path& path, const DissimilarityMatrix& matrix,
                       std::optional<std::size_t> p) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(matrix_magic.data(), matrix_magic.size());
    put_le<std::uint64_t>(out, matrix.size());
    put_le<std::uint64_t>(out, p.value_or(0));
    for (double v : matrix.values()) put_le<double>(out, v);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

MatrixFile read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != matrix_magic) throw ParseError(0, "not a matrix file (bad magic)");
    const auto n = get_le<std::uint64_t>(in);
    const auto p = get_le<std::uint64_t>(in);
    if (n > (1u << 20)) throw ParseError(0, "implausible matrix size " + std::to_string(n));
    std::vector<double> values(n * n);
    for (double& v : values) v = get_le<double>(in);
    if (in.peek() != std::char_traits<char>::eof()) throw ParseError(0, "trailing bytes after matrix data");
    return {DissimilarityMatrix(n, std::move(values)), p ? std::optional<std::size_t>(p) : std::nullopt};
}

std::map<std::string, double> parse_optima(std::string_view text) {
    std::map<std::string, double> optima;
    for_each_line(text, [&](std::size_t line, std::string_view content) {
        if (const auto hash = content.find('#'); hash != std::string_view::npos) content = content.substr(0, hash);
        const auto tokens = split_tokens(content, false);
        if (tokens.empty()) return;
        if (tokens.size() != 2) throw ParseError(line, "expected 'instance_name optimum'");
        const auto v = parse_number<double>(tokens[1]);
        if (!v) throw ParseError(line, "invalid optimum '" + std::string(tokens[1]) + "'");
        optima[std::string(tokens[0])] = *v;
    });
    return optima;
}

std::map<std::string, double> read_optima_file(const std::filesystem::path& path) {
    return parse_optima(read_text_file(path));
}

InputFormat guess_format(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".csv" || ext == ".tsv" || ext == ".dat") return InputFormat::Csv;
    if (ext == ".bin" || ext == ".kmat") return InputFormat::Matrix;
    return InputFormat::Orlib;
}

ProblemInstance load_instance(const std::filesystem::path& path, InputFormat format, Metric metric,
                              std::optional<std::size_t> k, const std::map<std::string, double>& optima) {
    std::optional<std::size_t> file_p;
    auto matrix = [&]() -> DissimilarityMatrix {
        switch (format) {
            case InputFormat::Csv: return load_vectors(path, metric);
            case InputFormat::Orlib: {
                const OrlibGraph graph = read_orlib_file(path);
                file_p = graph.p;
                return graph_to_matrix(graph);
            }
            case InputFormat::Matrix: {
                MatrixFile file = read_matrix_file(path);
                file_p = file.p;
                return std::move(file.matrix);
            }
        }
        throw std::invalid_argument("unknown input format");
    }();
    if (k && *k < 1) throw std::invalid_argument("k must be at least 1");
    const std::size_t resolved_k = k ? *k : file_p.value_or(0);
    if (resolved_k < 1) throw std::invalid_argument("k must be given (the input stores no cluster count)");
    if (resolved_k >= matrix.size()) {
        throw std::invalid_argument("k must be smaller than the number of points (k=" + std::to_string(resolved_k) +
                                    ", n=" + std::to_string(matrix.size()) + ")");
    }
    std::string name = path.stem().string();
    std::optional<double> optimum;
    if (const auto it = optima.find(name); it != optima.end()) optimum = it->second;
    return {std::move(matrix), resolved_k, std::move(name), optimum};
}

}  // namespace kmedoids
