#pragma once

// Problem construction: OR-Library p-median graphs (all-pairs shortest
// paths), numeric vector files, the binary matrix container and the
// known-optimum sidecar.

#include "kmedoids/dissimilarity.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kmedoids {

/// Input error carrying a 1-based line number (0 when not line specific).
class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

struct OrlibEdge {
    std::size_t from;  // 1-based
    std::size_t to;    // 1-based
    std::int64_t cost;

    friend bool operator==(const OrlibEdge&, const OrlibEdge&) = default;
};

struct OrlibGraph {
    std::size_t n_vertices = 0;
    std::size_t n_edges = 0;
    std::size_t p = 0;
    std::vector<OrlibEdge> edges;
};

/// Header "n m p" followed by m lines "i j cost", whitespace separated.
OrlibGraph parse_orlib(std::string_view text);
OrlibGraph read_orlib_file(const std::filesystem::path& path);

/// Undirected all-pairs shortest paths (Floyd-Warshall); parallel edges keep
/// the cheapest cost. Throws ParseError naming a pair when disconnected.
DissimilarityMatrix graph_to_matrix(const OrlibGraph& graph);

enum class Metric { Euclidean, Manhattan, SquaredEuclidean };

/// Rectangular numeric data, row-major.
struct VectorData {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t i) const noexcept { return {values.data() + i * dim, dim}; }
};

double metric_distance(Metric metric, std::span<const double> a, std::span<const double> b) noexcept;

/// Comma or whitespace separated numbers; a first line that is not numeric
/// is treated as a header. Ragged rows and non-numeric cells are errors.
VectorData parse_vectors(std::string_view text);
VectorData read_vectors_file(const std::filesystem::path& path);

DissimilarityMatrix vectors_to_matrix(const VectorData& data, Metric metric);
DissimilarityMatrix load_vectors(const std::filesystem::path& path, Metric metric);

/// Distances computed on demand from the vectors instead of a stored matrix.
class OnTheFlyView {
  public:
    OnTheFlyView(const VectorData& data, Metric metric) : data_(&data), metric_(metric) {}

    std::size_t size() const noexcept { return data_->n; }
    double operator()(std::size_t i, std::size_t j) const noexcept {
        return metric_distance(metric_, data_->row(i), data_->row(j));
    }

  private:
    const VectorData* data_;
    Metric metric_;
};

/// Binary matrix container, little-endian:
///   8 bytes magic "KMDMAT01", uint64 n, uint64 p (0 = none),
///   then n*n float64 values row-major.
void write_matrix_file(const std::filesystem::path& path, const DissimilarityMatrix& matrix,
                       std::optional<std::size_t> p = std::nullopt);

struct MatrixFile {
    DissimilarityMatrix matrix;
    std::optional<std::size_t> p;
};

MatrixFile read_matrix_file(const std::filesystem::path& path);

/// Lines "instance_name optimum"; blank lines and '#' comments are skipped.
std::map<std::string, double> parse_optima(std::string_view text);
std::map<std::string, double> read_optima_file(const std::filesystem::path& path);

struct ProblemInstance {
    DissimilarityMatrix matrix;
    std::size_t k;
    std::string name;
    std::optional<double> known_optimum;
};

enum class InputFormat { Csv, Orlib, Matrix };

/// Guess from the extension: .csv/.tsv/.dat -> Csv, .bin/.kmat -> Matrix, otherwise Orlib.
InputFormat guess_format(const std::filesystem::path& path);

/// Loads any supported input. For ORLib and matrix files without an explicit
/// k, the file's p is used. The name is the file stem.
ProblemInstance load_instance(const std::filesystem::path& path, InputFormat format, Metric metric,
                              std::optional<std::size_t> k,
                              const std::map<std::string, double>& optima = {});

std::string read_text_file(const std::filesystem::path& path);

}  // namespace kmedoids
