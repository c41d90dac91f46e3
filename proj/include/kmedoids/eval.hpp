#pragma once

// Quality metrics and a single entry point running any initializer and
// optimizer combination with phase timings.

#include "kmedoids/dissimilarity.hpp"
#include "kmedoids/init.hpp"
#include "kmedoids/model.hpp"
#include "kmedoids/objective.hpp"
#include "kmedoids/optimize.hpp"
#include "kmedoids/rng.hpp"
#include "kmedoids/sampling.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kmedoids {

/// Mean loss of n_draws uniformly random medoid sets.
template <DissimilarityView V>
double random_baseline(const V& d, std::size_t k, std::size_t n_draws, std::uint64_t seed) {
    detail::require_k(k, d.size());
    if (n_draws < 1) throw std::invalid_argument("n_draws must be at least 1");
    double sum = 0.0;
    for (std::size_t draw = 0; draw < n_draws; ++draw) {
        sum += total_deviation(d, init_random(d, k, derive_seed(seed, draw)));
    }
    return sum / static_cast<double>(n_draws);
}

/// (loss - optimum) / (random_mean - optimum), in percent.
double normalized_loss(double loss, double optimum, double random_mean);

enum class Method { Pam, FastPam1, EagerPam, FasterPam, Alternating, Clara, FastClara, Clarans, FastClarans };

std::string_view to_string(Method method) noexcept;
std::string_view to_string(InitMethod init) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;
std::optional<InitMethod> parse_init(std::string_view name) noexcept;
const std::vector<Method>& all_methods();
const std::vector<InitMethod>& all_inits();

bool is_sampling_method(Method method) noexcept;

struct MethodSpec {
    Method method = Method::FasterPam;
    /// Empty picks the method's own default: BUILD for the swap methods and
    /// CLARA, LAB for FastCLARA. CLARANS variants always start at random.
    std::optional<InitMethod> init;
    std::size_t max_iterations = 2000;
};

/// The initializer a spec actually runs with.
InitMethod effective_init(const MethodSpec& spec) noexcept;

struct RunOutcome {
    ClusteringResult result;
    InitMethod init;
    double init_time = 0.0;
    double optimize_time = 0.0;
};

/// Runs one spec. Sampling methods do their own initialization; their whole
/// run is counted as optimize_time.
template <DissimilarityView V>
RunOutcome run_method(const V& d, std::size_t k, const MethodSpec& spec, std::uint64_t seed) {
    RunOutcome out;
    out.init = effective_init(spec);
    const OptimizerConfig opt{Algorithm::FasterPam, spec.max_iterations, false};
    auto swap_method = [&](Algorithm algorithm) {
        const auto t0 = detail::Clock::now();
        MedoidSet medoids = initialize(d, k, {out.init, seed});
        out.init_time = detail::seconds_since(t0);
        OptimizerConfig config = opt;
        config.algorithm = algorithm;
        const auto t1 = detail::Clock::now();
        out.result = optimize(d, std::move(medoids), config);
        out.optimize_time = detail::seconds_since(t1);
    };
    auto sampled = [&](auto&& fn) {
        const auto t0 = detail::Clock::now();
        out.result = fn();
        out.optimize_time = detail::seconds_since(t0);
    };
    switch (spec.method) {
        case Method::Pam: swap_method(Algorithm::Pam); break;
        case Method::FastPam1: swap_method(Algorithm::FastPam1); break;
        case Method::EagerPam: swap_method(Algorithm::EagerPam); break;
        case Method::FasterPam: swap_method(Algorithm::FasterPam); break;
        case Method::Alternating: swap_method(Algorithm::Alternating); break;
        case Method::Clara:
        case Method::FastClara: {
            ClaraConfig config = spec.method == Method::Clara ? ClaraConfig{} : ClaraConfig::fast_defaults();
            config.inner_init = out.init;
            config.inner_algorithm.max_iterations = spec.max_iterations;
            config.seed = seed;
            sampled([&] { return clara(d, k, config); });
            break;
        }
        case Method::Clarans:
        case Method::FastClarans: {
            ClaransConfig config;
            config.seed = seed;
            sampled([&] { return spec.method == Method::Clarans ? clarans(d, k, config) : fastclarans(d, k, config); });
            if (spec.init && *spec.init != InitMethod::Random) {
                out.result.warnings.push_back("CLARANS variants start from random medoids; --init ignored");
            }
            break;
        }
    }
    return out;
}

}  // namespace kmedoids
