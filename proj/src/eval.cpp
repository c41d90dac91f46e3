#include "kmedoids/eval.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace kmedoids {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 9> method_names{{
    {Method::Pam, "pam"},
    {Method::FastPam1, "fastpam1"},
    {Method::EagerPam, "eagerpam"},
    {Method::FasterPam, "fasterpam"},
    {Method::Alternating, "alternating"},
    {Method::Clara, "clara"},
    {Method::FastClara, "fastclara"},
    {Method::Clarans, "clarans"},
    {Method::FastClarans, "fastclarans"},
}};

constexpr std::array<std::pair<InitMethod, std::string_view>, 6> init_names{{
    {InitMethod::Random, "random"},
    {InitMethod::Build, "build"},
    {InitMethod::GreedyG, "greedyg"},
    {InitMethod::Lab, "lab"},
    {InitMethod::DistanceWeighted, "distweighted"},
    {InitMethod::ParkJun, "parkjun"},
}};

}  // namespace

double normalized_loss(double loss, double optimum, double random_mean) {
    if (!(random_mean > optimum)) throw std::invalid_argument("non-discriminative baseline");
    return 100.0 * (loss - optimum) / (random_mean - optimum);
}

std::string_view to_string(Method method) noexcept {
    for (const auto& [m, name] : method_names) {
        if (m == method) return name;
    }
    return "unknown";
}

std::string_view to_string(InitMethod init) noexcept {
    for (const auto& [m, name] : init_names) {
        if (m == init) return name;
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    for (const auto& [m, n] : method_names) {
        if (n == name) return m;
    }
    return std::nullopt;
}

std::optional<InitMethod> parse_init(std::string_view name) noexcept {
    for (const auto& [m, n] : init_names) {
        if (n == name) return m;
    }
    return std::nullopt;
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = [] {
        std::vector<Method> out;
        for (const auto& entry : method_names) out.push_back(entry.first);
        return out;
    }();
    return methods;
}

const std::vector<InitMethod>& all_inits() {
    static const std::vector<InitMethod> inits = [] {
        std::vector<InitMethod> out;
        for (const auto& entry : init_names) out.push_back(entry.first);
        return out;
    }();
    return inits;
}

bool is_sampling_method(Method method) noexcept {
    return method == Method::Clara || method == Method::FastClara || method == Method::Clarans ||
           method == Method::FastClarans;
}

InitMethod effective_init(const MethodSpec& spec) noexcept {
    switch (spec.method) {
        case Method::Clarans:
        case Method::FastClarans: return InitMethod::Random;
        case Method::FastClara: return spec.init.value_or(InitMethod::Lab);
        default: return spec.init.value_or(InitMethod::Build);
    }
}

}  // namespace kmedoids
