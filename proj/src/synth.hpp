#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "inference.hpp"

namespace crack {

enum class TypeMode { Nominal, Numeric, Mixed };

struct SyntheticSpec {
    int k = 3;  // |X|
    int l = 3;  // |Y|
    long n = 5000;
    double phi = 1.0;  // per-(i,j) dependency probability
    TypeMode type_mode = TypeMode::Mixed;
    std::uint64_t seed = 0;
    std::vector<double> q_range = {0.5, 0.7, 1.5, 2.0};
    double noise_sd_factor = 0.1;  // noise sd relative to sd(f(X_i))
    double coef_min = 0.5, coef_max = 2.0;
    // Concentration of the per-group class distributions of nominal effects.
    // Values < 1 give peaked distributions, so an effect is close to a
    // many-to-one function of its causes while each effect reveals at most
    // ~log2(classes) bits about them.
    double dirichlet_alpha = 0.15;

    void validate() const;
};

enum class DependencyKind { Split, Multiway, Linear, Quadratic };

struct GeneratedPair {
    Dataset data;
    bool swapped = false;  // presented sides were exchanged
    Direction truth = Direction::XtoY;
    std::vector<std::pair<int, int>> dependencies;  // (cause col, effect col)
    std::vector<DependencyKind> kinds;
};

/// Fresh source column, type per mode (Mixed flips a fair coin).
Attribute gen_source_attribute(const SyntheticSpec& spec, const std::string& name,
                               std::mt19937_64& rng);

/// Imprints a dependency of `kind` from cause onto the effect column
/// in place; incompatible kind/type pairings pick a compatible kind.
DependencyKind apply_dependency(Attribute& effect, const Attribute& cause,
                                DependencyKind kind, const SyntheticSpec& spec,
                                std::mt19937_64& rng);

/// Ground-truth cause->effect pair. Odd pair indices present the sides
/// swapped so batch evaluation carries no positional bias.
GeneratedPair generate_pair(const SyntheticSpec& spec, std::uint64_t pair_index);

}  // namespace crack
