#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratekit/dataset.hpp"

namespace ratekit {

// Recipe for a desk-scale synthetic rating dataset with planted structure:
// a latent score built from a linear part, a product interaction, a
// threshold effect, a word-additive sector effect, and Gaussian noise.
// Labels are assigned by slicing the empirical latent-score quantiles so
// class frequencies match class_weights to within one row.
struct SynthSpec {
    int n_rows = 0;
    int n_numeric = 6;
    int n_categorical = 1;
    std::vector<std::string> sector_vocab; // multi-word phrases; empty = no text column
    std::array<double, kNumClasses> class_weights{};
    double missing_rate = 0.0;
    double noise_std = 0.0;
    // Std of the sector contribution relative to the (unit-std) numeric part.
    double sector_effect_std = 1.0;
    std::uint64_t seed = 0;

    void validate() const; // throws ConfigError

    nlohmann::json to_json() const;
    static SynthSpec from_json(const nlohmann::json& j);
};

Dataset generate_synthetic(const SynthSpec& spec);

// The latent scores behind a generated dataset (same spec and seed),
// noise included. Used by tests to check label monotonicity.
std::vector<double> synthetic_latent_scores(const SynthSpec& spec);

// Per-class row counts from the largest-remainder split of n rows.
std::array<int, kNumClasses> class_counts_for(const std::array<double, kNumClasses>& weights,
                                              int n_rows);

} // namespace ratekit
