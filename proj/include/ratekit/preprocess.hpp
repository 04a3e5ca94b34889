#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ratekit/dataset.hpp"
#include "ratekit/kernels.hpp"

namespace ratekit {

// How the (single, optional) text column is fed to a model: as a token
// sequence for the embedding branch, or collapsed to one categorical value
// and one-hot encoded (baselines and the no-embedding network).
enum class TextHandling { embed, onehot };

std::string_view text_handling_name(TextHandling t);
TextHandling parse_text_handling(std::string_view name);

// Word index map built from training text only. Index 0 is padding,
// index 1 is out-of-vocabulary; known words start at 2.
struct Tokenizer {
    static constexpr int kPadIndex = 0;
    static constexpr int kOovIndex = 1;

    std::vector<std::string> words; // word for index i+2
    std::unordered_map<std::string, int> index;
    int max_len = 1; // words in the longest training sentence

    int vocab_size() const { return static_cast<int>(words.size()) + 2; }
    std::vector<int> encode(std::string_view text) const; // padded/truncated to max_len

    bool operator==(const Tokenizer& o) const {
        return words == o.words && max_len == o.max_len;
    }
};

struct CategoricalEncoding {
    std::string column;
    std::vector<std::string> categories; // sorted; the unknown slot is implicit, last

    bool operator==(const CategoricalEncoding&) const = default;
};

// One explanation unit: a contiguous dense slice (a numeric column or a
// one-hot block), or the token sequence when first < 0.
struct FeatureGroup {
    std::string name;
    int first = 0; // dense index; -1 marks the token-sequence group
    int count = 0;

    bool is_token_group() const { return first < 0; }
    bool operator==(const FeatureGroup&) const = default;
};

// All transform state, fitted exclusively on one training fold. transform()
// never mutates this.
struct FittedPipeline {
    FeatureSchema schema;
    TextHandling text_handling = TextHandling::embed;
    std::vector<std::string> numeric_names;
    std::vector<double> medians;                    // per numeric column
    std::vector<std::vector<double>> quantile_maps; // per numeric column, sorted training values
    std::vector<CategoricalEncoding> onehot_vocabs; // categorical columns (+ text when onehot)
    std::optional<Tokenizer> tokenizer;             // present iff text_handling == embed and text exists
    std::string fitted_on;                          // fold identifier

    std::vector<std::string> dense_names;
    std::vector<FeatureGroup> groups;

    int n_dense() const { return static_cast<int>(dense_names.size()); }

    nlohmann::json to_json() const;
    static FittedPipeline from_json(const nlohmann::json& j);
};

// Transformed features: quantile-normalized numerics ++ one-hot blocks,
// plus token sequences for the embedding branch (empty when not used).
struct FeatureMatrix {
    Matrix dense;
    std::vector<std::vector<int>> token_seqs; // n_rows x max_len, or empty
    std::vector<std::string> dense_names;

    std::size_t n_rows() const { return dense.rows(); }
};

FittedPipeline fit_pipeline(const Dataset& train, TextHandling text_handling,
                            std::string fitted_on = "");

FeatureMatrix transform(const FittedPipeline& p, const Dataset& data);

// Position of v in the empirical CDF of the sorted training sample, linearly
// interpolated; out-of-range values clamp to exactly 0 or 1. Ties are
// resolved symmetrically (mean of leftmost and rightmost interpolation).
double quantile_position(const std::vector<double>& sorted_support, double v);

// One-hot with a reserved trailing unknown slot; vocab is the known list.
std::vector<double> onehot(const std::string& value, const std::vector<std::string>& vocab);

// Median ignoring NaN; mean of the two central values for even counts.
// Throws DataError when no finite value exists.
double median_ignoring_missing(const std::vector<double>& column, const std::string& column_name);

// Plain integer codes for a categorical column (unseen -> vocab size).
// Provided as a utility; the models here consume one-hot or embeddings
// only, since integer codes would impose a spurious ordering.
std::vector<int> label_encode(const std::vector<std::string>& values,
                              const std::vector<std::string>& sorted_vocab);

} // namespace ratekit
