#include "ratekit/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ratekit/text.hpp"

namespace ratekit {

std::string_view text_handling_name(TextHandling t) {
    return t == TextHandling::embed ? "embed" : "onehot";
}

TextHandling parse_text_handling(std::string_view name) {
    if (name == "embed") return TextHandling::embed;
    if (name == "onehot") return TextHandling::onehot;
    throw ConfigError("unknown text handling: \"" + std::string(name) + "\"");
}

std::vector<int> Tokenizer::encode(std::string_view text) const {
    std::vector<int> seq(static_cast<std::size_t>(max_len), kPadIndex);
    const auto words_in = tokenize_words(text);
    const std::size_t n = std::min(words_in.size(), static_cast<std::size_t>(max_len));
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = index.find(words_in[i]);
        seq[i] = it == index.end() ? kOovIndex : it->second;
    }
    return seq;
}

double median_ignoring_missing(const std::vector<double>& column, const std::string& column_name) {
    std::vector<double> values;
    values.reserve(column.size());
    for (double v : column)
        if (!std::isnan(v)) values.push_back(v);
    if (values.empty())
        throw DataError("cannot fit pipeline: numeric column \"" + column_name +
                        "\" has no non-missing values");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile_position(const std::vector<double>& sorted_support, double v) {
    const std::size_t n = sorted_support.size();
    if (n == 0) throw StateError("quantile_position: empty support");
    if (v < sorted_support.front()) return 0.0;
    if (v > sorted_support.back()) return 1.0;
    if (n == 1) return 0.5;

    const double denom = static_cast<double>(n - 1);
    const auto pos_at = [&](std::size_t i) { return static_cast<double>(i) / denom; };
    const auto interp_between = [&](std::size_t hi) {
        // v strictly between support[hi-1] and support[hi]
        const double lo_v = sorted_support[hi - 1], hi_v = sorted_support[hi];
        const double t = (v - lo_v) / (hi_v - lo_v);
        return pos_at(hi - 1) + t * (pos_at(hi) - pos_at(hi - 1));
    };

    const auto lo_it = std::lower_bound(sorted_support.begin(), sorted_support.end(), v);
    const auto hi_it = std::upper_bound(lo_it, sorted_support.end(), v);
    if (lo_it != hi_it) {
        // v is a support value, possibly tied: average the leftmost and
        // rightmost occurrence positions so ties are treated symmetrically.
        const auto first = static_cast<std::size_t>(lo_it - sorted_support.begin());
        const auto last = static_cast<std::size_t>(hi_it - sorted_support.begin()) - 1;
        return 0.5 * (pos_at(first) + pos_at(last));
    }
    return interp_between(static_cast<std::size_t>(lo_it - sorted_support.begin()));
}

std::vector<int> label_encode(const std::vector<std::string>& values,
                              const std::vector<std::string>& sorted_vocab) {
    std::vector<int> codes;
    codes.reserve(values.size());
    for (const auto& v : values) {
        const auto it = std::lower_bound(sorted_vocab.begin(), sorted_vocab.end(), v);
        codes.push_back(it != sorted_vocab.end() && *it == v
                            ? static_cast<int>(it - sorted_vocab.begin())
                            : static_cast<int>(sorted_vocab.size()));
    }
    return codes;
}

std::vector<double> onehot(const std::string& value, const std::vector<std::string>& vocab) {
    std::vector<double> vec(vocab.size() + 1, 0.0);
    const auto it = std::find(vocab.begin(), vocab.end(), value);
    const std::size_t slot =
        it == vocab.end() ? vocab.size() : static_cast<std::size_t>(it - vocab.begin());
    vec[slot] = 1.0;
    return vec;
}

namespace {

CategoricalEncoding encode_categories(const std::string& column,
                                      const std::vector<std::string>& values) {
    const std::set<std::string> unique(values.begin(), values.end());
    return CategoricalEncoding{column, {unique.begin(), unique.end()}};
}

// Dense layout: numeric columns first, then one-hot blocks in vocab order;
// the token sequence, when present, is its own non-dense group.
void build_dense_layout(FittedPipeline& p) {
    p.dense_names.clear();
    p.groups.clear();
    for (const auto& name : p.numeric_names) {
        p.groups.push_back({name, p.n_dense(), 1});
        p.dense_names.push_back(name);
    }
    for (const auto& enc : p.onehot_vocabs) {
        p.groups.push_back({enc.column, p.n_dense(), static_cast<int>(enc.categories.size()) + 1});
        for (const auto& cat : enc.categories) p.dense_names.push_back(enc.column + "=" + cat);
        p.dense_names.push_back(enc.column + "=⟨unknown⟩");
    }
    if (p.tokenizer) {
        const int text_col = p.schema.text_column_index();
        if (text_col < 0) throw DataError("pipeline: tokenizer without a text column");
        p.groups.push_back(
            {p.schema.columns()[static_cast<std::size_t>(text_col)].name, -1, p.tokenizer->max_len});
    }
}

} // namespace

FittedPipeline fit_pipeline(const Dataset& train, TextHandling text_handling,
                            std::string fitted_on) {
    if (train.n_rows == 0) throw DataError("cannot fit pipeline on an empty dataset");

    FittedPipeline p;
    p.schema = train.schema;
    p.text_handling = text_handling;
    p.fitted_on = std::move(fitted_on);
    p.numeric_names = train.numeric_names;

    for (std::size_t j = 0; j < train.numeric.size(); ++j) {
        p.medians.push_back(median_ignoring_missing(train.numeric[j], train.numeric_names[j]));
        std::vector<double> support;
        support.reserve(train.n_rows);
        for (double v : train.numeric[j])
            if (!std::isnan(v)) support.push_back(v);
        std::sort(support.begin(), support.end());
        p.quantile_maps.push_back(std::move(support));
    }

    for (std::size_t c = 0; c < train.categorical.size(); ++c)
        p.onehot_vocabs.push_back(
            encode_categories(train.categorical_names[c], train.categorical[c]));

    const int text_col = train.schema.text_column_index();
    if (text_col >= 0) {
        const std::string text_name = train.schema.columns()[static_cast<std::size_t>(text_col)].name;
        if (text_handling == TextHandling::onehot) {
            p.onehot_vocabs.push_back(encode_categories(text_name, *train.text));
        } else {
            Tokenizer tok;
            std::set<std::string> words;
            std::size_t longest = 1;
            for (const auto& sentence : *train.text) {
                const auto ws = tokenize_words(sentence);
                longest = std::max(longest, ws.size());
                words.insert(ws.begin(), ws.end());
            }
            tok.words.assign(words.begin(), words.end());
            for (std::size_t i = 0; i < tok.words.size(); ++i)
                tok.index[tok.words[i]] = static_cast<int>(i) + 2;
            tok.max_len = static_cast<int>(longest);
            p.tokenizer = std::move(tok);
        }
    }

    build_dense_layout(p);
    return p;
}

FeatureMatrix transform(const FittedPipeline& p, const Dataset& data) {
    if (!(data.schema == p.schema))
        throw DataError("transform: dataset schema differs from the fitted schema");

    const std::size_t n = data.n_rows;
    const auto n_numeric = p.numeric_names.size();
    FeatureMatrix out;
    out.dense = Matrix(n, static_cast<std::size_t>(p.n_dense()));
    out.dense_names = p.dense_names;

    const bool par =
#ifdef _OPENMP
        kernels::parallel_enabled() && !omp_in_parallel() && n >= 1024;
#else
        false;
#endif

#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t ri = 0; ri < static_cast<std::int64_t>(n); ++ri) {
        const auto r = static_cast<std::size_t>(ri);
        double* row = out.dense.row(r);
        std::size_t offset = 0;
        for (std::size_t j = 0; j < n_numeric; ++j) {
            double v = data.numeric[j][r];
            if (std::isnan(v)) v = p.medians[j];
            row[offset++] = quantile_position(p.quantile_maps[j], v);
        }
        std::size_t cat_idx = 0;
        for (const auto& enc : p.onehot_vocabs) {
            const std::string& value = cat_idx < data.categorical.size()
                                           ? data.categorical[cat_idx][r]
                                           : (*data.text)[r]; // text-as-categorical block
            ++cat_idx;
            const auto it = std::lower_bound(enc.categories.begin(), enc.categories.end(), value);
            const std::size_t slot = (it != enc.categories.end() && *it == value)
                                         ? static_cast<std::size_t>(it - enc.categories.begin())
                                         : enc.categories.size();
            row[offset + slot] = 1.0;
            offset += enc.categories.size() + 1;
        }
    }

    if (p.tokenizer) {
        out.token_seqs.resize(n);
#pragma omp parallel for schedule(static) if (par)
        for (std::int64_t ri = 0; ri < static_cast<std::int64_t>(n); ++ri) {
            const auto r = static_cast<std::size_t>(ri);
            out.token_seqs[r] = p.tokenizer->encode((*data.text)[r]);
        }
    }
    return out;
}

nlohmann::json FittedPipeline::to_json() const {
    nlohmann::json j;
    j["schema"] = schema.to_json();
    j["text_handling"] = std::string(text_handling_name(text_handling));
    j["numeric_names"] = numeric_names;
    j["medians"] = medians;
    j["quantile_maps"] = quantile_maps;
    nlohmann::json vocabs = nlohmann::json::array();
    for (const auto& enc : onehot_vocabs)
        vocabs.push_back({{"column", enc.column}, {"categories", enc.categories}});
    j["onehot_vocabs"] = vocabs;
    if (tokenizer)
        j["tokenizer"] = {{"words", tokenizer->words}, {"max_len", tokenizer->max_len}};
    j["fitted_on"] = fitted_on;
    return j;
}

FittedPipeline FittedPipeline::from_json(const nlohmann::json& j) {
    FittedPipeline p;
    try {
        p.schema = FeatureSchema::from_json(j.at("schema"));
        p.text_handling = parse_text_handling(j.at("text_handling").get<std::string>());
        p.numeric_names = j.at("numeric_names").get<std::vector<std::string>>();
        p.medians = j.at("medians").get<std::vector<double>>();
        p.quantile_maps = j.at("quantile_maps").get<std::vector<std::vector<double>>>();
        for (const auto& enc : j.at("onehot_vocabs")) {
            p.onehot_vocabs.push_back({enc.at("column").get<std::string>(),
                                       enc.at("categories").get<std::vector<std::string>>()});
        }
        if (j.contains("tokenizer")) {
            Tokenizer tok;
            tok.words = j.at("tokenizer").at("words").get<std::vector<std::string>>();
            tok.max_len = j.at("tokenizer").at("max_len").get<int>();
            for (std::size_t i = 0; i < tok.words.size(); ++i)
                tok.index[tok.words[i]] = static_cast<int>(i) + 2;
            p.tokenizer = std::move(tok);
        }
        p.fitted_on = j.value("fitted_on", std::string());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("pipeline artifact: ") + e.what());
    }
    build_dense_layout(p);
    return p;
}

} // namespace ratekit
