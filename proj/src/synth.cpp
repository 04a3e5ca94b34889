#include "ratekit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "ratekit/rng.hpp"
#include "ratekit/text.hpp"

namespace ratekit {

namespace {

constexpr std::uint64_t kStreamFeatures = 1;
constexpr std::uint64_t kStreamAssignments = 2;
constexpr std::uint64_t kStreamEffects = 3;
constexpr std::uint64_t kStreamNoise = 4;
constexpr std::uint64_t kStreamMissing = 5;

constexpr int kCategoricalLevels = 5;

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

void standardize(std::vector<double>& v) {
    const double m = mean_of(v);
    const double s = std_of(v, m);
    if (s > 0.0)
        for (double& x : v) x = (x - m) / s;
    else
        for (double& x : v) x = 0.0;
}

struct Generated {
    Dataset data;
    std::vector<double> latent; // noise included, before quantile slicing
};

Generated generate(const SynthSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_rows);
    const auto n_num = static_cast<std::size_t>(spec.n_numeric);
    const auto n_cat = static_cast<std::size_t>(spec.n_categorical);
    const bool has_text = !spec.sector_vocab.empty();

    Rng root(spec.seed);
    Rng feat_rng = root.split(kStreamFeatures);
    Rng assign_rng = root.split(kStreamAssignments);
    Rng effect_rng = root.split(kStreamEffects);
    Rng noise_rng = root.split(kStreamNoise);
    Rng missing_rng = root.split(kStreamMissing);

    // Planted coefficients.
    std::vector<double> linear_coefs(n_num);
    for (auto& w : linear_coefs)
        w = effect_rng.uniform(0.6, 1.4) * (effect_rng.uniform() < 0.5 ? -1.0 : 1.0);
    const double interaction_coef = 1.2;
    const double threshold_coef = 1.6;
    const double threshold_at = 0.5;

    std::vector<std::vector<double>> level_effects(n_cat);
    for (auto& effects : level_effects) {
        effects.resize(kCategoricalLevels);
        for (auto& e : effects) e = 0.35 * effect_rng.normal();
    }

    // One additive effect per distinct word, drawn in sorted-word order so
    // the vocabulary layout, not the phrase order, determines the stream.
    std::map<std::string, double> word_effect;
    if (has_text) {
        std::set<std::string> words;
        for (const auto& phrase : spec.sector_vocab)
            for (auto& w : tokenize_words(phrase)) words.insert(std::move(w));
        for (const auto& w : words) word_effect[w] = effect_rng.normal();
    }

    // Features.
    std::vector<std::vector<double>> numeric(n_num, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < n_num; ++j) numeric[j][r] = feat_rng.normal();

    std::vector<std::vector<std::string>> categorical(n_cat, std::vector<std::string>(n));
    std::vector<std::vector<int>> cat_level(n_cat, std::vector<int>(n));
    for (std::size_t c = 0; c < n_cat; ++c)
        for (std::size_t r = 0; r < n; ++r) {
            const int level = static_cast<int>(assign_rng.uniform_int(kCategoricalLevels));
            cat_level[c][r] = level;
            categorical[c][r] = "cat" + std::to_string(c) + "_v" + std::to_string(level);
        }

    std::vector<std::string> text;
    std::vector<std::size_t> phrase_of;
    if (has_text) {
        text.resize(n);
        phrase_of.resize(n);
        for (std::size_t r = 0; r < n; ++r) {
            phrase_of[r] = assign_rng.uniform_int(spec.sector_vocab.size());
            text[r] = spec.sector_vocab[phrase_of[r]];
        }
    }

    // Latent score: standardized numeric part + scaled standardized sector
    // part + noise.
    std::vector<double> numeric_part(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        double z = 0.0;
        for (std::size_t j = 0; j < n_num; ++j) z += linear_coefs[j] * numeric[j][r];
        z += interaction_coef * numeric[0][r] * numeric[1][r];
        z += threshold_coef * (numeric[2][r] > threshold_at ? 1.0 : 0.0);
        for (std::size_t c = 0; c < n_cat; ++c)
            z += level_effects[c][static_cast<std::size_t>(cat_level[c][r])];
        numeric_part[r] = z;
    }
    standardize(numeric_part);

    std::vector<double> latent = numeric_part;
    if (has_text) {
        std::vector<double> sector_part(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            double e = 0.0;
            for (const auto& w : tokenize_words(text[r])) e += word_effect.at(w);
            sector_part[r] = e;
        }
        standardize(sector_part);
        for (std::size_t r = 0; r < n; ++r) latent[r] += spec.sector_effect_std * sector_part[r];
    }
    if (spec.noise_std > 0.0)
        for (std::size_t r = 0; r < n; ++r) latent[r] += spec.noise_std * noise_rng.normal();

    // Labels by latent-score rank: lowest scores get the best class. Stable
    // sort keyed on (latent, index) keeps ties deterministic.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return latent[a] < latent[b]; });
    const auto counts = class_counts_for(spec.class_weights, spec.n_rows);
    std::vector<int> labels(n);
    std::size_t pos = 0;
    for (int cls = 0; cls < kNumClasses; ++cls)
        for (int i = 0; i < counts[static_cast<std::size_t>(cls)]; ++i) labels[order[pos++]] = cls;

    // Hide exactly round(rate * cells) numeric cells, uniformly.
    if (spec.missing_rate > 0.0) {
        const std::size_t n_cells = n * n_num;
        const auto n_missing =
            static_cast<std::size_t>(std::llround(spec.missing_rate * static_cast<double>(n_cells)));
        std::vector<std::size_t> cells(n_cells);
        std::iota(cells.begin(), cells.end(), 0);
        missing_rng.shuffle(cells);
        for (std::size_t i = 0; i < n_missing; ++i) {
            const std::size_t cell = cells[i];
            numeric[cell % n_num][cell / n_num] = std::nan("");
        }
    }

    // Assemble.
    std::vector<Column> cols;
    for (std::size_t j = 0; j < n_num; ++j)
        cols.push_back({"num" + std::to_string(j), ColumnKind::numeric});
    for (std::size_t c = 0; c < n_cat; ++c)
        cols.push_back({"cat" + std::to_string(c), ColumnKind::categorical});
    if (has_text) cols.push_back({"sector_desc", ColumnKind::text});
    cols.push_back({"rating", ColumnKind::label});

    Generated out;
    out.data.schema = FeatureSchema::make(std::move(cols));
    out.data.n_rows = n;
    for (std::size_t j = 0; j < n_num; ++j)
        out.data.numeric_names.push_back("num" + std::to_string(j));
    out.data.numeric = std::move(numeric);
    for (std::size_t c = 0; c < n_cat; ++c)
        out.data.categorical_names.push_back("cat" + std::to_string(c));
    out.data.categorical = std::move(categorical);
    if (has_text) out.data.text = std::move(text);
    out.data.labels = labels;
    out.data.label_raw.reserve(n);
    for (int label : labels)
        out.data.label_raw.emplace_back(class_name(target_to_class(label)));
    out.latent = std::move(latent);
    return out;
}

} // namespace

void SynthSpec::validate() const {
    if (n_rows < 1) throw ConfigError("synth: n_rows must be positive");
    if (n_numeric < 3)
        throw ConfigError("synth: n_numeric must be >= 3 (interaction and threshold terms "
                          "use the first three columns)");
    if (n_categorical < 0) throw ConfigError("synth: n_categorical must be >= 0");
    if (missing_rate < 0.0 || missing_rate >= 1.0)
        throw ConfigError("synth: missing_rate must be in [0, 1)");
    if (noise_std < 0.0) throw ConfigError("synth: noise_std must be >= 0");
    if (sector_effect_std < 0.0) throw ConfigError("synth: sector_effect_std must be >= 0");
    double sum = 0.0;
    int positive = 0;
    for (double w : class_weights) {
        if (w < 0.0 || !std::isfinite(w)) throw ConfigError("synth: class_weights must be >= 0");
        if (w > 0.0) ++positive;
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw ConfigError("synth: class_weights must sum to 1");
    if (positive == 0) throw ConfigError("synth: class_weights are all zero");
    if (n_rows < positive)
        throw ConfigError("synth: n_rows too small for requested class_weights (" +
                          std::to_string(positive) + " classes have positive weight)");
}

nlohmann::json SynthSpec::to_json() const {
    return {
        {"n_rows", n_rows},
        {"n_numeric", n_numeric},
        {"n_categorical", n_categorical},
        {"sector_vocab", sector_vocab},
        {"class_weights", class_weights},
        {"missing_rate", missing_rate},
        {"noise_std", noise_std},
        {"sector_effect_std", sector_effect_std},
        {"seed", seed},
    };
}

SynthSpec SynthSpec::from_json(const nlohmann::json& j) {
    SynthSpec spec;
    try {
        spec.n_rows = j.at("n_rows").get<int>();
        if (!j.contains("seed")) throw ConfigError("synth: missing field \"seed\"");
        spec.seed = j.at("seed").get<std::uint64_t>();
        const auto weights = j.at("class_weights").get<std::vector<double>>();
        if (weights.size() != kNumClasses)
            throw ConfigError("synth: class_weights must have exactly 9 entries");
        std::copy(weights.begin(), weights.end(), spec.class_weights.begin());
        spec.n_numeric = j.value("n_numeric", spec.n_numeric);
        spec.n_categorical = j.value("n_categorical", spec.n_categorical);
        spec.sector_vocab = j.value("sector_vocab", spec.sector_vocab);
        spec.missing_rate = j.value("missing_rate", spec.missing_rate);
        spec.noise_std = j.value("noise_std", spec.noise_std);
        spec.sector_effect_std = j.value("sector_effect_std", spec.sector_effect_std);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("synth spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::array<int, kNumClasses> class_counts_for(const std::array<double, kNumClasses>& weights,
                                              int n_rows) {
    std::array<int, kNumClasses> counts{};
    std::array<double, kNumClasses> remainders{};
    int assigned = 0;
    for (int c = 0; c < kNumClasses; ++c) {
        const double exact = weights[static_cast<std::size_t>(c)] * n_rows;
        counts[static_cast<std::size_t>(c)] = static_cast<int>(std::floor(exact));
        remainders[static_cast<std::size_t>(c)] = exact - std::floor(exact);
        assigned += counts[static_cast<std::size_t>(c)];
    }
    // Hand out the leftover rows by largest remainder, lower class first on ties.
    std::array<int, kNumClasses> idx{};
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return remainders[static_cast<std::size_t>(a)] > remainders[static_cast<std::size_t>(b)];
    });
    for (int i = 0; i < n_rows - assigned; ++i) ++counts[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    return counts;
}

Dataset generate_synthetic(const SynthSpec& spec) { return generate(spec).data; }

std::vector<double> synthetic_latent_scores(const SynthSpec& spec) { return generate(spec).latent; }

} // namespace ratekit
