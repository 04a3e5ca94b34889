#include "ratekit/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>

#include "ratekit/rng.hpp"

namespace ratekit {

Predictor make_predictor(const Network& net) {
    return [&net](const Batch& batch) { return forward(net, batch, Mode::infer); };
}

Predictor make_predictor(const LinearModel& model) {
    return [&model](const Batch& batch) { return predict(model, batch.dense); };
}

Predictor make_predictor(const OvrLogisticModel& model) {
    return [&model](const Batch& batch) {
        const auto classes = predict_ovr(model, batch.dense);
        return std::vector<double>(classes.begin(), classes.end());
    };
}

Batch sample_background(const FeatureMatrix& features, std::span<const int> labels, int size,
                        std::uint64_t seed) {
    if (features.n_rows() == 0 || labels.size() != features.n_rows())
        throw DataError("background sampling: bad feature/label rows");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    Rng rng = Rng(seed).split(0xb6);
    for (auto& [cls, idx] : by_class) rng.shuffle(idx);

    // Cycle over classes, one row from each, until the budget is spent.
    std::vector<std::size_t> chosen;
    std::size_t round = 0;
    const auto want = static_cast<std::size_t>(std::min<std::size_t>(
        static_cast<std::size_t>(size), features.n_rows()));
    while (chosen.size() < want) {
        bool any = false;
        for (auto& [cls, idx] : by_class) {
            if (round < idx.size()) {
                chosen.push_back(idx[round]);
                any = true;
                if (chosen.size() == want) break;
            }
        }
        if (!any) break;
        ++round;
    }
    std::sort(chosen.begin(), chosen.end());
    return gather(features, chosen);
}

namespace {

using Mask = std::uint32_t;

// One hybrid row per background row: groups inside the coalition take their
// values from x, the rest from the background row.
Batch hybrid_batch(const Batch& x, const Batch& background,
                   const std::vector<FeatureGroup>& groups, Mask mask) {
    Batch out = background; // start from the background rows
    const std::size_t n_bg = background.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (!(mask >> g & 1u)) continue;
        const auto& group = groups[g];
        if (group.is_token_group()) {
            for (std::size_t r = 0; r < n_bg; ++r) out.tokens[r] = x.tokens[0];
        } else {
            for (std::size_t r = 0; r < n_bg; ++r)
                for (int i = 0; i < group.count; ++i)
                    out.dense(r, static_cast<std::size_t>(group.first + i)) =
                        x.dense(0, static_cast<std::size_t>(group.first + i));
        }
    }
    return out;
}

double coalition_value(const Predictor& model, const Batch& x, const Batch& background,
                       const std::vector<FeatureGroup>& groups, Mask mask) {
    const auto preds = model(hybrid_batch(x, background, groups, mask));
    return std::accumulate(preds.begin(), preds.end(), 0.0) /
           static_cast<double>(preds.size());
}

// Group representative value shown in explanations: the transformed value
// for numerics, the active slot index for one-hot blocks, the first
// non-padding token index for the token group.
double group_value(const Batch& x, const FeatureGroup& group) {
    if (group.is_token_group()) {
        for (const int t : x.tokens[0])
            if (t != Tokenizer::kPadIndex) return static_cast<double>(t);
        return 0.0;
    }
    if (group.count == 1) return x.dense(0, static_cast<std::size_t>(group.first));
    for (int i = 0; i < group.count; ++i)
        if (x.dense(0, static_cast<std::size_t>(group.first + i)) != 0.0)
            return static_cast<double>(i);
    return 0.0;
}

void check_explain_inputs(const Batch& x, const Batch& background,
                          const std::vector<FeatureGroup>& groups) {
    if (x.size() != 1) throw DataError("explanations are per-row: pass a single-row batch");
    if (background.size() == 0) throw DataError("background set is empty");
    bool has_token_group = false;
    for (const auto& g : groups) has_token_group |= g.is_token_group();
    if (has_token_group && (x.tokens.empty() || background.tokens.empty()))
        throw DataError("token group declared but token sequences are missing");
}

ShapExplanation finish_explanation(const Batch& x, const std::vector<FeatureGroup>& groups,
                                   double base, double prediction, std::vector<double> phis) {
    ShapExplanation e;
    e.base_value = base;
    e.prediction = prediction;
    e.phis = std::move(phis);
    for (const auto& g : groups) {
        e.feature_names.push_back(g.name);
        e.feature_values.push_back(group_value(x, g));
    }
    return e;
}

} // namespace

ShapExplanation shap_exact(const Predictor& model, const Batch& x, const Batch& background,
                           const std::vector<FeatureGroup>& groups) {
    check_explain_inputs(x, background, groups);
    const int n = static_cast<int>(groups.size());
    if (n > 12)
        throw ConfigError("shap_exact enumerates 2^n coalitions and refuses n > 12 feature "
                          "groups; use shap_kernel");
    const std::size_t n_masks = std::size_t{1} << n;

    std::vector<double> value(n_masks);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t m = 0; m < static_cast<std::int64_t>(n_masks); ++m)
        value[static_cast<std::size_t>(m)] =
            coalition_value(model, x, background, groups, static_cast<Mask>(m));

    // weight(s) = s! (n-1-s)! / n! for a coalition of size s not containing j.
    std::vector<double> weight(static_cast<std::size_t>(n));
    {
        std::vector<double> fact(static_cast<std::size_t>(n) + 1, 1.0);
        for (std::size_t i = 1; i < fact.size(); ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
        for (int s = 0; s < n; ++s)
            weight[static_cast<std::size_t>(s)] =
                fact[static_cast<std::size_t>(s)] * fact[static_cast<std::size_t>(n - 1 - s)] /
                fact[static_cast<std::size_t>(n)];
    }

    std::vector<double> phis(static_cast<std::size_t>(n), 0.0);
    for (Mask mask = 0; mask < n_masks; ++mask) {
        const int size = std::popcount(mask);
        for (int j = 0; j < n; ++j) {
            if (mask >> j & 1u) continue;
            phis[static_cast<std::size_t>(j)] +=
                weight[static_cast<std::size_t>(size)] *
                (value[mask | (Mask{1} << j)] - value[mask]);
        }
    }
    return finish_explanation(x, groups, value[0], value[n_masks - 1], std::move(phis));
}

ShapExplanation shap_kernel(const Predictor& model, const Batch& x, const Batch& background,
                            const std::vector<FeatureGroup>& groups, int n_samples,
                            std::uint64_t seed) {
    check_explain_inputs(x, background, groups);
    const int n = static_cast<int>(groups.size());
    if (n < 2) throw ConfigError("shap_kernel needs at least 2 feature groups");
    if (n_samples < 2 * n + 2)
        throw ConfigError("shap_kernel: n_samples must be at least 2*n_features + 2");

    const double v_empty = coalition_value(model, x, background, groups, 0);
    const Mask full = n >= 32 ? ~Mask{0} : (Mask{1} << n) - 1;
    const double v_full = coalition_value(model, x, background, groups, full);

    // Collect weighted coalitions: exhaustive when affordable, otherwise
    // sampled from the Shapley kernel over sizes.
    std::map<Mask, double> coalition_weight;
    const bool enumerable =
        n <= 24 && static_cast<std::uint64_t>(n_samples) >= (std::uint64_t{1} << n) - 2;
    if (enumerable) {
        // Exact kernel weight pi(s) = (n-1) / (C(n,s) * s * (n-s)).
        std::vector<double> log_choose(static_cast<std::size_t>(n) + 1, 0.0);
        for (int s = 1; s <= n; ++s)
            log_choose[static_cast<std::size_t>(s)] =
                log_choose[static_cast<std::size_t>(s - 1)] +
                std::log(static_cast<double>(n - s + 1) / static_cast<double>(s));
        for (Mask mask = 1; mask < full; ++mask) {
            const int s = std::popcount(mask);
            coalition_weight[mask] =
                static_cast<double>(n - 1) /
                (std::exp(log_choose[static_cast<std::size_t>(s)]) * static_cast<double>(s) *
                 static_cast<double>(n - s));
        }
    } else {
        // Size distribution proportional to the total kernel mass per size.
        std::vector<double> size_mass(static_cast<std::size_t>(n), 0.0);
        double total = 0.0;
        for (int s = 1; s < n; ++s) {
            size_mass[static_cast<std::size_t>(s)] =
                static_cast<double>(n - 1) / (static_cast<double>(s) * static_cast<double>(n - s));
            total += size_mass[static_cast<std::size_t>(s)];
        }
        Rng rng = Rng(seed).split(0x5a9);
        std::vector<int> positions(static_cast<std::size_t>(n));
        std::iota(positions.begin(), positions.end(), 0);
        for (int k = 0; k < n_samples; ++k) {
            double u = rng.uniform() * total;
            int s = 1;
            for (; s < n - 1; ++s) {
                u -= size_mass[static_cast<std::size_t>(s)];
                if (u <= 0.0) break;
            }
            rng.shuffle(positions);
            Mask mask = 0;
            for (int i = 0; i < s; ++i) mask |= Mask{1} << positions[static_cast<std::size_t>(i)];
            coalition_weight[mask] += 1.0;
        }
    }

    std::vector<Mask> masks;
    std::vector<double> weights;
    masks.reserve(coalition_weight.size());
    for (const auto& [mask, w] : coalition_weight) {
        masks.push_back(mask);
        weights.push_back(w);
    }

    std::vector<double> values(masks.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(masks.size()); ++i)
        values[static_cast<std::size_t>(i)] =
            coalition_value(model, x, background, groups, masks[static_cast<std::size_t>(i)]);

    // Weighted least squares with the additivity constraint folded in by
    // eliminating the last feature:
    //   y = v(S) - v0 - z_last (vN - v0),  x_j = z_j - z_last  (j < n-1).
    const std::size_t dim = static_cast<std::size_t>(n) - 1;
    Matrix gram(dim, dim);
    std::vector<double> rhs(dim, 0.0);
    const double span = v_full - v_empty;
    std::vector<double> zrow(dim);
    for (std::size_t k = 0; k < masks.size(); ++k) {
        const Mask mask = masks[k];
        const double z_last = (mask >> (n - 1)) & 1u ? 1.0 : 0.0;
        for (std::size_t j = 0; j < dim; ++j)
            zrow[j] = ((mask >> j) & 1u ? 1.0 : 0.0) - z_last;
        const double y = values[k] - v_empty - z_last * span;
        const double w = weights[k];
        for (std::size_t i = 0; i < dim; ++i) {
            if (zrow[i] == 0.0) continue;
            rhs[i] += w * zrow[i] * y;
            for (std::size_t j = 0; j <= i; ++j) gram(i, j) += w * zrow[i] * zrow[j];
        }
    }
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) gram(i, j) = gram(j, i);

    std::vector<double> head;
    try {
        head = kernels::solve_spd(gram, rhs);
    } catch (const NumericError&) {
        std::cerr << "shap_kernel: singular system, adding 1e-10 ridge\n";
        for (std::size_t i = 0; i < dim; ++i) gram(i, i) += 1e-10;
        head = kernels::solve_spd(gram, rhs);
    }

    std::vector<double> phis(static_cast<std::size_t>(n));
    double head_sum = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        phis[j] = head[j];
        head_sum += head[j];
    }
    phis[static_cast<std::size_t>(n) - 1] = span - head_sum;
    return finish_explanation(x, groups, v_empty, v_full, std::move(phis));
}

ForcePlotData force_plot_data(const ShapExplanation& e) {
    ForcePlotData out;
    out.base_value = e.base_value;
    out.prediction = e.prediction;
    std::vector<std::size_t> order(e.phis.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(e.phis[a]) > std::abs(e.phis[b]);
    });
    for (const std::size_t i : order) {
        if (e.phis[i] == 0.0) continue;
        out.arrows.push_back({e.feature_names[i], e.phis[i], e.feature_values[i]});
    }
    return out;
}

nlohmann::json ForcePlotData::to_json() const {
    nlohmann::json arrows_json = nlohmann::json::array();
    for (const auto& a : arrows)
        arrows_json.push_back({{"feature", a.name}, {"phi", a.phi}, {"value", a.value}});
    return {
        {"base_value", base_value},
        {"prediction", prediction},
        {"arrows", arrows_json},
    };
}

ForcePlotData ForcePlotData::from_json(const nlohmann::json& j) {
    ForcePlotData out;
    try {
        out.base_value = j.at("base_value").get<double>();
        out.prediction = j.at("prediction").get<double>();
        for (const auto& a : j.at("arrows"))
            out.arrows.push_back({a.at("feature").get<std::string>(), a.at("phi").get<double>(),
                                  a.at("value").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("force plot data: ") + e.what());
    }
    return out;
}

namespace {

void check_same_feature_space(std::span<const ShapExplanation> explanations) {
    if (explanations.empty()) throw DataError("no explanations given");
    for (const auto& e : explanations)
        if (e.feature_names != explanations.front().feature_names)
            throw DataError("explanations come from mixed feature spaces");
}

} // namespace

ImportanceTable importance(std::span<const ShapExplanation> explanations) {
    check_same_feature_space(explanations);
    const std::size_t n = explanations.front().phis.size();
    std::vector<double> mean_abs(n, 0.0);
    for (const auto& e : explanations)
        for (std::size_t j = 0; j < n; ++j) mean_abs[j] += std::abs(e.phis[j]);
    for (double& v : mean_abs) v /= static_cast<double>(explanations.size());

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mean_abs[a] > mean_abs[b]; });

    ImportanceTable table;
    for (const std::size_t j : order) {
        table.features.push_back(explanations.front().feature_names[j]);
        table.mean_abs_phi.push_back(mean_abs[j]);
    }
    return table;
}

SummaryData summary_plot_data(std::span<const ShapExplanation> explanations) {
    const ImportanceTable table = importance(explanations); // validates the inputs
    const auto& names = explanations.front().feature_names;

    SummaryData out;
    out.features = table.features;
    for (const auto& feature : table.features) {
        const auto j = static_cast<std::size_t>(
            std::find(names.begin(), names.end(), feature) - names.begin());
        double lo = explanations.front().feature_values[j];
        double hi = lo;
        for (const auto& e : explanations) {
            lo = std::min(lo, e.feature_values[j]);
            hi = std::max(hi, e.feature_values[j]);
        }
        std::vector<std::pair<double, double>> points;
        points.reserve(explanations.size());
        for (const auto& e : explanations) {
            const double norm =
                hi > lo ? (e.feature_values[j] - lo) / (hi - lo) : 0.5; // constant: mid color
            points.emplace_back(e.phis[j], norm);
        }
        out.points.push_back(std::move(points));
    }
    return out;
}

} // namespace ratekit
