#include "ratekit/net.hpp"

#include <cmath>
#include <string>

namespace ratekit {

std::string_view activation_name(Activation a) {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
    case Activation::sigmoid: return "sigmoid";
    }
    return "?";
}

Activation parse_activation(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "identity") return Activation::identity;
    if (name == "sigmoid") return Activation::sigmoid;
    throw ConfigError("unknown activation: \"" + std::string(name) + "\"");
}

std::size_t Network::parameter_count() const {
    std::size_t n = embedding ? embedding->table.size() : 0;
    for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
    return n;
}

Network build_network(int n_dense_in, std::optional<std::pair<int, int>> text,
                      const NetConfig& cfg, Rng& rng) {
    if (cfg.hidden_layers < 1) throw ConfigError("network needs at least one hidden layer");
    if (cfg.dropout < 0.0 || cfg.dropout >= 1.0 || cfg.spatial_dropout < 0.0 ||
        cfg.spatial_dropout >= 1.0)
        throw ConfigError("dropout rates must lie in [0, 1)");

    Network net;
    net.n_dense_in = n_dense_in;
    net.dropout = cfg.dropout;
    if (text) {
        const auto [vocab_size, max_len] = *text;
        if (vocab_size < 2 || max_len < 1)
            throw ConfigError("embedding branch needs vocab_size >= 2 and max_len >= 1");
        EmbeddingBranch emb;
        emb.table = Matrix(static_cast<std::size_t>(vocab_size),
                           static_cast<std::size_t>(cfg.embedding_dim));
        for (std::size_t i = 0; i < emb.table.size(); ++i)
            emb.table.data()[i] = rng.uniform(-0.05, 0.05);
        emb.max_len = max_len;
        emb.spatial_dropout = cfg.spatial_dropout;
        net.embedding = std::move(emb);
    }

    auto make_dense = [&rng](int in, int out, Activation act) {
        DenseLayer layer;
        layer.weights = Matrix(static_cast<std::size_t>(out), static_cast<std::size_t>(in));
        const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        for (std::size_t i = 0; i < layer.weights.size(); ++i)
            layer.weights.data()[i] = rng.uniform(-bound, bound);
        layer.bias.assign(static_cast<std::size_t>(out), 0.0);
        layer.activation = act;
        return layer;
    };

    int in = net.input_dim();
    for (int i = 0; i < cfg.hidden_layers; ++i) {
        net.layers.push_back(make_dense(in, cfg.hidden_units, Activation::relu));
        in = cfg.hidden_units;
    }
    net.layers.push_back(make_dense(in, 1, Activation::identity));
    return net;
}

Batch gather(const FeatureMatrix& features, std::span<const std::size_t> rows) {
    Batch batch;
    batch.dense = Matrix(rows.size(), features.dense.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* src = features.dense.row(rows[i]);
        std::copy(src, src + features.dense.cols(), batch.dense.row(i));
    }
    if (!features.token_seqs.empty()) {
        batch.tokens.reserve(rows.size());
        for (const std::size_t r : rows) batch.tokens.push_back(features.token_seqs[r]);
    }
    return batch;
}

Batch full_batch(const FeatureMatrix& features) {
    return Batch{features.dense, features.token_seqs};
}

namespace {

void apply_activation(Activation act, Matrix& m) {
    double* p = m.data();
    const std::size_t n = m.size();
    switch (act) {
    case Activation::relu:
        for (std::size_t i = 0; i < n; ++i)
            if (p[i] < 0.0) p[i] = 0.0;
        break;
    case Activation::sigmoid:
        for (std::size_t i = 0; i < n; ++i) p[i] = 1.0 / (1.0 + std::exp(-p[i]));
        break;
    case Activation::identity: break;
    }
}

// d(activation)/d(pre) given pre-activation and grad of post-activation, in place.
void activation_backward(Activation act, const Matrix& pre, Matrix& grad) {
    const std::size_t n = grad.size();
    switch (act) {
    case Activation::relu:
        for (std::size_t i = 0; i < n; ++i)
            if (pre.data()[i] <= 0.0) grad.data()[i] = 0.0;
        break;
    case Activation::sigmoid:
        for (std::size_t i = 0; i < n; ++i) {
            const double s = 1.0 / (1.0 + std::exp(-pre.data()[i]));
            grad.data()[i] *= s * (1.0 - s);
        }
        break;
    case Activation::identity: break;
    }
}

// Embedding lookup + (train-mode) spatial dropout + flatten.
Matrix embed_tokens(const EmbeddingBranch& emb, const std::vector<std::vector<int>>& tokens,
                    Mode mode, Rng* rng, std::vector<std::vector<double>>* masks_out) {
    const std::size_t n = tokens.size();
    const int dim = emb.dim();
    Matrix out(n, static_cast<std::size_t>(emb.flat_size()));
    const bool drop = mode == Mode::train && emb.spatial_dropout > 0.0;
    const double keep = 1.0 - emb.spatial_dropout;
    for (std::size_t r = 0; r < n; ++r) {
        if (tokens[r].size() != static_cast<std::size_t>(emb.max_len))
            throw DataError("token sequence length does not match the embedding branch");
        // One mask per embedding channel, shared across all sequence
        // positions: a dropped channel is zero for the whole sequence.
        std::vector<double> mask;
        if (drop) {
            mask.resize(static_cast<std::size_t>(dim));
            for (auto& m : mask) m = rng->uniform() < keep ? 1.0 / keep : 0.0;
        }
        double* row = out.row(r);
        for (int t = 0; t < emb.max_len; ++t) {
            const int token = tokens[r][static_cast<std::size_t>(t)];
            if (token < 0 || token >= emb.vocab_size())
                throw DataError("token index " + std::to_string(token) +
                                " outside embedding vocabulary of size " +
                                std::to_string(emb.vocab_size()));
            const double* evec = emb.table.row(static_cast<std::size_t>(token));
            for (int d = 0; d < dim; ++d) {
                double v = evec[d];
                if (drop) v *= mask[static_cast<std::size_t>(d)];
                row[t * dim + d] = v;
            }
        }
        if (masks_out) masks_out->push_back(std::move(mask));
    }
    return out;
}

Matrix concat_columns(const Matrix& left, const Matrix& right) {
    if (left.size() == 0) return right;
    if (right.size() == 0) return left;
    Matrix out(left.rows(), left.cols() + right.cols());
    for (std::size_t r = 0; r < left.rows(); ++r) {
        double* dst = out.row(r);
        std::copy(left.row(r), left.row(r) + left.cols(), dst);
        std::copy(right.row(r), right.row(r) + right.cols(), dst + left.cols());
    }
    return out;
}

} // namespace

std::vector<double> forward(const Network& net, const Batch& batch, Mode mode, Rng* rng,
                            ForwardTrace* trace) {
    const bool training = mode == Mode::train;
    if (training && (rng == nullptr || trace == nullptr))
        throw StateError("train-mode forward requires an rng and a trace");
    if (static_cast<int>(batch.dense.cols()) != net.n_dense_in)
        throw DataError("batch dense width does not match the network input spec");
    if (net.embedding && batch.tokens.size() != batch.size())
        throw DataError("batch is missing token sequences for the embedding branch");

    Matrix embedded;
    std::vector<std::vector<double>> spatial_masks;
    if (net.embedding)
        embedded = embed_tokens(*net.embedding, batch.tokens, mode, rng,
                                training ? &spatial_masks : nullptr);

    Matrix h = concat_columns(embedded, batch.dense);
    const Matrix concat_input = h;

    std::vector<Matrix> pre_activations;
    std::vector<Matrix> activations;
    std::vector<Matrix> dropout_masks;
    const std::size_t n_hidden = net.layers.size() - 1;

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        Matrix z;
        kernels::dense_forward(h, layer.weights, layer.bias, z);
        if (training) pre_activations.push_back(z);
        apply_activation(layer.activation, z);
        const bool hidden = l < n_hidden;
        if (hidden && training && net.dropout > 0.0) {
            const double keep = 1.0 - net.dropout;
            Matrix mask(z.rows(), z.cols());
            for (std::size_t i = 0; i < mask.size(); ++i)
                mask.data()[i] = rng->uniform() < keep ? 1.0 / keep : 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] *= mask.data()[i];
            dropout_masks.push_back(std::move(mask));
        } else if (hidden && training) {
            dropout_masks.emplace_back(); // p == 0: identity mask placeholder
        }
        if (training) activations.push_back(z);
        h = std::move(z);
    }

    std::vector<double> predictions(batch.size());
    for (std::size_t r = 0; r < batch.size(); ++r) predictions[r] = h(r, 0);

    if (trace) {
        trace->training = training;
        trace->batch = batch;
        trace->embedded = std::move(embedded);
        trace->spatial_masks = std::move(spatial_masks);
        trace->concat_input = std::move(concat_input);
        trace->pre_activations = std::move(pre_activations);
        trace->activations = std::move(activations);
        trace->dropout_masks = std::move(dropout_masks);
        trace->predictions = predictions;
    }
    return predictions;
}

std::vector<double> predict(const Network& net, const FeatureMatrix& features) {
    return forward(net, full_batch(features), Mode::infer);
}

Gradients backward(const Network& net, const ForwardTrace& trace,
                   std::span<const double> d_predictions) {
    if (!trace.training)
        throw StateError("backward requires a trace recorded by a train-mode forward");
    if (trace.activations.size() != net.layers.size())
        throw StateError("trace does not match the network layer stack");
    const std::size_t n = trace.batch.size();
    if (d_predictions.size() != n)
        throw StateError("upstream gradient length does not match the traced batch");

    Gradients grads;
    grads.weights.resize(net.layers.size());
    grads.biases.resize(net.layers.size());

    Matrix d_out(n, 1);
    for (std::size_t r = 0; r < n; ++r) d_out(r, 0) = d_predictions[r];

    const std::size_t n_hidden = net.layers.size() - 1;
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const auto& layer = net.layers[li];
        // Through dropout (post-activation) for hidden layers.
        if (li < n_hidden) {
            const Matrix& mask = trace.dropout_masks[li];
            if (mask.size() != 0)
                for (std::size_t i = 0; i < d_out.size(); ++i)
                    d_out.data()[i] *= mask.data()[i];
        }
        activation_backward(layer.activation, trace.pre_activations[li], d_out);
        const Matrix& input = li == 0 ? trace.concat_input : trace.activations[li - 1];
        kernels::dense_backward_params(input, d_out, grads.weights[li], grads.biases[li]);
        if (li > 0) {
            Matrix d_in;
            kernels::dense_backward_input(d_out, layer.weights, d_in);
            d_out = std::move(d_in);
        } else {
            Matrix d_concat;
            kernels::dense_backward_input(d_out, layer.weights, d_concat);
            if (net.embedding) {
                const auto& emb = *net.embedding;
                const int dim = emb.dim();
                grads.embedding = Matrix(emb.table.rows(), emb.table.cols());
                const bool dropped = !trace.spatial_masks.empty();
                // Scatter-add back into the rows the batch touched; kept
                // serial so accumulation order is fixed.
                for (std::size_t r = 0; r < n; ++r) {
                    const double* drow = d_concat.row(r);
                    for (int t = 0; t < emb.max_len; ++t) {
                        const auto token =
                            static_cast<std::size_t>(trace.batch.tokens[r][static_cast<std::size_t>(t)]);
                        double* gxrow = grads.embedding->row(token);
                        for (int d = 0; d < dim; ++d) {
                            double g = drow[t * dim + d];
                            if (dropped && !trace.spatial_masks[r].empty())
                                g *= trace.spatial_masks[r][static_cast<std::size_t>(d)];
                            gxrow[static_cast<std::size_t>(d)] += g;
                        }
                    }
                }
            }
        }
    }
    return grads;
}

namespace {

void check_finite(const double* data, std::size_t n, const std::string& what) {
    double max_abs = 0.0;
    bool bad = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(data[i])) bad = true;
        else max_abs = std::max(max_abs, std::abs(data[i]));
    }
    if (bad)
        throw NumericError("non-finite gradient in " + what +
                           " (max finite magnitude " + std::to_string(max_abs) + ")");
}

void axpy_update(std::vector<double>& param, const std::vector<double>& grad, double lr,
                 double momentum, std::vector<double>* vel) {
    if (momentum > 0.0 && vel) {
        for (std::size_t i = 0; i < param.size(); ++i) {
            (*vel)[i] = momentum * (*vel)[i] + grad[i];
            param[i] -= lr * (*vel)[i];
        }
    } else {
        for (std::size_t i = 0; i < param.size(); ++i) param[i] -= lr * grad[i];
    }
}

void matrix_update(Matrix& param, const Matrix& grad, double lr, double momentum, Matrix* vel) {
    if (momentum > 0.0 && vel) {
        for (std::size_t i = 0; i < param.size(); ++i) {
            vel->data()[i] = momentum * vel->data()[i] + grad.data()[i];
            param.data()[i] -= lr * vel->data()[i];
        }
    } else {
        for (std::size_t i = 0; i < param.size(); ++i) param.data()[i] -= lr * grad.data()[i];
    }
}

} // namespace

void sgd_step(Network& net, const Gradients& grads, double lr, double momentum,
              Gradients* velocity) {
    if (lr <= 0.0) throw ConfigError("sgd_step: learning rate must be positive");
    if (grads.weights.size() != net.layers.size())
        throw StateError("sgd_step: gradient/layer count mismatch");

    if (net.embedding && grads.embedding)
        check_finite(grads.embedding->data(), grads.embedding->size(), "embedding table");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        check_finite(grads.weights[l].data(), grads.weights[l].size(),
                     "dense layer " + std::to_string(l) + " weights");
        check_finite(grads.biases[l].data(), grads.biases[l].size(),
                     "dense layer " + std::to_string(l) + " bias");
    }

    if (momentum > 0.0 && velocity) {
        if (velocity->weights.empty()) {
            velocity->weights.resize(net.layers.size());
            velocity->biases.resize(net.layers.size());
            for (std::size_t l = 0; l < net.layers.size(); ++l) {
                velocity->weights[l] =
                    Matrix(net.layers[l].weights.rows(), net.layers[l].weights.cols());
                velocity->biases[l].assign(net.layers[l].bias.size(), 0.0);
            }
            if (net.embedding)
                velocity->embedding = Matrix(net.embedding->table.rows(), net.embedding->table.cols());
        }
    }

    if (net.embedding && grads.embedding)
        matrix_update(net.embedding->table, *grads.embedding, lr, momentum,
                      velocity && velocity->embedding ? &*velocity->embedding : nullptr);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        matrix_update(net.layers[l].weights, grads.weights[l], lr, momentum,
                      velocity ? &velocity->weights[l] : nullptr);
        axpy_update(net.layers[l].bias, grads.biases[l], lr, momentum,
                    velocity ? &velocity->biases[l] : nullptr);
    }
}

} // namespace ratekit
