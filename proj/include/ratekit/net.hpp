#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ratekit/kernels.hpp"
#include "ratekit/preprocess.hpp"
#include "ratekit/rng.hpp"

namespace ratekit {

enum class Activation { relu, identity, sigmoid };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

struct DenseLayer {
    Matrix weights; // out x in
    std::vector<double> bias;
    Activation activation = Activation::relu;

    std::size_t fan_in() const { return weights.cols(); }
    std::size_t fan_out() const { return weights.rows(); }
};

// Token branch: embedding lookup -> spatial dropout over embedding channels
// -> flatten to max_len * dim.
struct EmbeddingBranch {
    Matrix table; // vocab_size x dim
    int max_len = 0;
    double spatial_dropout = 0.0;

    int vocab_size() const { return static_cast<int>(table.rows()); }
    int dim() const { return static_cast<int>(table.cols()); }
    int flat_size() const { return max_len * dim(); }
};

// Fixed topology: [embedding branch ++ dense features] -> hidden dense
// stack with dropout after each hidden layer -> one linear output unit.
struct Network {
    std::optional<EmbeddingBranch> embedding;
    int n_dense_in = 0;
    std::vector<DenseLayer> layers; // hidden layers + final Dense(.., 1, identity)
    double dropout = 0.5;           // after each hidden layer

    int input_dim() const {
        return n_dense_in + (embedding ? embedding->flat_size() : 0);
    }
    std::size_t parameter_count() const;
};

struct NetConfig {
    int hidden_layers = 2;
    int hidden_units = 64;
    double dropout = 0.5;
    double spatial_dropout = 0.5;
    int embedding_dim = 10;
};

// Seeded init: dense weights uniform in +-sqrt(6/(fan_in+fan_out)), biases
// zero, embeddings uniform in +-0.05. Pass text = {vocab_size, max_len} to
// attach the embedding branch.
Network build_network(int n_dense_in, std::optional<std::pair<int, int>> text,
                      const NetConfig& cfg, Rng& rng);

// One mini-batch view of a FeatureMatrix.
struct Batch {
    Matrix dense;
    std::vector<std::vector<int>> tokens;

    std::size_t size() const { return dense.rows(); }
};

Batch gather(const FeatureMatrix& features, std::span<const std::size_t> rows);
Batch full_batch(const FeatureMatrix& features);

enum class Mode { train, infer };

// Cached activations and dropout masks from one forward pass; required by
// backward(), which only accepts traces recorded in train mode.
struct ForwardTrace {
    bool training = false;
    Batch batch;
    Matrix embedded;                  // post spatial dropout, flattened
    std::vector<std::vector<double>> spatial_masks; // per row, per channel (scaled)
    Matrix concat_input;
    std::vector<Matrix> pre_activations;
    std::vector<Matrix> activations;  // post dropout where applicable
    std::vector<Matrix> dropout_masks; // scaled masks per hidden layer
    std::vector<double> predictions;
};

// Predictions for one batch. Train mode applies inverted dropout (scaling
// by 1/(1-p) at train time, identity at infer time) and requires rng and
// trace. Throws DataError on token indices outside the embedding table.
std::vector<double> forward(const Network& net, const Batch& batch, Mode mode, Rng* rng = nullptr,
                            ForwardTrace* trace = nullptr);

// Convenience: infer-mode forward over a whole FeatureMatrix.
std::vector<double> predict(const Network& net, const FeatureMatrix& features);

struct Gradients {
    std::optional<Matrix> embedding;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

// Gradients of a scalar loss given d_loss/d_prediction per batch row.
// Embedding rows not referenced by the batch get zero gradient.
Gradients backward(const Network& net, const ForwardTrace& trace,
                   std::span<const double> d_predictions);

// w <- w - lr * g (momentum optional, default off: velocity = nullptr or
// momentum = 0). Throws NumericError naming the layer on non-finite
// gradients.
void sgd_step(Network& net, const Gradients& grads, double lr, double momentum = 0.0,
              Gradients* velocity = nullptr);

} // namespace ratekit
