#include "ratekit/artifacts.hpp"

#include <fstream>

namespace ratekit {

std::string fingerprint_of(const nlohmann::json& j) {
    const std::string dump = j.dump();
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const unsigned char ch : dump) {
        hash ^= ch;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed: " + path);
}

void save_pipeline(const FittedPipeline& pipeline, const std::string& fingerprint,
                   const std::string& path) {
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    j["type"] = "pipeline";
    j["fingerprint"] = fingerprint;
    j["pipeline"] = pipeline.to_json();
    write_json_file(j, path);
}

FittedPipeline load_pipeline(const std::string& path, std::string* fingerprint) {
    const auto j = read_json_file(path);
    if (j.value("type", "") != "pipeline")
        throw DataError(path + ": not a pipeline artifact");
    if (j.value("version", "") != kArtifactVersion)
        throw DataError(path + ": unsupported artifact version");
    if (fingerprint) *fingerprint = j.value("fingerprint", "");
    return FittedPipeline::from_json(j.at("pipeline"));
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["data"] = std::vector<double>(m.data(), m.data() + m.size());
    return j;
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& what) {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols)
        throw DataError("model artifact: " + what + " data length does not match its shape");
    Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

nlohmann::json net_to_json(const Network& net) {
    nlohmann::json j;
    j["n_dense_in"] = net.n_dense_in;
    j["dropout"] = net.dropout;
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : net.layers) {
        layers.push_back({{"weights", matrix_to_json(layer.weights)},
                          {"bias", layer.bias},
                          {"activation", std::string(activation_name(layer.activation))}});
    }
    j["layers"] = layers;
    if (net.embedding) {
        j["embedding"] = {{"table", matrix_to_json(net.embedding->table)},
                          {"max_len", net.embedding->max_len},
                          {"spatial_dropout", net.embedding->spatial_dropout}};
    }
    // Shape manifest, validated on load.
    nlohmann::json shapes = nlohmann::json::array();
    for (const auto& layer : net.layers)
        shapes.push_back({{"in", layer.fan_in()}, {"out", layer.fan_out()}});
    j["shape_manifest"] = shapes;
    return j;
}

Network net_from_json(const nlohmann::json& j) {
    Network net;
    net.n_dense_in = j.at("n_dense_in").get<int>();
    net.dropout = j.at("dropout").get<double>();
    for (const auto& layer_json : j.at("layers")) {
        DenseLayer layer;
        layer.weights = matrix_from_json(layer_json.at("weights"), "dense weights");
        layer.bias = layer_json.at("bias").get<std::vector<double>>();
        layer.activation = parse_activation(layer_json.at("activation").get<std::string>());
        if (layer.bias.size() != layer.weights.rows())
            throw DataError("model artifact: bias length does not match the weight shape");
        net.layers.push_back(std::move(layer));
    }
    if (j.contains("embedding")) {
        EmbeddingBranch emb;
        emb.table = matrix_from_json(j.at("embedding").at("table"), "embedding table");
        emb.max_len = j.at("embedding").at("max_len").get<int>();
        emb.spatial_dropout = j.at("embedding").at("spatial_dropout").get<double>();
        net.embedding = std::move(emb);
    }
    const auto& shapes = j.at("shape_manifest");
    if (shapes.size() != net.layers.size())
        throw DataError("model artifact: shape manifest does not match the layer stack");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (shapes[l].at("in").get<std::size_t>() != net.layers[l].fan_in() ||
            shapes[l].at("out").get<std::size_t>() != net.layers[l].fan_out())
            throw DataError("model artifact: layer " + std::to_string(l) +
                            " shape does not match the manifest");
    }
    if (!net.layers.empty() && net.layers.back().fan_out() != 1)
        throw DataError("model artifact: output layer must have a single unit");
    return net;
}

} // namespace

void save_model(const ModelArtifact& artifact, const std::string& path) {
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    j["type"] = "model";
    j["kind"] = std::string(model_kind_name(artifact.kind));
    j["fingerprint"] = artifact.fingerprint;
    switch (artifact.kind) {
    case ModelKind::ann_emb:
    case ModelKind::ann:
        if (!artifact.net) throw StateError("save_model: missing network payload");
        j["net"] = net_to_json(*artifact.net);
        break;
    case ModelKind::linear:
        if (!artifact.linear) throw StateError("save_model: missing linear payload");
        j["linear"] = {{"weights", artifact.linear->weights}, {"bias", artifact.linear->bias}};
        break;
    case ModelKind::logistic: {
        if (!artifact.logistic) throw StateError("save_model: missing logistic payload");
        nlohmann::json classifiers = nlohmann::json::array();
        for (const auto& c : artifact.logistic->classifiers)
            classifiers.push_back(
                {{"weights", c.weights}, {"bias", c.bias}, {"trained", c.trained}});
        j["logistic"] = {{"classifiers", classifiers}};
        break;
    }
    }
    write_json_file(j, path);
}

ModelArtifact load_model(const std::string& path) {
    const auto j = read_json_file(path);
    if (j.value("type", "") != "model") throw DataError(path + ": not a model artifact");
    if (j.value("version", "") != kArtifactVersion)
        throw DataError(path + ": unsupported artifact version");

    ModelArtifact artifact;
    artifact.kind = parse_model_kind(j.at("kind").get<std::string>());
    artifact.fingerprint = j.value("fingerprint", "");
    try {
        switch (artifact.kind) {
        case ModelKind::ann_emb:
        case ModelKind::ann: artifact.net = net_from_json(j.at("net")); break;
        case ModelKind::linear: {
            LinearModel m;
            m.weights = j.at("linear").at("weights").get<std::vector<double>>();
            m.bias = j.at("linear").at("bias").get<double>();
            artifact.linear = std::move(m);
            break;
        }
        case ModelKind::logistic: {
            OvrLogisticModel m;
            const auto& classifiers = j.at("logistic").at("classifiers");
            if (classifiers.size() != static_cast<std::size_t>(kNumClasses))
                throw DataError("model artifact: logistic model must have exactly 9 classifiers");
            for (int c = 0; c < kNumClasses; ++c) {
                auto& binary = m.classifiers[static_cast<std::size_t>(c)];
                binary.weights = classifiers[static_cast<std::size_t>(c)]
                                     .at("weights").get<std::vector<double>>();
                binary.bias = classifiers[static_cast<std::size_t>(c)].at("bias").get<double>();
                binary.trained = classifiers[static_cast<std::size_t>(c)].at("trained").get<bool>();
            }
            artifact.logistic = std::move(m);
            break;
        }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return artifact;
}

} // namespace ratekit
