#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ratekit/dataset.hpp"
#include "ratekit/synth.hpp"

using namespace ratekit;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/ratekit_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

FeatureSchema small_schema() {
    return FeatureSchema::make({{"revenue", ColumnKind::numeric},
                                {"region", ColumnKind::categorical},
                                {"sector_desc", ColumnKind::text},
                                {"rating", ColumnKind::label}});
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("schema validation") {
    CHECK_THROWS_AS(FeatureSchema::make({{"a", ColumnKind::numeric}}), ConfigError); // no label
    CHECK_THROWS_AS(FeatureSchema::make({{"a", ColumnKind::categorical},
                                         {"y", ColumnKind::label}}),
                    ConfigError); // no numeric
    CHECK_THROWS_AS(FeatureSchema::make({{"a", ColumnKind::numeric},
                                         {"a", ColumnKind::numeric},
                                         {"y", ColumnKind::label}}),
                    ConfigError); // duplicate name
    CHECK_THROWS_AS(FeatureSchema::make({{"a", ColumnKind::numeric},
                                         {"t1", ColumnKind::text},
                                         {"t2", ColumnKind::text},
                                         {"y", ColumnKind::label}}),
                    ConfigError); // two text columns
    const auto ok = small_schema();
    CHECK(ok.columns().size() == 4);
    CHECK(ok.text_column_index() == 2);
    CHECK(FeatureSchema::from_json(ok.to_json()) == ok);
}

TEST_CASE("well-formed file loads with typed cells") {
    TempFile f("ok.csv");
    write_file(f.path, "revenue,region,sector_desc,rating\n"
                       "1.5,north,\"wholesale, retail trade\",Baa2\n"
                       "2.5,south,air transport,Aa\n"
                       ",,machinery,C\n");
    const auto data = load_csv(f.path, small_schema());
    CHECK(data.n_rows == 3);
    CHECK(data.numeric[0][0] == 1.5);
    CHECK(std::isnan(data.numeric[0][2]));             // empty numeric = missing, not zero
    CHECK(data.categorical[0][2] == kMissingCategory); // empty categorical = reserved category
    CHECK((*data.text)[0] == "wholesale, retail trade"); // quoted comma survives
    CHECK(data.labels == std::vector<int>{3, 1, 8});
    CHECK(data.label_raw[0] == "Baa2");
}

TEST_CASE("bad label and bad numeric are reported with coordinates") {
    TempFile f("bad_label.csv");
    write_file(f.path, "revenue,region,sector_desc,rating\n1.0,north,x,Baa9\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path, small_schema()), doctest::Contains("Baa9"), DataError);
    CHECK_THROWS_WITH_AS(load_csv(f.path, small_schema()), doctest::Contains("row 1"), DataError);

    TempFile g("bad_num.csv");
    write_file(g.path, "revenue,region,sector_desc,rating\nabc,north,x,Baa\n");
    CHECK_THROWS_WITH_AS(load_csv(g.path, small_schema()), doctest::Contains("abc"), DataError);
}

TEST_CASE("header mismatch is rejected") {
    TempFile f("bad_header.csv");
    write_file(f.path, "revenue,area,sector_desc,rating\n1.0,north,x,Baa\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path, small_schema()), doctest::Contains("area"), DataError);
}

TEST_CASE("write then load is a fixed point") {
    TempFile f("rt_src.csv");
    write_file(f.path, "revenue,region,sector_desc,rating\n"
                       "1.5,north,\"a, b\",Baa2\n"
                       ",\"quo\"\"ted\",plain,C\n");
    const auto data = load_csv(f.path, small_schema());

    TempFile g("rt_out.csv");
    write_csv(data, g.path);
    const auto reloaded = load_csv(g.path, small_schema());
    CHECK(reloaded.n_rows == data.n_rows);
    CHECK(reloaded.label_raw == data.label_raw);
    CHECK(reloaded.categorical == data.categorical);
    CHECK(*reloaded.text == *data.text);
    for (std::size_t r = 0; r < data.n_rows; ++r) {
        const bool both_nan = std::isnan(data.numeric[0][r]) && std::isnan(reloaded.numeric[0][r]);
        CHECK((both_nan || data.numeric[0][r] == reloaded.numeric[0][r]));
    }

    // Writing the reloaded dataset reproduces the file byte for byte.
    TempFile h("rt_out2.csv");
    write_csv(reloaded, h.path);
    std::ifstream a(g.path, std::ios::binary), b(h.path, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("synthetic generation is deterministic") {
    SynthSpec spec;
    spec.n_rows = 200;
    spec.n_numeric = 4;
    spec.n_categorical = 1;
    spec.sector_vocab = {"air transport", "retail trade", "heavy machinery"};
    spec.class_weights = {0.05, 0.1, 0.2, 0.25, 0.2, 0.1, 0.05, 0.03, 0.02};
    spec.seed = 42;

    const auto a = generate_synthetic(spec);
    const auto b = generate_synthetic(spec);
    CHECK(a.numeric == b.numeric);
    CHECK(a.labels == b.labels);
    CHECK(a.categorical == b.categorical);
    CHECK(*a.text == *b.text);

    SynthSpec other = spec;
    other.seed = 43;
    CHECK(generate_synthetic(other).labels != a.labels);
}

TEST_CASE("noiseless labels are a deterministic monotone function of the latent score") {
    SynthSpec spec;
    spec.n_rows = 400;
    spec.n_numeric = 5;
    spec.sector_vocab = {"air transport", "retail trade"};
    spec.class_weights = {0.1, 0.1, 0.1, 0.2, 0.2, 0.1, 0.1, 0.05, 0.05};
    spec.noise_std = 0.0;
    spec.missing_rate = 0.0;
    spec.seed = 7;

    const auto data = generate_synthetic(spec);
    const auto latent = synthetic_latent_scores(spec);
    REQUIRE(latent.size() == data.n_rows);

    std::vector<std::size_t> order(data.n_rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return latent[x] < latent[y]; });
    int prev = -1;
    for (const std::size_t r : order) {
        CHECK(data.labels[r] >= prev);
        prev = data.labels[r];
    }
}

TEST_CASE("class counts match the requested weights within one row") {
    SynthSpec spec;
    spec.n_rows = 1000;
    spec.n_numeric = 4;
    // Mass concentrated mid-scale, near-zero tails.
    spec.class_weights = {0.002, 0.03, 0.15, 0.25, 0.25, 0.2, 0.1, 0.015, 0.003};
    spec.seed = 11;
    const auto data = generate_synthetic(spec);

    std::array<int, kNumClasses> counts{};
    for (const int label : data.labels) ++counts[static_cast<std::size_t>(label)];
    for (int c = 0; c < kNumClasses; ++c) {
        const double expected = spec.class_weights[static_cast<std::size_t>(c)] * spec.n_rows;
        CHECK(std::abs(counts[static_cast<std::size_t>(c)] - expected) <= 1.0 + 1e-9);
    }
}

TEST_CASE("missingness rate is exact to within one cell") {
    SynthSpec spec;
    spec.n_rows = 2000;
    spec.n_numeric = 5;
    spec.missing_rate = 0.13;
    spec.class_weights = {0.1, 0.1, 0.1, 0.2, 0.2, 0.1, 0.1, 0.05, 0.05};
    spec.seed = 3;
    const auto data = generate_synthetic(spec);

    std::size_t missing = 0, cells = 0;
    for (const auto& col : data.numeric)
        for (const double v : col) {
            ++cells;
            if (std::isnan(v)) ++missing;
        }
    const double rate = static_cast<double>(missing) / static_cast<double>(cells);
    CHECK(std::abs(rate - spec.missing_rate) <= 0.01);
}

TEST_CASE("infeasible synth specs are rejected") {
    SynthSpec spec;
    spec.n_rows = 4; // fewer rows than positive-weight classes
    spec.class_weights = {0.1, 0.1, 0.1, 0.2, 0.2, 0.1, 0.1, 0.05, 0.05};
    spec.seed = 1;
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);

    SynthSpec bad_weights;
    bad_weights.n_rows = 100;
    bad_weights.class_weights = {0.5, 0.4, 0, 0, 0, 0, 0, 0, 0}; // sums to 0.9
    bad_weights.seed = 1;
    CHECK_THROWS_AS(generate_synthetic(bad_weights), ConfigError);

    SynthSpec bad_rate;
    bad_rate.n_rows = 100;
    bad_rate.class_weights = {0.5, 0.5, 0, 0, 0, 0, 0, 0, 0};
    bad_rate.missing_rate = 1.0;
    bad_rate.seed = 1;
    CHECK_THROWS_AS(generate_synthetic(bad_rate), ConfigError);
}

TEST_CASE("synth spec round-trips through json") {
    SynthSpec spec;
    spec.n_rows = 50;
    spec.class_weights = {0.5, 0.5, 0, 0, 0, 0, 0, 0, 0};
    spec.sector_vocab = {"air transport"};
    spec.seed = 987;
    const auto parsed = SynthSpec::from_json(spec.to_json());
    CHECK(parsed.n_rows == spec.n_rows);
    CHECK(parsed.seed == spec.seed);
    CHECK(parsed.sector_vocab == spec.sector_vocab);
    CHECK_THROWS_AS(SynthSpec::from_json(nlohmann::json{{"n_rows", 10}}), ConfigError);
}
