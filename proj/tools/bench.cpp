// Benchmark comparing the serial reference kernels against the OpenMP
// paths, plus two end-to-end stages (batch inference, quantile transform).
// The two paths compute bit-identical results; this tool reports the wall
// time each takes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ratekit/kernels.hpp"
#include "ratekit/net.hpp"
#include "ratekit/preprocess.hpp"
#include "ratekit/rng.hpp"
#include "ratekit/synth.hpp"

using namespace ratekit;
using kernels::Exec;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

double time_ms(const std::function<void()>& fn, int repeats) {
    fn(); // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

void report(const std::string& name, double serial_ms, double parallel_ms) {
    std::printf("%-34s %10.2f ms %10.2f ms %8.2fx\n", name.c_str(), serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

} // namespace

int main(int argc, char** argv) {
    int repeats = 5;
    if (argc > 1) repeats = std::max(1, std::atoi(argv[1]));

#ifdef _OPENMP
    std::printf("threads: %d, repeats: %d\n", omp_get_max_threads(), repeats);
#else
    std::printf("built without OpenMP; both columns run the serial path\n");
#endif
    std::printf("%-34s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    Rng rng(1);

    {
        const Matrix a = random_matrix(512, 512, rng);
        const Matrix b = random_matrix(512, 512, rng);
        Matrix c;
        report("matmul_nt 512x512x512",
               time_ms([&] { kernels::matmul_nt(a, b, c, Exec::Serial); }, repeats),
               time_ms([&] { kernels::matmul_nt(a, b, c, Exec::Parallel); }, repeats));
    }
    {
        const Matrix x = random_matrix(4096, 128, rng);
        const Matrix w = random_matrix(256, 128, rng);
        std::vector<double> bias(256, 0.1);
        Matrix y;
        report("dense_forward 4096x128->256",
               time_ms([&] { kernels::dense_forward(x, w, bias, y, Exec::Serial); }, repeats),
               time_ms([&] { kernels::dense_forward(x, w, bias, y, Exec::Parallel); }, repeats));

        const Matrix dy = random_matrix(4096, 256, rng);
        Matrix dw;
        std::vector<double> db;
        report("dense_backward_params",
               time_ms([&] { kernels::dense_backward_params(x, dy, dw, db, Exec::Serial); },
                       repeats),
               time_ms([&] { kernels::dense_backward_params(x, dy, dw, db, Exec::Parallel); },
                       repeats));
    }
    {
        SynthSpec spec;
        spec.n_rows = 20000;
        spec.n_numeric = 12;
        spec.sector_vocab = {"air transport", "retail trade", "heavy machinery",
                             "media services", "power generation"};
        spec.class_weights = {0.05, 0.1, 0.15, 0.2, 0.2, 0.15, 0.08, 0.04, 0.03};
        spec.seed = 7;
        const Dataset data = generate_synthetic(spec);
        const auto pipeline = fit_pipeline(data, TextHandling::embed);

        report("quantile transform 20000x12",
               time_ms(
                   [&] {
                       kernels::set_parallel_enabled(false);
                       (void)transform(pipeline, data);
                       kernels::set_parallel_enabled(true);
                   },
                   repeats),
               time_ms([&] { (void)transform(pipeline, data); }, repeats));

        const FeatureMatrix features = transform(pipeline, data);
        Rng init(3);
        NetConfig net_cfg;
        Network net = build_network(
            pipeline.n_dense(),
            std::make_pair(pipeline.tokenizer->vocab_size(), pipeline.tokenizer->max_len),
            net_cfg, init);
        report("batch inference 20000 rows",
               time_ms(
                   [&] {
                       kernels::set_parallel_enabled(false);
                       (void)predict(net, features);
                       kernels::set_parallel_enabled(true);
                   },
                   repeats),
               time_ms([&] { (void)predict(net, features); }, repeats));
    }
    return 0;
}
