#include <gtest/gtest.h>

#include <vector>

#include "mhpm/kernels.hpp"
#include "mhpm/rng.hpp"

using namespace mhpm;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

struct Shape {
    std::size_t rows, cols;
};

// Small shapes take the single-threaded path, the large ones cross
// kParallelThreshold.
const Shape kShapes[] = {{1, 1}, {3, 5}, {7, 13}, {64, 64}, {200, 150}, {513, 67}, {67, 513}};

}  // namespace

TEST(Kernels, AffineMatchesNaiveLoop) {
    Rng rng(11);
    for (auto [rows, cols] : kShapes) {
        auto W = random_vec(rows * cols, rng), b = random_vec(rows, rng), x = random_vec(cols, rng);
        std::vector<double> y(rows);
        kernels::serial::affine(W, b, x, y);
        for (std::size_t r = 0; r < rows; ++r) {
            double s = b[r];
            for (std::size_t c = 0; c < cols; ++c) s += W[r * cols + c] * x[c];
            EXPECT_NEAR(y[r], s, 1e-12 * cols);
        }
    }
}

TEST(Kernels, TransposeMatchesNaiveLoop) {
    Rng rng(12);
    for (auto [rows, cols] : kShapes) {
        auto W = random_vec(rows * cols, rng), d = random_vec(rows, rng);
        std::vector<double> out(cols);
        kernels::serial::affine_transpose(W, rows, cols, d, out);
        for (std::size_t c = 0; c < cols; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < rows; ++r) s += W[r * cols + c] * d[r];
            EXPECT_NEAR(out[c], s, 1e-12 * rows);
        }
    }
}

TEST(Kernels, ParallelIsBitIdenticalToSerial) {
    Rng rng(13);
    for (auto [rows, cols] : kShapes) {
        auto W = random_vec(rows * cols, rng), b = random_vec(rows, rng), x = random_vec(cols, rng);
        auto d = random_vec(rows, rng);

        std::vector<double> ys(rows), yp(rows);
        kernels::serial::affine(W, b, x, ys);
        kernels::parallel::affine(W, b, x, yp);
        EXPECT_EQ(ys, yp) << rows << "x" << cols;

        std::vector<double> ts(cols), tp(cols);
        kernels::serial::affine_transpose(W, rows, cols, d, ts);
        kernels::parallel::affine_transpose(W, rows, cols, d, tp);
        EXPECT_EQ(ts, tp) << rows << "x" << cols;

        auto Ws = W, Wp = W;
        kernels::serial::rank1_update(Ws, 0.37, d, x);
        kernels::parallel::rank1_update(Wp, 0.37, d, x);
        EXPECT_EQ(Ws, Wp) << rows << "x" << cols;
    }
}

TEST(Kernels, Rank1UpdateFormula) {
    std::vector<double> W{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> d{1.0, -1.0}, x{0.5, 2.0};
    kernels::serial::rank1_update(W, 0.1, d, x);
    EXPECT_DOUBLE_EQ(W[0], 1.0 - 0.1 * 0.5);
    EXPECT_DOUBLE_EQ(W[1], 2.0 - 0.1 * 2.0);
    EXPECT_DOUBLE_EQ(W[2], 3.0 + 0.1 * 0.5);
    EXPECT_DOUBLE_EQ(W[3], 4.0 + 0.1 * 2.0);
}

TEST(Kernels, BackendSwitch) {
    const auto saved = kernels::backend();
    kernels::set_backend(kernels::Backend::Serial);
    EXPECT_EQ(kernels::backend(), kernels::Backend::Serial);
    kernels::set_backend(kernels::Backend::Parallel);
    EXPECT_EQ(kernels::backend(), kernels::Backend::Parallel);
    kernels::set_backend(saved);
}
