#include "mhpm/kernels.hpp"

#include <algorithm>
#include <atomic>

namespace mhpm::kernels {

double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

namespace serial {

void affine(std::span<const double> W, std::span<const double> b, std::span<const double> x,
            std::span<double> y) {
    const std::size_t rows = y.size();
    const std::size_t cols = x.size();
    for (std::size_t r = 0; r < rows; ++r) y[r] = b[r] + dot(W.data() + r * cols, x.data(), cols);
}

void affine_transpose(std::span<const double> W, std::size_t rows, std::size_t cols,
                      std::span<const double> d, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double dr = d[r];
        const double* row = W.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * dr;
    }
}

void rank1_update(std::span<double> W, double eta, std::span<const double> d, std::span<const double> x) {
    const std::size_t rows = d.size();
    const std::size_t cols = x.size();
    for (std::size_t r = 0; r < rows; ++r) {
        const double s = eta * d[r];
        double* row = W.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) row[c] -= s * x[c];
    }
}

}  // namespace serial

namespace parallel {

void affine(std::span<const double> W, std::span<const double> b, std::span<const double> x,
            std::span<double> y) {
    const auto rows = static_cast<std::ptrdiff_t>(y.size());
    const std::size_t cols = x.size();
    const bool wide = y.size() * cols >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (wide)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        const auto ur = static_cast<std::size_t>(r);
        y[ur] = b[ur] + dot(W.data() + ur * cols, x.data(), cols);
    }
}

void affine_transpose(std::span<const double> W, std::size_t rows, std::size_t cols,
                      std::span<const double> d, std::span<double> out) {
    constexpr std::size_t kBlock = 64;
    const auto blocks = static_cast<std::ptrdiff_t>((cols + kBlock - 1) / kBlock);
    const bool wide = rows * cols >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (wide)
    for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
        const std::size_t c0 = static_cast<std::size_t>(blk) * kBlock;
        const std::size_t c1 = std::min(cols, c0 + kBlock);
        for (std::size_t c = c0; c < c1; ++c) out[c] = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            const double dr = d[r];
            const double* row = W.data() + r * cols;
            for (std::size_t c = c0; c < c1; ++c) out[c] += row[c] * dr;
        }
    }
}

void rank1_update(std::span<double> W, double eta, std::span<const double> d, std::span<const double> x) {
    const auto rows = static_cast<std::ptrdiff_t>(d.size());
    const std::size_t cols = x.size();
    const bool wide = d.size() * cols >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (wide)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        const auto ur = static_cast<std::size_t>(r);
        const double s = eta * d[ur];
        double* row = W.data() + ur * cols;
        for (std::size_t c = 0; c < cols; ++c) row[c] -= s * x[c];
    }
}

}  // namespace parallel

namespace {
std::atomic<Backend> g_backend{Backend::Parallel};
}

void set_backend(Backend b) { g_backend.store(b, std::memory_order_relaxed); }
Backend backend() { return g_backend.load(std::memory_order_relaxed); }

void affine(std::span<const double> W, std::span<const double> b, std::span<const double> x,
            std::span<double> y) {
    if (backend() == Backend::Serial)
        serial::affine(W, b, x, y);
    else
        parallel::affine(W, b, x, y);
}

void affine_transpose(std::span<const double> W, std::size_t rows, std::size_t cols,
                      std::span<const double> d, std::span<double> out) {
    if (backend() == Backend::Serial)
        serial::affine_transpose(W, rows, cols, d, out);
    else
        parallel::affine_transpose(W, rows, cols, d, out);
}

void rank1_update(std::span<double> W, double eta, std::span<const double> d, std::span<const double> x) {
    if (backend() == Backend::Serial)
        serial::rank1_update(W, eta, d, x);
    else
        parallel::rank1_update(W, eta, d, x);
}

}  // namespace mhpm::kernels
