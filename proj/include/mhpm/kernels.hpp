#pragma once

// Dense kernels behind TrainableMap. Matrices are row-major, `rows x cols`.
//
// Two implementations with identical numerics:
//   serial::   plain loops, kept as the reference the tests compare against
//   parallel:: OpenMP over rows (or column blocks for the transpose product)
//
// Each output element is accumulated in the same order in both variants, so
// the results are bit-identical regardless of thread count.

#include <cstddef>
#include <span>

namespace mhpm::kernels {

// Below this many matrix elements the OpenMP variants run single-threaded.
inline constexpr std::size_t kParallelThreshold = 1u << 14;

// Four-way split accumulation; shared by both variants.
double dot(const double* a, const double* b, std::size_t n);

namespace serial {

// y = W x + b
void affine(std::span<const double> W, std::span<const double> b, std::span<const double> x,
            std::span<double> y);
// out = W^T d
void affine_transpose(std::span<const double> W, std::size_t rows, std::size_t cols,
                      std::span<const double> d, std::span<double> out);
// W -= eta * d x^T
void rank1_update(std::span<double> W, double eta, std::span<const double> d, std::span<const double> x);

}  // namespace serial

namespace parallel {

void affine(std::span<const double> W, std::span<const double> b, std::span<const double> x,
            std::span<double> y);
void affine_transpose(std::span<const double> W, std::size_t rows, std::size_t cols,
                      std::span<const double> d, std::span<double> out);
void rank1_update(std::span<double> W, double eta, std::span<const double> d, std::span<const double> x);

}  // namespace parallel

// Process-wide choice used by the dispatching entry points below.
enum class Backend { Serial, Parallel };
void set_backend(Backend b);
Backend backend();

void affine(std::span<const double> W, std::span<const double> b, std::span<const double> x,
            std::span<double> y);
void affine_transpose(std::span<const double> W, std::size_t rows, std::size_t cols,
                      std::span<const double> d, std::span<double> out);
void rank1_update(std::span<double> W, double eta, std::span<const double> d, std::span<const double> x);

}  // namespace mhpm::kernels
