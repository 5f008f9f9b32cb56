#pragma once

// Test-only oracles. Nothing here calls into the library's own gradient or
// forward code; each helper recomputes from first principles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mhpm::test {

// Central differences of f at p with step h.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> p, double h = 1e-5) {
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double orig = p[i];
        p[i] = orig + h;
        const double up = f(p);
        p[i] = orig - h;
        const double down = f(p);
        p[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

// ||a - b|| / max(||a||, ||b||, 1e-12)
inline double rel_error(std::span<const double> a, std::span<const double> b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// y = W2 tanh(W1 x + b1) + b2 from a flat (W1, b1, W2, b2) parameter vector,
// written out loop by loop.
inline std::vector<double> straight_line_forward(std::span<const double> flat, std::size_t in, std::size_t hid,
                                                 std::size_t out, std::span<const double> x) {
    const double* W1 = flat.data();
    const double* b1 = W1 + hid * in;
    const double* W2 = b1 + hid;
    const double* b2 = W2 + out * hid;
    std::vector<double> h(hid), y(out);
    for (std::size_t j = 0; j < hid; ++j) {
        double z = b1[j];
        for (std::size_t i = 0; i < in; ++i) z += W1[j * in + i] * x[i];
        h[j] = std::tanh(z);
    }
    for (std::size_t o = 0; o < out; ++o) {
        double s = b2[o];
        for (std::size_t j = 0; j < hid; ++j) s += W2[o * hid + j] * h[j];
        y[o] = s;
    }
    return y;
}

inline double half_sq(std::span<const double> y, std::span<const double> t) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - t[i]) * (y[i] - t[i]);
    return 0.5 * s;
}

// FNV-1a over the raw bytes of a parameter vector.
inline std::uint64_t hash_params(std::span<const double> p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(p.data());
    for (std::size_t i = 0; i < p.size() * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace mhpm::test
