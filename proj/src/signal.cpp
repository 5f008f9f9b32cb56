#include "mhpm/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mhpm/errors.hpp"

namespace mhpm {

namespace {

void check_finite(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]))
            throw ContractError("SignalVector: non-finite value at index " + std::to_string(i));
}

}  // namespace

SignalVector::SignalVector(std::vector<double> values) : values_(std::move(values)) {
    check_finite(values_);
}

SignalVector::SignalVector(std::initializer_list<double> values) : values_(values) {
    check_finite(values_);
}

SignalVector SignalVector::zeros(std::size_t dim) { return SignalVector(std::vector<double>(dim, 0.0)); }

SignalVector SignalVector::one_hot(std::size_t dim, std::size_t index) {
    require(index < dim, "one_hot: index out of range");
    std::vector<double> v(dim, 0.0);
    v[index] = 1.0;
    return SignalVector(std::move(v));
}

SignalVector SignalVector::concat(std::span<const SignalVector> parts) {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.dim();
    std::vector<double> v;
    v.reserve(total);
    for (const auto& p : parts) v.insert(v.end(), p.values_.begin(), p.values_.end());
    SignalVector out;
    out.values_ = std::move(v);
    return out;
}

SignalVector SignalVector::slice(std::size_t offset, std::size_t len) const {
    require(offset + len <= values_.size(), "SignalVector::slice out of range");
    SignalVector out;
    out.values_.assign(values_.begin() + static_cast<std::ptrdiff_t>(offset),
                       values_.begin() + static_cast<std::ptrdiff_t>(offset + len));
    return out;
}

std::size_t SignalVector::argmax() const {
    require(!values_.empty(), "argmax of empty vector");
    return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());
}

double SignalVector::squared_distance(const SignalVector& other) const {
    require_dim(dim(), other.dim(), "squared_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double d = values_[i] - other.values_[i];
        s += d * d;
    }
    return s;
}

}  // namespace mhpm
