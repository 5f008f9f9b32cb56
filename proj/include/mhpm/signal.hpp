#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mhpm {

// Fixed-dimension real vector exchanged between units. Every stored value is
// finite; construction from non-finite data throws ContractError. The
// dimension cannot change after construction.
class SignalVector {
public:
    SignalVector() = default;
    explicit SignalVector(std::vector<double> values);
    SignalVector(std::initializer_list<double> values);

    static SignalVector zeros(std::size_t dim);
    static SignalVector one_hot(std::size_t dim, std::size_t index);
    // Concatenation of parts in order.
    static SignalVector concat(std::span<const SignalVector> parts);

    std::size_t dim() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    const std::vector<double>& vec() const { return values_; }

    // Contiguous piece [offset, offset + len).
    SignalVector slice(std::size_t offset, std::size_t len) const;

    std::size_t argmax() const;
    double squared_distance(const SignalVector& other) const;

    friend bool operator==(const SignalVector&, const SignalVector&) = default;

private:
    std::vector<double> values_;
};

}  // namespace mhpm
