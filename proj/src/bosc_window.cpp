#include "boscwatch/bosc_window.hpp"

#include <string>

#include "boscwatch/errors.hpp"

namespace boscwatch {

SlidingWindow::SlidingWindow(size_t capacity, size_t vector_len)
    : capacity_(capacity), counts_(vector_len, 0) {
    if (capacity_ == 0) throw LengthMismatch("window size must be >= 1");
    if (vector_len == 0) throw LengthMismatch("vector length must be >= 1");
    ring_.resize(capacity_, 0);
}

std::optional<Bosc> SlidingWindow::push(uint32_t idx) {
    if (idx >= counts_.size())
        throw IndexOutOfRange("index " + std::to_string(idx) + " not below vector length " +
                              std::to_string(counts_.size()));
    if (size_ == capacity_) {
        --counts_[ring_[head_]];
    } else {
        ++size_;
    }
    ring_[head_] = idx;
    head_ = (head_ + 1) % capacity_;
    ++counts_[idx];
    if (size_ < capacity_) return std::nullopt;
    return counts_;
}

std::vector<uint32_t> SlidingWindow::contents() const {
    std::vector<uint32_t> out;
    out.reserve(size_);
    // When not yet full the oldest entry sits at slot 0.
    const size_t start = size_ == capacity_ ? head_ : 0;
    for (size_t i = 0; i < size_; ++i) out.push_back(ring_[(start + i) % capacity_]);
    return out;
}

Bosc bosc_of(std::span<const uint32_t> indices, size_t k, size_t vector_len) {
    if (indices.size() != k)
        throw LengthMismatch("expected " + std::to_string(k) + " indices, got " +
                             std::to_string(indices.size()));
    Bosc bag(vector_len, 0);
    for (uint32_t idx : indices) {
        if (idx >= vector_len)
            throw IndexOutOfRange("index " + std::to_string(idx) + " not below vector length " +
                                  std::to_string(vector_len));
        ++bag[idx];
    }
    return bag;
}

} // namespace boscwatch
