#ifndef BOSCWATCH_BOSC_WINDOW_HPP
#define BOSCWATCH_BOSC_WINDOW_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace boscwatch {

/// Bag of system calls: per-index occurrence counts for one window.
/// Length is the index table's vector length; entries sum to the window size.
using Bosc = std::vector<uint32_t>;

/// Hash functor so Boscs can key unordered maps.
struct BoscHash {
    size_t operator()(const Bosc& bag) const noexcept {
        uint64_t h = 1469598103934665603ull;
        for (uint32_t v : bag) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

/// Fixed-size sliding window over dense syscall indices with an incrementally
/// maintained count vector. Emits a BoSC snapshot on every push once warm;
/// during warm-up (fewer than `capacity` items) nothing is emitted.
class SlidingWindow {
public:
    SlidingWindow(size_t capacity, size_t vector_len);

    /// Appends an index, evicting the oldest entry once the window is full.
    /// Returns the updated bag, or nothing while still warming up.
    /// Throws IndexOutOfRange for idx >= vector_len.
    std::optional<Bosc> push(uint32_t idx);

    size_t capacity() const { return capacity_; }
    size_t size() const { return size_; }
    size_t vector_len() const { return counts_.size(); }
    const std::vector<uint32_t>& counts() const { return counts_; }

    /// Window contents oldest-first (diagnostics and tests).
    std::vector<uint32_t> contents() const;

private:
    size_t capacity_;
    std::vector<uint32_t> ring_;
    size_t head_ = 0; // slot holding the oldest entry once full
    size_t size_ = 0;
    std::vector<uint32_t> counts_;
};

/// Reference recount: the bag of an explicit k-index window, built from
/// scratch. Kept independent of SlidingWindow on purpose; it is the oracle
/// the incremental path is checked against.
Bosc bosc_of(std::span<const uint32_t> indices, size_t k, size_t vector_len);

} // namespace boscwatch

#endif
