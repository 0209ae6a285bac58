#ifndef BOSCWATCH_BEHAVIOR_DB_HPP
#define BOSCWATCH_BEHAVIOR_DB_HPP

#include <cstdint>
#include <filesystem>
#include <unordered_map>

#include "boscwatch/bosc_window.hpp"

namespace boscwatch {

using BoscTable = std::unordered_map<Bosc, uint64_t, BoscHash>;

/// Bags observed during one detection epoch, staged for a conditional commit.
/// Both novel and already-known bags are staged so a commit also accumulates
/// frequencies, not just keys.
class EpochDelta {
public:
    explicit EpochDelta(size_t vector_len) : vector_len_(vector_len) {}

    void stage(Bosc bag);

    const BoscTable& staged() const { return staged_; }
    size_t vector_len() const { return vector_len_; }
    bool empty() const { return staged_.empty(); }
    void clear() { staged_.clear(); }

private:
    size_t vector_len_;
    BoscTable staged_;
};

/// The learned model: BoSC -> observed frequency. Presence alone drives
/// detection; frequencies are kept because they cost nothing and make the
/// model auditable.
class NormalBehaviorDb {
public:
    NormalBehaviorDb(size_t window_size, size_t vector_len);

    /// Training insert: bumps the bag's frequency, adding it at 1 if new.
    void insert(const Bosc& bag);

    /// Membership test; the detection-time hot path.
    bool contains(const Bosc& bag) const;

    /// Folds a clean epoch's staged bags into the model and empties the delta.
    void commit(EpochDelta& delta);

    size_t size() const { return table_.size(); }
    uint64_t total_frequency() const;
    size_t vector_len() const { return vector_len_; }
    size_t window_size() const { return window_size_; }
    const BoscTable& table() const { return table_; }

    bool operator==(const NormalBehaviorDb& other) const = default;

    /// File format: header `boscdb,v1,k=<k>,len=<len>` followed by one
    /// `<c_0>,...,<c_{len-1}>;<frequency>` line per entry, sorted by key.
    void save(const std::filesystem::path& path) const;
    static NormalBehaviorDb load(const std::filesystem::path& path);

private:
    void check_bag(const Bosc& bag) const;

    size_t window_size_;
    size_t vector_len_;
    BoscTable table_;
};

} // namespace boscwatch

#endif
