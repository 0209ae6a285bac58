#ifndef BOSCWATCH_SYSCALL_INDEX_HPP
#define BOSCWATCH_SYSCALL_INDEX_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "boscwatch/parsed_item.hpp"

namespace boscwatch {

/// Exact per-name occurrence counts over a finite event stream.
struct SyscallCensus {
    std::map<std::string, uint64_t> counts;
    uint64_t total_events = 0;

    void add(const std::string& name) {
        ++counts[name];
        ++total_events;
    }

    size_t distinct() const { return counts.size(); }
};

/// Counts every event in the stream. Throws EmptyTrace when the stream holds
/// no syscall events at all; markers and ignored lines are skipped.
SyscallCensus build_census(ItemStream& stream);

/// Frequency-ranked syscall -> dense index table with a trailing fold bucket.
///
/// A name whose census count is below the number of distinct names in the
/// census is folded into "other"; retained names are indexed by descending
/// count (ties by ascending name). "other" always owns the last index, even
/// when nothing folds into it, so the vector length never changes when new
/// names appear at detection time.
class IndexMap {
public:
    static constexpr std::string_view kOtherName = "other";

    /// Index for a name: its own slot if retained, the fold bucket otherwise.
    uint32_t lookup(std::string_view name) const {
        auto it = entries_.find(name);
        return it == entries_.end() ? other_index() : it->second;
    }

    uint32_t other_index() const { return static_cast<uint32_t>(entries_.size()); }
    size_t retained_count() const { return entries_.size(); }
    size_t vector_len() const { return entries_.size() + 1; }

    /// Retained entries sorted by index.
    std::vector<std::pair<std::string, uint32_t>> sorted_entries() const;

    void save(const std::filesystem::path& path) const;
    static IndexMap load(const std::filesystem::path& path);

    friend IndexMap build_index(const SyscallCensus& census);

private:
    struct NameHash {
        using is_transparent = void;
        size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };

    std::unordered_map<std::string, uint32_t, NameHash, std::equal_to<>> entries_;
};

/// Builds the lookup table from a census. The census must be non-empty and
/// must not contain the reserved name "other".
IndexMap build_index(const SyscallCensus& census);

} // namespace boscwatch

#endif
