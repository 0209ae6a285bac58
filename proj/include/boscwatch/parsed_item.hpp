#ifndef BOSCWATCH_PARSED_ITEM_HPP
#define BOSCWATCH_PARSED_ITEM_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace boscwatch {

/// One system-call occurrence with arguments and return value stripped.
/// `seq` is the 0-based position in the event stream; markers and ignored
/// lines do not consume sequence numbers.
struct SyscallEvent {
    int32_t pid = 0;
    std::string name;
    uint64_t seq = 0;

    bool operator==(const SyscallEvent&) const = default;
};

enum class MarkerKind { AttackStart, AttackEnd };

/// Evaluation marker injected into the trace around attack windows.
/// `seq` is the position of the next event, i.e. the number of events
/// emitted before the marker line.
struct Marker {
    MarkerKind kind = MarkerKind::AttackStart;
    uint64_t seq = 0;

    bool operator==(const Marker&) const = default;
};

/// A line that carries no event: signal delivery, process exit, the
/// unfinished half of an interrupted call, blanks, junk.
struct IgnoredLine {
    std::string reason;

    bool operator==(const IgnoredLine&) const = default;
};

using ParsedItem = std::variant<SyscallEvent, Marker, IgnoredLine>;

inline const SyscallEvent* event_of(const ParsedItem& item) {
    return std::get_if<SyscallEvent>(&item);
}

inline const Marker* marker_of(const ParsedItem& item) {
    return std::get_if<Marker>(&item);
}

inline bool is_ignored(const ParsedItem& item) {
    return std::holds_alternative<IgnoredLine>(item);
}

/// Pull-based stream of parsed trace items. next() returns nothing once the
/// stream is exhausted; repeated calls after that stay empty.
class ItemStream {
public:
    virtual ~ItemStream() = default;
    virtual std::optional<ParsedItem> next() = 0;
};

/// Stream over an in-memory item sequence. The underlying storage must
/// outlive the stream; several streams may share one read-only sequence.
class MemoryItemStream final : public ItemStream {
public:
    explicit MemoryItemStream(std::span<const ParsedItem> items) : items_(items) {}

    std::optional<ParsedItem> next() override {
        if (pos_ >= items_.size()) return std::nullopt;
        return items_[pos_++];
    }

private:
    std::span<const ParsedItem> items_;
    size_t pos_ = 0;
};

} // namespace boscwatch

#endif
