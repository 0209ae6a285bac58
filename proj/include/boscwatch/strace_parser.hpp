#ifndef BOSCWATCH_STRACE_PARSER_HPP
#define BOSCWATCH_STRACE_PARSER_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "boscwatch/parsed_item.hpp"

namespace boscwatch {

// Marker lines are an artifact convention: lines the tracer itself can never
// produce. They must match bit-exactly.
inline constexpr std::string_view kAttackStartMarker = "### BOSCWATCH ATTACK-START";
inline constexpr std::string_view kAttackEndMarker = "### BOSCWATCH ATTACK-END";

/// Classify one raw tracer line. Pure: the result depends only on (text, seq).
///
/// Recognized shapes, after an optional leading pid token:
///   name(args...) = ret          -> event
///   name(args <unfinished ...>   -> ignored; the call is counted when its
///   <... name resumed> ) = ret   -> event (the resumed half carries the name)
///   --- SIGxxx ... ---           -> ignored (signal delivery)
///   +++ exited with N +++        -> ignored (process exit)
/// plus the exact marker literals above. Anything else is ignored with a
/// reason; parse_line never fails.
ParsedItem parse_line(std::string_view text, uint64_t seq);

enum class StreamMode { Offline, Online };

struct StreamOptions {
    StreamMode mode = StreamMode::Offline;
    /// Online mode polls the file for growth at this interval.
    std::chrono::milliseconds poll_interval{50};
    /// Online mode waits this long for the file to appear before failing.
    std::chrono::milliseconds open_wait{5000};
};

/// Incremental reader that turns a trace file into ParsedItems.
///
/// Offline mode reads to end-of-file and terminates. Online mode keeps
/// following the file as it grows, blocking in next() until new bytes arrive
/// or stop() is called; a partial trailing line is buffered until its newline
/// shows up. stop() is safe to call from another thread: a reader blocked in
/// next() wakes, drains whatever is already in the file, and then ends.
class TraceReader final : public ItemStream {
public:
    TraceReader(std::filesystem::path path, StreamOptions options);
    ~TraceReader() override;

    TraceReader(const TraceReader&) = delete;
    TraceReader& operator=(const TraceReader&) = delete;

    /// Next item, or nothing at end of stream.
    /// Throws FileUnavailable if the file never appears within the wait
    /// budget, StreamClosed if stop() lands while still waiting for it.
    std::optional<ParsedItem> next() override;

    /// Request shutdown of an online reader. Idempotent, thread-safe.
    void stop();

    uint64_t events_emitted() const { return next_seq_; }

private:
    bool ensure_open();
    bool fill_buffer();
    bool take_line(std::string& line);

    std::filesystem::path path_;
    StreamOptions options_;
    int fd_ = -1;
    bool finished_ = false;
    std::string buffer_;
    size_t head_ = 0;
    size_t scan_pos_ = 0;
    uint64_t next_seq_ = 0;
    std::atomic<bool> stop_requested_{false};
};

/// Offline convenience: parse a whole trace file into memory.
std::vector<ParsedItem> read_trace_items(const std::filesystem::path& path);

} // namespace boscwatch

#endif
