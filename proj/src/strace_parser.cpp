#include "boscwatch/strace_parser.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "boscwatch/errors.hpp"

namespace boscwatch {

namespace {

constexpr std::string_view kMarkerPrefix = "### BOSCWATCH";
constexpr std::string_view kUnfinishedSuffix = "<unfinished ...>";
constexpr std::string_view kResumedPrefix = "<... ";
constexpr std::string_view kResumedSuffix = " resumed>";

bool valid_syscall_name(std::string_view name) {
    if (name.empty()) return false;
    bool has_non_digit = false;
    for (char c : name) {
        const bool lower = c >= 'a' && c <= 'z';
        const bool digit = c >= '0' && c <= '9';
        if (!lower && !digit && c != '_') return false;
        if (!digit) has_non_digit = true;
    }
    return has_non_digit;
}

// Consumes a leading "pid whitespace" prefix if present. Returns -1 when the
// line has no pid token (single-process traces).
int32_t take_pid(std::string_view& rest) {
    size_t i = 0;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    if (i == 0 || i >= rest.size() || (rest[i] != ' ' && rest[i] != '\t')) return -1;
    int64_t pid = 0;
    for (size_t j = 0; j < i && pid <= 0x7fffffff; ++j) pid = pid * 10 + (rest[j] - '0');
    if (pid > 0x7fffffff) return -1;
    rest.remove_prefix(i);
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
    return static_cast<int32_t>(pid);
}

} // namespace

ParsedItem parse_line(std::string_view text, uint64_t seq) {
    // Tolerate CRLF input.
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);

    if (text == kAttackStartMarker) return Marker{MarkerKind::AttackStart, seq};
    if (text == kAttackEndMarker) return Marker{MarkerKind::AttackEnd, seq};
    if (text.starts_with(kMarkerPrefix)) return IgnoredLine{"malformed-marker"};

    std::string_view rest = text;
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
    if (rest.empty()) return IgnoredLine{"blank"};

    int32_t pid = take_pid(rest);
    if (pid < 0) pid = 0;
    if (rest.empty()) return IgnoredLine{"unrecognized"};

    if (rest.starts_with("---")) return IgnoredLine{"signal"};
    if (rest.starts_with("+++")) return IgnoredLine{"exit"};

    if (rest.starts_with(kResumedPrefix)) {
        // "<... name resumed> ) = ret" — the second half of an interrupted
        // call; this is where it gets counted.
        const size_t end = rest.find(kResumedSuffix, kResumedPrefix.size());
        if (end == std::string_view::npos) return IgnoredLine{"resumed"};
        std::string_view name = rest.substr(kResumedPrefix.size(), end - kResumedPrefix.size());
        if (!valid_syscall_name(name)) return IgnoredLine{"resumed"};
        return SyscallEvent{pid, std::string(name), seq};
    }

    const size_t paren = rest.find('(');
    if (paren == std::string_view::npos || paren == 0) return IgnoredLine{"unrecognized"};
    std::string_view name = rest.substr(0, paren);
    if (!valid_syscall_name(name)) return IgnoredLine{"unrecognized"};

    if (rest.ends_with(kUnfinishedSuffix)) return IgnoredLine{"unfinished"};
    return SyscallEvent{pid, std::string(name), seq};
}

TraceReader::TraceReader(std::filesystem::path path, StreamOptions options)
    : path_(std::move(path)), options_(options) {}

TraceReader::~TraceReader() {
    if (fd_ >= 0) ::close(fd_);
}

void TraceReader::stop() {
    stop_requested_.store(true, std::memory_order_relaxed);
}

bool TraceReader::ensure_open() {
    if (fd_ >= 0) return true;
    const auto deadline = std::chrono::steady_clock::now() + options_.open_wait;
    for (;;) {
        fd_ = ::open(path_.c_str(), O_RDONLY | O_CLOEXEC);
        if (fd_ >= 0) return true;
        if (errno != ENOENT)
            throw IoError("cannot open trace '" + path_.string() + "': " + std::strerror(errno));
        if (options_.mode == StreamMode::Offline)
            throw IoError("cannot open trace '" + path_.string() + "': " + std::strerror(ENOENT));
        if (stop_requested_.load(std::memory_order_relaxed))
            throw StreamClosed("stream stopped while waiting for '" + path_.string() + "'");
        if (std::chrono::steady_clock::now() >= deadline)
            throw FileUnavailable("trace '" + path_.string() + "' did not appear in time");
        std::this_thread::sleep_for(options_.poll_interval);
    }
}

// Reads more bytes into the line buffer. Returns false only when the stream
// is definitively over (EOF in offline mode, or EOF after stop in online
// mode); a trailing unterminated line is promoted to a final line then.
bool TraceReader::fill_buffer() {
    char chunk[65536];
    for (;;) {
        const ssize_t n = ::read(fd_, chunk, sizeof chunk);
        if (n > 0) {
            buffer_.append(chunk, static_cast<size_t>(n));
            return true;
        }
        if (n < 0) {
            if (errno == EINTR) continue;
            throw IoError("read failed on '" + path_.string() + "': " + std::strerror(errno));
        }
        if (options_.mode == StreamMode::Offline) return false;
        if (stop_requested_.load(std::memory_order_relaxed)) return false;
        std::this_thread::sleep_for(options_.poll_interval);
    }
}

bool TraceReader::take_line(std::string& line) {
    const size_t nl = buffer_.find('\n', scan_pos_);
    if (nl == std::string::npos) {
        scan_pos_ = buffer_.size();
        // Drop consumed bytes so the buffer cannot grow without bound.
        if (head_ > 0) {
            buffer_.erase(0, head_);
            scan_pos_ -= head_;
            head_ = 0;
        }
        return false;
    }
    line.assign(buffer_, head_, nl - head_);
    head_ = nl + 1;
    scan_pos_ = head_;
    if (head_ == buffer_.size()) {
        buffer_.clear();
        head_ = 0;
        scan_pos_ = 0;
    }
    return true;
}

std::optional<ParsedItem> TraceReader::next() {
    if (finished_) return std::nullopt;
    ensure_open();

    std::string line;
    while (!take_line(line)) {
        if (!fill_buffer()) {
            finished_ = true;
            if (head_ >= buffer_.size()) return std::nullopt;
            // Final line without a newline.
            line.assign(buffer_, head_, buffer_.size() - head_);
            buffer_.clear();
            break;
        }
    }

    ParsedItem item = parse_line(line, next_seq_);
    if (event_of(item)) ++next_seq_;
    return item;
}

std::vector<ParsedItem> read_trace_items(const std::filesystem::path& path) {
    TraceReader reader(path, StreamOptions{StreamMode::Offline});
    std::vector<ParsedItem> items;
    while (auto item = reader.next()) items.push_back(std::move(*item));
    return items;
}

} // namespace boscwatch
