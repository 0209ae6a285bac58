#ifndef BOSCWATCH_HOST_MONITOR_HPP
#define BOSCWATCH_HOST_MONITOR_HPP

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "boscwatch/detector.hpp"
#include "boscwatch/strace_parser.hpp"

namespace boscwatch {

struct ContainerEvent {
    enum class Action { Start, Stop };

    std::string container_id;
    Action action = Action::Start;
};

/// Parses a container-runtime event line. Accepts any line whose tokens
/// contain "start" or "stop" followed by the container id (the shape of
/// `docker events --format '{{.Status}} {{.ID}}'` and of the default
/// `docker events` stream). Unknown actions and malformed lines yield
/// nothing and are skipped by the watcher.
std::optional<ContainerEvent> parse_container_event(std::string_view line);

/// Reads `<cgroup_root>/<container_id>/tasks` and returns its pid list.
/// Throws TasksFileMissing / EmptyTaskList / FormatError.
std::vector<int32_t> resolve_tasks(const std::string& container_id,
                                   const std::filesystem::path& cgroup_root);

/// Expands a tracer command template into an argv. `{pids}` becomes the
/// comma-joined task list, `{out}` the trace path. Splitting is on
/// whitespace; there is no shell involved.
std::vector<std::string> render_tracer_command(std::string_view command_template,
                                               const std::vector<int32_t>& pids,
                                               const std::filesystem::path& out);

/// RAII handle for the external tracer child process.
class TracerProcess {
public:
    TracerProcess() = default;
    ~TracerProcess();

    TracerProcess(TracerProcess&& other) noexcept;
    TracerProcess& operator=(TracerProcess&& other) noexcept;
    TracerProcess(const TracerProcess&) = delete;
    TracerProcess& operator=(const TracerProcess&) = delete;

    /// Launches argv[0] with posix_spawnp. Throws TracerSpawnFailure.
    static TracerProcess spawn(const std::vector<std::string>& argv);

    /// SIGTERM, a grace period, then SIGKILL; reaps the child. Idempotent.
    void terminate(std::chrono::milliseconds grace = std::chrono::milliseconds(2000));

    bool running();
    pid_t pid() const { return pid_; }

private:
    explicit TracerProcess(pid_t pid) : pid_(pid) {}

    pid_t pid_ = -1;
};

/// One traced container: the tracer child plus the trace file it writes.
class TraceSession {
public:
    TraceSession(std::string container_id, std::vector<int32_t> task_ids,
                 std::filesystem::path trace_path, TracerProcess tracer)
        : container_id_(std::move(container_id)),
          task_ids_(std::move(task_ids)),
          trace_path_(std::move(trace_path)),
          tracer_(std::move(tracer)) {}

    /// Stops the tracer and finalizes the trace file.
    void stop() { tracer_.terminate(); }

    const std::string& container_id() const { return container_id_; }
    const std::vector<int32_t>& task_ids() const { return task_ids_; }
    const std::filesystem::path& trace_path() const { return trace_path_; }
    TracerProcess& tracer() { return tracer_; }

private:
    std::string container_id_;
    std::vector<int32_t> task_ids_;
    std::filesystem::path trace_path_;
    TracerProcess tracer_;
};

/// Launches a tracer for the given tasks, writing to trace_path.
TraceSession start_session(std::string container_id, std::vector<int32_t> task_ids,
                           std::filesystem::path trace_path, std::string_view tracer_template);

/// Abstract line feed so the watcher runs against a real runtime or a test
/// fixture alike.
class LineSource {
public:
    virtual ~LineSource() = default;
    virtual std::optional<std::string> next_line() = 0;
};

class IstreamLineSource final : public LineSource {
public:
    explicit IstreamLineSource(std::istream& in) : in_(in) {}
    std::optional<std::string> next_line() override;

private:
    std::istream& in_;
};

struct WatchConfig {
    std::string events_command;
    std::filesystem::path cgroup_root;
    std::string tracer_template;
    std::filesystem::path trace_dir;
    std::filesystem::path index_path;
    std::filesystem::path db_path;
    DetectorConfig detector;
};

/// Reacts to container start/stop events: resolves the container's task
/// list, launches the tracer, and follows the growing trace with an online
/// detection pipeline. One session per container id; a second start while a
/// session is live is rejected.
class WatchService {
public:
    using VerdictSink = std::function<void(const std::string& container_id, const EpochVerdict&)>;
    using LogSink = std::function<void(const std::string& message)>;

    WatchService(WatchConfig config, VerdictSink on_verdict, LogSink log = {});
    ~WatchService();

    /// Consumes the event source until it ends, then stops all live
    /// sessions and drains their pipelines. Blocking.
    void run(LineSource& events);

    size_t live_sessions() const { return sessions_.size(); }

    /// Completed (container id, report) pairs, in completion order.
    /// Valid after run() returns.
    const std::vector<std::pair<std::string, DetectionReport>>& reports() const {
        return reports_;
    }

private:
    struct Session;

    void handle_start(const std::string& container_id);
    void handle_stop(const std::string& container_id);
    void finish_session(Session& session);
    void log(const std::string& message);

    WatchConfig config_;
    VerdictSink on_verdict_;
    LogSink log_;
    NormalBehaviorDb db_;
    IndexMap index_;
    std::map<std::string, std::unique_ptr<Session>> sessions_;
    std::vector<std::pair<std::string, DetectionReport>> reports_;
};

} // namespace boscwatch

#endif
