#include "boscwatch/host_monitor.hpp"

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>

#include "boscwatch/errors.hpp"

extern char** environ;

namespace boscwatch {

std::optional<ContainerEvent> parse_container_event(std::string_view line) {
    std::vector<std::string_view> tokens;
    size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
        if (end > pos) tokens.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    for (size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i] == "start")
            return ContainerEvent{std::string(tokens[i + 1]), ContainerEvent::Action::Start};
        if (tokens[i] == "stop")
            return ContainerEvent{std::string(tokens[i + 1]), ContainerEvent::Action::Stop};
    }
    return std::nullopt;
}

std::vector<int32_t> resolve_tasks(const std::string& container_id,
                                   const std::filesystem::path& cgroup_root) {
    const std::filesystem::path tasks_path = cgroup_root / container_id / "tasks";
    std::ifstream in(tasks_path);
    if (!in) throw TasksFileMissing("no tasks file at '" + tasks_path.string() + "'");

    std::vector<int32_t> tasks;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        int32_t pid = 0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), pid);
        if (ec != std::errc() || ptr != line.data() + line.size() || pid < 0)
            throw FormatError("tasks file '" + tasks_path.string() + "' line " +
                              std::to_string(line_no) + ": bad pid");
        tasks.push_back(pid);
    }
    if (tasks.empty()) throw EmptyTaskList("tasks file '" + tasks_path.string() + "' is empty");
    return tasks;
}

std::vector<std::string> render_tracer_command(std::string_view command_template,
                                               const std::vector<int32_t>& pids,
                                               const std::filesystem::path& out) {
    std::string pid_list;
    for (size_t i = 0; i < pids.size(); ++i) {
        if (i > 0) pid_list += ',';
        pid_list += std::to_string(pids[i]);
    }

    auto substitute = [&](std::string token) {
        for (const auto& [key, value] :
             {std::pair<std::string_view, const std::string&>{"{pids}", pid_list},
              std::pair<std::string_view, const std::string&>{"{out}", out.native()}}) {
            size_t at = 0;
            while ((at = token.find(key, at)) != std::string::npos) {
                token.replace(at, key.size(), value);
                at += value.size();
            }
        }
        return token;
    };

    std::vector<std::string> argv;
    size_t pos = 0;
    while (pos < command_template.size()) {
        while (pos < command_template.size() &&
               (command_template[pos] == ' ' || command_template[pos] == '\t'))
            ++pos;
        size_t end = pos;
        while (end < command_template.size() && command_template[end] != ' ' &&
               command_template[end] != '\t')
            ++end;
        if (end > pos) argv.push_back(substitute(std::string(command_template.substr(pos, end - pos))));
        pos = end;
    }
    if (argv.empty()) throw ConfigError("tracer command template is empty");
    return argv;
}

TracerProcess::~TracerProcess() {
    try {
        terminate();
    } catch (...) {
        // Destructor must not throw; the child has been signalled regardless.
    }
}

TracerProcess::TracerProcess(TracerProcess&& other) noexcept : pid_(other.pid_) {
    other.pid_ = -1;
}

TracerProcess& TracerProcess::operator=(TracerProcess&& other) noexcept {
    if (this != &other) {
        terminate();
        pid_ = other.pid_;
        other.pid_ = -1;
    }
    return *this;
}

TracerProcess TracerProcess::spawn(const std::vector<std::string>& argv) {
    if (argv.empty()) throw TracerSpawnFailure("empty tracer command");
    std::vector<char*> raw;
    raw.reserve(argv.size() + 1);
    for (const auto& arg : argv) raw.push_back(const_cast<char*>(arg.c_str()));
    raw.push_back(nullptr);

    pid_t pid = -1;
    const int rc = ::posix_spawnp(&pid, raw[0], nullptr, nullptr, raw.data(), environ);
    if (rc != 0) {
        std::string cmd;
        for (const auto& arg : argv) {
            if (!cmd.empty()) cmd += ' ';
            cmd += arg;
        }
        throw TracerSpawnFailure("cannot launch tracer '" + cmd + "': " + std::strerror(rc));
    }
    return TracerProcess(pid);
}

bool TracerProcess::running() {
    if (pid_ < 0) return false;
    int status = 0;
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
        pid_ = -1;
        return false;
    }
    return r == 0;
}

void TracerProcess::terminate(std::chrono::milliseconds grace) {
    if (pid_ < 0) return;
    if (!running()) return;

    ::kill(pid_, SIGTERM);
    const auto deadline = std::chrono::steady_clock::now() + grace;
    while (std::chrono::steady_clock::now() < deadline) {
        if (!running()) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (pid_ < 0) return;
    ::kill(pid_, SIGKILL);
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
}

TraceSession start_session(std::string container_id, std::vector<int32_t> task_ids,
                           std::filesystem::path trace_path, std::string_view tracer_template) {
    if (task_ids.empty()) throw EmptyTaskList("refusing to trace an empty task list");
    const auto argv = render_tracer_command(tracer_template, task_ids, trace_path);
    TracerProcess tracer = TracerProcess::spawn(argv);
    return TraceSession(std::move(container_id), std::move(task_ids), std::move(trace_path),
                        std::move(tracer));
}

std::optional<std::string> IstreamLineSource::next_line() {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

struct WatchService::Session {
    TraceSession trace;
    std::unique_ptr<TraceReader> reader;
    std::thread worker;
    DetectionReport report;
    std::string error;

    Session(TraceSession t, std::unique_ptr<TraceReader> r)
        : trace(std::move(t)), reader(std::move(r)) {}
};

WatchService::WatchService(WatchConfig config, VerdictSink on_verdict, LogSink log)
    : config_(std::move(config)),
      on_verdict_(std::move(on_verdict)),
      log_(std::move(log)),
      db_(NormalBehaviorDb::load(config_.db_path)),
      index_(IndexMap::load(config_.index_path)) {
    // The window size is a property of the trained model, not a watch knob.
    config_.detector.window_size = db_.window_size();
    config_.detector.validate();
}

WatchService::~WatchService() {
    for (auto& [container_id, session] : sessions_) finish_session(*session);
}

void WatchService::log(const std::string& message) {
    if (log_) log_(message);
}

void WatchService::run(LineSource& events) {
    while (auto line = events.next_line()) {
        const auto event = parse_container_event(*line);
        if (!event) continue;
        if (event->action == ContainerEvent::Action::Start) {
            handle_start(event->container_id);
        } else {
            handle_stop(event->container_id);
        }
    }
    // Event source is gone; wind down whatever is still being traced.
    while (!sessions_.empty()) handle_stop(sessions_.begin()->first);
}

void WatchService::handle_start(const std::string& container_id) {
    if (sessions_.contains(container_id)) {
        log("session for container " + container_id + " already live, start ignored");
        return;
    }
    try {
        auto tasks = resolve_tasks(container_id, config_.cgroup_root);
        std::filesystem::create_directories(config_.trace_dir);
        std::filesystem::path trace_path = config_.trace_dir / (container_id + ".trace");
        TraceSession trace = start_session(container_id, std::move(tasks), trace_path,
                                           config_.tracer_template);

        StreamOptions options;
        options.mode = StreamMode::Online;
        options.poll_interval = std::chrono::milliseconds(20);
        options.open_wait = std::chrono::milliseconds(10000);
        auto session = std::make_unique<Session>(
            std::move(trace), std::make_unique<TraceReader>(trace_path, options));

        Session* raw = session.get();
        raw->worker = std::thread([this, raw, container_id] {
            try {
                Detector detector(db_, index_, config_.detector);
                raw->report = detector.run(*raw->reader, [&](const EpochVerdict& verdict) {
                    if (on_verdict_) on_verdict_(container_id, verdict);
                });
            } catch (const std::exception& e) {
                raw->error = e.what();
            }
        });
        sessions_.emplace(container_id, std::move(session));
        log("tracing container " + container_id);
    } catch (const std::exception& e) {
        log("cannot start session for container " + container_id + ": " + e.what());
    }
}

void WatchService::handle_stop(const std::string& container_id) {
    const auto it = sessions_.find(container_id);
    if (it == sessions_.end()) return; // stop for an unknown container
    finish_session(*it->second);
    reports_.emplace_back(container_id, std::move(it->second->report));
    sessions_.erase(it);
    log("session for container " + container_id + " closed");
}

void WatchService::finish_session(Session& session) {
    session.trace.stop();      // tracer exits, trace file is final
    session.reader->stop();    // pipeline drains the remaining bytes
    if (session.worker.joinable()) session.worker.join();
    if (!session.error.empty())
        log("pipeline for container " + session.trace.container_id() + " failed: " + session.error);
}

} // namespace boscwatch
