// boscwatch: streaming BoSC anomaly detection for container syscall traces.
//
// Exit codes (stable scripting contract):
//   0  clean run / no anomaly
//   1  at least one anomalous epoch
//   2  input error (unreadable or malformed files, empty trace)
//   3  configuration error (bad flags, invalid parameter combinations)

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "boscwatch/behavior_db.hpp"
#include "boscwatch/detector.hpp"
#include "boscwatch/errors.hpp"
#include "boscwatch/evaluator.hpp"
#include "boscwatch/host_monitor.hpp"
#include "boscwatch/strace_parser.hpp"
#include "boscwatch/synth_gen.hpp"
#include "boscwatch/syscall_index.hpp"

namespace {

using namespace boscwatch;

constexpr int kExitClean = 0;
constexpr int kExitAnomaly = 1;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

TraceReader* g_active_reader = nullptr;

void handle_interrupt(int) {
    if (g_active_reader != nullptr) g_active_reader->stop();
}

// Flat key=value config files. Applied after flag and environment parsing,
// so precedence is flags > environment > config file. Keys are the long
// option names without the leading dashes.
void apply_flat_config(CLI::App& sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        const size_t eq = line.find('=', start);
        if (eq == std::string::npos)
            throw ConfigError("config file '" + path + "' line " + std::to_string(line_no) +
                              ": expected key=value");
        std::string key = line.substr(start, eq - start);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::string value = line.substr(eq + 1);
        const size_t vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? std::string{} : value.substr(vstart);

        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw ConfigError("config file '" + path + "' line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        if (opt->count() > 0) continue; // flag or environment already set it
        try {
            if (opt->get_expected_min() == 0) {
                // A flag: accept true/false-ish values.
                if (value == "1" || value == "true" || value == "yes" || value.empty())
                    opt->add_result("true");
                else
                    opt->add_result("false");
            } else {
                opt->add_result(value);
            }
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError("config file '" + path + "' line " + std::to_string(line_no) + ": " +
                              e.what());
        }
    }
}

struct CommonArgs {
    std::string trace;
    std::string index;
    std::string db;
    std::string out;
    size_t window_size = 10;
    size_t epoch_size = 1000;
    uint64_t threshold = 10;
    uint64_t train_events = 0;
    bool no_continuous = false;
};

int run_build_index(const CommonArgs& args) {
    TraceReader reader(args.trace, StreamOptions{StreamMode::Offline});
    const SyscallCensus census = build_census(reader);
    const IndexMap index = build_index(census);
    index.save(args.out);
    std::cerr << "indexed " << census.total_events << " events, " << census.distinct()
              << " distinct syscalls, " << index.retained_count() << " retained, vector length "
              << index.vector_len() << "\n";
    return kExitClean;
}

int run_train(const CommonArgs& args) {
    const IndexMap index = IndexMap::load(args.index);
    DetectorConfig config;
    config.window_size = args.window_size;
    config.epoch_size = std::max(args.epoch_size, args.window_size);
    config.train_events = args.train_events;

    TraceReader reader(args.trace, StreamOptions{StreamMode::Offline});
    const NormalBehaviorDb db = train(reader, config, index);
    db.save(args.out);
    std::cerr << "trained on " << config.train_events << " events: " << db.size()
              << " distinct bags, total frequency " << db.total_frequency() << "\n";
    return kExitClean;
}

int run_detect(const CommonArgs& args, const std::string& follow) {
    const IndexMap index = IndexMap::load(args.index);
    NormalBehaviorDb db = NormalBehaviorDb::load(args.db);

    DetectorConfig config;
    config.window_size = db.window_size();
    config.epoch_size = args.epoch_size;
    config.threshold = args.threshold;
    config.continuous_training = !args.no_continuous;

    StreamOptions options;
    options.mode = follow.empty() ? StreamMode::Offline : StreamMode::Online;
    TraceReader reader(follow.empty() ? args.trace : follow, options);
    if (!follow.empty()) {
        g_active_reader = &reader;
        std::signal(SIGINT, handle_interrupt);
        std::signal(SIGTERM, handle_interrupt);
    }

    std::ofstream log_file;
    if (!args.out.empty()) {
        log_file.open(args.out, std::ios::binary | std::ios::trunc);
        if (!log_file) throw IoError("cannot write verdict log '" + args.out + "'");
    }

    Detector detector(std::move(db), index, config);
    const DetectionReport report = detector.run(reader, [&](const EpochVerdict& verdict) {
        const std::string line = format_verdict_line(verdict);
        std::cout << line << '\n' << std::flush; // live tailing in --follow mode
        if (log_file.is_open()) log_file << line << '\n' << std::flush;
    });
    g_active_reader = nullptr;

    std::cerr << "epochs " << report.verdicts.size() << ", events " << report.total_events
              << ", mismatches " << report.total_mismatches << ", db size "
              << report.db_size_final << "\n";
    return report.any_anomalous() ? kExitAnomaly : kExitClean;
}

int run_eval_sweep(const CommonArgs& args, const SweepGrid& grid, unsigned jobs) {
    SweepOptions options;
    options.train_events = args.train_events;
    options.window_size = args.window_size;
    options.continuous_training = !args.no_continuous;
    options.jobs = jobs;

    const auto rows = run_sweep_file(args.trace, grid, options);
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write sweep csv '" + args.out + "'");
    write_sweep_csv(out, rows);
    std::cerr << rows.size() << " sweep rows written to " << args.out << "\n";
    return kExitClean;
}

int run_gen_synth(const std::string& spec_path, const std::string& out) {
    const GenSpec spec = parse_gen_spec(spec_path);
    const GenerateStats stats = generate_trace(spec.model, spec.attacks, spec.total_events, out);
    std::cerr << "wrote " << stats.lines << " lines (" << stats.events << " events, "
              << stats.marker_lines << " marker lines) to " << out << "\n";
    return kExitClean;
}

int run_replay(const std::string& trace, bool quiet) {
    TraceReader reader(trace, StreamOptions{StreamMode::Offline});
    uint64_t events = 0;
    uint64_t markers = 0;
    uint64_t ignored = 0;
    while (auto item = reader.next()) {
        if (const auto* ev = event_of(*item)) {
            ++events;
            if (!quiet) std::cout << "event," << ev->seq << ',' << ev->pid << ',' << ev->name << '\n';
        } else if (const auto* mark = marker_of(*item)) {
            ++markers;
            if (!quiet)
                std::cout << "marker," << mark->seq << ','
                          << (mark->kind == MarkerKind::AttackStart ? "attack-start" : "attack-end")
                          << '\n';
        } else {
            ++ignored;
            if (!quiet)
                std::cout << "ignored,," << std::get<IgnoredLine>(*item).reason << '\n';
        }
    }
    std::cout << "summary,events," << events << ",markers," << markers << ",ignored," << ignored
              << '\n';
    return kExitClean;
}

int run_watch(const WatchConfig& config) {
    FILE* pipe = ::popen(config.events_command.c_str(), "r");
    if (pipe == nullptr) throw IoError("cannot run events command '" + config.events_command + "'");

    class PipeLineSource final : public LineSource {
    public:
        explicit PipeLineSource(FILE* pipe) : pipe_(pipe) {}
        std::optional<std::string> next_line() override {
            char* line = nullptr;
            size_t cap = 0;
            const ssize_t n = ::getline(&line, &cap, pipe_);
            if (n < 0) {
                ::free(line);
                return std::nullopt;
            }
            std::string out(line, static_cast<size_t>(n));
            ::free(line);
            while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
            return out;
        }

    private:
        FILE* pipe_;
    };

    bool any_anomalous = false;
    WatchService service(
        config,
        [&](const std::string& container_id, const EpochVerdict& verdict) {
            if (verdict.anomalous) any_anomalous = true;
            std::cout << container_id.substr(0, 12) << ' ' << format_verdict_line(verdict) << '\n'
                      << std::flush;
        },
        [](const std::string& message) { std::cerr << "watch: " << message << "\n"; });

    PipeLineSource source(pipe);
    service.run(source);
    ::pclose(pipe);

    for (const auto& [container_id, report] : service.reports())
        std::cerr << "watch: container " << container_id << ": " << report.verdicts.size()
                  << " epochs, " << report.total_mismatches << " mismatches\n";
    return any_anomalous ? kExitAnomaly : kExitClean;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bag-of-system-calls anomaly detection for container syscall traces"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string follow;
    std::string spec_path;
    bool quiet = false;
    unsigned jobs = 0;
    size_t s_min = 1000, s_max = 10000, s_step = 500;
    uint64_t td_min = 10, td_max = 100, td_step = 10;
    WatchConfig watch_config;

    std::string config_file;

    auto* build_index_cmd =
        app.add_subcommand("build-index", "Build the syscall index from a clean trace");
    build_index_cmd->add_option("--trace", args.trace, "tracer output file")
        ->envname("BOSCWATCH_TRACE");
    build_index_cmd->add_option("--out", args.out, "index file to write");
    build_index_cmd->add_option("--config", config_file, "key=value settings file");

    auto* train_cmd = app.add_subcommand("train", "Learn the normal-behavior database");
    train_cmd->add_option("--trace", args.trace, "clean tracer output file")
        ->envname("BOSCWATCH_TRACE");
    train_cmd->add_option("--index", args.index, "index file")->envname("BOSCWATCH_INDEX");
    train_cmd->add_option("--events", args.train_events, "number of events to train on");
    train_cmd->add_option("--k", args.window_size, "sliding window size")
        ->check(CLI::PositiveNumber)
        ->envname("BOSCWATCH_K");
    train_cmd->add_option("--out", args.out, "database file to write");
    train_cmd->add_option("--config", config_file, "key=value settings file");

    auto* detect_cmd = app.add_subcommand("detect", "Run epoch-based detection over a trace");
    auto* trace_opt = detect_cmd->add_option("--trace", args.trace, "complete trace (offline mode)");
    auto* follow_opt =
        detect_cmd->add_option("--follow", follow, "growing trace to follow (online mode)");
    trace_opt->excludes(follow_opt);
    detect_cmd->add_option("--index", args.index, "index file")->envname("BOSCWATCH_INDEX");
    detect_cmd->add_option("--db", args.db, "normal-behavior database")->envname("BOSCWATCH_DB");
    detect_cmd->add_option("--S", args.epoch_size, "epoch size in syscalls")
        ->check(CLI::PositiveNumber)
        ->envname("BOSCWATCH_S");
    detect_cmd->add_option("--Td", args.threshold, "mismatch threshold per epoch")
        ->check(CLI::PositiveNumber)
        ->envname("BOSCWATCH_TD");
    detect_cmd->add_flag("--no-continuous", args.no_continuous,
                         "disable continuous training (clean-epoch commits)");
    detect_cmd->add_option("--out", args.out, "also write verdict lines to this file");
    detect_cmd->add_option("--config", config_file, "key=value settings file");

    auto* sweep_cmd = app.add_subcommand("eval-sweep", "Sweep (S, T_d) and emit metrics CSV");
    sweep_cmd->add_option("--trace", args.trace, "trace with attack markers")
        ->envname("BOSCWATCH_TRACE");
    sweep_cmd->add_option("--train-events", args.train_events, "training prefix length");
    sweep_cmd->add_option("--k", args.window_size, "sliding window size")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--S-min", s_min, "smallest epoch size")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--S-max", s_max, "largest epoch size")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--S-step", s_step, "epoch size step")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--Td-min", td_min, "smallest threshold")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--Td-max", td_max, "largest threshold")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--Td-step", td_step, "threshold step")->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--no-continuous", args.no_continuous, "disable continuous training");
    sweep_cmd->add_option("--jobs", jobs, "parallel sweep cells (default: hardware threads)");
    sweep_cmd->add_option("--out", args.out, "CSV file to write");
    sweep_cmd->add_option("--config", config_file, "key=value settings file");

    auto* gen_cmd = app.add_subcommand("gen-synth", "Generate a synthetic trace from a JSON spec");
    gen_cmd->add_option("--spec", spec_path, "generator spec (JSON)")->required();
    gen_cmd->add_option("--out", args.out, "trace file to write")->required();

    auto* replay_cmd = app.add_subcommand("replay", "Parse a trace and print its items");
    replay_cmd->add_option("--trace", args.trace, "tracer output file")->required();
    replay_cmd->add_flag("--quiet", quiet, "print only the summary line");

    auto* watch_cmd = app.add_subcommand("watch", "Trace and monitor containers as they start");
    watch_cmd->add_option("--events_command", watch_config.events_command,
                          "command emitting container lifecycle events")
        ->envname("BOSCWATCH_EVENTS_COMMAND");
    watch_cmd->add_option("--cgroup_root", watch_config.cgroup_root,
                          "directory holding <container-id>/tasks files")
        ->envname("BOSCWATCH_CGROUP_ROOT");
    watch_cmd->add_option("--tracer_template", watch_config.tracer_template,
                          "tracer command with {pids} and {out} placeholders")
        ->envname("BOSCWATCH_TRACER_TEMPLATE");
    watch_cmd->add_option("--trace_dir", watch_config.trace_dir, "directory for trace files")
        ->envname("BOSCWATCH_TRACE_DIR");
    watch_cmd->add_option("--index", watch_config.index_path, "index file")
        ->envname("BOSCWATCH_INDEX");
    watch_cmd->add_option("--db", watch_config.db_path, "normal-behavior database")
        ->envname("BOSCWATCH_DB");
    watch_cmd->add_option("--S", watch_config.detector.epoch_size, "epoch size in syscalls")
        ->check(CLI::PositiveNumber);
    watch_cmd->add_option("--Td", watch_config.detector.threshold, "mismatch threshold per epoch")
        ->check(CLI::PositiveNumber);
    watch_cmd
        ->add_flag("--no-continuous", args.no_continuous,
                   "disable continuous training (clean-epoch commits)")
        ->envname("BOSCWATCH_NO_CONTINUOUS");
    watch_cmd->add_option("--config", config_file, "key=value settings file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitClean : kExitConfig;
    }

    auto missing = [](const char* flag) {
        throw ConfigError(std::string("missing required ") + flag);
    };

    try {
        CLI::App* parsed_sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands()[0];
        if (!config_file.empty() && parsed_sub != nullptr)
            apply_flat_config(*parsed_sub, config_file);

        if (build_index_cmd->parsed()) {
            if (args.trace.empty()) missing("--trace");
            if (args.out.empty()) missing("--out");
            return run_build_index(args);
        }
        if (train_cmd->parsed()) {
            if (args.trace.empty()) missing("--trace");
            if (args.index.empty()) missing("--index");
            if (args.train_events == 0) missing("--events");
            if (args.out.empty()) missing("--out");
            return run_train(args);
        }
        if (detect_cmd->parsed()) {
            if (args.index.empty()) missing("--index");
            if (args.db.empty()) missing("--db");
            if (args.trace.empty() && follow.empty())
                throw ConfigError("detect needs --trace or --follow");
            return run_detect(args, follow);
        }
        if (sweep_cmd->parsed()) {
            if (args.trace.empty()) missing("--trace");
            if (args.train_events == 0) missing("--train-events");
            if (args.out.empty()) missing("--out");
            SweepGrid grid;
            for (size_t s = s_min; s <= s_max; s += s_step) grid.epoch_sizes.push_back(s);
            for (uint64_t t = td_min; t <= td_max; t += td_step) grid.thresholds.push_back(t);
            return run_eval_sweep(args, grid, jobs);
        }
        if (gen_cmd->parsed()) return run_gen_synth(spec_path, args.out);
        if (replay_cmd->parsed()) return run_replay(args.trace, quiet);
        if (watch_cmd->parsed()) {
            if (watch_config.events_command.empty()) missing("--events_command");
            if (watch_config.cgroup_root.empty()) missing("--cgroup_root");
            if (watch_config.tracer_template.empty()) missing("--tracer_template");
            if (watch_config.trace_dir.empty()) missing("--trace_dir");
            if (watch_config.index_path.empty()) missing("--index");
            if (watch_config.db_path.empty()) missing("--db");
            watch_config.detector.continuous_training = !args.no_continuous;
            return run_watch(watch_config);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MarkerInTraining& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitConfig;
}
