#include "boscwatch/evaluator.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <thread>

#include "boscwatch/errors.hpp"
#include "boscwatch/strace_parser.hpp"

namespace boscwatch {

Metrics compute_metrics(const std::vector<EpochVerdict>& verdicts) {
    if (verdicts.empty()) throw ConfigError("cannot compute metrics from zero epochs");

    Metrics m;
    for (const auto& v : verdicts) {
        if (v.attack_overlap) {
            ++m.n_malicious;
            if (v.anomalous) ++m.n_tp;
        } else {
            ++m.n_normal;
            if (v.anomalous) ++m.n_fp;
        }
    }
    if (m.n_malicious > 0) m.tpr = static_cast<double>(m.n_tp) / static_cast<double>(m.n_malicious);
    if (m.n_normal > 0) m.fpr = static_cast<double>(m.n_fp) / static_cast<double>(m.n_normal);
    return m;
}

namespace {

uint64_t parse_field(std::string_view line, std::string_view& rest, std::string_view key) {
    if (!rest.starts_with(key))
        throw FormatError("bad verdict line (expected '" + std::string(key) + "'): " +
                          std::string(line));
    rest.remove_prefix(key.size());
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
    if (ec != std::errc() || ptr == rest.data())
        throw FormatError("bad verdict line (number after '" + std::string(key) + "'): " +
                          std::string(line));
    rest.remove_prefix(static_cast<size_t>(ptr - rest.data()));
    return value;
}

bool parse_flag(std::string_view line, std::string_view& rest, std::string_view key) {
    const uint64_t v = parse_field(line, rest, key);
    if (v > 1) throw FormatError("bad verdict line (flag must be 0/1): " + std::string(line));
    return v == 1;
}

} // namespace

EpochVerdict parse_verdict_line(std::string_view line) {
    std::string_view rest = line;
    if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);

    EpochVerdict v;
    v.epoch_index = parse_field(line, rest, "epoch,");
    v.events_in_epoch = parse_field(line, rest, ",events,");
    v.mismatches = parse_field(line, rest, ",mismatches,");
    v.anomalous = parse_flag(line, rest, ",anomalous,");
    v.attack_overlap = parse_flag(line, rest, ",attack,");
    if (!rest.empty()) throw FormatError("trailing junk in verdict line: " + std::string(line));
    return v;
}

std::vector<EpochVerdict> read_verdict_log(std::istream& in) {
    std::vector<EpochVerdict> verdicts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        verdicts.push_back(parse_verdict_line(line));
    }
    return verdicts;
}

SweepGrid SweepGrid::defaults() {
    SweepGrid grid;
    for (size_t s = 1000; s <= 10000; s += 500) grid.epoch_sizes.push_back(s);
    for (uint64_t t = 10; t <= 100; t += 10) grid.thresholds.push_back(t);
    return grid;
}

void SweepGrid::validate() const {
    if (epoch_sizes.empty() || thresholds.empty())
        throw ConfigError("sweep grid axes must be non-empty");
    for (size_t i = 1; i < epoch_sizes.size(); ++i)
        if (epoch_sizes[i] <= epoch_sizes[i - 1])
            throw ConfigError("epoch sizes must be strictly increasing");
    for (size_t i = 1; i < thresholds.size(); ++i)
        if (thresholds[i] <= thresholds[i - 1])
            throw ConfigError("thresholds must be strictly increasing");
}

namespace {

// Index is rebuilt from the same census the per-cell training pass will see,
// so every cell shares one table.
IndexMap index_from_prefix(const std::vector<ParsedItem>& items, uint64_t train_events) {
    SyscallCensus census;
    uint64_t events = 0;
    for (const auto& item : items) {
        if (events >= train_events) break;
        if (const auto* ev = event_of(item)) {
            census.add(ev->name);
            ++events;
        }
    }
    if (events == 0) throw EmptyTrace("no syscall events in training prefix");
    if (events < train_events)
        throw InsufficientTrainingData("trace holds " + std::to_string(events) +
                                       " events, training needs " + std::to_string(train_events));
    return build_index(census);
}

SweepRow run_cell(const std::vector<ParsedItem>& items, const IndexMap& index, size_t epoch_size,
                  uint64_t threshold, const SweepOptions& options) {
    DetectorConfig config;
    config.window_size = options.window_size;
    config.epoch_size = epoch_size;
    config.threshold = threshold;
    config.train_events = options.train_events;
    config.continuous_training = options.continuous_training;

    MemoryItemStream stream(items);
    NormalBehaviorDb db = train(stream, config, index);
    Detector detector(std::move(db), index, config);
    const DetectionReport report = detector.run(stream);

    SweepRow row{epoch_size, threshold, {}};
    if (!report.verdicts.empty()) row.metrics = compute_metrics(report.verdicts);
    return row;
}

} // namespace

std::vector<SweepRow> run_sweep(const std::vector<ParsedItem>& items, const SweepGrid& grid,
                                const SweepOptions& options) {
    grid.validate();
    const IndexMap index = index_from_prefix(items, options.train_events);

    std::vector<std::pair<size_t, uint64_t>> cells;
    cells.reserve(grid.epoch_sizes.size() * grid.thresholds.size());
    for (size_t s : grid.epoch_sizes)
        for (uint64_t t : grid.thresholds) cells.emplace_back(s, t);

    std::vector<SweepRow> rows(cells.size());
    unsigned jobs = options.jobs != 0 ? options.jobs : std::thread::hardware_concurrency();
    if (jobs == 0) jobs = 1;
    jobs = static_cast<unsigned>(std::min<size_t>(jobs, cells.size()));

    std::atomic<size_t> cursor{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (;;) {
            const size_t i = cursor.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                rows[i] = run_cell(items, index, cells[i].first, cells[i].second, options);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                cursor.store(cells.size()); // abandon remaining cells
                return;
            }
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return rows;
}

std::vector<SweepRow> run_sweep_file(const std::filesystem::path& trace, const SweepGrid& grid,
                                     const SweepOptions& options) {
    const std::vector<ParsedItem> items = read_trace_items(trace);
    return run_sweep(items, grid, options);
}

namespace {

std::string format_rate(const std::optional<double>& rate) {
    if (!rate) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *rate);
    return buf;
}

} // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "S,T_d,tpr,fpr,n_tp,n_fp,n_malicious,n_normal\n";
    for (const auto& row : rows) {
        out << row.epoch_size << ',' << row.threshold << ',' << format_rate(row.metrics.tpr) << ','
            << format_rate(row.metrics.fpr) << ',' << row.metrics.n_tp << ',' << row.metrics.n_fp
            << ',' << row.metrics.n_malicious << ',' << row.metrics.n_normal << '\n';
    }
}

} // namespace boscwatch
