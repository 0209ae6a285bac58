// Acceptance suite: end-to-end checks with fixed tolerances, one PASS/FAIL
// line per criterion. Returns the number of failed criteria.
//
// Usage: acceptance --cli <path-to-boscwatch-binary> [--only N]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "boscwatch/behavior_db.hpp"
#include "boscwatch/bosc_window.hpp"
#include "boscwatch/detector.hpp"
#include "boscwatch/evaluator.hpp"
#include "boscwatch/host_monitor.hpp"
#include "boscwatch/strace_parser.hpp"
#include "boscwatch/synth_gen.hpp"
#include "boscwatch/syscall_index.hpp"

using namespace boscwatch;
namespace fs = std::filesystem;

namespace {

struct Context {
    fs::path work;
    std::string cli;

    // Shared across criteria 5 and 6: the operating-point trace.
    std::vector<ParsedItem> operating_items;
    IndexMap operating_index;
    bool operating_ready = false;
};

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

int run_command(const std::string& command) {
    const int status = std::system(command.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------
// Reference workload for the end-to-end runs: a database-server-style loop
// with twelve calls and enough per-window variety that substitution noise
// produces genuinely new bags at a low, continuous rate.
// ---------------------------------------------------------------------------

WorkloadModel operating_model(uint64_t seed) {
    WorkloadModel model;
    model.seed = seed;
    model.substitution_rate = 0.01;
    model.split_probability = 0.002;
    model.alphabet = {
        {"futex", 0.40},      {"read", 0.10},  {"write", 0.10}, {"sendto", 0.07},
        {"recvfrom", 0.07},   {"poll", 0.06},  {"epoll_wait", 0.05}, {"lseek", 0.04},
        {"fcntl", 0.04},      {"select", 0.04}, {"access", 0.03}, {"stat", 0.03},
    };
    model.motifs = {
        {"recvfrom", "poll", "read", "futex", "futex", "sendto", "futex", "write", "epoll_wait",
         "futex"},
        {"read", "lseek", "read", "read", "futex", "write", "write", "futex", "sendto", "futex"},
        {"select", "access", "stat", "read", "fcntl", "futex", "futex", "write", "sendto",
         "recvfrom"},
        {"poll", "futex", "epoll_wait", "read", "futex", "write", "futex", "futex", "recvfrom",
         "futex"},
        {"read", "read", "lseek", "write", "futex", "sendto", "poll", "recvfrom", "fcntl",
         "access"},
        {"futex", "stat", "select", "read", "futex", "futex", "write", "epoll_wait", "futex",
         "poll"},
    };
    return model;
}

// Four attacks inside the detection region (training prefix = 250k events),
// each placed so every epoch it touches at S=1000 holds at least 200 attack
// events.
std::vector<AttackModel> operating_attacks() {
    return {
        {AttackVariant::Burst, 300300, 200},
        {AttackVariant::ShuffledMotifs, 450300, 1000},
        {AttackVariant::NovelCalls, 600300, 2650},
        {AttackVariant::NovelCalls, 800300, 5000},
    };
}

constexpr uint64_t kOperatingEvents = 1000000;
constexpr uint64_t kOperatingTrain = 250000;

void ensure_operating_trace(Context& ctx) {
    if (ctx.operating_ready) return;
    const fs::path trace = ctx.work / "operating.trace";
    generate_trace(operating_model(20250809), operating_attacks(), kOperatingEvents, trace);
    ctx.operating_items = read_trace_items(trace);

    SyscallCensus census;
    uint64_t events = 0;
    for (const auto& item : ctx.operating_items) {
        if (events >= kOperatingTrain) break;
        if (const auto* ev = event_of(item)) {
            census.add(ev->name);
            ++events;
        }
    }
    ctx.operating_index = build_index(census);
    ctx.operating_ready = true;
}

DetectionReport detect_operating(Context& ctx, bool continuous, Metrics* metrics) {
    DetectorConfig config;
    config.window_size = 10;
    config.epoch_size = 1000;
    config.threshold = 10;
    config.train_events = kOperatingTrain;
    config.continuous_training = continuous;

    MemoryItemStream stream(ctx.operating_items);
    NormalBehaviorDb db = train(stream, config, ctx.operating_index);
    Detector detector(std::move(db), ctx.operating_index, config);
    DetectionReport report = detector.run(stream);
    if (metrics != nullptr) *metrics = compute_metrics(report.verdicts);
    return report;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

bool criterion_window_golden(Context&, std::string& detail) {
    const uint32_t sendto = 0, futex = 2, pwrite = 6;
    SlidingWindow window(6, 8);
    for (uint32_t idx : {futex, futex, sendto, futex, sendto}) window.push(idx);

    const std::vector<std::pair<uint32_t, Bosc>> golden = {
        {pwrite, {2, 0, 3, 0, 0, 0, 1, 0}},
        {sendto, {3, 0, 2, 0, 0, 0, 1, 0}},
        {futex, {3, 0, 2, 0, 0, 0, 1, 0}},
        {sendto, {3, 0, 2, 0, 0, 0, 1, 0}},
    };
    for (size_t i = 0; i < golden.size(); ++i) {
        const auto bag = window.push(golden[i].first);
        if (!bag || *bag != golden[i].second) {
            detail = "push " + std::to_string(i + 1) + " produced the wrong bag";
            return false;
        }
    }
    detail = "4/4 size-6 window bags exact";
    return true;
}

bool criterion_db_roundtrip(Context& ctx, std::string& detail) {
    NormalBehaviorDb db(10, 20);
    const std::vector<std::pair<Bosc, uint64_t>> rows = {
        {{0, 1, 0, 2, 0, 0, 0, 0, 1, 0, 3, 0, 1, 0, 0, 0, 1, 0, 0, 1}, 15},
        {{0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 3, 0, 0, 0, 0, 0, 1, 1, 0, 1}, 8},
        {{0, 1, 0, 2, 0, 0, 5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1}, 2},
        {{0, 1, 0, 2, 0, 2, 0, 0, 1, 0, 2, 0, 0, 0, 0, 0, 1, 0, 0, 1}, 1},
    };
    for (const auto& [bag, freq] : rows)
        for (uint64_t i = 0; i < freq; ++i) db.insert(bag);

    const fs::path first = ctx.work / "roundtrip1.db";
    const fs::path second = ctx.work / "roundtrip2.db";
    db.save(first);
    const NormalBehaviorDb loaded = NormalBehaviorDb::load(first);
    loaded.save(second);

    if (!(loaded == db)) {
        detail = "loaded db differs from the original";
        return false;
    }
    if (read_file(first) != read_file(second)) {
        detail = "save-load-save is not byte-identical";
        return false;
    }
    for (const auto& [bag, freq] : rows) {
        if (loaded.table().at(bag) != freq) {
            detail = "frequency mismatch after round-trip";
            return false;
        }
    }
    detail = "4 rows survive save/load byte-identically";
    return true;
}

bool criterion_window_oracle(Context&, std::string& detail) {
    std::mt19937_64 rng(0xB05C);
    uint64_t pushes = 0;
    for (size_t k : {size_t{6}, size_t{10}}) {
        const size_t vector_len = 41;
        SlidingWindow window(k, vector_len);
        std::vector<uint32_t> history;
        history.reserve(60000);
        for (int i = 0; i < 60000; ++i) {
            const uint32_t idx = static_cast<uint32_t>(rng() % vector_len);
            history.push_back(idx);
            const auto bag = window.push(idx);
            ++pushes;
            if (history.size() < k) {
                if (bag) {
                    detail = "bag emitted during warm-up";
                    return false;
                }
                continue;
            }
            if (!bag) {
                detail = "no bag emitted after warm-up";
                return false;
            }
            uint64_t sum = 0;
            for (uint32_t c : *bag) sum += c;
            if (sum != k) {
                detail = "bag sum " + std::to_string(sum) + " != k " + std::to_string(k);
                return false;
            }
            const std::span<const uint32_t> tail(history.data() + history.size() - k, k);
            if (*bag != bosc_of(tail, k, vector_len)) {
                detail = "incremental bag differs from brute-force recount at push " +
                         std::to_string(i);
                return false;
            }
        }
    }
    detail = std::to_string(pushes) + " randomized pushes match the recount, sums exact";
    return true;
}

bool criterion_closure(Context& ctx, std::string& detail) {
    const fs::path trace = ctx.work / "closure.trace";
    WorkloadModel model = operating_model(31);
    generate_trace(model, {}, 100000, trace);

    const fs::path index = ctx.work / "closure.index";
    const fs::path db = ctx.work / "closure.db";
    const fs::path log = ctx.work / "closure.verdicts";
    const std::string quiet = " > /dev/null 2>&1";

    if (run_command(ctx.cli + " build-index --trace " + trace.string() + " --out " +
                    index.string() + quiet) != 0) {
        detail = "build-index failed";
        return false;
    }
    if (run_command(ctx.cli + " train --trace " + trace.string() + " --index " + index.string() +
                    " --events 100000 --out " + db.string() + quiet) != 0) {
        detail = "train failed";
        return false;
    }
    const int rc = run_command(ctx.cli + " detect --trace " + trace.string() + " --index " +
                               index.string() + " --db " + db.string() +
                               " --S 1000 --Td 10 --out " + log.string() + quiet);
    if (rc != 0) {
        detail = "detect exited " + std::to_string(rc) + ", expected 0";
        return false;
    }

    std::ifstream in(log);
    const auto verdicts = read_verdict_log(in);
    if (verdicts.size() != 100) {
        detail = "expected 100 epochs, got " + std::to_string(verdicts.size());
        return false;
    }
    for (const auto& verdict : verdicts) {
        if (verdict.mismatches != 0 || verdict.anomalous) {
            detail = "epoch " + std::to_string(verdict.epoch_index) + " has " +
                     std::to_string(verdict.mismatches) + " mismatches";
            return false;
        }
    }
    detail = "re-detecting the training trace: 0 mismatches in all 100 epochs, exit 0";
    return true;
}

bool criterion_operating_point(Context& ctx, std::string& detail) {
    ensure_operating_trace(ctx);

    Metrics with_ct;
    Metrics without_ct;
    detect_operating(ctx, true, &with_ct);
    detect_operating(ctx, false, &without_ct);

    if (!with_ct.tpr || !with_ct.fpr || !without_ct.fpr) {
        detail = "metrics undefined";
        return false;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "TPR %.4f, FPR %.4f (continuous) vs %.4f (frozen); %llu/%llu attack epochs",
                  *with_ct.tpr, *with_ct.fpr, *without_ct.fpr,
                  static_cast<unsigned long long>(with_ct.n_tp),
                  static_cast<unsigned long long>(with_ct.n_malicious));
    detail = buf;

    if (*with_ct.tpr != 1.0) return false;
    if (*with_ct.fpr > 0.05) return false;
    if (!(*with_ct.fpr < *without_ct.fpr)) return false;
    return true;
}

bool criterion_sweep_trends(Context& ctx, std::string& detail) {
    ensure_operating_trace(ctx);

    SweepOptions options;
    options.train_events = kOperatingTrain;
    options.window_size = 10;
    const auto rows = run_sweep(ctx.operating_items, SweepGrid::defaults(), options);

    const fs::path csv_path = ctx.work / "sweep.csv";
    {
        std::ofstream out(csv_path, std::ios::binary);
        write_sweep_csv(out, rows);
    }

    // Verify the trends from the CSV text itself.
    struct Row {
        uint64_t s = 0;
        uint64_t td = 0;
        double tpr = 0.0;
        double fpr = 0.0;
        uint64_t n_normal = 0;
    };
    std::vector<Row> parsed;
    {
        std::ifstream in(csv_path);
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            Row row;
            std::string tpr_text, fpr_text;
            std::istringstream fields(line);
            std::string field;
            std::getline(fields, field, ',');
            row.s = std::stoull(field);
            std::getline(fields, field, ',');
            row.td = std::stoull(field);
            std::getline(fields, tpr_text, ',');
            std::getline(fields, fpr_text, ',');
            std::getline(fields, field, ','); // n_tp
            std::getline(fields, field, ','); // n_fp
            std::getline(fields, field, ','); // n_malicious
            std::getline(fields, field, ',');
            row.n_normal = std::stoull(field);
            if (tpr_text.empty() || fpr_text.empty()) {
                detail = "undefined rate in sweep row";
                return false;
            }
            row.tpr = std::stod(tpr_text);
            row.fpr = std::stod(fpr_text);
            parsed.push_back(row);
        }
    }
    if (parsed.size() != 190) {
        detail = "expected 190 rows, got " + std::to_string(parsed.size());
        return false;
    }

    // (a) At T_d = 10, FPR must not decrease as S grows. Rates are epoch
    // counts over shrinking denominators, so a drop smaller than one epoch's
    // worth of rate is quantization, not a trend reversal.
    std::vector<Row> td10;
    for (const auto& row : parsed)
        if (row.td == 10) td10.push_back(row);
    std::sort(td10.begin(), td10.end(), [](const Row& a, const Row& b) { return a.s < b.s; });
    for (size_t i = 1; i < td10.size(); ++i) {
        const double slack =
            1.0 / static_cast<double>(std::min(td10[i].n_normal, td10[i - 1].n_normal));
        if (td10[i].fpr + slack < td10[i - 1].fpr) {
            detail = "FPR fell from " + std::to_string(td10[i - 1].fpr) + " to " +
                     std::to_string(td10[i].fpr) + " between S=" + std::to_string(td10[i - 1].s) +
                     " and S=" + std::to_string(td10[i].s);
            return false;
        }
    }

    // (b) At S = 1000, TPR and FPR must not increase with T_d.
    std::vector<Row> s1000;
    for (const auto& row : parsed)
        if (row.s == 1000) s1000.push_back(row);
    std::sort(s1000.begin(), s1000.end(), [](const Row& a, const Row& b) { return a.td < b.td; });
    for (size_t i = 1; i < s1000.size(); ++i) {
        if (s1000[i].tpr > s1000[i - 1].tpr + 1e-12 || s1000[i].fpr > s1000[i - 1].fpr + 1e-12) {
            detail = "rate rose with T_d at S=1000 (T_d " + std::to_string(s1000[i].td) + ")";
            return false;
        }
    }

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "190 rows; FPR(S) rises %.4f..%.4f at T_d=10; rates fall with T_d at S=1000",
                  td10.front().fpr, td10.back().fpr);
    detail = buf;
    return true;
}

bool criterion_linearity(Context& ctx, std::string& detail) {
    const WorkloadModel model = operating_model(777);
    const fs::path small_trace = ctx.work / "linear_1m.trace";
    const fs::path big_trace = ctx.work / "linear_2m.trace";
    generate_trace(model, {}, 1000000, small_trace);
    generate_trace(model, {}, 2000000, big_trace);

    const auto small_items = read_trace_items(small_trace);
    const auto big_items = read_trace_items(big_trace);

    SyscallCensus census;
    uint64_t events = 0;
    for (const auto& item : small_items) {
        if (events >= 250000) break;
        if (const auto* ev = event_of(item)) {
            census.add(ev->name);
            ++events;
        }
    }
    const IndexMap index = build_index(census);

    DetectorConfig config;
    config.window_size = 10;
    config.epoch_size = 1000;
    config.threshold = 10;
    config.train_events = 250000;

    MemoryItemStream train_stream(small_items);
    const NormalBehaviorDb db = train(train_stream, config, index);

    auto time_detection = [&](const std::vector<ParsedItem>& items) {
        std::vector<double> samples;
        for (int run = 0; run < 3; ++run) {
            NormalBehaviorDb copy = db;
            Detector detector(std::move(copy), index, config);
            MemoryItemStream stream(items);
            const double start = now_seconds();
            (void)detector.run(stream);
            samples.push_back(now_seconds() - start);
        }
        std::sort(samples.begin(), samples.end());
        return samples[1]; // median of three
    };

    const double small_time = time_detection(small_items);
    const double big_time = time_detection(big_items);
    const double ratio = big_time / small_time;

    char buf[160];
    std::snprintf(buf, sizeof buf, "1M: %.3fs, 2M: %.3fs, ratio %.2f (bounds 1.5..2.5)",
                  small_time, big_time, ratio);
    detail = buf;
    return ratio > 1.5 && ratio < 2.5;
}

bool criterion_metrics_oracle(Context&, std::string& detail) {
    std::mt19937 rng(0xE7A1);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<EpochVerdict> verdicts;
        const size_t n = 1 + rng() % 120;
        for (size_t i = 0; i < n; ++i) {
            EpochVerdict v;
            v.epoch_index = i;
            v.anomalous = rng() % 2 == 0;
            v.attack_overlap = rng() % 4 == 0;
            v.mismatches = v.anomalous ? 100 : 0;
            v.events_in_epoch = 500;
            verdicts.push_back(v);
        }
        uint64_t tp = 0, fp = 0, malicious = 0, normal = 0;
        for (const auto& v : verdicts) {
            if (v.attack_overlap) {
                ++malicious;
                if (v.anomalous) ++tp;
            } else {
                ++normal;
                if (v.anomalous) ++fp;
            }
        }
        const Metrics m = compute_metrics(verdicts);
        const bool counts_ok = m.n_tp == tp && m.n_fp == fp && m.n_malicious == malicious &&
                               m.n_normal == normal;
        const bool tpr_ok = malicious == 0 ? !m.tpr
                                           : m.tpr && *m.tpr == static_cast<double>(tp) /
                                                                    static_cast<double>(malicious);
        const bool fpr_ok = normal == 0 ? !m.fpr
                                        : m.fpr && *m.fpr == static_cast<double>(fp) /
                                                                 static_cast<double>(normal);
        if (!counts_ok || !tpr_ok || !fpr_ok) {
            detail = "mismatch against brute-force recount in trial " + std::to_string(trial);
            return false;
        }
    }
    detail = "1000 randomized verdict lists match the confusion-matrix recount";
    return true;
}

bool criterion_monitor(Context& ctx, std::string& detail) {
    const fs::path dir = ctx.work / "monitor";
    fs::create_directories(dir);

    // Train index + db from a clean run of the demo workload.
    WorkloadModel model = demo_workload(91);
    const fs::path clean = dir / "clean.trace";
    generate_trace(model, {}, 6000, clean);
    const auto clean_items = read_trace_items(clean);
    SyscallCensus census;
    for (const auto& item : clean_items)
        if (const auto* ev = event_of(item)) census.add(ev->name);
    const IndexMap index = build_index(census);
    DetectorConfig train_config;
    train_config.window_size = 10;
    train_config.epoch_size = 250;
    train_config.train_events = 6000;
    MemoryItemStream train_stream(clean_items);
    const NormalBehaviorDb db = train(train_stream, train_config, index);
    const fs::path index_path = dir / "syscalls.index";
    const fs::path db_path = dir / "normal.db";
    index.save(index_path);
    db.save(db_path);

    // The "container" trace the stub tracer will emit, including an attack.
    WorkloadModel live = model;
    live.seed = 92;
    const fs::path source = dir / "container_src.trace";
    generate_trace(live, {{AttackVariant::NovelCalls, 2500, 400}}, 5000, source);

    const fs::path stub = dir / "stub_tracer.sh";
    {
        std::ofstream out(stub);
        out << "#!/bin/sh\nout=\"$1\"\nsrc=\"$2\"\n: > \"$out\"\n"
               "n=$(wc -l < \"$src\")\ni=1\n"
               "while [ \"$i\" -le \"$n\" ]; do\n"
               "  sed -n \"${i},$((i+49))p\" \"$src\" >> \"$out\"\n"
               "  i=$((i+50))\n  sleep 0.005\ndone\n";
    }
    fs::permissions(stub, fs::perms::owner_all);

    const std::string cid = "deadbeef4242";
    fs::create_directories(dir / "cgroup" / cid);
    {
        std::ofstream out(dir / "cgroup" / cid / "tasks");
        out << "3101\n3102\n";
    }

    WatchConfig config;
    config.cgroup_root = dir / "cgroup";
    config.tracer_template = stub.string() + " {out} " + source.string() + " {pids}";
    config.trace_dir = dir / "traces";
    config.index_path = index_path;
    config.db_path = db_path;
    config.detector.epoch_size = 250;
    config.detector.threshold = 8;

    WatchService service(config, {}, {});

    // Scripted event feed: start, wait for the stub to finish, stop.
    class Feed final : public LineSource {
    public:
        Feed(std::string cid, fs::path trace, uintmax_t size)
            : cid_(std::move(cid)), trace_(std::move(trace)), size_(size) {}
        std::optional<std::string> next_line() override {
            switch (step_++) {
                case 0: return "start " + cid_;
                case 1: {
                    const auto deadline =
                        std::chrono::steady_clock::now() + std::chrono::seconds(10);
                    while (std::chrono::steady_clock::now() < deadline) {
                        std::error_code ec;
                        if (fs::file_size(trace_, ec) == size_ && !ec) break;
                        std::this_thread::sleep_for(std::chrono::milliseconds(5));
                    }
                    return "stop " + cid_;
                }
                default: return std::nullopt;
            }
        }

    private:
        std::string cid_;
        fs::path trace_;
        uintmax_t size_;
        int step_ = 0;
    };

    Feed feed(cid, config.trace_dir / (cid + ".trace"), fs::file_size(source));
    service.run(feed);

    if (service.reports().size() != 1) {
        detail = "expected one session report";
        return false;
    }
    const DetectionReport& online = service.reports()[0].second;

    DetectorConfig offline_config = config.detector;
    offline_config.window_size = db.window_size();
    Detector offline(db, index, offline_config);
    TraceReader reader(source, StreamOptions{StreamMode::Offline});
    const DetectionReport expected = offline.run(reader);

    if (online.verdicts != expected.verdicts) {
        detail = "online verdicts differ from the offline run";
        return false;
    }
    if (!expected.any_anomalous()) {
        detail = "attack not visible in the oracle run";
        return false;
    }
    detail = std::to_string(online.verdicts.size()) + " online epochs equal the offline run";
    return true;
}

struct Criterion {
    int number;
    const char* name;
    std::function<bool(Context&, std::string&)> run;
};

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) cli = argv[++i];
        if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    if (cli.empty()) {
        std::cerr << "usage: acceptance --cli <boscwatch binary> [--only N]\n";
        return 64;
    }

    Context ctx;
    ctx.cli = cli;
    std::string work_template = (fs::temp_directory_path() / "boscwatch-accept-XXXXXX").string();
    if (::mkdtemp(work_template.data()) == nullptr) {
        std::cerr << "cannot create work directory\n";
        return 64;
    }
    ctx.work = work_template;

    const std::vector<Criterion> criteria = {
        {1, "window-golden", criterion_window_golden},
        {2, "db-roundtrip-golden", criterion_db_roundtrip},
        {3, "window-oracle", criterion_window_oracle},
        {4, "closure", criterion_closure},
        {5, "operating-point", criterion_operating_point},
        {6, "sweep-trends", criterion_sweep_trends},
        {7, "linearity", criterion_linearity},
        {8, "metrics-oracle", criterion_metrics_oracle},
        {9, "monitor-online-offline", criterion_monitor},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only != 0 && criterion.number != only) continue;
        std::string detail;
        bool ok = false;
        const double start = now_seconds();
        try {
            ok = criterion.run(ctx, detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed = now_seconds() - start;
        std::printf("[%s] %d %s: %s (%.2fs)\n", ok ? "PASS" : "FAIL", criterion.number,
                    criterion.name, detail.c_str(), elapsed);
        std::fflush(stdout);
        if (!ok) ++failures;
    }

    std::error_code ec;
    fs::remove_all(ctx.work, ec);
    return failures;
}
