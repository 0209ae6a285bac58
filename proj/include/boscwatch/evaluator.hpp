#ifndef BOSCWATCH_EVALUATOR_HPP
#define BOSCWATCH_EVALUATOR_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "boscwatch/detector.hpp"

namespace boscwatch {

/// Epoch-level detection rates. A rate whose divisor is zero is reported as
/// absent rather than 0 so "no attacks present" stays distinguishable from
/// "nothing detected".
struct Metrics {
    std::optional<double> tpr;
    std::optional<double> fpr;
    uint64_t n_malicious = 0;
    uint64_t n_normal = 0;
    uint64_t n_tp = 0;
    uint64_t n_fp = 0;
};

/// True/false positive rates over a non-empty verdict list: an epoch counts
/// as a true positive when flagged and attack-overlapping, as a false
/// positive when flagged without overlap.
Metrics compute_metrics(const std::vector<EpochVerdict>& verdicts);

/// Parses one `epoch,...` line produced by format_verdict_line.
EpochVerdict parse_verdict_line(std::string_view line);
std::vector<EpochVerdict> read_verdict_log(std::istream& in);

struct SweepGrid {
    std::vector<size_t> epoch_sizes;   // S values, strictly increasing
    std::vector<uint64_t> thresholds;  // T_d values, strictly increasing

    /// S in 1000..10000 step 500, T_d in 10..100 step 10.
    static SweepGrid defaults();

    void validate() const; // ConfigError on empty or non-increasing axes
};

struct SweepOptions {
    uint64_t train_events = 0;
    size_t window_size = 10;
    bool continuous_training = true;
    unsigned jobs = 0; // 0 = hardware concurrency
};

struct SweepRow {
    size_t epoch_size = 0;
    uint64_t threshold = 0;
    Metrics metrics;
};

/// Runs one detection experiment per grid cell: a fresh database is trained
/// from the first `train_events` events, detection runs over the remainder,
/// and the cell's metrics are recorded. Cells are independent and execute in
/// parallel; rows come back in grid order (epoch sizes outer, thresholds
/// inner) regardless of completion order.
std::vector<SweepRow> run_sweep(const std::vector<ParsedItem>& items, const SweepGrid& grid,
                                const SweepOptions& options);

/// Convenience wrapper: loads the trace file once, then sweeps in memory.
std::vector<SweepRow> run_sweep_file(const std::filesystem::path& trace, const SweepGrid& grid,
                                     const SweepOptions& options);

/// Columns: S,T_d,tpr,fpr,n_tp,n_fp,n_malicious,n_normal. Undefined rates
/// serialize as empty fields. Output is deterministic for identical rows.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace boscwatch

#endif
