#ifndef BOSCWATCH_DETECTOR_HPP
#define BOSCWATCH_DETECTOR_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "boscwatch/behavior_db.hpp"
#include "boscwatch/parsed_item.hpp"
#include "boscwatch/syscall_index.hpp"

namespace boscwatch {

struct DetectorConfig {
    size_t window_size = 10;       // k
    size_t epoch_size = 1000;      // S, in syscall events
    uint64_t threshold = 10;       // T_d, mismatches per epoch
    uint64_t train_events = 0;     // events consumed by training mode
    bool continuous_training = true;

    /// Throws ConfigError unless k >= 1, S >= k, T_d >= 1.
    /// `require_training` additionally demands train_events >= k.
    void validate(bool require_training = false) const;
};

struct EpochVerdict {
    uint64_t epoch_index = 0;
    uint64_t mismatches = 0;
    bool anomalous = false;
    bool attack_overlap = false; // ground truth from markers
    uint64_t events_in_epoch = 0;

    bool operator==(const EpochVerdict&) const = default;
};

struct DetectionReport {
    std::vector<EpochVerdict> verdicts;
    uint64_t db_size_final = 0;
    uint64_t total_events = 0;
    uint64_t total_mismatches = 0;

    bool any_anomalous() const;
};

/// Operator/scripting contract:
/// `epoch,<idx>,events,<n>,mismatches,<m>,anomalous,<0|1>,attack,<0|1>`
std::string format_verdict_line(const EpochVerdict& verdict);

/// Training mode: consume exactly `config.train_events` events from the
/// stream and insert every emitted bag. Markers anywhere in the consumed
/// span throw MarkerInTraining; a stream that runs dry first throws
/// InsufficientTrainingData.
NormalBehaviorDb train(ItemStream& stream, const DetectorConfig& config, const IndexMap& index);

/// Epoch-based detection over a parsed stream. The detector owns its copy of
/// the database and the sliding window; the window intentionally carries
/// across epoch boundaries, only the mismatch counter resets.
class Detector {
public:
    struct EpochResult {
        EpochVerdict verdict;
        EpochDelta delta;
    };

    Detector(NormalBehaviorDb db, IndexMap index, DetectorConfig config);

    /// Processes up to one epoch (S events) from the stream, counting window
    /// positions whose bag is absent from the database. Every emitted bag is
    /// staged into the returned delta; committing is the caller's decision.
    /// Returns nothing when the stream is exhausted at an epoch boundary.
    std::optional<EpochResult> detect_epoch(ItemStream& stream);

    /// Folds a staged delta into the database (continuous training).
    void commit(EpochDelta& delta) { db_.commit(delta); }

    /// Full detection loop with clean-epoch commit gating. The callback, when
    /// given, fires once per epoch as soon as its verdict is known.
    DetectionReport run(ItemStream& stream,
                        const std::function<void(const EpochVerdict&)>& on_verdict = {});

    const NormalBehaviorDb& db() const { return db_; }
    const DetectorConfig& config() const { return config_; }

private:
    NormalBehaviorDb db_;
    IndexMap index_;
    DetectorConfig config_;
    SlidingWindow window_;
    bool in_attack_ = false;
    uint64_t next_epoch_index_ = 0;
};

} // namespace boscwatch

#endif
