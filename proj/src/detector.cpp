#include "boscwatch/detector.hpp"

#include "boscwatch/errors.hpp"

namespace boscwatch {

void DetectorConfig::validate(bool require_training) const {
    if (window_size < 1) throw ConfigError("window size (k) must be >= 1");
    if (epoch_size < window_size) throw ConfigError("epoch size (S) must be >= window size (k)");
    if (threshold < 1) throw ConfigError("detection threshold (T_d) must be >= 1");
    if (require_training && train_events < window_size)
        throw ConfigError("training length must be >= window size (k)");
}

bool DetectionReport::any_anomalous() const {
    for (const auto& v : verdicts)
        if (v.anomalous) return true;
    return false;
}

std::string format_verdict_line(const EpochVerdict& v) {
    std::string line = "epoch,";
    line += std::to_string(v.epoch_index);
    line += ",events,";
    line += std::to_string(v.events_in_epoch);
    line += ",mismatches,";
    line += std::to_string(v.mismatches);
    line += ",anomalous,";
    line += v.anomalous ? '1' : '0';
    line += ",attack,";
    line += v.attack_overlap ? '1' : '0';
    return line;
}

NormalBehaviorDb train(ItemStream& stream, const DetectorConfig& config, const IndexMap& index) {
    config.validate(/*require_training=*/true);

    NormalBehaviorDb db(config.window_size, index.vector_len());
    SlidingWindow window(config.window_size, index.vector_len());
    uint64_t consumed = 0;
    while (consumed < config.train_events) {
        auto item = stream.next();
        if (!item)
            throw InsufficientTrainingData("stream ended after " + std::to_string(consumed) +
                                           " of " + std::to_string(config.train_events) +
                                           " training events");
        if (marker_of(*item))
            throw MarkerInTraining("attack marker after " + std::to_string(consumed) +
                                   " training events; training data must be clean");
        const auto* ev = event_of(*item);
        if (!ev) continue;
        if (auto bag = window.push(index.lookup(ev->name))) db.insert(*bag);
        ++consumed;
    }
    return db;
}

Detector::Detector(NormalBehaviorDb db, IndexMap index, DetectorConfig config)
    : db_(std::move(db)),
      index_(std::move(index)),
      config_(config),
      window_(config_.window_size, db_.vector_len()) {
    config_.validate();
    if (index_.vector_len() != db_.vector_len())
        throw VectorLenMismatch("index vector length " + std::to_string(index_.vector_len()) +
                                " does not match db vector length " +
                                std::to_string(db_.vector_len()));
    if (config_.window_size != db_.window_size())
        throw VectorLenMismatch("configured window size " + std::to_string(config_.window_size) +
                                " does not match db window size " +
                                std::to_string(db_.window_size()));
}

std::optional<Detector::EpochResult> Detector::detect_epoch(ItemStream& stream) {
    EpochDelta delta(db_.vector_len());
    uint64_t events = 0;
    uint64_t mismatches = 0;
    bool overlap = false;

    while (events < config_.epoch_size) {
        auto item = stream.next();
        if (!item) break;
        if (const auto* mark = marker_of(*item)) {
            // Tolerant toggle: well-formed traces alternate start/end.
            in_attack_ = mark->kind == MarkerKind::AttackStart;
            continue;
        }
        const auto* ev = event_of(*item);
        if (!ev) continue;
        ++events;
        if (in_attack_) overlap = true;
        if (auto bag = window_.push(index_.lookup(ev->name))) {
            if (!db_.contains(*bag)) ++mismatches;
            delta.stage(std::move(*bag));
        }
    }
    if (events == 0) return std::nullopt; // exhausted at an epoch boundary

    EpochVerdict verdict{
        next_epoch_index_++, mismatches, mismatches > config_.threshold, overlap, events,
    };
    return EpochResult{verdict, std::move(delta)};
}

DetectionReport Detector::run(ItemStream& stream,
                              const std::function<void(const EpochVerdict&)>& on_verdict) {
    DetectionReport report;
    while (auto epoch = detect_epoch(stream)) {
        if (config_.continuous_training && !epoch->verdict.anomalous) commit(epoch->delta);
        report.total_events += epoch->verdict.events_in_epoch;
        report.total_mismatches += epoch->verdict.mismatches;
        report.verdicts.push_back(epoch->verdict);
        if (on_verdict) on_verdict(epoch->verdict);
    }
    report.db_size_final = db_.size();
    return report;
}

} // namespace boscwatch
