#ifndef BOSCWATCH_SYNTH_GEN_HPP
#define BOSCWATCH_SYNTH_GEN_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace boscwatch {

struct WeightedName {
    std::string name;
    double weight = 1.0;
};

/// Repetitive normal workload: the motifs are replayed in order forever
/// (period = sum of motif lengths) and each emitted call is replaced, with
/// probability `substitution_rate`, by a weighted draw from the alphabet.
/// `split_probability` turns an event into an unfinished/resumed line pair.
struct WorkloadModel {
    std::vector<WeightedName> alphabet;
    std::vector<std::vector<std::string>> motifs;
    double substitution_rate = 0.01;
    double split_probability = 0.002;
    uint64_t seed = 0;
};

enum class AttackVariant {
    NovelCalls,     // names outside the normal alphabet
    ShuffledMotifs, // normal names, uniform draws instead of motif structure
    Burst,          // repetition of the alphabet's rarest call
};

/// One injected attack: events [position, position + length) of the trace
/// are attack events, bracketed by the exact marker lines. The normal
/// workload pauses for the duration and resumes afterwards.
struct AttackModel {
    AttackVariant variant = AttackVariant::NovelCalls;
    uint64_t position = 0;
    uint64_t length = 0;
};

struct GenerateStats {
    uint64_t lines = 0;
    uint64_t events = 0;
    uint64_t marker_lines = 0;
};

/// Emits a tracer-format trace of exactly `total_events` syscalls to `out`
/// and a JSON manifest (seed, models, attack spans, stats) to `<out>.json`.
/// Identical inputs produce byte-identical files.
GenerateStats generate_trace(const WorkloadModel& model, std::vector<AttackModel> attacks,
                             uint64_t total_events, const std::filesystem::path& out);

/// Everything generate_trace needs, as read from a JSON spec file.
struct GenSpec {
    WorkloadModel model;
    std::vector<AttackModel> attacks;
    uint64_t total_events = 0;
};

GenSpec parse_gen_spec(const std::filesystem::path& path);

std::string to_string(AttackVariant variant);
AttackVariant attack_variant_from_string(std::string_view text);

/// Small database-server-flavoured workload used by tests and as a starting
/// point for hand-written spec files.
WorkloadModel demo_workload(uint64_t seed);

} // namespace boscwatch

#endif
