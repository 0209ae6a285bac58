#include "boscwatch/synth_gen.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"

#include "boscwatch/errors.hpp"
#include "boscwatch/strace_parser.hpp"

namespace boscwatch {

namespace {

// Raw mt19937_64 draws only: std::uniform_* distributions are not pinned by
// the standard, and the output here must be reproducible byte for byte.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }
    uint64_t next_below(uint64_t n) { return gen_() % n; }
    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 gen_;
};

constexpr std::array<std::string_view, 8> kNovelCallPool = {
    "ptrace",  "mount",       "reboot",       "setuid",
    "chroot",  "init_module", "finit_module", "kexec_load",
};

constexpr std::array<int32_t, 4> kPidPool = {2841, 2842, 2903, 3104};

class WeightedPicker {
public:
    explicit WeightedPicker(const std::vector<WeightedName>& alphabet) {
        cumulative_.reserve(alphabet.size());
        double total = 0.0;
        for (const auto& entry : alphabet) {
            total += entry.weight;
            cumulative_.push_back(total);
        }
        total_ = total;
    }

    size_t pick(Rng& rng) const {
        const double x = rng.next_unit() * total_;
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
        const size_t i = static_cast<size_t>(it - cumulative_.begin());
        return std::min(i, cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
    double total_ = 0.0;
};

void validate_model(const WorkloadModel& model) {
    if (model.alphabet.empty()) throw ConfigError("workload alphabet must be non-empty");
    for (const auto& entry : model.alphabet) {
        if (entry.name.empty()) throw ConfigError("alphabet names must be non-empty");
        if (!(entry.weight > 0.0)) throw ConfigError("alphabet weights must be positive");
    }
    if (model.motifs.empty()) throw ConfigError("workload needs at least one motif");
    for (const auto& motif : model.motifs)
        if (motif.empty()) throw ConfigError("motifs must be non-empty");
    if (model.substitution_rate < 0.0 || model.substitution_rate >= 1.0)
        throw ConfigError("substitution rate must be in [0, 1)");
    if (model.split_probability < 0.0 || model.split_probability >= 1.0)
        throw ConfigError("split probability must be in [0, 1)");
}

std::vector<AttackModel> validate_attacks(std::vector<AttackModel> attacks, uint64_t total_events) {
    std::sort(attacks.begin(), attacks.end(),
              [](const AttackModel& a, const AttackModel& b) { return a.position < b.position; });
    uint64_t previous_end = 0;
    bool first = true;
    for (const auto& attack : attacks) {
        if (attack.length < 1) throw SpanOutOfRange("attack length must be >= 1");
        if (attack.position + attack.length > total_events)
            throw SpanOutOfRange("attack span [" + std::to_string(attack.position) + ", " +
                                 std::to_string(attack.position + attack.length) +
                                 ") exceeds total events " + std::to_string(total_events));
        if (!first && attack.position < previous_end)
            throw OverlappingAttacks("attack at " + std::to_string(attack.position) +
                                     " overlaps the previous span");
        previous_end = attack.position + attack.length;
        first = false;
    }
    return attacks;
}

// One plausible argument tail per event; the parser never looks past the
// opening parenthesis, so variety (quotes, nested parens) is deliberate.
std::string make_tail(Rng& rng) {
    switch (rng.next_below(4)) {
        case 0:
            return "(" + std::to_string(3 + rng.next_below(40)) + ", 0x" +
                   std::to_string(rng.next_below(0xfffff)) + ", " +
                   std::to_string(1 + rng.next_below(4096)) + ") = " +
                   std::to_string(rng.next_below(4096));
        case 1: {
            const uint64_t n = 1 + rng.next_below(24);
            std::string payload;
            for (uint64_t i = 0; i < n; ++i) {
                static constexpr std::string_view chars = "abcdefghijklmnopqrstuvwxyz()*";
                payload += chars[rng.next_below(chars.size())];
            }
            return "(" + std::to_string(3 + rng.next_below(40)) + ", \"" + payload + "\", " +
                   std::to_string(n) + ", 0, NULL, 0) = " + std::to_string(n);
        }
        case 2:
            return "(0x" + std::to_string(rng.next_below(0xffffff)) +
                   ", FUTEX_WAKE_PRIVATE, 1) = " + std::to_string(rng.next_below(2));
        default:
            return "(" + std::to_string(3 + rng.next_below(40)) + ") = 0";
    }
}

} // namespace

std::string to_string(AttackVariant variant) {
    switch (variant) {
        case AttackVariant::NovelCalls: return "novel_calls";
        case AttackVariant::ShuffledMotifs: return "shuffled_motifs";
        case AttackVariant::Burst: return "burst";
    }
    return "novel_calls";
}

AttackVariant attack_variant_from_string(std::string_view text) {
    if (text == "novel_calls") return AttackVariant::NovelCalls;
    if (text == "shuffled_motifs") return AttackVariant::ShuffledMotifs;
    if (text == "burst") return AttackVariant::Burst;
    throw FormatError("unknown attack variant '" + std::string(text) + "'");
}

GenerateStats generate_trace(const WorkloadModel& model, std::vector<AttackModel> attacks,
                             uint64_t total_events, const std::filesystem::path& out) {
    validate_model(model);
    attacks = validate_attacks(std::move(attacks), total_events);

    // Flattened motif cycle; its length is the workload's period.
    std::vector<std::string> cycle;
    for (const auto& motif : model.motifs) cycle.insert(cycle.end(), motif.begin(), motif.end());

    std::set<std::string_view> alphabet_names;
    for (const auto& entry : model.alphabet) alphabet_names.insert(entry.name);
    std::vector<std::string_view> novel_pool;
    for (std::string_view name : kNovelCallPool)
        if (!alphabet_names.contains(name)) novel_pool.push_back(name);
    const bool wants_novel = std::any_of(attacks.begin(), attacks.end(), [](const AttackModel& a) {
        return a.variant == AttackVariant::NovelCalls;
    });
    if (wants_novel && novel_pool.empty())
        throw ConfigError("alphabet shadows every novel-call name");

    // Rarest alphabet entry: smallest weight, first position breaking ties.
    size_t rare = 0;
    for (size_t i = 1; i < model.alphabet.size(); ++i)
        if (model.alphabet[i].weight < model.alphabet[rare].weight) rare = i;

    const WeightedPicker noise_picker(model.alphabet);
    Rng rng(model.seed);

    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write trace '" + out.string() + "'");

    GenerateStats stats;
    size_t phase = 0;
    size_t pid_slot = 0;
    size_t next_attack = 0;
    const AttackModel* active = nullptr;
    uint64_t active_end = 0;
    std::string line;

    auto write_line = [&](std::string_view text) {
        file << text << '\n';
        ++stats.lines;
    };

    for (uint64_t i = 0; i < total_events; ++i) {
        if (active == nullptr && next_attack < attacks.size() &&
            i == attacks[next_attack].position) {
            active = &attacks[next_attack];
            active_end = active->position + active->length;
            ++next_attack;
            write_line(kAttackStartMarker);
            ++stats.marker_lines;
        }

        std::string_view name;
        if (active == nullptr) {
            name = cycle[phase];
            phase = (phase + 1) % cycle.size();
            if (model.substitution_rate > 0.0 && rng.next_unit() < model.substitution_rate)
                name = model.alphabet[noise_picker.pick(rng)].name;
        } else {
            switch (active->variant) {
                case AttackVariant::NovelCalls:
                    name = novel_pool[rng.next_below(novel_pool.size())];
                    break;
                case AttackVariant::ShuffledMotifs:
                    name = model.alphabet[rng.next_below(model.alphabet.size())].name;
                    break;
                case AttackVariant::Burst:
                    name = model.alphabet[rare].name;
                    break;
            }
        }

        if (rng.next_unit() < 0.03) pid_slot = rng.next_below(kPidPool.size());
        const int32_t pid = kPidPool[pid_slot];
        const std::string tail = make_tail(rng);

        if (model.split_probability > 0.0 && rng.next_unit() < model.split_probability) {
            // Interrupted call: the tail's result never made it onto the
            // first line, the resumed half carries it.
            line = std::to_string(pid) + " " + std::string(name) + "(" +
                   std::to_string(3 + rng.next_below(40)) + ", 0x" +
                   std::to_string(rng.next_below(0xfffff)) + " <unfinished ...>";
            write_line(line);
            line = std::to_string(pid) + " <... " + std::string(name) +
                   " resumed> ) = " + std::to_string(rng.next_below(4096));
            write_line(line);
        } else {
            line = std::to_string(pid) + " " + std::string(name) + tail;
            write_line(line);
        }
        ++stats.events;

        if (active != nullptr && i + 1 == active_end) {
            write_line(kAttackEndMarker);
            ++stats.marker_lines;
            active = nullptr;
        }
    }
    if (!file) throw IoError("write failed on trace '" + out.string() + "'");
    file.close();

    nlohmann::ordered_json manifest;
    manifest["seed"] = model.seed;
    manifest["epsilon"] = model.substitution_rate;
    manifest["split_probability"] = model.split_probability;
    manifest["total_events"] = total_events;
    manifest["alphabet"] = nlohmann::ordered_json::array();
    for (const auto& entry : model.alphabet)
        manifest["alphabet"].push_back({{"name", entry.name}, {"weight", entry.weight}});
    manifest["motifs"] = model.motifs;
    manifest["attacks"] = nlohmann::ordered_json::array();
    for (const auto& attack : attacks)
        manifest["attacks"].push_back({{"variant", to_string(attack.variant)},
                                       {"position", attack.position},
                                       {"length", attack.length}});
    manifest["lines"] = stats.lines;
    manifest["events"] = stats.events;
    manifest["marker_lines"] = stats.marker_lines;

    const std::filesystem::path manifest_path = out.string() + ".json";
    std::ofstream mf(manifest_path, std::ios::binary | std::ios::trunc);
    if (!mf) throw IoError("cannot write manifest '" + manifest_path.string() + "'");
    mf << manifest.dump(2) << '\n';

    return stats;
}

GenSpec parse_gen_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open generator spec '" + path.string() + "'");

    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("generator spec '" + path.string() + "': " + e.what());
    }

    try {
        GenSpec spec;
        spec.model.seed = doc.value("seed", uint64_t{0});
        spec.model.substitution_rate = doc.value("epsilon", 0.01);
        spec.model.split_probability = doc.value("split_probability", 0.002);
        spec.total_events = doc.at("total_events").get<uint64_t>();
        for (const auto& entry : doc.at("alphabet"))
            spec.model.alphabet.push_back(
                {entry.at("name").get<std::string>(), entry.at("weight").get<double>()});
        for (const auto& motif : doc.at("motifs"))
            spec.model.motifs.push_back(motif.get<std::vector<std::string>>());
        if (doc.contains("attacks")) {
            for (const auto& attack : doc["attacks"])
                spec.attacks.push_back(
                    {attack_variant_from_string(attack.at("variant").get<std::string>()),
                     attack.at("position").get<uint64_t>(), attack.at("length").get<uint64_t>()});
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("generator spec '" + path.string() + "': " + e.what());
    }
}

WorkloadModel demo_workload(uint64_t seed) {
    WorkloadModel model;
    model.seed = seed;
    model.alphabet = {
        {"read", 6.0},   {"write", 5.0},    {"futex", 5.0}, {"sendto", 4.0},
        {"recvfrom", 4.0}, {"poll", 3.0},   {"lseek", 3.0}, {"fcntl", 2.0},
        {"select", 2.0}, {"access", 1.5},   {"stat", 1.5},  {"times", 1.0},
    };
    model.motifs = {
        {"recvfrom", "poll", "read", "futex", "sendto", "futex", "write", "poll"},
        {"read", "lseek", "read", "futex", "write", "lseek", "write", "sendto", "futex",
         "recvfrom"},
        {"select", "access", "stat", "read", "fcntl", "read", "write", "times", "sendto",
         "recvfrom", "poll", "futex"},
        {"read", "read", "lseek", "write", "futex", "sendto", "poll", "recvfrom", "fcntl",
         "access", "futex", "write", "stat", "sendto"},
    };
    return model;
}

} // namespace boscwatch
