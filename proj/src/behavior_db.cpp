#include "boscwatch/behavior_db.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <string>

#include "boscwatch/errors.hpp"

namespace boscwatch {

namespace {

void check_len(size_t got, size_t want) {
    if (got != want)
        throw VectorLenMismatch("bag length " + std::to_string(got) + " does not match " +
                                std::to_string(want));
}

} // namespace

void EpochDelta::stage(Bosc bag) {
    check_len(bag.size(), vector_len_);
    ++staged_[std::move(bag)];
}

NormalBehaviorDb::NormalBehaviorDb(size_t window_size, size_t vector_len)
    : window_size_(window_size), vector_len_(vector_len) {
    if (window_size_ == 0) throw LengthMismatch("window size must be >= 1");
    if (vector_len_ == 0) throw LengthMismatch("vector length must be >= 1");
}

void NormalBehaviorDb::check_bag(const Bosc& bag) const { check_len(bag.size(), vector_len_); }

void NormalBehaviorDb::insert(const Bosc& bag) {
    check_bag(bag);
    ++table_[bag];
}

bool NormalBehaviorDb::contains(const Bosc& bag) const {
    check_bag(bag);
    return table_.contains(bag);
}

void NormalBehaviorDb::commit(EpochDelta& delta) {
    check_len(delta.vector_len(), vector_len_);
    for (const auto& [bag, freq] : delta.staged()) table_[bag] += freq;
    delta.clear();
}

uint64_t NormalBehaviorDb::total_frequency() const {
    uint64_t total = 0;
    for (const auto& [bag, freq] : table_) total += freq;
    return total;
}

void NormalBehaviorDb::save(const std::filesystem::path& path) const {
    std::vector<const BoscTable::value_type*> rows;
    rows.reserve(table_.size());
    for (const auto& entry : table_) rows.push_back(&entry);
    std::sort(rows.begin(), rows.end(),
              [](const auto* a, const auto* b) { return a->first < b->first; });

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write db file '" + path.string() + "'");
    out << "boscdb,v1,k=" << window_size_ << ",len=" << vector_len_ << '\n';
    std::string line;
    for (const auto* row : rows) {
        line.clear();
        for (size_t i = 0; i < row->first.size(); ++i) {
            if (i > 0) line += ',';
            line += std::to_string(row->first[i]);
        }
        line += ';';
        line += std::to_string(row->second);
        line += '\n';
        out << line;
    }
    if (!out) throw IoError("write failed on db file '" + path.string() + "'");
}

namespace {

uint64_t parse_u64(const char* first, const char* last, const char* what, size_t line_no) {
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw FormatError("db file line " + std::to_string(line_no) + ": bad " + what);
    return value;
}

} // namespace

NormalBehaviorDb NormalBehaviorDb::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open db file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw FormatError("db file '" + path.string() + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    size_t k = 0;
    size_t len = 0;
    {
        static constexpr std::string_view prefix = "boscdb,v1,k=";
        if (!line.starts_with(prefix))
            throw FormatError("db file line 1: expected 'boscdb,v1,k=<k>,len=<len>' header");
        const size_t len_pos = line.find(",len=", prefix.size());
        if (len_pos == std::string::npos)
            throw FormatError("db file line 1: expected 'boscdb,v1,k=<k>,len=<len>' header");
        k = parse_u64(line.data() + prefix.size(), line.data() + len_pos, "window size", 1);
        len = parse_u64(line.data() + len_pos + 5, line.data() + line.size(), "vector length", 1);
    }

    NormalBehaviorDb db(k, len);
    size_t line_no = 1;
    Bosc bag;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const size_t semi = line.find(';');
        if (semi == std::string::npos)
            throw FormatError("db file line " + std::to_string(line_no) +
                              ": missing ';' before frequency");

        bag.clear();
        const char* cursor = line.data();
        const char* counts_end = line.data() + semi;
        while (cursor < counts_end) {
            const char* field_end = cursor;
            while (field_end < counts_end && *field_end != ',') ++field_end;
            bag.push_back(static_cast<uint32_t>(parse_u64(cursor, field_end, "count", line_no)));
            cursor = field_end < counts_end ? field_end + 1 : counts_end;
        }
        if (bag.size() != len)
            throw FormatError("db file line " + std::to_string(line_no) + ": expected " +
                              std::to_string(len) + " counts, got " + std::to_string(bag.size()));
        const uint64_t sum = std::accumulate(bag.begin(), bag.end(), uint64_t{0});
        if (sum != k)
            throw FormatError("db file line " + std::to_string(line_no) + ": counts sum to " +
                              std::to_string(sum) + ", expected " + std::to_string(k));

        const uint64_t freq =
            parse_u64(line.data() + semi + 1, line.data() + line.size(), "frequency", line_no);
        if (freq == 0)
            throw FormatError("db file line " + std::to_string(line_no) + ": frequency must be >= 1");
        if (!db.table_.emplace(bag, freq).second)
            throw FormatError("db file line " + std::to_string(line_no) + ": duplicate bag");
    }
    return db;
}

} // namespace boscwatch
