#include "boscwatch/syscall_index.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "boscwatch/errors.hpp"

namespace boscwatch {

SyscallCensus build_census(ItemStream& stream) {
    SyscallCensus census;
    while (auto item = stream.next()) {
        if (const auto* ev = event_of(*item)) census.add(ev->name);
    }
    if (census.total_events == 0) throw EmptyTrace("no syscall events in trace");
    return census;
}

IndexMap build_index(const SyscallCensus& census) {
    if (census.counts.empty()) throw EmptyTrace("cannot build index from empty census");
    if (census.counts.contains(std::string(IndexMap::kOtherName)))
        throw FormatError("'other' is reserved for the fold bucket");

    // Fold threshold: the number of distinct names in the raw census.
    const uint64_t distinct = census.distinct();
    std::vector<std::pair<std::string, uint64_t>> retained;
    retained.reserve(census.counts.size());
    for (const auto& [name, count] : census.counts)
        if (count >= distinct) retained.emplace_back(name, count);

    std::sort(retained.begin(), retained.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    IndexMap map;
    map.entries_.reserve(retained.size());
    for (uint32_t i = 0; i < retained.size(); ++i) map.entries_.emplace(retained[i].first, i);
    return map;
}

std::vector<std::pair<std::string, uint32_t>> IndexMap::sorted_entries() const {
    std::vector<std::pair<std::string, uint32_t>> out(entries_.begin(), entries_.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    return out;
}

void IndexMap::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write index file '" + path.string() + "'");
    for (const auto& [name, index] : sorted_entries()) out << name << ',' << index << '\n';
    out << kOtherName << ',' << other_index() << '\n';
    if (!out) throw IoError("write failed on index file '" + path.string() + "'");
}

IndexMap IndexMap::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open index file '" + path.string() + "'");

    IndexMap map;
    std::string line;
    size_t line_no = 0;
    bool saw_other = false;
    uint32_t expected = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (saw_other)
            throw FormatError("index file line " + std::to_string(line_no) +
                              ": entries after the 'other' row");
        const size_t comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0)
            throw FormatError("index file line " + std::to_string(line_no) + ": expected name,index");
        const std::string name = line.substr(0, comma);
        uint32_t index = 0;
        const char* first = line.data() + comma + 1;
        const char* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(first, last, index);
        if (ec != std::errc() || ptr != last)
            throw FormatError("index file line " + std::to_string(line_no) + ": bad index value");
        if (index != expected)
            throw FormatError("index file line " + std::to_string(line_no) +
                              ": indices must be dense and ascending");
        ++expected;
        if (name == kOtherName) {
            saw_other = true;
            continue;
        }
        if (!map.entries_.emplace(name, index).second)
            throw FormatError("index file line " + std::to_string(line_no) + ": duplicate name");
    }
    if (!saw_other) throw FormatError("index file '" + path.string() + "' has no 'other' row");
    return map;
}

} // namespace boscwatch
