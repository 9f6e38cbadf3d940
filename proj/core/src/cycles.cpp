#include "yieldcycle/cycles.hpp"

#include <ostream>

#include "csv.hpp"
#include "yieldcycle/error.hpp"

namespace yieldcycle {

std::string_view to_string(Cycle cycle) {
    switch (cycle) {
    case Cycle::MC1: return "MC1";
    case Cycle::MC2: return "MC2";
    case Cycle::MC3: return "MC3";
    }
    return "?";
}

Cycle parse_cycle(std::string_view text) {
    if (text == "MC1") return Cycle::MC1;
    if (text == "MC2") return Cycle::MC2;
    if (text == "MC3") return Cycle::MC3;
    throw DataError("unknown cycle label '" + std::string(text) + "'");
}

void BusinessCycleCalendar::validate() const {
    if (events.empty()) throw DataError("business-cycle calendar for " + country + " has no events");
    for (std::size_t i = 1; i < events.size(); ++i) {
        const auto& prev = events[i - 1];
        const auto& cur = events[i];
        if (cur.month <= prev.month) {
            throw DataError("calendar for " + country + ": event " + cur.month.to_string() +
                            " is not after " + prev.month.to_string());
        }
        if (cur.kind == prev.kind) {
            throw DataError("calendar for " + country + ": two consecutive " +
                            (cur.kind == TurningPoint::peak ? "peaks" : "troughs") + " at " +
                            prev.month.to_string() + " and " + cur.month.to_string());
        }
    }
}

BusinessCycleCalendar load_calendar_csv(const std::filesystem::path& path, std::string country) {
    auto rows = csv::read_file(path);
    const std::string where = path.string();
    if (rows.empty() || rows.front().fields.size() != 2 || rows.front().fields[0] != "month" ||
        rows.front().fields[1] != "kind") {
        throw DataError(where + ": expected header 'month,kind'");
    }
    BusinessCycleCalendar calendar{std::move(country), {}};
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string ctx = where + " row " + std::to_string(row.line);
        if (row.fields.size() != 2) throw DataError(ctx + ": expected 2 fields");
        Month month;
        try {
            month = Month::parse(row.fields[0]);
        } catch (const DataError& e) {
            throw DataError(ctx + ": " + e.what());
        }
        TurningPoint kind;
        if (row.fields[1] == "peak") {
            kind = TurningPoint::peak;
        } else if (row.fields[1] == "trough") {
            kind = TurningPoint::trough;
        } else {
            throw DataError(ctx + ": kind must be 'peak' or 'trough', got '" + row.fields[1] + "'");
        }
        calendar.events.push_back({month, kind});
    }
    calendar.validate();
    return calendar;
}

std::optional<Cycle> CyclePartition::at(Month m) const {
    auto it = labels.find(m);
    if (it == labels.end()) return std::nullopt;
    return it->second;
}

std::size_t CyclePartition::count(Cycle cycle) const {
    std::size_t n = 0;
    for (const auto& [month, label] : labels) n += (label == cycle);
    return n;
}

CyclePartition partition_months(const BusinessCycleCalendar& calendar, MonthRange range) {
    calendar.validate();
    if (range.empty()) throw DataError("partition range is empty");

    CyclePartition out{calendar.country, range, {}, {}};
    auto assign = [&](Month first, Month last, Cycle cycle) {
        if (first < range.first) first = range.first;
        if (last > range.last) last = range.last;
        for (Month m = first; m <= last; ++m) out.labels[m] = cycle;
    };

    const auto& events = calendar.events;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& ev = events[i];
        const bool has_next = i + 1 < events.size();
        if (ev.kind == TurningPoint::trough) {
            if (!has_next) continue;
            const Month trough = ev.month;
            const Month peak = events[i + 1].month;
            const int length = peak - trough;
            const Month mid = trough + (length + 1) / 2;
            const Month recovery_end = std::min(mid, peak - 3);
            if (recovery_end < trough + 3) {
                out.notes.push_back("expansion " + trough.to_string() + ".." + peak.to_string() +
                                    " too short for an MC2 window");
            }
            if (peak - 3 < mid + 1) {
                out.notes.push_back("expansion " + trough.to_string() + ".." + peak.to_string() +
                                    " too short for an MC3 window");
            }
            assign(trough + 3, recovery_end, Cycle::MC2);
            assign(mid + 1, peak - 3, Cycle::MC3);
        } else {
            const Month peak = ev.month;
            const Month end = has_next ? events[i + 1].month + 2 : range.last;
            assign(peak - 2, end, Cycle::MC1);
        }
    }
    return out;
}

void write_partition_csv(std::ostream& out, const CyclePartition& partition) {
    out << "month,cycle\n";
    for (const auto& [month, cycle] : partition.labels) out << month.to_string() << ',' << to_string(cycle) << '\n';
}

} // namespace yieldcycle
