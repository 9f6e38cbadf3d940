#pragma once

// Mentality-cycle partitioning of calendar months from a business-cycle
// peak/trough calendar.
//
// For a trough T followed by a peak P, with mid = T + ceil((P - T) / 2):
//   MC2 (recovery)            = [T + 3, min(mid, P - 3)]
//   MC3 (restored confidence) = [mid + 1, P - 3]
// For a peak P followed by a trough T':
//   MC1 (slow down & decline) = [P - 2, T' + 2]
// All windows are inclusive. A trailing peak with no following trough
// extends MC1 to the end of the requested range; a trailing trough leaves
// everything after T + 2 unlabeled because the midpoint is unknown.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "yieldcycle/month.hpp"

namespace yieldcycle {

enum class Cycle { MC1, MC2, MC3 };

inline constexpr std::array<Cycle, 3> kAllCycles = {Cycle::MC1, Cycle::MC2, Cycle::MC3};

std::string_view to_string(Cycle cycle);
Cycle parse_cycle(std::string_view text);
constexpr int cycle_index(Cycle cycle) { return static_cast<int>(cycle); }

enum class TurningPoint { peak, trough };

struct CycleEvent {
    Month month;
    TurningPoint kind;
};

struct BusinessCycleCalendar {
    std::string country;
    std::vector<CycleEvent> events;

    /// Events strictly increasing and strictly alternating; at least one event.
    void validate() const;
};

/// Reads `month,kind` rows (kind is `peak` or `trough`); validates the result.
BusinessCycleCalendar load_calendar_csv(const std::filesystem::path& path, std::string country);

struct CyclePartition {
    std::string country;
    MonthRange range;
    std::map<Month, Cycle> labels;
    /// Degenerate segments (e.g. an expansion too short to hold an MC3 window).
    std::vector<std::string> notes;

    std::optional<Cycle> at(Month m) const;
    std::size_t count(Cycle cycle) const;
};

CyclePartition partition_months(const BusinessCycleCalendar& calendar, MonthRange range);

/// `month,cycle` for every labeled month in ascending order.
void write_partition_csv(std::ostream& out, const CyclePartition& partition);

} // namespace yieldcycle
