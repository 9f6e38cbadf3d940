#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace yieldcycle {

/// Calendar year-month, stored as a whole-month count (year * 12 + month - 1)
/// so that month arithmetic is plain integer arithmetic.
class Month {
public:
    constexpr Month() = default;
    constexpr Month(int year, int month) : index_(year * 12 + (month - 1)) {}

    static constexpr Month from_index(std::int32_t index) {
        Month m;
        m.index_ = index;
        return m;
    }

    /// Parses "YYYY-MM". Throws DataError on malformed input.
    static Month parse(std::string_view text);

    constexpr std::int32_t index() const { return index_; }
    constexpr int year() const { return floor_div(index_, 12); }
    /// 1..12
    constexpr int month_of_year() const { return index_ - floor_div(index_, 12) * 12 + 1; }

    std::string to_string() const;

    constexpr Month operator+(int months) const { return from_index(index_ + months); }
    constexpr Month operator-(int months) const { return from_index(index_ - months); }
    constexpr int operator-(Month other) const { return index_ - other.index_; }
    constexpr Month& operator++() {
        ++index_;
        return *this;
    }

    constexpr auto operator<=>(const Month&) const = default;

private:
    static constexpr int floor_div(int a, int b) { return (a >= 0) ? a / b : -((-a + b - 1) / b); }

    std::int32_t index_ = 0;
};

/// Inclusive month interval.
struct MonthRange {
    Month first;
    Month last;

    bool contains(Month m) const { return first <= m && m <= last; }
    bool empty() const { return last < first; }
    int size() const { return empty() ? 0 : (last - first) + 1; }
};

} // namespace yieldcycle
