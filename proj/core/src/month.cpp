#include "yieldcycle/month.hpp"

#include <charconv>
#include <cstdio>

#include "yieldcycle/error.hpp"

namespace yieldcycle {

Month Month::parse(std::string_view text) {
    auto fail = [&] { throw DataError("malformed month '" + std::string(text) + "' (expected YYYY-MM)"); };
    if (text.size() != 7 || text[4] != '-') fail();
    int year = 0;
    int month = 0;
    auto [p1, e1] = std::from_chars(text.data(), text.data() + 4, year);
    auto [p2, e2] = std::from_chars(text.data() + 5, text.data() + 7, month);
    if (e1 != std::errc{} || p1 != text.data() + 4 || e2 != std::errc{} || p2 != text.data() + 7) fail();
    if (month < 1 || month > 12) fail();
    return Month(year, month);
}

std::string Month::to_string() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year(), month_of_year());
    return buf;
}

} // namespace yieldcycle
