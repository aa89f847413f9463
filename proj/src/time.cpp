#include "idrag/time.hpp"

#include <ctime>
#include <iomanip>
#include <sstream>

#include "idrag/errors.hpp"

namespace idrag {

SimTime parse_sim_time(const std::string& text) {
    std::tm tm{};
    std::istringstream in(text);
    in >> std::get_time(&tm, "%Y-%m-%d %H:%M");
    if (in.fail()) {
        throw ParseError("bad timestamp: '" + text + "' (expected YYYY-MM-DD HH:MM)");
    }
    tm.tm_sec = 0;
    return static_cast<SimTime>(timegm(&tm));
}

std::string format_sim_time(SimTime t) {
    std::time_t tt = static_cast<std::time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%d %H:%M");
    return out.str();
}

int hour_of_day(SimTime t) {
    std::time_t tt = static_cast<std::time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    return tm.tm_hour;
}

} // namespace idrag
