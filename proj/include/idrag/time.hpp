#pragma once

#include <cstdint>
#include <string>

namespace idrag {

// Simulated clock instants are plain epoch seconds; formatting uses
// "YYYY-MM-DD HH:MM" throughout the fixtures and transcripts.
using SimTime = std::int64_t;

SimTime parse_sim_time(const std::string& text);
std::string format_sim_time(SimTime t);

// Hour-of-day in [0,24), used for poll-hours checks.
int hour_of_day(SimTime t);

} // namespace idrag
