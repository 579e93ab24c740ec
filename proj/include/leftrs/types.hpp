#ifndef LEFTRS_TYPES_HPP
#define LEFTRS_TYPES_HPP

#include <cstdint>

namespace leftrs {

// All durations are integer microseconds. Periods in the literature are
// often given in milliseconds while critical sections are microseconds;
// a single integer base avoids float drift in fixed-point iterations.
using usecs = std::int64_t;

} // namespace leftrs

#endif
