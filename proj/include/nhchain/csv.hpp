#pragma once

#include <string>

namespace nhchain {

// Shortest decimal form that round-trips to the same double (<= 17 significant
// digits), locale independent, '.' separator. Used for all file output so that
// identical runs produce byte-identical files.
std::string format_double(double x);

std::string format_bool01(bool b);

}  // namespace nhchain
