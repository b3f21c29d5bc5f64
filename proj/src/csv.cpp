#include "nhchain/csv.hpp"

#include <charconv>

namespace nhchain {

std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string format_bool01(bool b) { return b ? "1" : "0"; }

}  // namespace nhchain
