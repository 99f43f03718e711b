// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

namespace faa::csv {

// Shortest round-trip representation; independent of locale and stream state.
inline std::string format(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

inline std::string format(std::int64_t value) { return std::to_string(value); }
inline std::string format(std::uint64_t value) { return std::to_string(value); }
inline std::string format(int value) { return std::to_string(value); }
inline std::string format(bool value) { return value ? "1" : "0"; }
inline std::string format(std::string_view value) { return std::string(value); }
inline std::string format(const char *value) { return value; }
inline std::string format(const std::string &value) { return value; }

class Writer {
  public:
    explicit Writer(std::ostream &out) : out_(out) {}

    template <class... Fields>
    void row(const Fields &...fields) {
        bool first = true;
        ((out_ << (first ? "" : ",") << format(fields), first = false), ...);
        out_ << '\n';
    }

  private:
    std::ostream &out_;
};

} // namespace faa::csv
