#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>

namespace zal {

// Shortest round-trip decimal form, locale independent: the same value
// always prints the same bytes, which the determinism contract relies on.
inline std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    CsvWriter& field(const std::string& s) {
        sep();
        os_ << s;
        return *this;
    }
    CsvWriter& field(double x) { return field(format_double(x)); }
    CsvWriter& field(int64_t x) { return field(std::to_string(x)); }
    CsvWriter& field(uint64_t x) { return field(std::to_string(x)); }

    void endrow() {
        os_ << '\n';
        first_ = true;
    }

private:
    void sep() {
        if (!first_) os_ << ',';
        first_ = false;
    }
    std::ostream& os_;
    bool first_ = true;
};

} // namespace zal
