#include "specflow/coord.hpp"

#include <charconv>
#include <numeric>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "specflow/vec.hpp"

namespace specflow {

namespace {

constexpr std::int64_t kRawLimit = std::int64_t{1} << 52;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

Coord Coord::from_int(std::int64_t v) {
    if (v > (kRawLimit >> kFractionBits) || v < -(kRawLimit >> kFractionBits))
        throw DomainError("coordinate out of range: " + std::to_string(v));
    return from_raw(v * kOne);
}

Coord Coord::from_double(double v) {
    if (!std::isfinite(v) || std::abs(v) * static_cast<double>(kOne) >= static_cast<double>(kRawLimit))
        throw DomainError("coordinate out of range");
    double scaled = v * static_cast<double>(kOne);
    if (scaled != std::floor(scaled)) {
        throw DomainError("value is not a multiple of 2^-20: " + std::to_string(v));
    }
    return from_raw(static_cast<std::int64_t>(scaled));
}

Coord Coord::nearest(double v) {
    if (!std::isfinite(v) || std::abs(v) * static_cast<double>(kOne) >= static_cast<double>(kRawLimit))
        throw DomainError("coordinate out of range");
    return from_raw(static_cast<std::int64_t>(std::llround(v * static_cast<double>(kOne))));
}

Coord Coord::ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) throw DomainError("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    // num * 2^20 / den must be an integer; avoid overflow by reducing first.
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g == 0) return Coord{};
    num /= g;
    den /= g;
    if ((den & (den - 1)) != 0 || den > kOne)
        throw DomainError("ratio " + std::to_string(num) + "/" + std::to_string(den) +
                          " is not a dyadic multiple of 2^-20");
    std::int64_t scale = kOne / den;
    if (num > kRawLimit / scale || num < -kRawLimit / scale) throw DomainError("ratio out of range");
    return from_raw(num * scale);
}

Coord Coord::parse(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.empty()) throw DomainError("empty number");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto parse_int = [](std::string_view s) {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size())
                throw DomainError("malformed integer '" + std::string(s) + "'");
            return v;
        };
        return ratio(parse_int(trim(text.substr(0, slash))), parse_int(trim(text.substr(slash + 1))));
    }
    std::string owned(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(owned, &used);
    } catch (const std::exception&) {
        throw DomainError("malformed number '" + owned + "'");
    }
    if (used != owned.size()) throw DomainError("malformed number '" + owned + "'");
    return from_double(v);
}

std::int64_t Coord::floor_int() const { return floor_div(raw_, kOne); }

std::int64_t Coord::ceil_int() const { return -floor_div(-raw_, kOne); }

Coord Coord::half() const {
    if (raw_ % 2 != 0) throw DomainError("halving leaves the 2^-20 lattice");
    return from_raw(raw_ / 2);
}

Coord Coord::divided(std::int64_t k) const {
    if (k == 0 || raw_ % k != 0) throw DomainError("division by " + std::to_string(k) + " is not exact");
    return from_raw(raw_ / k);
}

std::string Coord::str() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", to_double());
    return buf;
}

std::string to_string(const Vec& v) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (int i = 0; i < v.dim(); ++i) os << (i ? ", " : "") << v[i];
    os << ')';
    return os.str();
}

std::string to_string(const QVec& v) { return to_string(to_vec(v)); }

std::string to_string(const IVec& v) {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < v.dim(); ++i) os << (i ? ", " : "") << v[i];
    os << ')';
    return os.str();
}

}  // namespace specflow
