#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace specflow {

class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Exact dyadic rational with a fixed denominator of 2^20. Sums, differences,
// comparisons and halving stay exact, and every value converts to a double
// without rounding as long as |value| < 2^32.
class Coord {
  public:
    static constexpr int kFractionBits = 20;
    static constexpr std::int64_t kOne = std::int64_t{1} << kFractionBits;

    constexpr Coord() = default;
    constexpr Coord(int v) : raw_(std::int64_t{v} * kOne) {}

    static constexpr Coord from_raw(std::int64_t r) {
        Coord c;
        c.raw_ = r;
        return c;
    }
    static Coord from_int(std::int64_t v);
    // Throws DomainError unless v is a multiple of 2^-20.
    static Coord from_double(double v);
    static Coord nearest(double v);
    // num/den, throws DomainError unless exactly representable.
    static Coord ratio(std::int64_t num, std::int64_t den);
    // Accepts "3", "-2.5", "7/8", "1e3".
    static Coord parse(std::string_view text);

    constexpr std::int64_t raw() const { return raw_; }
    constexpr double to_double() const {
        return static_cast<double>(raw_) / static_cast<double>(kOne);
    }
    bool is_integer() const { return raw_ % kOne == 0; }
    std::int64_t floor_int() const;
    std::int64_t ceil_int() const;
    Coord half() const;
    Coord abs() const { return from_raw(raw_ < 0 ? -raw_ : raw_); }
    std::string str() const;

    constexpr auto operator<=>(const Coord&) const = default;

    constexpr Coord operator-() const { return from_raw(-raw_); }
    constexpr Coord& operator+=(Coord o) {
        raw_ += o.raw_;
        return *this;
    }
    constexpr Coord& operator-=(Coord o) {
        raw_ -= o.raw_;
        return *this;
    }
    friend constexpr Coord operator+(Coord a, Coord b) { return from_raw(a.raw_ + b.raw_); }
    friend constexpr Coord operator-(Coord a, Coord b) { return from_raw(a.raw_ - b.raw_); }
    friend constexpr Coord operator*(Coord a, std::int64_t k) { return from_raw(a.raw_ * k); }
    friend constexpr Coord operator*(std::int64_t k, Coord a) { return from_raw(a.raw_ * k); }
    // Exact division by an integer; throws if the quotient is not representable.
    Coord divided(std::int64_t k) const;

  private:
    std::int64_t raw_ = 0;
};

inline Coord min(Coord a, Coord b) { return b < a ? b : a; }
inline Coord max(Coord a, Coord b) { return a < b ? b : a; }

}  // namespace specflow

template <>
struct std::hash<specflow::Coord> {
    std::size_t operator()(const specflow::Coord& c) const noexcept {
        return std::hash<std::int64_t>{}(c.raw());
    }
};
