#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>

#include "specflow/coord.hpp"

namespace specflow {

inline constexpr int kMaxDim = 3;

// Fixed-capacity vector for orbit coordinates; d never exceeds kMaxDim.
template <class T>
class SmallVec {
  public:
    using value_type = T;

    SmallVec() = default;
    explicit SmallVec(int dim, T fill = T{}) : dim_(dim) {
        assert(dim >= 0 && dim <= kMaxDim);
        c_.fill(fill);
        for (int i = dim; i < kMaxDim; ++i) c_[i] = T{};
    }
    SmallVec(std::initializer_list<T> values) : dim_(static_cast<int>(values.size())) {
        assert(dim_ <= kMaxDim);
        std::copy(values.begin(), values.end(), c_.begin());
    }

    int dim() const { return dim_; }
    T& operator[](int i) { return c_[i]; }
    const T& operator[](int i) const { return c_[i]; }
    const T* begin() const { return c_.data(); }
    const T* end() const { return c_.data() + dim_; }
    T* begin() { return c_.data(); }
    T* end() { return c_.data() + dim_; }

    SmallVec& operator+=(const SmallVec& o) {
        for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    SmallVec& operator-=(const SmallVec& o) {
        for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    friend SmallVec operator+(SmallVec a, const SmallVec& b) { return a += b; }
    friend SmallVec operator-(SmallVec a, const SmallVec& b) { return a -= b; }
    SmallVec operator-() const {
        SmallVec r = *this;
        for (int i = 0; i < dim_; ++i) r.c_[i] = -r.c_[i];
        return r;
    }

    friend bool operator==(const SmallVec& a, const SmallVec& b) {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (!(a.c_[i] == b.c_[i])) return false;
        return true;
    }
    // Lexicographic order; the Voronoi and canonical-form tie-breaks use it.
    friend bool operator<(const SmallVec& a, const SmallVec& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }

  private:
    std::array<T, kMaxDim> c_{};
    int dim_ = 0;
};

using Vec = SmallVec<double>;
using QVec = SmallVec<Coord>;
using IVec = SmallVec<std::int64_t>;

inline Vec operator*(double s, Vec v) {
    for (auto& x : v) x *= s;
    return v;
}
inline Vec operator*(Vec v, double s) { return s * v; }

inline double norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}
inline Coord norm(const QVec& v) {
    Coord m;
    for (Coord x : v) m = max(m, x.abs());
    return m;
}
inline std::int64_t norm(const IVec& v) {
    std::int64_t m = 0;
    for (auto x : v) m = std::max(m, x < 0 ? -x : x);
    return m;
}

inline Vec to_vec(const QVec& q) {
    Vec v(q.dim());
    for (int i = 0; i < q.dim(); ++i) v[i] = q[i].to_double();
    return v;
}
inline Vec to_vec(const IVec& q) {
    Vec v(q.dim());
    for (int i = 0; i < q.dim(); ++i) v[i] = static_cast<double>(q[i]);
    return v;
}
inline QVec to_qvec(const IVec& q) {
    QVec v(q.dim());
    for (int i = 0; i < q.dim(); ++i) v[i] = Coord::from_int(q[i]);
    return v;
}
// Throws DomainError when some coordinate is not on the dyadic lattice.
inline QVec to_qvec(const Vec& x) {
    QVec v(x.dim());
    for (int i = 0; i < x.dim(); ++i) v[i] = Coord::from_double(x[i]);
    return v;
}

inline double distance(const Vec& a, const Vec& b) { return norm(a - b); }

std::string to_string(const Vec& v);
std::string to_string(const QVec& v);
std::string to_string(const IVec& v);

template <class T>
struct SmallVecHash {
    std::size_t operator()(const SmallVec<T>& v) const noexcept {
        std::size_t h = static_cast<std::size_t>(v.dim());
        for (const auto& x : v) h = h * 1000003u ^ std::hash<T>{}(x);
        return h;
    }
};

}  // namespace specflow
