#pragma once

#include <string>

namespace specflow {

namespace detail {

template <class S>
S ceiling_at(const SuspensionSystem1D<S>& sys, const OrbitPoint& z) {
    if (z.index.dim() != 1) throw DomainError("suspension: orbit points must be one-dimensional");
    if (z.index[0] > sys.radius || z.index[0] < -sys.radius)
        throw DomainError("suspension: orbit window exhausted at index " + std::to_string(z.index[0]));
    S v = sys.f(z);
    if (v < sys.floor) throw DomainError("suspension: ceiling below the configured floor at " + to_string(z));
    return v;
}

inline OrbitPoint shifted(const OrbitPoint& z, std::int64_t k) {
    OrbitPoint w = z;
    w.index[0] += k;
    return w;
}

}  // namespace detail

template <class S>
SuspPoint<S> suspend1d(const SuspensionSystem1D<S>& sys, const SuspPoint<S>& p, S r) {
    if (p.t < S{} || !(p.t < detail::ceiling_at(sys, p.z)))
        throw DomainError("suspension: t must satisfy 0 <= t < f(z)");
    S t = p.t + r;
    OrbitPoint z = p.z;
    if (!(r < S{})) {
        for (S f = detail::ceiling_at(sys, z); !(t < f); f = detail::ceiling_at(sys, z)) {
            t = t - f;
            z = detail::shifted(z, 1);
        }
    } else {
        while (t < S{}) {
            z = detail::shifted(z, -1);
            t = t + detail::ceiling_at(sys, z);
        }
    }
    return {z, t};
}

template <class S>
SuspPoint<S> suspend1d_stepping(const SuspensionSystem1D<S>& sys, const SuspPoint<S>& p, S r, S delta) {
    if (!(S{} < delta)) throw DomainError("suspension: step must be positive");
    SuspPoint<S> q = p;
    S left = r < S{} ? S{} - r : r;
    const bool forward = !(r < S{});
    while (S{} < left) {
        S step = left < delta ? left : delta;
        left = left - step;
        if (forward) {
            q.t = q.t + step;
            S f = detail::ceiling_at(sys, q.z);
            if (!(q.t < f)) {
                q.t = q.t - f;
                q.z = detail::shifted(q.z, 1);
            }
        } else {
            q.t = q.t - step;
            if (q.t < S{}) {
                q.z = detail::shifted(q.z, -1);
                q.t = q.t + detail::ceiling_at(sys, q.z);
            }
        }
    }
    return q;
}

}  // namespace specflow
