#pragma once

#include "specflow/geometry.hpp"

namespace tb {

using specflow::Box;
using specflow::Coord;
using specflow::QVec;
using specflow::Region;

inline Coord c(double v) { return Coord::from_double(v); }

inline Box box1(double lo, double hi) { return Box(QVec{c(lo)}, QVec{c(hi)}); }
inline Box box2(double x0, double y0, double x1, double y1) { return Box(QVec{c(x0), c(y0)}, QVec{c(x1), c(y1)}); }
inline Region interval(double lo, double hi) { return Region(box1(lo, hi)); }

}  // namespace tb
