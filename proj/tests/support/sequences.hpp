#pragma once

#include "build.hpp"
#include "specflow/partial_actions.hpp"

namespace tb {

using specflow::ClassRef;
using specflow::PAClass;
using specflow::PASequence;

inline PAClass make_class(std::size_t id, int level, Region r, QVec anchor, std::vector<ClassRef> kids = {}) {
    PAClass c;
    c.id = id;
    c.level = level;
    c.region = std::move(r);
    c.anchor = std::move(anchor);
    c.children = std::move(kids);
    return c;
}

// Levels given as lists of (lo, hi, anchor) intervals; every lower class
// inside an upper one becomes its child.
inline PASequence sequence_1d(const std::vector<std::vector<std::array<double, 3>>>& levels) {
    PASequence s;
    s.dim = 1;
    for (std::size_t n = 0; n < levels.size(); ++n) {
        specflow::PALevel lv;
        for (std::size_t i = 0; i < levels[n].size(); ++i) {
            const auto& [lo, hi, a] = levels[n][i];
            std::vector<ClassRef> kids;
            if (n > 0)
                for (std::size_t j = 0; j < levels[n - 1].size(); ++j) {
                    const auto& [clo, chi, ca] = levels[n - 1][j];
                    if (lo <= clo && chi <= hi) kids.push_back({static_cast<int>(n - 1), j});
                }
            lv.classes.push_back(make_class(i, static_cast<int>(n), interval(lo, hi), QVec{c(a)}, kids));
        }
        s.levels.push_back(std::move(lv));
    }
    s.finalize();
    return s;
}

}  // namespace tb
