#include "specflow/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace specflow {

namespace {

const char* kLevelColours[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Frame {
    double x0, y0, w, h;  // world rectangle
    double px;            // output width in pixels
    double ox = 0.0;      // panel offset

    double sx(double x) const { return ox + (x - x0) / w * px; }
    double sy(double y) const { return (y0 + h - y) / w * px; }
    double scale() const { return px / w; }
};

void rect(std::ostringstream& os, const Frame& f, double lo0, double lo1, double hi0, double hi1, const char* fill,
          const char* stroke, double opacity) {
    os << "<rect x=\"" << num(f.sx(lo0)) << "\" y=\"" << num(f.sy(hi1)) << "\" width=\""
       << num((hi0 - lo0) * f.scale()) << "\" height=\"" << num((hi1 - lo1) * f.scale()) << "\" fill=\"" << fill
       << "\" fill-opacity=\"" << num(opacity) << "\" stroke=\"" << stroke << "\" stroke-width=\"0.5\"/>\n";
}

void region_outline(std::ostringstream& os, const Frame& f, const Region& r, const char* fill, const char* stroke,
                    double opacity) {
    for (const Box& b : r.boxes()) {
        double lo1 = r.dim() > 1 ? b.lo[1].to_double() : 0.0, hi1 = r.dim() > 1 ? b.hi[1].to_double() : 1.0;
        rect(os, f, b.lo[0].to_double(), lo1, b.hi[0].to_double(), hi1, fill, stroke, opacity);
    }
}

void dot(std::ostringstream& os, const Frame& f, double x, double y, double r) {
    os << "<circle cx=\"" << num(f.sx(x)) << "\" cy=\"" << num(f.sy(y)) << "\" r=\"" << num(r)
       << "\" fill=\"#333\"/>\n";
}

void cross(std::ostringstream& os, const Frame& f, double x, double y, double r) {
    double cx = f.sx(x), cy = f.sy(y);
    os << "<path d=\"M" << num(cx - r) << " " << num(cy - r) << "L" << num(cx + r) << " " << num(cy + r) << "M"
       << num(cx - r) << " " << num(cy + r) << "L" << num(cx + r) << " " << num(cy - r)
       << "\" stroke=\"#c44e52\" stroke-width=\"1\"/>\n";
}

std::string header(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string svg_toast(const ToastHierarchy& h, std::size_t max_classes) {
    std::ostringstream os;
    const PASequence& seq = h.sequence;
    const Box& w = h.window;
    const double px = 800.0;
    if (seq.dim == 1) {
        const int rows = seq.top() + 1;
        Frame f{w.lo[0].to_double(), 0.0, (w.hi[0] - w.lo[0]).to_double(), 1.0, px};
        const double row_h = 30.0;
        os << header(px, row_h * rows + 10);
        for (int n = 0; n <= seq.top(); ++n) {
            double y = 5 + row_h * (seq.top() - n);
            std::size_t drawn = 0;
            for (const auto& c : seq.levels[n].classes) {
                if (drawn++ >= max_classes) break;
                for (const Box& b : c.region.boxes())
                    os << "<rect x=\"" << num(f.sx(b.lo[0].to_double())) << "\" y=\"" << num(y) << "\" width=\""
                       << num(std::max(0.5, b.extent(0).to_double() * f.scale())) << "\" height=\"" << num(row_h - 8)
                       << "\" fill=\"" << kLevelColours[n % 5] << "\"/>\n";
            }
        }
        os << "</svg>\n";
        return os.str();
    }
    const double ww = (w.hi[0] - w.lo[0]).to_double(), wh = (w.hi[1] - w.lo[1]).to_double();
    Frame f{w.lo[0].to_double(), w.lo[1].to_double(), ww, wh, px};
    os << header(px, px * wh / ww);
    for (int n = seq.top(); n >= 0; --n) {
        std::size_t drawn = 0;
        for (const auto& c : seq.levels[n].classes) {
            if (drawn++ >= max_classes) break;
            region_outline(os, f, c.region, kLevelColours[n % 5], "none", n == 0 ? 0.9 : 0.35);
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_grid_class(const DeformationAtlas& atlas, ClassRef c, std::size_t max_points) {
    const AtlasEntry& e = atlas.at(c);
    const int d = atlas.dim;
    Box hull = e.image.hull();
    const double pad = 1.0;
    const double x0 = hull.lo[0].to_double() - pad, x1 = hull.hi[0].to_double() + pad;
    const double y0 = d > 1 ? hull.lo[1].to_double() - pad : -1.0, y1 = d > 1 ? hull.hi[1].to_double() + pad : 1.0;
    const double panel = 520.0, gap = 30.0;
    Frame left{x0, y0, x1 - x0, y1 - y0, panel};
    Frame right = left;
    right.ox = panel + gap;
    const double height = panel * (y1 - y0) / (x1 - x0);
    std::ostringstream os;
    os << header(2 * panel + gap, std::max(height, 40.0));

    const double r = std::clamp(0.18 * left.scale(), 0.6, 3.0);
    const Vec ca = to_vec(e.anchor);
    std::size_t budget = max_points;
    for (const Frame* f : {&left, &right}) {
        region_outline(os, *f, e.image, "#eeeeee", "#999", 1.0);
        region_outline(os, *f, e.core, "#dde6f3", "#4c72b0", 1.0);
        for (const ChildShift& cs : e.children) region_outline(os, *f, atlas.at(cs.child).image.translated(cs.s), "#f6e0d3", "#dd8452", 1.0);
    }
    std::size_t dots = 0;
    for_each_integer_point(e.core, [&](const IVec& p) {
        if (dots >= budget) return;
        ++dots;
        double y = d > 1 ? static_cast<double>(p[1]) : 0.0;
        dot(os, left, static_cast<double>(p[0]), y, r);
        dot(os, right, static_cast<double>(p[0]), y, r);
    });
    budget = max_points;
    for (const ChildShift& cs : e.children) {
        for_each_grid_point(atlas, cs.child, [&](const IVec&, const Vec& z) {
            if (budget == 0) return;
            --budget;
            Vec before = z - ca;
            Vec after = atlas.psi(c, z);
            cross(os, left, before[0], d > 1 ? before[1] : 0.0, 1.6 * r);
            cross(os, right, after[0], d > 1 ? after[1] : 0.0, 1.6 * r);
        });
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace specflow
