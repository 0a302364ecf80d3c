#pragma once

#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "multi_index.hpp"

namespace oneres {

/// Decidable set of exponents, with the constructors the elimination theory
/// actually uses: total-degree lower sets and min-coordinate level sets.
struct ExponentSet {
    enum class Kind { Empty, LowOrder, MinLevel, DegreeRange, Explicit, Custom };

    Kind kind = Kind::Empty;
    std::string label;
    int max_degree = -1;      // LowOrder: |b| <= max_degree
    int min_value = 0;        // MinLevel: min b == min_value
    int degree_gt = 0;        // MinLevel: |b| > degree_gt
    int deg_lo = 0, deg_hi = -1;  // DegreeRange: deg_lo <= |b| <= deg_hi
    std::set<MultiIndex> items;
    std::function<bool(const MultiIndex&)> pred;

    bool contains(const MultiIndex& a) const {
        switch (kind) {
            case Kind::Empty: return false;
            case Kind::LowOrder: return a.degree() <= max_degree;
            case Kind::MinLevel:
                return a.degree() > degree_gt && a.min_entry() == min_value;
            case Kind::DegreeRange: return a.degree() >= deg_lo && a.degree() <= deg_hi;
            case Kind::Explicit: return items.count(a) > 0;
            case Kind::Custom: return pred(a);
        }
        return false;
    }

    static ExponentSet empty() { return {}; }
    static ExponentSet low_order(int max_degree) {
        ExponentSet s;
        s.kind = Kind::LowOrder;
        s.max_degree = max_degree;
        s.label = "deg<=" + std::to_string(max_degree);
        return s;
    }
    /// {b : |b| > degree_gt, min b = min_value}
    static ExponentSet min_level(int min_value, int degree_gt) {
        ExponentSet s;
        s.kind = Kind::MinLevel;
        s.min_value = min_value;
        s.degree_gt = degree_gt;
        s.label = "min=" + std::to_string(min_value) + ",deg>" + std::to_string(degree_gt);
        return s;
    }
    /// Level set A_k = {b : |b| > kd+1, min b = k}.
    static ExponentSet level_set(int k, int d) { return min_level(k, k * d + 1); }
    static ExponentSet degree_range(int lo, int hi) {
        ExponentSet s;
        s.kind = Kind::DegreeRange;
        s.deg_lo = lo;
        s.deg_hi = hi;
        s.label = std::to_string(lo) + "<=deg<=" + std::to_string(hi);
        return s;
    }
    static ExponentSet explicit_set(std::vector<MultiIndex> v, std::string label = "explicit") {
        ExponentSet s;
        s.kind = Kind::Explicit;
        s.items = std::set<MultiIndex>(v.begin(), v.end());
        s.label = std::move(label);
        return s;
    }
    static ExponentSet custom(std::function<bool(const MultiIndex&)> fn, std::string label) {
        ExponentSet s;
        s.kind = Kind::Custom;
        s.pred = std::move(fn);
        s.label = std::move(label);
        return s;
    }

    /// All members with 2 <= |b| <= cap.
    std::vector<MultiIndex> members(int d, int cap) const {
        std::vector<MultiIndex> out;
        for_each_index(d, 2, cap, [&](const MultiIndex& m) {
            if (contains(m)) out.push_back(m);
        });
        return out;
    }
};

}  // namespace oneres
