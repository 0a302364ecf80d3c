#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace oneres {

/// Exponent vector of a monomial z^alpha.
struct MultiIndex {
    std::vector<int> e;

    MultiIndex() = default;
    explicit MultiIndex(int d) : e(d, 0) {}
    MultiIndex(std::initializer_list<int> init) : e(init) {}
    explicit MultiIndex(std::vector<int> v) : e(std::move(v)) {}

    int dim() const { return static_cast<int>(e.size()); }
    int degree() const { return std::accumulate(e.begin(), e.end(), 0); }
    int min_entry() const { return *std::min_element(e.begin(), e.end()); }
    int operator[](int i) const { return e[i]; }
    int& operator[](int i) { return e[i]; }

    static MultiIndex unit(int d, int j) {
        MultiIndex m(d);
        m.e[j] = 1;
        return m;
    }
    static MultiIndex constant(int d, int v) { return MultiIndex(std::vector<int>(d, v)); }

    bool operator==(const MultiIndex& o) const = default;
    auto operator<=>(const MultiIndex& o) const = default;

    /// Componentwise partial order.
    bool leq(const MultiIndex& o) const {
        for (int i = 0; i < dim(); ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (int i = 0; i < dim(); ++i) r.e[i] += o.e[i];
        return r;
    }
    MultiIndex operator-(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (int i = 0; i < dim(); ++i) r.e[i] -= o.e[i];
        return r;
    }
    bool nonnegative() const {
        return std::all_of(e.begin(), e.end(), [](int v) { return v >= 0; });
    }

    std::string str() const {
        std::string s = "(";
        for (int i = 0; i < dim(); ++i) s += std::to_string(e[i]) + (i + 1 < dim() ? "," : "");
        return s + ")";
    }
};

/// Visit every index with total degree in [deg_lo, deg_hi].
template <typename Fn>
void for_each_index(int d, int deg_lo, int deg_hi, Fn&& fn) {
    MultiIndex m(d);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == d - 1) {
            m[pos] = left;
            if (m.degree() >= deg_lo) fn(m);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            m[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    for (int deg = std::max(deg_lo, 0); deg <= deg_hi; ++deg) rec(0, deg);
}

/// Visit every beta <= alpha (componentwise), alpha included.
template <typename Fn>
void for_each_minor(const MultiIndex& alpha, Fn&& fn) {
    MultiIndex m(alpha.dim());
    std::function<void(int)> rec = [&](int pos) {
        if (pos == alpha.dim()) {
            fn(m);
            return;
        }
        for (int v = 0; v <= alpha[pos]; ++v) {
            m[pos] = v;
            rec(pos + 1);
        }
    };
    rec(0);
}

}  // namespace oneres
