#pragma once

#include <map>
#include <span>
#include <vector>

#include "complex_util.hpp"
#include "errors.hpp"
#include "multi_index.hpp"

namespace oneres {

/// Scalar truncated power series in `vars` variables, sparse canonical
/// storage: exact zeros are never stored.
struct ScalarSeries {
    int vars = 0;
    std::map<MultiIndex, Cx> c;

    ScalarSeries() = default;
    explicit ScalarSeries(int d) : vars(d) {}

    Cx coeff(const MultiIndex& a) const {
        auto it = c.find(a);
        return it == c.end() ? Cx{} : it->second;
    }
    void add(const MultiIndex& a, Cx v) {
        if (v == Cx{}) return;
        auto [it, fresh] = c.try_emplace(a, v);
        if (!fresh) {
            it->second += v;
            if (it->second == Cx{}) c.erase(it);
        }
    }
    void set(const MultiIndex& a, Cx v) {
        if (v == Cx{})
            c.erase(a);
        else
            c[a] = v;
    }
    static ScalarSeries one(int d) {
        ScalarSeries s(d);
        s.set(MultiIndex(d), 1.0);
        return s;
    }
    static ScalarSeries variable(int d, int j) {
        ScalarSeries s(d);
        s.set(MultiIndex::unit(d, j), 1.0);
        return s;
    }
    int degree() const { return c.empty() ? 0 : std::prev(c.end())->first.degree(); }
};

/// Product truncated to total degree <= cap.
inline ScalarSeries multiply(const ScalarSeries& a, const ScalarSeries& b, int cap) {
    if (a.vars != b.vars) throw DimensionMismatch("multiply: variable count differs");
    ScalarSeries out(a.vars);
    if (series_compensated_mode()) {
        std::map<MultiIndex, CompensatedSum> acc;
        for (const auto& [ia, ca] : a.c)
            for (const auto& [ib, cb] : b.c) {
                MultiIndex s = ia + ib;
                if (s.degree() > cap) continue;
                acc[s].add(ca * cb);
            }
        for (auto& [idx, sum] : acc) out.set(idx, sum.value());
        return out;
    }
    for (const auto& [ia, ca] : a.c)
        for (const auto& [ib, cb] : b.c) {
            MultiIndex s = ia + ib;
            if (s.degree() > cap) continue;
            out.add(s, ca * cb);
        }
    return out;
}

namespace detail {

// Horner evaluation grouping on the first remaining variable.
inline Cx horner_eval(std::span<const std::pair<MultiIndex, Cx>> terms, int var,
                      std::span<const Cx> z) {
    if (terms.empty()) return {};
    const int d = terms.front().first.dim();
    if (var == d) return terms.front().second;
    // terms are sorted lexicographically, so equal leading exponents are adjacent
    struct Group {
        int expo;
        Cx val;
    };
    std::vector<Group> groups;
    std::size_t i = 0;
    while (i < terms.size()) {
        int ex = terms[i].first[var];
        std::size_t j = i;
        while (j < terms.size() && terms[j].first[var] == ex) ++j;
        groups.push_back({ex, horner_eval(terms.subspan(i, j - i), var + 1, z)});
        i = j;
    }
    // Horner from the highest exponent down, bridging sparse gaps with powers
    Cx acc = groups.back().val;
    for (std::size_t g = groups.size() - 1; g-- > 0;) {
        int gap = groups[g + 1].expo - groups[g].expo;
        Cx p = 1.0;
        for (int t = 0; t < gap; ++t) p *= z[var];
        acc = acc * p + groups[g].val;
    }
    Cx lead = 1.0;
    for (int t = 0; t < groups.front().expo; ++t) lead *= z[var];
    return acc * lead;
}

}  // namespace detail

inline Cx evaluate(const ScalarSeries& s, std::span<const Cx> z) {
    std::vector<std::pair<MultiIndex, Cx>> terms(s.c.begin(), s.c.end());
    return detail::horner_eval(terms, 0, z);
}

/// Square map germ of C^vars given by sparse vector-valued coefficients,
/// truncated at total degree `cap`.
struct SeriesMap {
    int vars = 0;
    int cap = 0;
    std::map<MultiIndex, CVec> c;

    SeriesMap() = default;
    SeriesMap(int d, int cap_) : vars(d), cap(cap_) {}

    Cx coeff(const MultiIndex& a, int j) const {
        auto it = c.find(a);
        return it == c.end() ? Cx{} : it->second[j];
    }
    const CVec* coeffs(const MultiIndex& a) const {
        auto it = c.find(a);
        return it == c.end() ? nullptr : &it->second;
    }
    void add(const MultiIndex& a, int j, Cx v) {
        if (v == Cx{} || a.degree() > cap) return;
        auto it = c.find(a);
        if (it == c.end()) it = c.emplace(a, CVec(vars)).first;
        it->second[j] += v;
        prune_entry(it);
    }
    void set(const MultiIndex& a, int j, Cx v) {
        if (a.degree() > cap) return;
        auto it = c.find(a);
        if (it == c.end()) {
            if (v == Cx{}) return;
            it = c.emplace(a, CVec(vars)).first;
        }
        it->second[j] = v;
        prune_entry(it);
    }
    void prune_entry(std::map<MultiIndex, CVec>::iterator it) {
        for (const Cx& v : it->second)
            if (v != Cx{}) return;
        c.erase(it);
    }

    static SeriesMap identity(int d, int cap) {
        SeriesMap m(d, cap);
        for (int j = 0; j < d; ++j) m.set(MultiIndex::unit(d, j), j, 1.0);
        return m;
    }
    static SeriesMap linear_diag(const CVec& lambda, int cap) {
        SeriesMap m(static_cast<int>(lambda.size()), cap);
        for (int j = 0; j < m.vars; ++j) m.set(MultiIndex::unit(m.vars, j), j, lambda[j]);
        return m;
    }

    ScalarSeries component(int j) const {
        ScalarSeries s(vars);
        for (const auto& [a, v] : c)
            if (v[j] != Cx{}) s.set(a, v[j]);
        return s;
    }

    bool has_constant_term() const {
        auto it = c.find(MultiIndex(vars));
        return it != c.end();
    }

    /// Linear part as a vars x vars matrix, M[i][j] = coeff of z^j in component i.
    std::vector<CVec> linear_matrix() const {
        std::vector<CVec> M(vars, CVec(vars));
        for (int j = 0; j < vars; ++j) {
            if (const CVec* v = coeffs(MultiIndex::unit(vars, j)))
                for (int i = 0; i < vars; ++i) M[i][j] = (*v)[i];
        }
        return M;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& [a, v] : c)
            for (const Cx& x : v) m = std::max(m, std::abs(x));
        return m;
    }
};

inline CVec evaluate(const SeriesMap& m, std::span<const Cx> z) {
    CVec out(m.vars);
    for (int j = 0; j < m.vars; ++j) out[j] = evaluate(m.component(j), z);
    return out;
}

/// Largest coefficient magnitude of a - b.
inline double max_coeff_diff(const SeriesMap& a, const SeriesMap& b) {
    double m = 0;
    auto scan = [&](const SeriesMap& x, const SeriesMap& y) {
        for (const auto& [idx, v] : x.c)
            for (int j = 0; j < x.vars; ++j) m = std::max(m, std::abs(v[j] - y.coeff(idx, j)));
    };
    scan(a, b);
    scan(b, a);
    return m;
}

/// Coefficients of outer(inner) exact through total degree `cap`.
inline SeriesMap compose(const SeriesMap& outer, const SeriesMap& inner, int cap) {
    if (outer.vars != inner.vars) throw DimensionMismatch("compose: variable count differs");
    if (inner.has_constant_term()) throw NonzeroConstant("compose: inner map has a constant term");
    const int d = outer.vars;
    SeriesMap out(d, cap);
    // power cache of inner components
    std::map<std::pair<int, int>, ScalarSeries> pow;
    std::function<const ScalarSeries&(int, int)> power = [&](int j, int m) -> const ScalarSeries& {
        auto key = std::make_pair(j, m);
        auto it = pow.find(key);
        if (it != pow.end()) return it->second;
        ScalarSeries r;
        if (m == 0)
            r = ScalarSeries::one(d);
        else if (m == 1)
            r = inner.component(j);
        else
            r = multiply(power(j, m - 1), inner.component(j), cap);
        return pow.emplace(key, std::move(r)).first->second;
    };
    for (const auto& [a, cv] : outer.c) {
        if (a.degree() > cap) continue;
        ScalarSeries term = ScalarSeries::one(d);
        for (int j = 0; j < d; ++j)
            if (a[j] > 0) term = multiply(term, power(j, a[j]), cap);
        for (const auto& [idx, tv] : term.c)
            for (int j = 0; j < d; ++j)
                if (cv[j] != Cx{}) out.add(idx, j, cv[j] * tv);
    }
    return out;
}

namespace detail {

inline std::vector<CVec> invert_matrix(std::vector<CVec> M) {
    const int n = static_cast<int>(M.size());
    std::vector<CVec> inv(n, CVec(n));
    for (int i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        if (std::abs(M[piv][col]) < 1e-300)
            throw SingularLinearPart("invert: linear part is singular");
        std::swap(M[piv], M[col]);
        std::swap(inv[piv], inv[col]);
        Cx p = M[col][col];
        for (int j = 0; j < n; ++j) {
            M[col][j] /= p;
            inv[col][j] /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            Cx f = M[r][col];
            if (f == Cx{}) continue;
            for (int j = 0; j < n; ++j) {
                M[r][j] -= f * M[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

}  // namespace detail

/// Compositional inverse: compose(h, invert(h), cap) = identity through `cap`.
inline SeriesMap invert(const SeriesMap& h, int cap) {
    const int d = h.vars;
    auto Minv = detail::invert_matrix(h.linear_matrix());
    SeriesMap hnl(d, cap);  // nonlinear part of h
    for (const auto& [a, v] : h.c)
        if (a.degree() >= 2)
            for (int j = 0; j < d; ++j) hnl.set(a, j, v[j]);

    auto apply_Minv = [&](const SeriesMap& src) {
        SeriesMap dst(d, cap);
        for (const auto& [a, v] : src.c)
            for (int i = 0; i < d; ++i) {
                Cx s = 0;
                for (int j = 0; j < d; ++j) s += Minv[i][j] * v[j];
                dst.set(a, i, s);
            }
        return dst;
    };

    SeriesMap K = apply_Minv(SeriesMap::identity(d, cap));
    if (hnl.c.empty()) return K;
    // K = Minv (id - hnl(K)); each pass extends the valuation of the defect
    for (int pass = 0; pass < cap; ++pass) {
        SeriesMap rhs = SeriesMap::identity(d, cap);
        SeriesMap corr = compose(hnl, K, cap);
        for (const auto& [a, v] : corr.c)
            for (int j = 0; j < d; ++j) rhs.add(a, j, -v[j]);
        K = apply_Minv(rhs);
    }
    return K;
}

}  // namespace oneres
