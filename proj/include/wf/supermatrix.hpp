#pragma once

#include "wf/cdga.hpp"
#include "wf/linalg.hpp"

#include <map>
#include <utility>
#include <vector>

namespace wf {

inline bool is_zero(const AlgebraElement& a) { return a.is_zero(); }
inline AlgebraElement parity_flip(const AlgebraElement& a) { return a.parity_flip(); }
inline GRat parity_flip(const GRat& a) { return a; }
inline Rat parity_flip(const Rat& a) { return a; }

// 0 even, 1 odd, -1 mixed
inline int parity_of(const AlgebraElement& a) {
    if (a.is_even()) return 0;
    if (a.is_odd()) return 1;
    return -1;
}
inline int parity_of(const GRat&) { return 0; }
inline int parity_of(const Rat&) { return 0; }

inline AlgebraElement embed_rat(const AlgebraElement& proto, const Rat& r) {
    return AlgebraElement::scalar(proto.signature(), IotaRat(r));
}
inline GRat embed_rat(const GRat&, const Rat& r) { return GRat(r); }
inline Rat embed_rat(const Rat&, const Rat& r) { return r; }

// Sparse operator X = sum M_ab (x) E_ab on a Z/2-graded space, coefficients
// written to the left of the matrix units. E_ab has parity |a| + |b|, so
// (XY)_ad = sum_b M_ab * flip^{|a|+|b|}(N_bd), flip negating odd coefficients.
template <class R>
class SuperMatrix {
public:
    using Index = std::pair<int, int>;

    SuperMatrix() = default;
    SuperMatrix(std::vector<int> parity, R zero) : par_(std::move(parity)), zero_(std::move(zero)) {}

    static SuperMatrix identity(const std::vector<int>& parity, const R& zero) {
        SuperMatrix m(parity, zero);
        for (int i = 0; i < m.size(); ++i) m.set(i, i, embed_rat(zero, Rat(1)));
        return m;
    }
    static SuperMatrix from_rational(const std::vector<int>& parity, const R& zero, const Mat<Rat>& a) {
        SuperMatrix m(parity, zero);
        if ((int)a.rows() != m.size() || (int)a.cols() != m.size()) throw DomainError("SuperMatrix: shape mismatch");
        for (int i = 0; i < m.size(); ++i)
            for (int j = 0; j < m.size(); ++j)
                if (!wf::is_zero(a(i, j))) m.set(i, j, embed_rat(zero, a(i, j)));
        return m;
    }

    int size() const { return (int)par_.size(); }
    const std::vector<int>& parity() const { return par_; }
    int parity(int i) const { return par_[i]; }
    const R& zero() const { return zero_; }
    const std::map<Index, R>& entries() const { return e_; }
    bool is_zero() const { return e_.empty(); }

    R at(int i, int j) const {
        auto it = e_.find({i, j});
        return it == e_.end() ? zero_ : it->second;
    }
    void set(int i, int j, R v) {
        check_index(i, j);
        if (wf::is_zero(v)) e_.erase({i, j});
        else e_[{i, j}] = std::move(v);
    }
    void add(int i, int j, const R& v) {
        if (wf::is_zero(v)) return;
        check_index(i, j);
        auto it = e_.find({i, j});
        if (it == e_.end()) e_.emplace(Index{i, j}, v);
        else {
            it->second = it->second + v;
            if (wf::is_zero(it->second)) e_.erase(it);
        }
    }

    SuperMatrix& operator+=(const SuperMatrix& o) {
        check_shape(o);
        for (auto& [ij, v] : o.e_) add(ij.first, ij.second, v);
        return *this;
    }
    SuperMatrix& operator-=(const SuperMatrix& o) {
        check_shape(o);
        for (auto& [ij, v] : o.e_) add(ij.first, ij.second, -v);
        return *this;
    }
    friend SuperMatrix operator+(SuperMatrix a, const SuperMatrix& b) { return a += b; }
    friend SuperMatrix operator-(SuperMatrix a, const SuperMatrix& b) { return a -= b; }
    friend SuperMatrix operator-(const SuperMatrix& a) {
        SuperMatrix r = a;
        for (auto& [ij, v] : r.e_) v = -v;
        return r;
    }

    friend SuperMatrix operator*(const SuperMatrix& a, const SuperMatrix& b) {
        a.check_shape(b);
        std::map<int, std::vector<std::pair<int, const R*>>> brows;
        for (auto& [ij, v] : b.e_) brows[ij.first].push_back({ij.second, &v});
        SuperMatrix r(a.par_, a.zero_);
        for (auto& [ij, m] : a.e_) {
            auto it = brows.find(ij.second);
            if (it == brows.end()) continue;
            bool flip = (a.par_[ij.first] + a.par_[ij.second]) & 1;
            for (auto& [d, nv] : it->second) r.add(ij.first, d, flip ? m * parity_flip(*nv) : m * *nv);
        }
        return r;
    }

    // s * X: the scalar acts before the operator
    friend SuperMatrix operator*(const R& s, const SuperMatrix& a) {
        SuperMatrix r(a.par_, a.zero_);
        for (auto& [ij, v] : a.e_) r.add(ij.first, ij.second, s * v);
        return r;
    }
    friend SuperMatrix operator*(const SuperMatrix& a, const Rat& s) {
        SuperMatrix r(a.par_, a.zero_);
        for (auto& [ij, v] : a.e_) r.add(ij.first, ij.second, v * s);
        return r;
    }

    friend bool operator==(const SuperMatrix& a, const SuperMatrix& b) {
        return a.par_ == b.par_ && a.e_ == b.e_;
    }
    friend bool operator!=(const SuperMatrix& a, const SuperMatrix& b) { return !(a == b); }

    // str(X) = sum_a (-1)^{|a|} X_aa
    R supertrace() const {
        R t = zero_;
        for (auto& [ij, v] : e_)
            if (ij.first == ij.second) t = par_[ij.first] ? R(t - v) : R(t + v);
        return t;
    }

    // 0 even, 1 odd, -1 inhomogeneous; the zero operator counts as even
    int total_parity() const {
        int p = -2;
        for (auto& [ij, v] : e_) {
            int pv = parity_of(v);
            if (pv < 0) return -1;
            int q = (pv + par_[ij.first] + par_[ij.second]) & 1;
            if (p == -2) p = q;
            else if (p != q) return -1;
        }
        return p == -2 ? 0 : p;
    }

    template <class F>
    SuperMatrix map(F f) const {
        SuperMatrix r(par_, zero_);
        for (auto& [ij, v] : e_) r.set(ij.first, ij.second, f(v));
        return r;
    }

    void check_shape(const SuperMatrix& o) const {
        if (par_ != o.par_) throw DomainError("SuperMatrix: grading mismatch");
    }

private:
    void check_index(int i, int j) const {
        if (i < 0 || j < 0 || i >= size() || j >= size()) throw DomainError("SuperMatrix: index out of range");
    }
    std::vector<int> par_;
    std::map<Index, R> e_;
    R zero_;
};

// graded commutator [X, Y] = XY - (-1)^{|X||Y|} YX for homogeneous X, Y
template <class R>
SuperMatrix<R> supercommutator(const SuperMatrix<R>& x, const SuperMatrix<R>& y) {
    int px = x.total_parity(), py = y.total_parity();
    if (px < 0 || py < 0) throw DomainError("supercommutator of inhomogeneous operators");
    return (px & py) ? x * y + y * x : x * y - y * x;
}

}  // namespace wf
