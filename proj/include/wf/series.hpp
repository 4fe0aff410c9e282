#pragma once

#include "wf/iota.hpp"
#include "wf/rat.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace wf {

// Truncated Laurent series in q. Coefficients of q^n are known exactly for
// n <= trunc(); nothing is claimed beyond that. The stored window starts at the
// true valuation (first nonzero coefficient); a series that vanishes through
// trunc() has an empty window and valuation trunc() + 1.
template <class C>
class Series {
public:
    explicit Series(long trunc = 0) : val_(trunc + 1), trunc_(trunc) {}

    Series(long lo, std::vector<C> coeffs, long trunc)
        : val_(lo), trunc_(trunc), c_(std::move(coeffs)) {
        c_.resize(std::max<long>(0, trunc_ - lo + 1));
        normalize();
    }

    static Series constant(const C& c, long trunc) { return monomial(c, 0, trunc); }
    static Series one(long trunc) { return constant(C(1), trunc); }
    static Series monomial(const C& c, long e, long trunc) {
        if (e > trunc) return Series(trunc);
        return Series(e, {c}, trunc);
    }
    // sum_n coeffs[n] q^n from a dense list starting at q^0
    static Series from_list(const std::vector<C>& coeffs, long trunc) {
        std::vector<C> c(coeffs.begin(), coeffs.begin() + std::min<long>(coeffs.size(), std::max<long>(trunc + 1, 0)));
        return Series(0, c, trunc);
    }

    long valuation() const { return val_; }
    long trunc() const { return trunc_; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<C>& window() const { return c_; }

    C operator[](long n) const {
        if (n > trunc_) throw PrecisionError("coefficient of q^" + std::to_string(n) +
                                             " beyond truncation " + std::to_string(trunc_));
        if (n < val_) return C();
        return c_[n - val_];
    }
    C leading() const {
        if (c_.empty()) throw PrecisionError("leading coefficient of a series that vanishes to its truncation");
        return c_[0];
    }

    Series truncated(long n) const {
        if (n > trunc_) throw PrecisionError("cannot raise truncation " + std::to_string(trunc_) + " to " + std::to_string(n));
        if (n < val_) return Series(n);
        return Series(val_, std::vector<C>(c_.begin(), c_.begin() + (n - val_ + 1)), n);
    }

    // multiply by q^k
    Series shifted(long k) const {
        Series r = *this;
        r.val_ += k;
        r.trunc_ += k;
        return r;
    }

    Series& operator+=(const Series& o) { return *this = add(*this, o, false); }
    Series& operator-=(const Series& o) { return *this = add(*this, o, true); }
    Series& operator*=(const Series& o) { return *this = *this * o; }

    friend Series operator+(const Series& a, const Series& b) { return add(a, b, false); }
    friend Series operator-(const Series& a, const Series& b) { return add(a, b, true); }
    friend Series operator-(const Series& a) {
        Series r = a;
        for (auto& c : r.c_) c = -c;
        return r;
    }

    friend Series operator*(const Series& a, const Series& b) {
        long N = std::min(a.trunc_ + b.val_, b.trunc_ + a.val_);
        Series r(N);
        if (a.c_.empty() || b.c_.empty()) return r;
        long lo = a.val_ + b.val_;
        if (N < lo) return r;
        std::vector<C> out(N - lo + 1);
        long na = a.c_.size(), nb = b.c_.size();
        for (long i = 0; i < na && i <= N - lo; ++i) {
            if (wf::is_zero(a.c_[i])) continue;
            long jmax = std::min(nb - 1, N - lo - i);
            for (long j = 0; j <= jmax; ++j) {
                if (wf::is_zero(b.c_[j])) continue;
                out[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return Series(lo, std::move(out), N);
    }
    template <class S>
    friend Series scale(const Series& a, const S& s) {
        Series r = a;
        for (auto& c : r.c_) c = c * s;
        r.normalize();
        return r;
    }

    Series inverse() const {
        if (c_.empty()) throw PrecisionError("inverse of a series vanishing to its truncation");
        long v = val_;
        long N = trunc_ - 2 * v;
        long len = N + v + 1;  // coefficients for exponents -v .. N
        if (len <= 0) return Series(N);
        C inv0 = wf::inverse(c_[0]);
        std::vector<C> b(len);
        b[0] = inv0;
        for (long n = 1; n < len; ++n) {
            C s{};
            for (long k = 1; k <= n && k < (long)c_.size(); ++k) s += c_[k] * b[n - k];
            b[n] = -(inv0 * s);
        }
        return Series(-v, std::move(b), N);
    }

    Series pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        if (e == 0) return one(trunc_ - val_);
        Series base = *this, r;
        bool have = false;
        while (true) {
            if (e & 1) {
                r = have ? r * base : base;
                have = true;
            }
            e >>= 1;
            if (!e) break;
            base = base * base;
        }
        return r;
    }

    // q d/dq
    Series qddq() const {
        Series r = *this;
        for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = r.c_[i] * C(val_ + (long)i);
        r.normalize();
        return r;
    }

    // exact equality of known data (same truncation and coefficients)
    friend bool operator==(const Series& a, const Series& b) {
        return a.trunc_ == b.trunc_ && a.val_ == b.val_ && a.c_ == b.c_;
    }
    friend bool operator!=(const Series& a, const Series& b) { return !(a == b); }

    // equality through q^n
    bool agrees(const Series& o, long n) const { return truncated(n) == o.truncated(n); }

private:
    static Series add(const Series& a, const Series& b, bool sub) {
        long N = std::min(a.trunc_, b.trunc_);
        long lo = std::min(a.val_, b.val_);
        if (N < lo) return Series(N);
        std::vector<C> out(N - lo + 1);
        for (long n = a.val_; n <= N && n - a.val_ < (long)a.c_.size(); ++n) out[n - lo] += a.c_[n - a.val_];
        for (long n = b.val_; n <= N && n - b.val_ < (long)b.c_.size(); ++n) {
            if (sub) out[n - lo] -= b.c_[n - b.val_];
            else out[n - lo] += b.c_[n - b.val_];
        }
        return Series(lo, std::move(out), N);
    }

    void normalize() {
        size_t k = 0;
        while (k < c_.size() && wf::is_zero(c_[k])) ++k;
        if (k == c_.size()) {
            c_.clear();
            val_ = trunc_ + 1;
            return;
        }
        if (k) c_.erase(c_.begin(), c_.begin() + k);
        val_ += k;
    }

    long val_;
    long trunc_;
    std::vector<C> c_;
};

using RSeries = Series<Rat>;
using QSeries = Series<IotaRat>;

inline QSeries to_qseries(const RSeries& s) {
    std::vector<IotaRat> c;
    for (auto& x : s.window()) c.emplace_back(x);
    return QSeries(s.valuation(), std::move(c), s.trunc());
}

inline RSeries to_rseries(const QSeries& s) {
    std::vector<Rat> c;
    for (auto& x : s.window()) c.push_back(x.rational());
    return RSeries(s.valuation(), std::move(c), s.trunc());
}

inline bool is_rational(const QSeries& s) {
    for (auto& x : s.window())
        if (!x.is_rational()) return false;
    return true;
}

namespace detail {
inline std::string coeff_text(const Rat& c, bool& negative) {
    negative = sgn(c) < 0;
    return to_string(Rat(abs(c)));
}
inline std::string coeff_text(const IotaRat& c, bool& negative) {
    if (c.is_rational()) return coeff_text(c.rational(), negative);
    negative = false;
    return "(" + to_string(c) + ")";
}
}  // namespace detail

// "1 + 240q + 2160q^2"; plain ASCII minus signs
template <class C>
std::string to_text(const Series<C>& s) {
    if (s.is_zero()) return "0";
    std::string out;
    for (long n = s.valuation(); n <= s.trunc(); ++n) {
        C c = s[n];
        if (wf::is_zero(c)) continue;
        bool neg = false;
        std::string body = detail::coeff_text(c, neg);
        std::string mon = (n == 0) ? "" : (n == 1 ? "q" : "q^" + std::to_string(n));
        if (n != 0 && body == "1") body = "";
        std::string term = body + mon;
        if (out.empty()) out = neg ? "-" + term : term;
        else out += (neg ? " - " : " + ") + term;
    }
    return out;
}

template <class C>
bool is_integral(const Series<C>& s) {
    for (auto& c : s.window()) {
        if constexpr (std::is_same_v<C, Rat>) {
            if (!is_integer(c)) return false;
        } else {
            if (!c.is_rational() || !is_integer(c.rational())) return false;
        }
    }
    return true;
}

}  // namespace wf
