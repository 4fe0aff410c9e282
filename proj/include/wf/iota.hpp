#pragma once

#include "wf/rat.hpp"

#include <utility>
#include <vector>

namespace wf {

// Laurent polynomial in the central symbol iota (stands for 2*pi*i), rational
// coefficients. Terms are sorted by power with no zero coefficients.
class IotaRat {
public:
    using Term = std::pair<int, Rat>;

    IotaRat() = default;
    IotaRat(long n) { if (n != 0) t_.emplace_back(0, Rat(n)); }
    IotaRat(const Rat& r) { if (!wf::is_zero(r)) t_.emplace_back(0, r); }

    static IotaRat monomial(const Rat& c, int power) {
        IotaRat x;
        if (!wf::is_zero(c)) x.t_.emplace_back(power, c);
        return x;
    }
    static IotaRat iota(int power = 1) { return monomial(Rat(1), power); }

    const std::vector<Term>& terms() const { return t_; }
    bool zero() const { return t_.empty(); }

    Rat coeff(int power) const {
        for (auto& [p, c] : t_)
            if (p == power) return c;
        return Rat(0);
    }

    // true when iota does not appear
    bool is_rational() const { return t_.empty() || (t_.size() == 1 && t_[0].first == 0); }
    Rat rational() const {
        if (!is_rational()) throw DomainError("IotaRat is not rational");
        return t_.empty() ? Rat(0) : t_[0].second;
    }

    IotaRat& operator+=(const IotaRat& o) { return *this = merge(*this, o, 1); }
    IotaRat& operator-=(const IotaRat& o) { return *this = merge(*this, o, -1); }
    IotaRat& operator*=(const IotaRat& o) { return *this = *this * o; }

    friend IotaRat operator+(const IotaRat& a, const IotaRat& b) { return merge(a, b, 1); }
    friend IotaRat operator-(const IotaRat& a, const IotaRat& b) { return merge(a, b, -1); }
    friend IotaRat operator-(const IotaRat& a) {
        IotaRat r = a;
        for (auto& t : r.t_) t.second = -t.second;
        return r;
    }

    friend IotaRat operator*(const IotaRat& a, const IotaRat& b) {
        if (a.t_.empty() || b.t_.empty()) return {};
        IotaRat r;
        if (a.t_.size() == 1 && b.t_.size() == 1) {
            r.t_.emplace_back(a.t_[0].first + b.t_[0].first, a.t_[0].second * b.t_[0].second);
            return r;
        }
        for (auto& [pa, ca] : a.t_)
            for (auto& [pb, cb] : b.t_) r += monomial(ca * cb, pa + pb);
        return r;
    }
    friend IotaRat operator*(const IotaRat& a, const Rat& s) {
        if (wf::is_zero(s)) return {};
        IotaRat r = a;
        for (auto& t : r.t_) t.second *= s;
        return r;
    }
    friend IotaRat operator*(const Rat& s, const IotaRat& a) { return a * s; }

    friend bool operator==(const IotaRat& a, const IotaRat& b) { return a.t_ == b.t_; }
    friend bool operator!=(const IotaRat& a, const IotaRat& b) { return !(a == b); }

private:
    static IotaRat merge(const IotaRat& a, const IotaRat& b, int sign) {
        IotaRat r;
        r.t_.reserve(a.t_.size() + b.t_.size());
        size_t i = 0, j = 0;
        while (i < a.t_.size() || j < b.t_.size()) {
            if (j == b.t_.size() || (i < a.t_.size() && a.t_[i].first < b.t_[j].first)) {
                r.t_.push_back(a.t_[i++]);
            } else if (i == a.t_.size() || b.t_[j].first < a.t_[i].first) {
                r.t_.emplace_back(b.t_[j].first, sign > 0 ? b.t_[j].second : Rat(-b.t_[j].second));
                ++j;
            } else {
                Rat c = sign > 0 ? Rat(a.t_[i].second + b.t_[j].second)
                                 : Rat(a.t_[i].second - b.t_[j].second);
                if (!wf::is_zero(c)) r.t_.emplace_back(a.t_[i].first, c);
                ++i, ++j;
            }
        }
        return r;
    }

    std::vector<Term> t_;
};

inline bool is_zero(const IotaRat& x) { return x.zero(); }

// Only monomials c*iota^p are units.
inline IotaRat inverse(const IotaRat& x) {
    if (x.terms().size() != 1) throw DomainError("IotaRat inverse: not a monomial");
    auto& [p, c] = x.terms()[0];
    return IotaRat::monomial(inverse(c), -p);
}

inline std::string to_string(const IotaRat& x) {
    if (x.zero()) return "0";
    std::string s;
    for (auto& [p, c] : x.terms()) {
        std::string cs = to_string(c);
        if (!s.empty()) s += (sgn(c) < 0) ? " - " : " + ";
        else if (sgn(c) < 0) s += "-";
        Rat a = abs(c);
        std::string body;
        if (p == 0) body = to_string(a);
        else {
            body = (a == 1) ? "" : to_string(a) + "*";
            body += (p == 1) ? "iota" : "iota^" + std::to_string(p);
        }
        s += body;
    }
    return s;
}

}  // namespace wf
