#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace wf {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Int = mpz_class;
using Rat = mpq_class;

inline Rat rat(long n, long d = 1) {
    if (d == 0) throw DomainError("rat: zero denominator");
    Rat r(n, d);
    r.canonicalize();
    return r;
}

inline Rat rat(const Int& n, const Int& d = 1) {
    if (d == 0) throw DomainError("rat: zero denominator");
    Rat r(n, d);
    r.canonicalize();
    return r;
}

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }
inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

inline Rat inverse(const Rat& r) {
    if (is_zero(r)) throw DomainError("inverse of zero rational");
    return Rat(1) / r;
}

// "a/b" or "a" when b == 1
inline std::string to_string(const Rat& r) {
    if (is_integer(r)) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rat parse_rat(const std::string& num, const std::string& den = "1") {
    Int n, d;
    if (n.set_str(num, 10) != 0) throw InputError("bad integer: " + num);
    if (d.set_str(den, 10) != 0) throw InputError("bad integer: " + den);
    if (d == 0) throw InputError("zero denominator");
    return rat(n, d);
}

inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return parse_rat(s, "1");
    return parse_rat(s.substr(0, slash), s.substr(slash + 1));
}

inline Rat factorial(unsigned n) {
    Int f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rat(f);
}

inline Rat binomial(unsigned n, unsigned k) {
    Int b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rat(b);
}

inline Rat pow(const Rat& r, unsigned e) {
    Rat out(1);
    mpz_pow_ui(out.get_num_mpz_t(), r.get_num_mpz_t(), e);
    mpz_pow_ui(out.get_den_mpz_t(), r.get_den_mpz_t(), e);
    return out;
}

}  // namespace wf
