#pragma once

#include "wf/qseries.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wf {

struct ModularForm {
    long weight = 0;
    RSeries series;
    long pole_order = 0;
};

// Reduced row-echelon basis: pivot exponents strictly increasing, pivot
// coefficient 1, every other basis element vanishes at each pivot.
struct MFBasis {
    long weight = 0;
    long pole_bound = 0;
    long trunc = 0;
    std::vector<ModularForm> forms;

    std::vector<long> pivots() const {
        std::vector<long> p;
        for (auto& f : forms) p.push_back(f.series.valuation());
        return p;
    }
    size_t size() const { return forms.size(); }
};

inline void check_even_weight(long w) {
    if (w % 2 != 0) throw DomainError("modular form weight must be even, got " + std::to_string(w));
}

// dim M_w(SL_2(Z)) for even w >= 0
inline long mf_dimension(long w) {
    if (w < 0 || w % 2) return 0;
    if (w == 2) return 0;
    return (w % 12 == 2) ? w / 12 : w / 12 + 1;
}

// Row-reduce by leading exponent; drops series that reduce to zero.
inline std::vector<RSeries> echelon(std::vector<RSeries> rows) {
    std::vector<RSeries> out;
    while (!rows.empty()) {
        // pick the row with the smallest valuation
        size_t best = 0;
        for (size_t i = 1; i < rows.size(); ++i)
            if (rows[i].valuation() < rows[best].valuation()) best = i;
        RSeries p = rows[best];
        rows.erase(rows.begin() + best);
        if (p.is_zero()) continue;
        p = scale(p, inverse(p.leading()));
        long e = p.valuation();
        for (auto& r : rows) {
            Rat c = r[e];
            if (!is_zero(c)) r = r - scale(p, c);
        }
        for (auto& r : out) {
            Rat c = r[e];
            if (!is_zero(c)) r = r - scale(p, c);
        }
        out.push_back(p);
    }
    return out;
}

// Monomials E4^a E6^b with 4a + 6b = w, row-reduced.
inline MFBasis mf_basis(long w, long N) {
    check_even_weight(w);
    if (w < 0) throw DomainError("mf_basis: negative weight");
    RSeries e4 = eisenstein_q(4, N), e6 = eisenstein_q(6, N);
    std::vector<RSeries> rows;
    for (long a = 0; 4 * a <= w; ++a) {
        long rest = w - 4 * a;
        if (rest % 6) continue;
        rows.push_back(e4.pow(a) * e6.pow(rest / 6));
    }
    MFBasis B{w, 0, N, {}};
    for (auto& s : echelon(rows)) B.forms.push_back({w, s, 0});
    return B;
}

// (E4^3 - E6^2) / 1728
inline ModularForm delta(long N) {
    if (N < 1) throw DomainError("delta: need N >= 1");
    RSeries e4 = eisenstein_q(4, N), e6 = eisenstein_q(6, N);
    return {12, scale(e4.pow(3) - e6.pow(2), rat(1, 1728)), 0};
}

// Delta^{-P} * M_{w+12P}, row-reduced, truncated at q^N.
inline MFBasis weakly_holo_basis(long w, long P, long N) {
    check_even_weight(w);
    if (P < 0) throw DomainError("weakly_holo_basis: negative pole bound");
    if (w + 12 * P < 0) throw DomainError("weakly_holo_basis: w + 12P must be >= 0");
    long M = N + 3 * P + 2;
    MFBasis hol = mf_basis(w + 12 * P, M);
    RSeries dinv = delta(M).series.pow(-P);
    std::vector<RSeries> rows;
    for (auto& f : hol.forms) rows.push_back((f.series * dinv).truncated(N));
    MFBasis B{w, P, N, {}};
    for (auto& s : echelon(rows)) B.forms.push_back({w, s, std::max<long>(0, -s.valuation())});
    return B;
}

struct Reduction {
    RSeries remainder;
    std::vector<Rat> coords;
};

inline Reduction reduce_against_basis(const RSeries& f, const MFBasis& B) {
    if (f.trunc() < B.trunc)
        throw PrecisionError("reduce_against_basis: series truncation " + std::to_string(f.trunc()) +
                             " below basis truncation " + std::to_string(B.trunc));
    RSeries r = f.truncated(B.trunc);
    std::vector<Rat> coords;
    for (auto& b : B.forms) {
        Rat c = r[b.series.valuation()];
        coords.push_back(c);
        if (!is_zero(c)) r = r - scale(b.series, c);
    }
    return {r, coords};
}

struct QuotientClass {
    RSeries representative;
    long weight = 0;
    long lattice_scale = 1;
    long pole_bound = 0;
    long trunc = 0;
};

struct OrderResult {
    std::optional<long> order;  // empty: no order <= max_d at this precision
    long pole_bound = 0;
    long trunc = 0;
    long max_d = 0;
};

// true when x lies in c*Z((q)) + span_Q(B) as seen through the stored window
inline bool in_lattice_plus_span(const RSeries& x, const MFBasis& B, long c) {
    Reduction red = reduce_against_basis(x, B);
    for (auto& a : red.remainder.window()) {
        Rat t = a / c;
        if (!is_integer(t)) return false;
    }
    return true;
}

// Smallest d <= max_d with d*x in c*Z((q)) + span_Q(weakly_holo_basis(w,P,N)).
// Certified only at precision (P, N).
inline OrderResult class_order(const QuotientClass& x, long max_d) {
    if (x.lattice_scale <= 0) throw DomainError("class_order: lattice scale must be positive");
    if (x.representative.trunc() < x.trunc)
        throw PrecisionError("class_order: representative truncation below N");
    MFBasis B = weakly_holo_basis(x.weight, x.pole_bound, x.trunc);
    OrderResult res{std::nullopt, x.pole_bound, x.trunc, max_d};
    for (long d = 1; d <= max_d; ++d) {
        if (in_lattice_plus_span(scale(x.representative, Rat(d)), B, x.lattice_scale)) {
            res.order = d;
            break;
        }
    }
    return res;
}

// Symbolic descriptor of pi_d KO_MF (degree taken mod 8).
inline std::string komf_descriptor(long degree) {
    long r = ((degree % 8) + 8) % 8;
    long k = (degree - r) / 8;
    switch (r) {
        case 0: return "MF^Z_" + std::to_string(4 * k);
        case 1: return "Z/2((q))";
        case 2: return "Z/2((q))";
        case 3: return "C((q))/(2Z((q))+MF_" + std::to_string(4 * k + 2) + ")";
        case 4: return "MF^Z_" + std::to_string(4 * k + 2);
        case 5: return "0";
        case 6: return "0";
        default: return "C((q))/(Z((q))+MF_" + std::to_string(4 * (k + 1)) + ")";
    }
}

}  // namespace wf
