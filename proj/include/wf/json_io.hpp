#pragma once

#include "wf/cdga.hpp"
#include "wf/charclasses.hpp"
#include "wf/fieldrep.hpp"
#include "wf/modforms.hpp"
#include "wf/qseries.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace wf {

using Json = nlohmann::json;

inline Json rat_to_json(const Rat& r) { return to_string(r); }

// accepts "p/q" strings and integers
inline Rat rat_from_json(const Json& j) {
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (!j.is_string()) throw InputError("expected a rational as a string, got " + j.dump());
    Rat r;
    if (r.set_str(j.get<std::string>(), 10) != 0) throw InputError("malformed rational " + j.dump());
    r.canonicalize();
    return r;
}

inline Json iota_to_json(const IotaRat& x) {
    Json a = Json::array();
    for (auto& [p, c] : x.terms())
        a.push_back({{"iota_pow", p}, {"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}});
    return a;
}

inline IotaRat iota_from_json(const Json& j) {
    if (j.is_number_integer() || j.is_string()) return IotaRat(rat_from_json(j));
    if (!j.is_array()) throw InputError("expected a list of iota terms, got " + j.dump());
    IotaRat x;
    for (auto& t : j) {
        if (!t.is_object() || !t.contains("num")) throw InputError("malformed iota term " + t.dump());
        Rat num = rat_from_json(t.at("num"));
        Rat den = t.contains("den") ? rat_from_json(t.at("den")) : Rat(1);
        if (den == 0) throw InputError("zero denominator in " + t.dump());
        x += IotaRat::monomial(num / den, t.value("iota_pow", 0));
    }
    return x;
}

template <class C>
Json series_to_json(const Series<C>& s) {
    Json coeffs = Json::array();
    for (auto& c : s.window()) coeffs.push_back(iota_to_json(IotaRat(c)));
    return {{"valuation", s.is_zero() ? s.trunc() + 1 : s.valuation()}, {"truncation", s.trunc()}, {"coeffs", coeffs}};
}

inline QSeries qseries_from_json(const Json& j) {
    try {
        long val = j.at("valuation").get<long>();
        long trunc = j.at("truncation").get<long>();
        std::vector<IotaRat> c;
        for (auto& x : j.at("coeffs")) c.push_back(iota_from_json(x));
        if (val + (long)c.size() - 1 > trunc) throw InputError("series has coefficients beyond its truncation");
        return QSeries(val, c, trunc);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed q-series JSON: ") + e.what());
    }
}

inline RSeries rseries_from_json(const Json& j) {
    QSeries q = qseries_from_json(j);
    if (!is_rational(q)) throw InputError("expected a rational q-series (no iota)");
    return to_rseries(q);
}

inline Json modular_form_to_json(const ModularForm& f, long lattice_scale = 1) {
    Json j = series_to_json(f.series);
    j["weight"] = f.weight;
    j["pole_order"] = f.pole_order;
    j["lattice_scale"] = lattice_scale;
    return j;
}

inline Json basis_to_json(const MFBasis& B) {
    Json forms = Json::array();
    for (auto& f : B.forms) forms.push_back(modular_form_to_json(f));
    return {{"weight", B.weight}, {"pole_bound", B.pole_bound}, {"truncation", B.trunc}, {"forms", forms}};
}

inline Json frac_series_to_json(const FracPowerSeries& f) {
    Json j = series_to_json(f.body);
    j["prefactor_exponent"] = rat_to_json(f.prefactor_exponent);
    return j;
}

inline Json monomial_to_json(const Monomial& m, const AlgebraSignature& sig) {
    Json odd = Json::array();
    for (size_t j = 0; j < sig.odd.size(); ++j)
        if (m.odd >> j & 1) odd.push_back(sig.odd[j].name);
    return {{"x", m.x}, {"w", m.w}, {"uh", m.uh}, {"v", m.v}, {"odd", odd}};
}

inline Json signature_to_json(const AlgebraSignature& sig) {
    Json odd = Json::array();
    for (auto& g : sig.odd) odd.push_back({{"name", g.name}, {"degree", g.degree}});
    return {{"roots", sig.roots}, {"dim", sig.dim}, {"truncation", sig.N}, {"include_W", sig.include_W},
            {"w_bound", sig.w_bound}, {"odd", odd}};
}

inline Json element_to_json(const AlgebraElement& a) {
    Json terms = Json::array();
    for (auto& [m, c] : a.terms()) {
        Json t = monomial_to_json(m, *a.signature());
        t["coeff"] = series_to_json(c);
        terms.push_back(t);
    }
    return {{"signature", signature_to_json(*a.signature())}, {"terms", terms}, {"text", to_text(a)}};
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline Manifest manifest_from_json(const Json& j) {
    Manifest m;
    try {
        m.dimension = j.at("dimension").get<int>();
        for (auto& [k, v] : j.at("pontryagin_numbers").items()) {
            if (k.size() < 2 || k.front() != '[' || k.back() != ']') throw InputError("malformed partition key " + k);
            m.pontryagin_numbers[k] = v.is_string() ? Int(v.get<std::string>()) : Int(v.get<long>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

inline Mat<Rat> rational_matrix_from_json(const Json& j, int n) {
    if (!j.is_array() || (int)j.size() != n) throw InputError("expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    Mat<Rat> m(n, n);
    for (int a = 0; a < n; ++a) {
        if (!j[a].is_array() || (int)j[a].size() != n) throw InputError("matrix row has the wrong length");
        for (int b = 0; b < n; ++b) {
            IotaRat x = iota_from_json(j[a][b]);
            if (!x.is_rational()) throw InputError("matrix entries must be rational");
            m(a, b) = x.rational();
        }
    }
    return m;
}

// Rep manifest: {"clifford_rank": n, "truncation": N,
//   "blocks": [{"k": int, "even": p, "odd": q,   (optional; default all even)
//               "components": {"A0": matrix, "A1": [matrix per 1-form generator]}}]}
// Matrices act on V = C^{p|q}; the bundle is S_n (x) V. Base algebra: one
// closed degree-1 generator e1, e2, ... per entry of A1.
inline FieldRep rep_from_json(const Json& j) {
    try {
        int n = j.at("clifford_rank").get<int>();
        long N = j.value("truncation", 0L);
        size_t forms = 0;
        for (auto& b : j.at("blocks"))
            if (b.at("components").contains("A1")) forms = std::max(forms, b.at("components").at("A1").size());
        AlgebraSignature s;
        s.dim = (int)forms;
        s.N = N;
        for (size_t i = 1; i <= forms; ++i) s.odd.push_back({"e" + std::to_string(i), 1, {}});
        SigPtr sig = make_signature(s);
        CliffordModule S = spinor_module(n);
        FieldRep rep{sig, n, {}};
        for (auto& b : j.at("blocks")) {
            const Json& c = b.at("components");
            int size = 0;
            if (c.contains("A0")) size = (int)c.at("A0").size();
            else if (c.contains("A1") && !c.at("A1").empty()) size = (int)c.at("A1")[0].size();
            int q = b.value("odd", 0);
            int p = b.contains("even") ? b.at("even").get<int>() : size - q;
            if (p < 0 || q < 0 || p + q == 0) throw InputError("block needs a nonempty graded space");
            std::vector<int> vpar = block_parity(p, q);
            CliffordModule M = tensor_with_space(S, vpar);
            SuperConnection A{sig, M, {}, std::nullopt};
            if (c.contains("A0")) {
                Mat<Rat> a0 = rational_matrix_from_json(c.at("A0"), p + q);
                A.set(0, lift_to_module(S, embed_rational(vpar, sig, a0)));
            }
            if (c.contains("A1")) {
                FormMatrix w = form_matrix(vpar, sig);
                size_t i = 0;
                for (auto& mj : c.at("A1")) {
                    ++i;
                    Mat<Rat> m = rational_matrix_from_json(mj, p + q);
                    w += AlgebraElement::odd_gen(sig, "e" + std::to_string(i)) * embed_rational(vpar, sig, m);
                }
                A.set(1, lift_to_module(S, w));
            }
            for (auto& [key, v] : c.items())
                if (key != "A0" && key != "A1") throw InputError("unsupported component " + key);
            A.validate();
            rep.blocks.emplace_back(b.at("k").get<int>(), A);
        }
        return rep;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed rep manifest: ") + e.what());
    } catch (const DomainError& e) {
        throw InputError(std::string("invalid rep manifest: ") + e.what());
    }
}

}  // namespace wf
