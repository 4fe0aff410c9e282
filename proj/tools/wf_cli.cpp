#include "wf/charclasses.hpp"
#include "wf/clifford.hpp"
#include "wf/fieldrep.hpp"
#include "wf/json_io.hpp"
#include "wf/modforms.hpp"
#include "wf/qseries.hpp"
#include "wf/superconn.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>

using namespace wf;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitPrecision = 3;

long default_order() {
    const char* env = std::getenv("WF_DEFAULT_ORDER");
    if (!env || !*env) return 10;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end || v < 0) throw InputError("WF_DEFAULT_ORDER must be a non-negative integer");
    return v;
}

struct Output {
    bool json = false;
    std::string path;

    int emit(const Json& report, const std::string& text) const {
        std::string body = json ? report.dump(2) : text;
        if (path.empty()) {
            std::cout << body << "\n";
            return 0;
        }
        std::ofstream f(path);
        if (!(f << body << "\n")) throw InputError("cannot write " + path);
        return 0;
    }

    int check(const std::string& name, bool pass, const Json& precision, const std::string& certificate,
              Json extra = Json::object()) const {
        Json r = {{"check", name}, {"pass", pass}, {"precision", precision}};
        r["certificate"] = certificate.empty() ? Json(nullptr) : Json(certificate);
        for (auto& [k, v] : extra.items()) r[k] = v;
        std::string text = name + ": " + (pass ? "pass" : "FAIL");
        if (!certificate.empty()) text += " (" + certificate + ")";
        emit(r, text);
        return pass ? 0 : kExitCheckFailed;
    }
};

void require_nonneg(long v, const std::string& what) {
    if (v < 0) throw InputError(what + " must be non-negative");
}

std::string bi_difference(const BiSeries<Rat>& a, const BiSeries<Rat>& b) {
    for (long n = 0; n <= a.q_order(); ++n) {
        auto x = a.q_slice(n), y = b.q_slice(n);
        for (size_t m = 0; m < x.size(); ++m)
            if (x[m] != y[m])
                return "q^" + std::to_string(n) + " z^" + std::to_string(m) + ": " + to_string(x[m]) + " vs " + to_string(y[m]);
    }
    return "";
}

WittenVariant parse_variant(const std::string& v) {
    if (v == "plain") return WittenVariant::plain;
    if (v == "modular") return WittenVariant::modular;
    if (v == "star") return WittenVariant::star;
    throw InputError("unknown variant " + v + " (plain, modular, star)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact q-series, characteristic classes and superconnection checks"};
    app.require_subcommand(1);
    app.fallthrough();
    Output out;
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--output", out.path, "Write the result to this file instead of stdout");

    long order = -1, weight = 0, rank = 2, dim = 4, qorder = 8, zorder = 8, pole = 0, lattice = 1, max_d = 48,
         degree = 0, power = 1, trials = 50;
    std::optional<std::uint64_t> seed;
    std::string manifest, series_path, variant = "plain", rep_path;
    bool corrupt = false, geometric = false;
    std::function<int()> action;

    auto order_opt = [&](CLI::App* c) { c->add_option("--order", order, "q-truncation order (default WF_DEFAULT_ORDER or 10)"); };
    auto N = [&]() {
        long v = order >= 0 ? order : default_order();
        require_nonneg(v, "order");
        return v;
    };

    auto* eis = app.add_subcommand("eis", "Normalized Eisenstein series E_k");
    eis->add_option("--weight", weight, "Even weight >= 2")->required();
    eis->add_flag("--geometric", geometric, "Print D_k = -B_k/k! E_k instead");
    order_opt(eis);
    eis->callback([&] {
        action = [&] {
            RSeries s = geometric ? eisenstein_geometric(weight, N()) : eisenstein_q(weight, N());
            return out.emit(series_to_json(s), to_text(s));
        };
    });

    auto* eta = app.add_subcommand("eta", "Dedekind eta q^{1/24} prod (1 - q^n)");
    order_opt(eta);
    eta->callback([&] {
        action = [&] {
            auto e = dedekind_eta(N());
            return out.emit(frac_series_to_json(e), to_text(e));
        };
    });

    auto* phi = app.add_subcommand("phi", "phi(q)^n = prod (1 - q^m)^n, the n-fermion trace normalization");
    phi->add_option("--power", power, "Fermion count n");
    order_opt(phi);
    phi->callback([&] {
        action = [&] {
            auto f = fermion_trace_normalization((int)power, N());
            Json j = series_to_json(f.value);
            j["ell_half_pow"] = f.ell_half_pow;
            return out.emit(j, to_text(f.value));
        };
    });

    auto* del = app.add_subcommand("delta", "Discriminant Delta = (E4^3 - E6^2)/1728");
    order_opt(del);
    del->callback([&] {
        action = [&] {
            auto d = delta(N());
            return out.emit(modular_form_to_json(d), to_text(d.series));
        };
    });

    auto* wit = app.add_subcommand("witten", "Witten genus of a manifest, or the Witten class");
    wit->add_option("--manifest", manifest, "Pontryagin-number manifest (JSON)");
    wit->add_option("--rank", rank, "Bundle rank for the class");
    wit->add_option("--dim", dim, "Form-degree truncation for the class");
    wit->add_option("--variant", variant, "plain, modular or star");
    order_opt(wit);
    wit->callback([&] {
        action = [&] {
            if (!manifest.empty()) {
                GenusResult g = witten_genus(manifest_from_json(read_json_file(manifest)), N());
                Json j = series_to_json(g.genus);
                j["note"] = g.note;
                return out.emit(j, g.genus.is_zero() ? "0" : to_text(g.genus));
            }
            WittenVariant v = parse_variant(variant);
            SigPtr sig = euler_signature(rank, (int)dim, N(), false, v == WittenVariant::star);
            AlgebraElement w = witten_class(sig, v);
            return out.emit(element_to_json(w), to_text(w));
        };
    });

    auto* ec = app.add_subcommand("euler-char", "phi^{-n} prod (e^{x/2}-e^{-x/2}) prod_k (1-q^k e^x)(1-q^k e^-x)");
    ec->add_option("--rank", rank, "Even bundle rank")->required();
    ec->add_option("--dim", dim, "Form-degree truncation")->required();
    order_opt(ec);
    ec->callback([&] {
        action = [&] {
            IdentityCheck c = euler_character_check(rank, (int)dim, N());
            return out.emit(element_to_json(c.lhs), to_text(c.lhs));
        };
    });

    auto* dr = app.add_subcommand("dirac-ramond", "phi^n A-hat prod_k Ch(Sym_{q^k})");
    dr->add_option("--rank", rank, "Even bundle rank")->required();
    dr->add_option("--dim", dim, "Form-degree truncation")->required();
    order_opt(dr);
    dr->callback([&] {
        action = [&] {
            AlgebraElement a = dirac_ramond_character(euler_signature(rank, (int)dim, N()));
            return out.emit(element_to_json(a), to_text(a));
        };
    });

    auto* part = app.add_subcommand("partition", "Normalized partition trace of a rep manifest");
    part->add_option("--rep", rep_path, "Rep manifest (JSON)")->required();
    part->callback([&] {
        action = [&] {
            PartitionTrace t = partition_trace(rep_from_json(read_json_file(rep_path)));
            Json j = element_to_json(t.Z);
            j["i_pow"] = t.i_pow;
            j["sqrt2_pow"] = t.sqrt2_pow;
            j["ell_half_pow"] = t.ell_half_pow;
            std::string pre = std::string(t.i_pow ? "i" : "") + (t.sqrt2_pow ? "sqrt2" : "");
            return out.emit(j, pre.empty() ? to_text(t.Z) : pre + " * (" + to_text(t.Z) + ")");
        };
    });

    auto* check = app.add_subcommand("check", "Run an identity or property check");
    check->require_subcommand(1);
    check->fallthrough();

    auto* cw = check->add_subcommand("weierstrass", "Product and exponential forms of the Weierstrass function agree");
    cw->add_option("--qorder", qorder, "q-truncation");
    cw->add_option("--zorder", zorder, "z-truncation");
    cw->callback([&] {
        action = [&] {
            require_nonneg(qorder, "qorder");
            require_nonneg(zorder, "zorder");
            auto p = weierstrass_sigma(SigmaMode::product, qorder, zorder);
            auto e = weierstrass_sigma(SigmaMode::exponential, qorder, zorder);
            return out.check("weierstrass", p == e, {{"q", qorder}, {"z", zorder}}, bi_difference(p, e));
        };
    });

    auto* ce = check->add_subcommand("euler-char", "Euler character equals Pf / Wit");
    ce->add_option("--rank", rank, "Even bundle rank")->required();
    ce->add_option("--dim", dim, "Form-degree truncation")->required();
    order_opt(ce);
    ce->callback([&] {
        action = [&] {
            IdentityCheck c = euler_character_check(rank, (int)dim, N());
            return out.check("euler-char", c.equal, {{"rank", rank}, {"dim", dim}, {"q", N()}},
                             first_difference(c.lhs, c.rhs).value_or(""));
        };
    });

    auto* ch = check->add_subcommand("eta-h", "d(eta_H) equals the modular minus the plain (or star) Witten class");
    ch->add_option("--rank", rank, "Even bundle rank");
    ch->add_option("--dim", dim, "Form-degree truncation")->required();
    ch->add_option("--variant", variant, "plain or star");
    order_opt(ch);
    ch->callback([&] {
        action = [&] {
            WittenVariant v = parse_variant(variant);
            SigPtr sig = euler_signature(rank, (int)dim, N(), true, v == WittenVariant::star);
            EtaHResult r = eta_h_transgression(sig, v);
            return out.check("eta-h", r.check, {{"rank", rank}, {"dim", dim}, {"q", N()}, {"variant", variant}},
                             first_difference(r.d_eta, r.target).value_or(""));
        };
    });

    auto* ca = check->add_subcommand("anomaly", "Pf (Wit*)^{-1} is closed with the stated taubar anomaly");
    ca->add_option("--rank", rank, "Even bundle rank")->required();
    ca->add_option("--dim", dim, "Form-degree truncation")->required();
    order_opt(ca);
    ca->callback([&] {
        action = [&] {
            AnomalyResult r = euler_anomaly_check(rank, (int)dim, N());
            std::string cert;
            if (!r.dZ_closed) cert = "dZ != 0";
            else if (!r.tbar_ok) cert = "taubar: " + first_difference(apply_dbar(r.Z), apply_d(r.Z_tbar)).value_or("");
            else if (!r.v_ok) cert = "v-derivative nonzero";
            return out.check("anomaly", r.ok(), {{"rank", rank}, {"dim", dim}, {"q", N()}}, cert);
        };
    });

    auto* cs = check->add_subcommand("semigroup", "Random semigroup-law instances");
    cs->add_option("--seed", seed, "Random seed (required)")->required();
    cs->add_option("--trials", trials, "Number of instances");
    cs->callback([&] {
        action = [&] {
            require_nonneg(trials, "trials");
            SemigroupReport r = semigroup_law_random(*seed, (int)trials);
            std::string cert = r.ok() ? "" : std::to_string(r.trials - r.passed) + " instances fail";
            return out.check("semigroup", r.ok(), {{"seed", *seed}, {"trials", trials}}, cert,
                             {{"passed", r.passed}, {"eta_product_cases", r.eta_cases}});
        };
    });

    auto* cm = check->add_subcommand("mckean-singer", "Clifford supertrace of the heat kernel equals the kernel superdimension");
    cm->add_option("--seed", seed, "Random seed (required)")->required();
    cm->add_option("--trials", trials, "Number of random Dirac operators");
    cm->callback([&] {
        action = [&] {
            require_nonneg(trials, "trials");
            std::mt19937_64 rng(*seed);
            int passed = 0;
            std::string cert;
            for (long i = 0; i < trials; ++i) {
                DiracInstance inst = random_dirac_instance(rng);
                McKeanSingerReport r = mckean_singer_check(inst.module, inst.D);
                if (r.ok()) ++passed;
                else if (cert.empty()) cert = "trial " + std::to_string(i) + ": superdim " + to_string(r.superdim);
            }
            return out.check("mckean-singer", passed == trials, {{"seed", *seed}, {"trials", trials}}, cert,
                             {{"passed", passed}});
        };
    });

    auto* cf = check->add_subcommand("eft", "Euler representation partition trace as field-theory data");
    cf->add_option("--rank", rank, "Even bundle rank")->required();
    cf->add_option("--dim", dim, "Form-degree truncation")->required();
    cf->add_flag("--corrupt", corrupt, "Corrupt Z_taubar (negative control)");
    order_opt(cf);
    cf->callback([&] {
        action = [&] {
            EulerPipelineResult p = euler_pipeline((int)rank, (int)dim, N());
            EftReport r = p.eft;
            if (corrupt) {
                AnomalyResult an = euler_anomaly_data(p.Z.signature());
                r = eft_verify({p.Z, AlgebraElement::zero(p.Z.signature()),
                                an.Z_tbar + AlgebraElement::odd_gen(p.Z.signature(), "H"), (int)rank});
            }
            std::string cert;
            if (!p.matches) cert = "partition trace: " + first_difference(p.Z, p.expected).value_or("");
            else if (!r.closed) cert = "dZ: " + r.closed_cert;
            else if (!r.tbar_ok) cert = "taubar: " + r.tbar_cert;
            else if (!r.v_ok) cert = "v: " + r.v_cert;
            return out.check("eft", p.matches && r.ok(), {{"rank", rank}, {"dim", dim}, {"q", N()}}, cert,
                             {{"matches_pf_wit_star", p.matches}, {"closed", r.closed}, {"taubar", r.tbar_ok}, {"v", r.v_ok}});
        };
    });

    auto* komf = app.add_subcommand("komf", "Coefficient group descriptor in a given degree");
    komf->add_option("--degree", degree, "Degree")->required();
    komf->callback([&] {
        action = [&] {
            std::string d = komf_descriptor(degree);
            return out.emit({{"degree", degree}, {"group", d}}, d);
        };
    });

    auto* bn = app.add_subcommand("bn-order", "Order of a class in C((q))/(cZ((q)) + MF)");
    bn->add_option("--series", series_path, "Representative (q-series JSON)")->required();
    bn->add_option("--weight", weight, "Weight")->required();
    bn->add_option("--lattice-scale", lattice, "Lattice scale c");
    bn->add_option("--pole", pole, "Pole bound P");
    bn->add_option("--max-d", max_d, "Largest multiple to test");
    order_opt(bn);
    bn->callback([&] {
        action = [&] {
            RSeries rep = rseries_from_json(read_json_file(series_path));
            long n = N();
            if (rep.trunc() < n) throw PrecisionError("series truncation " + std::to_string(rep.trunc()) + " is below --order");
            OrderResult r = class_order({rep.truncated(n), weight, lattice, pole, n}, max_d);
            Json j = {{"P", r.pole_bound}, {"N", r.trunc}, {"max_d", r.max_d}};
            j["order"] = r.order ? Json(*r.order) : Json(nullptr);
            std::string text = r.order ? std::to_string(*r.order) : "none up to " + std::to_string(max_d);
            return out.emit(j, text);
        };
    });

    auto* mb = app.add_subcommand("mf-basis", "Row-reduced basis of holomorphic modular forms");
    mb->add_option("--weight", weight, "Even weight")->required();
    order_opt(mb);
    mb->callback([&] {
        action = [&] {
            MFBasis B = mf_basis(weight, N());
            std::string text;
            for (auto& f : B.forms) text += to_text(f.series) + "\n";
            if (!text.empty()) text.pop_back();
            return out.emit(basis_to_json(B), B.forms.empty() ? "(empty)" : text);
        };
    });

    auto* wh = app.add_subcommand("wh-basis", "Row-reduced basis of weakly holomorphic forms with pole order <= P");
    wh->add_option("--weight", weight, "Even weight")->required();
    wh->add_option("--pole", pole, "Pole bound P");
    order_opt(wh);
    wh->callback([&] {
        action = [&] {
            MFBasis B = weakly_holo_basis(weight, pole, N());
            std::string text;
            for (auto& f : B.forms) text += to_text(f.series) + "\n";
            if (!text.empty()) text.pop_back();
            return out.emit(basis_to_json(B), B.forms.empty() ? "(empty)" : text);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }
    out.json = format == "json";
    try {
        return action();
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return kExitPrecision;
    } catch (const DomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }
}
