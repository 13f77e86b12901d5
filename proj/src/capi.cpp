// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// C boundary: JSON strings in, JSON strings out, opaque handles, error
// codes. Exceptions from the core are translated to codes here and never
// cross the boundary.

#include "flatexp/flatexp.h"

#include "flat.hpp"
#include "gibbs.hpp"
#include "jsonio.hpp"
#include "roots.hpp"
#include "sos.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

using namespace flatexp;

namespace {

thread_local std::string g_error;

char* dup_cstr(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

int fail(int code, const std::string& msg) {
  g_error = msg;
  return code;
}

// Runs `f`, translating exceptions: domain_error means a verified property
// failed to hold, invalid_argument and JSON errors are input problems, and
// everything else is a numeric failure.
template <typename F>
int guarded(F&& f) {
  g_error.clear();
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    return fail(FX_E_INPUT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(FX_E_INPUT, e.what());
  } catch (const std::domain_error& e) {
    return fail(FX_E_PROPERTY, e.what());
  } catch (const std::exception& e) {
    return fail(FX_E_NUMERIC, e.what());
  } catch (...) {
    return fail(FX_E_NUMERIC, "unknown failure");
  }
}

mpfr_prec_t pick_prec(long precision_bits) {
  if (precision_bits <= 0) return 512;
  if (precision_bits < 64 || precision_bits > (1L << 20))
    throw std::invalid_argument("precision_bits out of range [64, 2^20]");
  return static_cast<mpfr_prec_t>(precision_bits);
}

json interval_json(const Interval& v) {
  json j;
  j["lo"] = v.lo.to_hex();
  j["hi"] = v.hi.to_hex();
  j["approx"] = v.lo.to_double();
  return j;
}

mpq_class rational_from_json_field(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_string()) return mpq_from_decimal(v.get<std::string>());
  if (v.is_number_integer()) return mpq_class(v.get<long>());
  if (v.is_object())
    return mpq_from_strings(v.at("num").get<std::string>(),
                            v.at("den").get<std::string>());
  throw std::invalid_argument(std::string("field '") + key +
                              "' must be a string, integer or {num,den}");
}

}  // namespace

struct fx_construction {
  FlatApproxResult result;
  mpfr_prec_t precision_bits = 512;
  json metadata;
};

struct fx_certificate {
  RCertResult rc;
};

extern "C" {

const char* fx_version(void) { return "flatexp 1.0.0"; }

const char* fx_last_error(void) { return g_error.c_str(); }

void fx_free(char* p) { std::free(p); }

int fx_select_params(const char* request_json, char** out_json) {
  return guarded([&]() {
    if (!request_json || !out_json)
      throw std::invalid_argument("null argument");
    json req = json::parse(request_json);
    mpq_class beta = rational_from_json_field(req, "beta");
    if (!req.contains("delta"))
      throw std::invalid_argument(
          "missing accuracy target: provide delta (or a derived eps)");
    DeltaSpec delta = parse_delta(req.at("delta").get<std::string>());
    bool paper = req.value("paper_constants", false);
    ConstOverrides ov;
    if (req.contains("overrides")) {
      if (paper)
        throw std::invalid_argument(
            "paper_constants and overrides are mutually exclusive");
      const json& o = req["overrides"];
      ov.enabled = true;
      if (o.contains("c_ell")) ov.c_ell = rational_from_json_field(o, "c_ell");
      if (o.contains("c_s")) ov.c_s = rational_from_json_field(o, "c_s");
      if (o.contains("c_r")) ov.c_r = rational_from_json_field(o, "c_r");
      if (o.contains("c_k")) ov.c_k = rational_from_json_field(o, "c_k");
    }
    FlatParams params = select_params(beta, delta, ov, paper);
    json out = params_to_json(params);
    out["degree"] = params.k + 2;
    *out_json = dup_cstr(out.dump(2));
    return FX_OK;
  });
}

int fx_construct(const char* params_json, long precision_bits,
                 fx_construction** out) {
  return guarded([&]() {
    if (!params_json || !out) throw std::invalid_argument("null argument");
    mpfr_prec_t prec = pick_prec(precision_bits);
    json j = json::parse(params_json);
    for (const char* key : {"ell", "s", "r", "k"})
      if (!j.contains(key))
        throw std::invalid_argument(
            std::string("missing parameter field '") + key +
            "': fx_construct needs all of ell, s, r, k "
            "(fx_select_params computes them)");
    FlatParams params = params_from_json(j);
    params.validate();

    auto c = std::make_unique<fx_construction>();
    c->precision_bits = prec;
    c->result = build_Phat(params);
    realize_P(c->result, prec);

    const FlatParams& p = c->result.params;
    Interval kap = p.kappa(prec);
    Interval log_inv_delta = imul(kap, Interval::from_long(100, prec), prec);
    Interval e_kap = iexp(kap, prec);
    Interval eps_eff = p.eps(prec);
    Interval scale = isub(Interval::from_long(1, prec),
                          imul(Interval::from_mpq(p.delta.rat, prec), e_kap, prec), prec);
    scale = imul(scale, e_kap, prec);

    json meta;
    meta["precision_bits"] = static_cast<long>(prec);
    meta["degree_q"] = c->result.q_full.degree();
    meta["degree_p_hat"] = c->result.p_hat.degree();
    meta["degree_realized"] = c->result.p_realized.degree();
    meta["max_coeff_bits"] = c->result.max_coeff_bits;
    meta["delta_rational"] =
        mpq_num_str(p.delta.rat) + "/" + mpq_den_str(p.delta.rat);
    json consts;
    consts["kappa"] = interval_json(kap);
    consts["log_inv_delta"] = interval_json(log_inv_delta);
    consts["e_kappa"] = interval_json(e_kap);
    consts["eps_eff"] = interval_json(eps_eff);
    consts["realize_scale"] = interval_json(scale);
    meta["constants"] = consts;
    if (!p.warnings.empty()) meta["warnings"] = p.warnings;
    c->metadata = meta;

    *out = c.release();
    return FX_OK;
  });
}

void fx_construction_free(fx_construction* c) { delete c; }

int fx_construction_params_json(const fx_construction* c, char** out_json) {
  return guarded([&]() {
    if (!c || !out_json) throw std::invalid_argument("null argument");
    *out_json = dup_cstr(params_to_json(c->result.params).dump(2));
    return FX_OK;
  });
}

int fx_construction_hat_json(const fx_construction* c, char** out_json) {
  return guarded([&]() {
    if (!c || !out_json) throw std::invalid_argument("null argument");
    json j;
    j["format"] = "flatexp-construction";
    j["params"] = params_to_json(c->result.params);
    j["degree"] = c->result.p_hat.degree();
    j["p_hat"] = to_json(c->result.p_hat);
    j["q"] = to_json(c->result.q_full);
    *out_json = dup_cstr(j.dump());
    return FX_OK;
  });
}

int fx_construction_realized_json(const fx_construction* c, char** out_json) {
  return guarded([&]() {
    if (!c || !out_json) throw std::invalid_argument("null argument");
    json j;
    j["format"] = "flatexp-realized";
    j["params"] = params_to_json(c->result.params);
    j["degree"] = c->result.p_realized.degree();
    j["p"] = to_json(c->result.p_realized);
    *out_json = dup_cstr(j.dump());
    return FX_OK;
  });
}

int fx_construction_metadata_json(const fx_construction* c, char** out_json) {
  return guarded([&]() {
    if (!c || !out_json) throw std::invalid_argument("null argument");
    *out_json = dup_cstr(c->metadata.dump(2));
    return FX_OK;
  });
}

int fx_construction_from_hat_json(const char* hat_json, long precision_bits,
                                  fx_construction** out) {
  return guarded([&]() {
    if (!hat_json || !out) throw std::invalid_argument("null argument");
    mpfr_prec_t prec = pick_prec(precision_bits);
    json j = json::parse(hat_json);
    if (j.value("format", "") != std::string("flatexp-construction"))
      throw std::invalid_argument("not a construction file (format tag)");
    auto c = std::make_unique<fx_construction>();
    c->precision_bits = prec;
    c->result.params = params_from_json(j.at("params"));
    c->result.p_hat = rational_poly_from_json(j.at("p_hat"));
    if (j.contains("q")) c->result.q_full = rational_poly_from_json(j.at("q"));
    for (const mpq_class& q : c->result.p_hat.c) {
      long bits = static_cast<long>(
          mpz_sizeinbase(q.get_num().get_mpz_t(), 2));
      bits = std::max(bits, static_cast<long>(
                                mpz_sizeinbase(q.get_den().get_mpz_t(), 2)));
      c->result.max_coeff_bits = std::max(c->result.max_coeff_bits, bits);
    }
    realize_P(c->result, prec);
    c->metadata = json{{"precision_bits", static_cast<long>(prec)},
                       {"rehydrated", true}};
    *out = c.release();
    return FX_OK;
  });
}

namespace {

json report_to_json(const PropertyReport& rep) {
  json records = json::array();
  for (const PropertyRecord& r : rep.records) {
    json e;
    e["name"] = r.name;
    e["passed"] = r.passed;
    e["rigorous"] = r.rigorous;
    e["margin"] = r.worst_margin_d;
    e["margin_hex"] = r.worst_margin.to_hex();
    e["worst_x"] = r.worst_x;
    e["grid"] = r.grid_spec;
    if (!r.note.empty()) e["note"] = r.note;
    records.push_back(std::move(e));
  }
  json j;
  j["pass"] = rep.all_passed();
  j["records"] = records;
  return j;
}

}  // namespace

int fx_verify(const fx_construction* c, const char* options_json,
              char** report_json) {
  return guarded([&]() {
    if (!c || !report_json) throw std::invalid_argument("null argument");
    json opt = options_json && *options_json ? json::parse(options_json)
                                             : json::object();
    GridSpec grid;
    grid.window_points = opt.value("window_points", grid.window_points);
    grid.log_points_per_decade =
        opt.value("log_points_per_decade", grid.log_points_per_decade);
    grid.tail_factor = opt.value("tail_factor", grid.tail_factor);
    grid.trunc_points = opt.value("trunc_points", grid.trunc_points);
    grid.start_prec = opt.value("start_prec", static_cast<long>(grid.start_prec));
    grid.max_prec = opt.value("max_prec", static_cast<long>(grid.max_prec));
    if (grid.window_points <= 0 || grid.log_points_per_decade <= 0 ||
        grid.trunc_points <= 0)
      throw std::invalid_argument("grid sizes must be positive");
    bool certify_roots = opt.value("certify_roots", true);
    std::vector<std::string> checks =
        opt.contains("checks")
            ? opt["checks"].get<std::vector<std::string>>()
            : std::vector<std::string>{"approx", "trunc", "flat"};

    const FlatParams& p = c->result.params;
    PropertyReport all;
    for (const std::string& what : checks) {
      PropertyReport rep;
      if (what == "approx") {
        rep = verify_thm_approx(c->result, grid, certify_roots);
      } else if (what == "trunc") {
        rep = check_truncation_error(c->result, grid);
      } else if (what == "flat") {
        Interval kap = p.kappa(c->precision_bits);
        mpq_class eps_hi;
        mpfr_get_q(eps_hi.get_mpq_t(), p.eps(c->precision_bits).hi.raw());
        mpq_class eta = mpq_class(1) / (2 * p.beta);
        mpq_class x_max = mpq_class(grid.tail_factor) * p.s;
        rep = verify_flat(c->result.p_realized, kap, eta, eps_hi, x_max, grid);
      } else {
        throw std::invalid_argument("unknown check '" + what +
                                    "' (expected approx, trunc or flat)");
      }
      for (PropertyRecord& r : rep.records)
        all.records.push_back(std::move(r));
    }
    *report_json = dup_cstr(report_to_json(all).dump(2));
    return all.all_passed() ? FX_OK
                            : fail(FX_E_PROPERTY, "a property check failed");
  });
}

int fx_sample_csv(const fx_construction* c, long points, char** out_csv) {
  return guarded([&]() {
    if (!c || !out_csv) throw std::invalid_argument("null argument");
    if (points < 1 || points > 1000000)
      throw std::invalid_argument("points out of range [1, 10^6]");
    const FlatParams& p = c->result.params;
    const mpfr_prec_t prec = 192;
    // window upper end 4 beta ln(1/delta), rounded up to a rational
    Interval kap = p.kappa(prec);
    Interval w = imul(kap, Interval::from_mpq(400 * p.beta, prec), prec);
    mpq_class x_hi;
    mpfr_get_q(x_hi.get_mpq_t(), w.hi.raw());
    EscalatingEval ev(c->result.p_hat);
    std::string csv = "x,p_hat,exp_neg_x,margin\n";
    char line[160];
    for (long i = 0; i <= points; ++i) {
      mpq_class x = x_hi * i / points;
      Interval px = ev.eval_at(x, prec);
      Interval ex = iexp(ineg(Interval::from_mpq(x, prec)), prec);
      Interval diff = isub(px, ex, prec);
      double margin = std::max(std::abs(diff.lo.to_double()),
                               std::abs(diff.hi.to_double()));
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n",
                    mpq_class(x).get_d(), px.lo.to_double(),
                    ex.lo.to_double(), margin);
      csv += line;
    }
    *out_csv = dup_cstr(csv);
    return FX_OK;
  });
}

int fx_certify_poly(const char* poly_json, long precision_bits,
                    unsigned long long seed, fx_certificate** out) {
  return guarded([&]() {
    if (!poly_json || !out) throw std::invalid_argument("null argument");
    mpfr_prec_t prec = pick_prec(precision_bits);
    RationalPoly P = rational_poly_from_json(json::parse(poly_json));
    auto h = std::make_unique<fx_certificate>();
    h->rc = build_R_certificate(P, prec, seed);
    *out = h.release();
    return FX_OK;
  });
}

int fx_certify_construction(const fx_construction* c, long precision_bits,
                            unsigned long long seed, fx_certificate** out) {
  return guarded([&]() {
    if (!c || !out) throw std::invalid_argument("null argument");
    mpfr_prec_t prec = pick_prec(precision_bits);
    auto h = std::make_unique<fx_certificate>();
    h->rc = build_R_certificate(c->result, prec, seed);
    *out = h.release();
    return FX_OK;
  });
}

void fx_certificate_free(fx_certificate* c) { delete c; }

int fx_certificate_to_json(const fx_certificate* c, char** out_json) {
  return guarded([&]() {
    if (!c || !out_json) throw std::invalid_argument("null argument");
    *out_json = dup_cstr(certificate_to_json(c->rc));
    return FX_OK;
  });
}

int fx_certificate_from_json(const char* json_text, fx_certificate** out) {
  return guarded([&]() {
    if (!json_text || !out) throw std::invalid_argument("null argument");
    auto h = std::make_unique<fx_certificate>();
    h->rc = certificate_from_json(json_text);
    *out = h.release();
    return FX_OK;
  });
}

int fx_certificate_check(const fx_certificate* c, long n_points,
                         unsigned long long seed, long precision_bits,
                         char** report_json) {
  return guarded([&]() {
    if (!c || !report_json) throw std::invalid_argument("null argument");
    if (n_points < 1) throw std::invalid_argument("n_points must be positive");
    mpfr_prec_t prec = pick_prec(precision_bits);
    CertReport rep = verify_certificate(c->rc.R, c->rc.cert, n_points, prec, seed);
    json j;
    j["pass"] = rep.pass;
    j["bounded_ok"] = rep.bounded_ok;
    j["squares"] = c->rc.cert.k_count;
    j["d_bound"] = c->rc.cert.d_bound;
    j["c_bound"] = c->rc.cert.c_bound.to_double();
    j["max_coeff_residual"] = rep.max_coeff_residual.to_double();
    j["max_coeff_residual_hex"] = rep.max_coeff_residual.to_hex();
    j["max_point_residual"] = rep.max_point_residual.to_double();
    j["max_point_residual_hex"] = rep.max_point_residual.to_hex();
    j["points_tested"] = rep.points_tested;
    if (!rep.note.empty()) j["note"] = rep.note;
    *report_json = dup_cstr(j.dump(2));
    return rep.pass ? FX_OK
                    : fail(FX_E_PROPERTY, "certificate re-check failed: " +
                                              (rep.note.empty() ? "residuals"
                                                                : rep.note));
  });
}

int fx_bench(const char* config_json, char** out_json) {
  return guarded([&]() {
    if (!config_json || !out_json) throw std::invalid_argument("null argument");
    json cfg = json::parse(config_json);
    std::vector<long> betas =
        cfg.contains("betas") ? cfg["betas"].get<std::vector<long>>()
                              : std::vector<long>{};
    if (!cfg.contains("eps"))
      throw std::invalid_argument("missing accuracy target eps");
    mpq_class eps = rational_from_json_field(cfg, "eps");
    if (eps <= 0 || eps >= 1)
      throw std::invalid_argument("eps must lie in (0, 1)");
    std::vector<BenchRow> rows = run_bench(betas, eps);
    json out;
    out["eps"] = mpq_num_str(eps) + "/" + mpq_den_str(eps);
    json arr = json::array();
    for (const BenchRow& r : rows) {
      json e;
      e["beta"] = r.beta;
      e["eps"] = mpq_num_str(r.eps) + "/" + mpq_den_str(r.eps);
      e["degree_ours"] = r.degree_ours;
      e["degree_baseline"] = r.degree_baseline;
      e["margin_ours"] = r.margin_ours;
      e["margin_baseline"] = r.margin_baseline;
      e["params"] = params_to_json(r.params);
      arr.push_back(std::move(e));
    }
    out["rows"] = arr;
    *out_json = dup_cstr(out.dump(2));
    return FX_OK;
  });
}

int fx_gibbs_demo(const char* config_json, char** report_json) {
  return guarded([&]() {
    if (!config_json || !report_json)
      throw std::invalid_argument("null argument");
    json cfg = json::parse(config_json);
    int n = cfg.value("n", 3);
    unsigned long long seed = cfg.value("seed", 1ULL);
    double beta = cfg.value("beta", 1.0);
    mpfr_prec_t prec = pick_prec(cfg.value("precision_bits", 0L));

    FlatParams params;
    mpq_class eps_threshold;
    if (cfg.contains("params")) {
      params = params_from_json(cfg.at("params"));
      params.validate();
      mpfr_get_q(eps_threshold.get_mpq_t(), params.eps(prec).hi.raw());
    } else {
      if (!cfg.contains("eps"))
        throw std::invalid_argument(
            "missing accuracy target: provide eps or explicit params");
      eps_threshold = rational_from_json_field(cfg, "eps");
      if (eps_threshold <= 0 || eps_threshold >= 1)
        throw std::invalid_argument("eps must lie in (0, 1)");
      // shrink delta until the realized window accuracy fits the target
      mpq_class delta = eps_threshold / 4;
      for (int tries = 0;; ++tries) {
        if (tries > 60)
          throw std::runtime_error("eps target unreachable by delta shrinking");
        params = bench_params(1, delta);
        BigFloat eff = params.eps(128).hi;
        if (mpfr_cmp_q(eff.raw(), eps_threshold.get_mpq_t()) <= 0) break;
        delta /= 2;
      }
    }

    FlatApproxResult built = build_Phat(params);
    realize_P(built, prec);
    Interval kap = built.params.kappa(prec);

    ToyHamiltonian ham = random_ring_hamiltonian(n, seed);
    DenseMatrix H = assemble_hamiltonian(ham.terms, ham.n_qubits);
    GibbsState gs = gibbs_state(H, beta);
    dd trace_err = dd_abs(gs.trace - dd(1.0));
    const double tol40 = 9.094947017729282e-13;  // 2^-40

    SpectralReport sr = spectral_approx_error(built.p_realized, H, beta, kap);

    bool err_ok =
        mpfr_cmp_q(sr.max_error.raw(), eps_threshold.get_mpq_t()) <= 0;
    bool trace_ok = trace_err.to_double() <= tol40;

    json j;
    j["n"] = n;
    j["seed"] = static_cast<std::uint64_t>(seed);
    j["beta"] = beta;
    j["terms"] = static_cast<long>(ham.terms.size());
    j["dual_graph_degree"] = ham.dual_graph_degree;
    j["params"] = params_to_json(built.params);
    j["degree"] = built.p_realized.degree();
    j["precision_bits"] = static_cast<long>(prec);
    j["kappa"] = interval_json(kap);
    j["eps_threshold"] =
        mpq_num_str(eps_threshold) + "/" + mpq_den_str(eps_threshold);
    j["rescale"] = sr.rescale;
    j["enclosure_radius"] = sr.enclosure_radius;
    j["eigenvalues"] = sr.eigs;
    j["rescaled"] = sr.rescaled;
    j["errors"] = sr.errors;
    j["max_error"] = sr.max_error.to_double();
    j["max_error_hex"] = sr.max_error.to_hex();
    j["trace_error"] = trace_err.to_double();
    j["pass"] = err_ok && trace_ok;
    *report_json = dup_cstr(j.dump(2));
    return (err_ok && trace_ok)
               ? FX_OK
               : fail(FX_E_PROPERTY,
                      err_ok ? "gibbs trace deviates from 1 beyond 2^-40"
                             : "spectral error exceeds the eps target");
  });
}

}  // extern "C"
