// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the core exclusively through the C API;
// everything here is flag parsing, file plumbing and report formatting.
//
// Exit codes: 0 pass, 1 property failure, 2 input error, 3 numeric failure.

#include "flatexp/flatexp.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;

namespace {

// Effective settings of one invocation; round-trips through JSON so a run
// can be replayed from a file.
struct RunConfig {
  std::string command;
  std::string beta = "1";
  std::string delta;
  std::string eps;
  long ell = 0, s = 0, r = 0, k = 0;  // 0 = not set (valid values are even >= 2)
  std::string c_ell, c_s, c_r, c_k;
  bool paper_constants = false;
  std::string in_path;
  std::string out_path;
  std::string params_path;   // demo-gibbs: explicit construction parameters
  long precision_bits = 0;   // 0 = env FLATEXP_PRECISION, then library default
  std::string grid = "default";
  std::string checks = "approx,trunc,flat";
  bool no_roots = false;
  unsigned long long seed = 1;
  long cap = 20000;
  long n = 3;
  long points = 100;
};

json config_to_json(const RunConfig& rc) {
  json j;
  j["command"] = rc.command;
  j["beta"] = rc.beta;
  j["delta"] = rc.delta;
  j["eps"] = rc.eps;
  j["ell"] = rc.ell;
  j["s"] = rc.s;
  j["r"] = rc.r;
  j["k"] = rc.k;
  j["c_ell"] = rc.c_ell;
  j["c_s"] = rc.c_s;
  j["c_r"] = rc.c_r;
  j["c_k"] = rc.c_k;
  j["paper_constants"] = rc.paper_constants;
  j["in"] = rc.in_path;
  j["out"] = rc.out_path;
  j["params"] = rc.params_path;
  j["precision_bits"] = rc.precision_bits;
  j["grid"] = rc.grid;
  j["checks"] = rc.checks;
  j["no_roots"] = rc.no_roots;
  j["seed"] = rc.seed;
  j["cap"] = rc.cap;
  j["n"] = rc.n;
  j["points"] = rc.points;
  return j;
}

void config_from_json(const json& j, RunConfig& rc) {
  rc.command = j.value("command", rc.command);
  rc.beta = j.value("beta", rc.beta);
  rc.delta = j.value("delta", rc.delta);
  rc.eps = j.value("eps", rc.eps);
  rc.ell = j.value("ell", rc.ell);
  rc.s = j.value("s", rc.s);
  rc.r = j.value("r", rc.r);
  rc.k = j.value("k", rc.k);
  rc.c_ell = j.value("c_ell", rc.c_ell);
  rc.c_s = j.value("c_s", rc.c_s);
  rc.c_r = j.value("c_r", rc.c_r);
  rc.c_k = j.value("c_k", rc.c_k);
  rc.paper_constants = j.value("paper_constants", rc.paper_constants);
  rc.in_path = j.value("in", rc.in_path);
  rc.out_path = j.value("out", rc.out_path);
  rc.params_path = j.value("params", rc.params_path);
  rc.precision_bits = j.value("precision_bits", rc.precision_bits);
  rc.grid = j.value("grid", rc.grid);
  rc.checks = j.value("checks", rc.checks);
  rc.no_roots = j.value("no_roots", rc.no_roots);
  rc.seed = j.value("seed", rc.seed);
  rc.cap = j.value("cap", rc.cap);
  rc.n = j.value("n", rc.n);
  rc.points = j.value("points", rc.points);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_atomic(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

// Wraps a char* from the library so it is always released.
struct OwnedStr {
  char* p = nullptr;
  ~OwnedStr() { fx_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

int report_library_error(int rc) {
  std::fprintf(stderr, "error: %s\n", fx_last_error());
  return rc;
}

std::string stem_of(const std::string& path) {
  if (path.size() > 5 && path.compare(path.size() - 5, 5, ".json") == 0)
    return path.substr(0, path.size() - 5);
  return path;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

long effective_precision(const RunConfig& rc) {
  if (rc.precision_bits > 0) return rc.precision_bits;
  if (const char* env = std::getenv("FLATEXP_PRECISION")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    std::fprintf(stderr, "warning: ignoring malformed FLATEXP_PRECISION=%s\n", env);
  }
  return 0;  // library default
}

// ---- construct ----

int run_construct(const RunConfig& rc) {
  bool explicit_dims = rc.ell || rc.s || rc.r || rc.k;
  bool any_override =
      !rc.c_ell.empty() || !rc.c_s.empty() || !rc.c_r.empty() || !rc.c_k.empty();
  if (rc.paper_constants && any_override) {
    std::fprintf(stderr,
                 "error: --paper-constants and --c-* overrides are mutually exclusive\n");
    return FX_E_INPUT;
  }
  if (rc.paper_constants && explicit_dims) {
    std::fprintf(stderr,
                 "error: --paper-constants contradicts explicit --ell/--s/--r/--k\n");
    return FX_E_INPUT;
  }
  if (rc.delta.empty() && rc.eps.empty()) {
    std::fprintf(stderr,
                 "error: missing accuracy target: provide --delta or --eps\n");
    return FX_E_INPUT;
  }
  std::string delta = rc.delta;
  if (delta.empty()) {
    // pick delta = 2^-m so the realized window accuracy 3 delta e^{2 kappa}
    // sits at or below the requested eps
    double eps_d = 0.0;
    std::vector<std::string> frac = split(rc.eps, '/');
    if (frac.size() == 2)
      eps_d = std::strtod(frac[0].c_str(), nullptr) /
              std::strtod(frac[1].c_str(), nullptr);
    else
      eps_d = std::strtod(rc.eps.c_str(), nullptr);
    if (!(eps_d > 0) || eps_d >= 1) {
      std::fprintf(stderr, "error: eps must lie in (0, 1)\n");
      return FX_E_INPUT;
    }
    long m = 2;
    while (m < 4000 && 3.0 * std::exp2(-double(m)) *
                               std::exp(2.0 * double(m) * 0.00693147181) >
                           eps_d)
      ++m;
    delta = "2^-" + std::to_string(m);
    std::printf("eps %s mapped to delta %s\n", rc.eps.c_str(), delta.c_str());
  }

  std::string out = rc.out_path.empty() ? "flatexp-out" : stem_of(rc.out_path);
  long prec = effective_precision(rc);

  json params;
  if (explicit_dims) {
    if (!(rc.ell && rc.s && rc.r && rc.k)) {
      std::fprintf(stderr, "error: provide all of --ell --s --r --k or none\n");
      return FX_E_INPUT;
    }
    params["beta"] = rc.beta;
    params["delta"] = delta;
    params["ell"] = rc.ell;
    params["s"] = rc.s;
    params["r"] = rc.r;
    params["k"] = rc.k;
  } else {
    json req;
    req["beta"] = rc.beta;
    req["delta"] = delta;
    if (rc.paper_constants) {
      req["paper_constants"] = true;
    } else {
      json o;
      o["c_ell"] = rc.c_ell.empty() ? "1" : rc.c_ell;
      o["c_s"] = rc.c_s.empty() ? "1" : rc.c_s;
      o["c_r"] = rc.c_r.empty() ? "1" : rc.c_r;
      o["c_k"] = rc.c_k.empty() ? "1" : rc.c_k;
      req["overrides"] = o;
    }
    OwnedStr sel;
    int code = fx_select_params(req.dump().c_str(), &sel.p);
    if (code != FX_OK) return report_library_error(code);
    params = json::parse(sel.str());
    std::printf("selected parameters: ell=%ld s=%ld r=%ld k=%ld degree=%ld\n",
                params.value("ell", 0L), params.value("s", 0L),
                params.value("r", 0L), params.value("k", 0L),
                params.value("degree", 0L));
  }
  // the cap also covers the intermediate composition, whose degree r*ell
  // dominates the build cost
  long degree = std::max(params.value("k", 0L) + 2,
                         params.value("r", 0L) * params.value("ell", 0L));
  if (degree > rc.cap) {
    if (!explicit_dims) {
      write_atomic(out + ".params.json", params.dump(2) + "\n");
      std::printf(
          "construction refused: degree %ld exceeds the cap %ld "
          "(raise --cap to force); parameter report written to %s\n",
          degree, rc.cap, (out + ".params.json").c_str());
      // in paper-constants mode the parameter report is the documented
      // outcome; an oversized derived request is an input error
      return rc.paper_constants ? FX_OK : FX_E_INPUT;
    }
    std::fprintf(stderr, "error: degree %ld exceeds the cap %ld (raise --cap)\n",
                 degree, rc.cap);
    return FX_E_INPUT;
  }

  fx_construction* h = nullptr;
  int code = fx_construct(params.dump().c_str(), prec, &h);
  if (code != FX_OK) return report_library_error(code);
  std::unique_ptr<fx_construction, decltype(&fx_construction_free)> guard(
      h, fx_construction_free);

  struct Piece {
    const char* suffix;
    int (*emit)(const fx_construction*, char**);
  } pieces[] = {
      {".params.json", fx_construction_params_json},
      {".construction.json", fx_construction_hat_json},
      {".realized.json", fx_construction_realized_json},
      {".metadata.json", fx_construction_metadata_json},
  };
  for (const Piece& piece : pieces) {
    OwnedStr text;
    code = piece.emit(h, &text.p);
    if (code != FX_OK) return report_library_error(code);
    write_atomic(out + piece.suffix, text.str() + "\n");
    std::printf("wrote %s%s\n", out.c_str(), piece.suffix);
  }
  return FX_OK;
}

// ---- verify ----

int run_verify(const RunConfig& rc) {
  if (rc.in_path.empty()) {
    std::fprintf(stderr, "error: verify needs --in <construction.json>\n");
    return FX_E_INPUT;
  }
  json options;
  if (rc.grid != "default") {
    std::vector<std::string> parts = split(rc.grid, ',');
    if (rc.grid.empty() || parts.size() != 4) {
      std::fprintf(stderr,
                   "error: --grid wants \"window_points,log_points_per_decade,"
                   "tail_factor,trunc_points\", got \"%s\"\n",
                   rc.grid.c_str());
      return FX_E_INPUT;
    }
    options["window_points"] = std::strtol(parts[0].c_str(), nullptr, 10);
    options["log_points_per_decade"] = std::strtol(parts[1].c_str(), nullptr, 10);
    options["tail_factor"] = std::strtol(parts[2].c_str(), nullptr, 10);
    options["trunc_points"] = std::strtol(parts[3].c_str(), nullptr, 10);
  }
  options["certify_roots"] = !rc.no_roots;
  json checks = json::array();
  for (const std::string& c : split(rc.checks, ','))
    if (!c.empty()) checks.push_back(c);
  options["checks"] = checks;

  fx_construction* h = nullptr;
  int code =
      fx_construction_from_hat_json(slurp(rc.in_path).c_str(),
                                    effective_precision(rc), &h);
  if (code != FX_OK) return report_library_error(code);
  std::unique_ptr<fx_construction, decltype(&fx_construction_free)> guard(
      h, fx_construction_free);

  OwnedStr report;
  code = fx_verify(h, options.dump().c_str(), &report.p);
  if (code != FX_OK && code != FX_E_PROPERTY) return report_library_error(code);

  std::string out = rc.out_path.empty() ? "flatexp-report.json" : rc.out_path;
  write_atomic(out, report.str() + "\n");

  json rep = json::parse(report.str());
  std::string csv = "name,passed,rigorous,margin,worst_x\n";
  for (const json& r : rep["records"]) {
    char line[256];
    std::snprintf(line, sizeof line, "%s,%d,%d,%.17g,%.17g\n",
                  r.value("name", "").c_str(), int(r.value("passed", false)),
                  int(r.value("rigorous", false)), r.value("margin", 0.0),
                  r.value("worst_x", 0.0));
    csv += line;
  }
  write_atomic(stem_of(out) + ".margins.csv", csv);

  OwnedStr samples;
  if (fx_sample_csv(h, 256, &samples.p) == FX_OK)
    write_atomic(stem_of(out) + ".samples.csv", samples.str());

  for (const json& r : rep["records"])
    std::printf("%-28s %s  margin=%.3e\n", r.value("name", "").c_str(),
                r.value("passed", false) ? "pass" : "FAIL",
                r.value("margin", 0.0));
  std::printf("verify: %s (report %s)\n",
              rep.value("pass", false) ? "all properties hold" : "FAILURES",
              out.c_str());
  return code;
}

// ---- certify / verify-cert ----

int run_certify(const RunConfig& rc) {
  if (rc.in_path.empty()) {
    std::fprintf(stderr,
                 "error: certify needs --in <construction.json or poly.json>\n");
    return FX_E_INPUT;
  }
  std::string text = slurp(rc.in_path);
  long prec = effective_precision(rc);

  fx_certificate* cert = nullptr;
  int code;
  if (text.find("\"flatexp-construction\"") != std::string::npos) {
    fx_construction* h = nullptr;
    code = fx_construction_from_hat_json(text.c_str(), prec, &h);
    if (code != FX_OK) return report_library_error(code);
    std::unique_ptr<fx_construction, decltype(&fx_construction_free)> guard(
        h, fx_construction_free);
    code = fx_certify_construction(h, prec, rc.seed, &cert);
  } else {
    code = fx_certify_poly(text.c_str(), prec, rc.seed, &cert);
  }
  if (code != FX_OK) return report_library_error(code);
  std::unique_ptr<fx_certificate, decltype(&fx_certificate_free)> guard(
      cert, fx_certificate_free);

  OwnedStr cert_json;
  code = fx_certificate_to_json(cert, &cert_json.p);
  if (code != FX_OK) return report_library_error(code);
  std::string out = rc.out_path.empty() ? "certificate.json" : rc.out_path;
  write_atomic(out, cert_json.str() + "\n");
  std::printf("wrote %s\n", out.c_str());

  OwnedStr report;
  code = fx_certificate_check(cert, rc.points, rc.seed, prec, &report.p);
  if (code != FX_OK && code != FX_E_PROPERTY) return report_library_error(code);
  json rep = json::parse(report.str());
  std::printf("squares=%ld  coeff residual=%.3e  point residual=%.3e  %s\n",
              rep.value("squares", 0L), rep.value("max_coeff_residual", 0.0),
              rep.value("max_point_residual", 0.0),
              rep.value("pass", false) ? "pass" : "FAIL");
  return code;
}

int run_verify_cert(const RunConfig& rc) {
  if (rc.in_path.empty()) {
    std::fprintf(stderr, "error: verify-cert needs --in <certificate.json>\n");
    return FX_E_INPUT;
  }
  fx_certificate* cert = nullptr;
  int code = fx_certificate_from_json(slurp(rc.in_path).c_str(), &cert);
  if (code != FX_OK) return report_library_error(code);
  std::unique_ptr<fx_certificate, decltype(&fx_certificate_free)> guard(
      cert, fx_certificate_free);

  OwnedStr report;
  code = fx_certificate_check(cert, rc.points, rc.seed,
                              effective_precision(rc), &report.p);
  if (code != FX_OK && code != FX_E_PROPERTY) return report_library_error(code);
  if (!rc.out_path.empty()) write_atomic(rc.out_path, report.str() + "\n");
  json rep = json::parse(report.str());
  std::printf("certificate %s: %s (coeff residual %.3e, point residual %.3e)\n",
              rc.in_path.c_str(), rep.value("pass", false) ? "pass" : "FAIL",
              rep.value("max_coeff_residual", 0.0),
              rep.value("max_point_residual", 0.0));
  return code;
}

// ---- bench ----

int run_bench(const RunConfig& rc) {
  // --beta accepts "1..5", "1,2,3" or "4"
  std::vector<long> betas;
  if (!rc.beta.empty()) {
    size_t dots = rc.beta.find("..");
    if (dots != std::string::npos) {
      long a = std::strtol(rc.beta.substr(0, dots).c_str(), nullptr, 10);
      long b = std::strtol(rc.beta.substr(dots + 2).c_str(), nullptr, 10);
      for (long v = a; v <= b; ++v) betas.push_back(v);
    } else {
      for (const std::string& part : split(rc.beta, ','))
        if (!part.empty())
          betas.push_back(std::strtol(part.c_str(), nullptr, 10));
    }
  }
  std::string eps = rc.eps.empty() ? "1/1000" : rc.eps;

  std::string csv =
      "beta,eps,degree_ours,degree_baseline,margin_ours,margin_baseline\n";
  json tables = json::array();
  for (const std::string& eps_part : split(eps, ',')) {
    if (eps_part.empty()) continue;
    json cfg;
    cfg["betas"] = betas;
    cfg["eps"] = eps_part;
    OwnedStr table;
    int code = fx_bench(cfg.dump().c_str(), &table.p);
    if (code != FX_OK) return report_library_error(code);
    json t = json::parse(table.str());
    tables.push_back(t);
    for (const json& row : t["rows"]) {
      char line[256];
      std::snprintf(line, sizeof line, "%ld,%s,%ld,%ld,%.17g,%.17g\n",
                    row.value("beta", 0L), row.value("eps", "").c_str(),
                    row.value("degree_ours", 0L),
                    row.value("degree_baseline", 0L),
                    row.value("margin_ours", 0.0),
                    row.value("margin_baseline", 0.0));
      csv += line;
      std::printf("%s", line);
    }
  }
  std::string out = rc.out_path.empty() ? "bench.csv" : rc.out_path;
  write_atomic(out, csv);
  write_atomic(stem_of(out) + ".json", tables.dump(2) + "\n");
  std::printf("wrote %s\n", out.c_str());
  return FX_OK;
}

// ---- demo-gibbs ----

int run_demo_gibbs(const RunConfig& rc) {
  if (rc.eps.empty() && rc.params_path.empty()) {
    std::fprintf(stderr,
                 "error: missing accuracy target: provide --eps or --params\n");
    return FX_E_INPUT;
  }
  // rational or decimal text -> double for the Gibbs inverse temperature
  double beta;
  {
    std::vector<std::string> frac = split(rc.beta, '/');
    beta = frac.size() == 2 ? std::strtod(frac[0].c_str(), nullptr) /
                                  std::strtod(frac[1].c_str(), nullptr)
                            : std::strtod(rc.beta.c_str(), nullptr);
  }
  json cfg;
  cfg["n"] = rc.n;
  cfg["seed"] = rc.seed;
  cfg["beta"] = beta;
  if (!rc.eps.empty()) cfg["eps"] = rc.eps;
  if (!rc.params_path.empty()) {
    json file = json::parse(slurp(rc.params_path));
    // accept a bare parameter file or a construction file
    cfg["params"] = file.contains("params") ? file["params"] : file;
  }
  if (long prec = effective_precision(rc)) cfg["precision_bits"] = prec;

  OwnedStr report;
  int code = fx_gibbs_demo(cfg.dump().c_str(), &report.p);
  if (code != FX_OK && code != FX_E_PROPERTY) return report_library_error(code);
  std::string out = rc.out_path.empty() ? "gibbs-report.json" : rc.out_path;
  write_atomic(out, report.str() + "\n");
  json rep = json::parse(report.str());
  std::printf(
      "n=%ld seed=%llu beta=%.6g: max spectral error %.3e (threshold %s), "
      "trace error %.3e, rescale %.6g -> %s\n",
      rc.n, rc.seed, beta, rep.value("max_error", 0.0),
      rep.value("eps_threshold", "").c_str(), rep.value("trace_error", 0.0),
      rep.value("rescale", 0.0), rep.value("pass", false) ? "pass" : "FAIL");
  std::printf("wrote %s\n", out.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig rc;

  // --config seeds the defaults; explicit flags then override
  std::string config_path, dump_config_path;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc)
      config_path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      config_path = arg.substr(9);
  }
  if (!config_path.empty()) {
    try {
      config_from_json(json::parse(slurp(config_path)), rc);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: bad --config file: %s\n", e.what());
      return FX_E_INPUT;
    }
  }

  CLI::App app{"flat exponential approximation toolkit"};
  app.require_subcommand(0, 1);
  std::string sink;
  app.add_option("--config", sink, "JSON run configuration (defaults; flags override)");
  app.add_option("--dump-config", dump_config_path,
                 "write the effective configuration JSON, then run");

  auto add_common = [&rc](CLI::App* cmd) {
    cmd->add_option("--precision-bits", rc.precision_bits,
                    "working precision (0: FLATEXP_PRECISION or 512)");
    cmd->add_option("--seed", rc.seed, "seed for randomized stages");
    cmd->add_option("--out", rc.out_path, "output path (or prefix)");
  };

  CLI::App* c_construct =
      app.add_subcommand("construct", "build the approximation polynomial");
  c_construct->add_option("--beta", rc.beta, "inverse-temperature parameter");
  c_construct->add_option("--delta", rc.delta, "accuracy (e.g. 2^-8, e^-10, 1/256)");
  c_construct->add_option("--eps", rc.eps, "window accuracy target (picks delta)");
  c_construct->add_option("--ell", rc.ell, "explicit ell (even)");
  c_construct->add_option("--s", rc.s, "explicit s (even)");
  c_construct->add_option("--r", rc.r, "explicit r (even)");
  c_construct->add_option("--k", rc.k, "explicit k (even)");
  c_construct->add_option("--c-ell", rc.c_ell, "override constant for ell");
  c_construct->add_option("--c-s", rc.c_s, "override constant for s");
  c_construct->add_option("--c-r", rc.c_r, "override constant for r");
  c_construct->add_option("--c-k", rc.c_k, "override constant for k");
  c_construct->add_flag("--paper-constants", rc.paper_constants,
                        "use the published constants (parameter report only "
                        "above the degree cap)");
  c_construct->add_option("--cap", rc.cap,
                          "safety cap on max(k+2, r*ell), the largest degree "
                          "the build materializes");
  add_common(c_construct);

  CLI::App* c_verify =
      app.add_subcommand("verify", "check the inequality properties");
  c_verify->add_option("--in", rc.in_path, "construction JSON");
  c_verify->add_option("--grid", rc.grid,
                       "window_points,log_points_per_decade,tail_factor,trunc_points");
  c_verify->add_option("--checks", rc.checks, "comma list of approx,trunc,flat");
  c_verify->add_flag("--no-roots", rc.no_roots, "skip real-root exclusion");
  add_common(c_verify);

  CLI::App* c_certify =
      app.add_subcommand("certify", "build the sum-of-squares certificate");
  c_certify->add_option("--in", rc.in_path, "construction or polynomial JSON");
  c_certify->add_option("--points", rc.points, "verification sample points");
  add_common(c_certify);

  CLI::App* c_vcert =
      app.add_subcommand("verify-cert", "re-check a certificate file");
  c_vcert->add_option("--in", rc.in_path, "certificate JSON");
  c_vcert->add_option("--points", rc.points, "verification sample points");
  add_common(c_vcert);

  CLI::App* c_bench =
      app.add_subcommand("bench", "degree comparison against the baseline");
  c_bench->add_option("--beta", rc.beta, "range 1..5 or list 1,2,3");
  c_bench->add_option("--eps", rc.eps, "accuracy targets, comma separated");
  add_common(c_bench);

  CLI::App* c_gibbs = app.add_subcommand(
      "demo-gibbs", "spectral accuracy on a random ring Hamiltonian");
  c_gibbs->add_option("--n", rc.n, "qubits (1..10)");
  c_gibbs->add_option("--beta", rc.beta, "Gibbs inverse temperature");
  c_gibbs->add_option("--eps", rc.eps, "spectral accuracy target");
  c_gibbs->add_option("--params", rc.params_path,
                      "explicit construction parameter JSON (overrides --eps)");
  add_common(c_gibbs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return FX_E_INPUT;
  }

  for (CLI::App* sub : app.get_subcommands())
    rc.command = sub->get_name();

  if (!dump_config_path.empty()) {
    try {
      write_atomic(dump_config_path, config_to_json(rc).dump(2) + "\n");
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return FX_E_INPUT;
    }
    if (rc.command.empty()) return FX_OK;
  }
  if (rc.command.empty()) {
    std::fprintf(stderr, "error: no command given (see --help)\n");
    return FX_E_INPUT;
  }

  try {
    if (rc.command == "construct") return run_construct(rc);
    if (rc.command == "verify") return run_verify(rc);
    if (rc.command == "certify") return run_certify(rc);
    if (rc.command == "verify-cert") return run_verify_cert(rc);
    if (rc.command == "bench") return run_bench(rc);
    if (rc.command == "demo-gibbs") return run_demo_gibbs(rc);
    std::fprintf(stderr, "error: unknown command %s\n", rc.command.c_str());
    return FX_E_INPUT;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return FX_E_INPUT;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return FX_E_INPUT;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return FX_E_NUMERIC;
  }
}
