// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line binary. The test runner exports
// FLATEXP_CLI with the binary path; every case shells out and inspects exit
// codes and output files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "flat.hpp"
#include "jsonio.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("FLATEXP_CLI");
  REQUIRE_MESSAGE(p != nullptr, "FLATEXP_CLI must point at the binary");
  return p;
}

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("flatexp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& log_name = "run.log") {
  std::string cmd = cli_path() + " " + args + " > " +
                    (scratch() / log_name).string() + " 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing file: " + p.string()).c_str());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

njson load(const fs::path& p) { return njson::parse(slurp(p)); }

}  // namespace

TEST_CASE("construct with explicit unit-constant parameters") {
  fs::path out = scratch() / "t1";
  int rc = run("construct --beta 1 --delta e^-5 --c-ell 1 --c-s 1 --c-r 1 "
               "--c-k 1 --out " + out.string());
  CHECK(rc == 0);
  njson params = load(out.string() + ".params.json");
  CHECK(params.at("ell") == 10);
  CHECK(params.at("s") == 10);
  CHECK(params.at("r") == 10);
  CHECK(params.at("k") == 10);
  njson meta = load(out.string() + ".metadata.json");
  CHECK(meta.at("degree_p_hat") == 12);
  CHECK(meta.at("precision_bits") == 512);
  njson cons = load(out.string() + ".construction.json");
  CHECK(cons.at("format") == "flatexp-construction");

  // reruns are byte-identical
  std::string first = slurp(out.string() + ".construction.json");
  CHECK(run("construct --beta 1 --delta e^-5 --c-ell 1 --c-s 1 --c-r 1 "
            "--c-k 1 --out " + out.string()) == 0);
  CHECK(slurp(out.string() + ".construction.json") == first);
}

TEST_CASE("construct input validation") {
  // neither --delta nor --eps
  CHECK(run("construct --beta 1 --out " + (scratch() / "bad1").string()) == 2);
  // explicit dimensions above the degree cap are an input error
  CHECK(run("construct --beta 1 --delta 2^-8 --ell 6 --s 30000 --r 600 "
            "--k 30000 --cap 1000 --out " + (scratch() / "bad2").string()) == 2);
  // malformed delta
  CHECK(run("construct --beta 1 --delta zero --out " +
            (scratch() / "bad3").string()) == 2);
}

TEST_CASE("construct honors the precision flag and environment") {
  fs::path out = scratch() / "p1";
  CHECK(run("construct --beta 1 --delta e^-5 --c-ell 1 --c-s 1 --c-r 1 "
            "--c-k 1 --precision-bits 256 --out " + out.string()) == 0);
  CHECK(load(out.string() + ".metadata.json").at("precision_bits") == 256);

  fs::path out2 = scratch() / "p2";
  std::string cmd = "FLATEXP_PRECISION=192 " + cli_path() +
                    " construct --beta 1 --delta e^-5 --c-ell 1 --c-s 1 "
                    "--c-r 1 --c-k 1 --out " + out2.string() + " > " +
                    (scratch() / "env.log").string() + " 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(load(out2.string() + ".metadata.json").at("precision_bits") == 192);
}

TEST_CASE("verify splits pass and fail by requested check groups") {
  fs::path out = scratch() / "mid";
  REQUIRE(run("construct --beta 1 --delta 2^-6 --ell 8 --s 100 --r 36 --k 90 "
              "--out " + out.string()) == 0);

  fs::path rep = scratch() / "mid.report.json";
  int ok = run("verify --in " + out.string() + ".construction.json" +
               " --checks approx,flat --no-roots --grid 512,128,10,256 "
               "--out " + rep.string());
  CHECK(ok == 0);
  njson report = load(rep);
  CHECK(report.at("pass") == true);
  CHECK(report.at("records").size() >= 7);
  for (auto& r : report.at("records")) CHECK(r.at("passed") == true);
  CHECK(fs::exists(scratch() / "mid.report.margins.csv"));
  CHECK(fs::exists(scratch() / "mid.report.samples.csv"));

  // the truncation group fails here: k = 90 sits far below the window
  // degree, so the per-coefficient tail bound cannot absorb the cut
  fs::path rep2 = scratch() / "mid2.report.json";
  int bad = run("verify --in " + out.string() + ".construction.json" +
                " --checks trunc --grid 512,128,10,256 --out " + rep2.string());
  CHECK(bad == 1);
  njson report2 = load(rep2);
  CHECK(report2.at("pass") == false);

  // malformed grid
  CHECK(run("verify --in " + out.string() + ".construction.json --grid ,,, "
            "--out " + (scratch() / "g.json").string()) == 2);
  // unreadable input
  CHECK(run("verify --in " + (scratch() / "absent.json").string() + " --out " +
            (scratch() / "g2.json").string()) == 2);
}

TEST_CASE("certify and verify-cert round trip, tamper detection") {
  using namespace flatexp;
  fs::path poly = scratch() / "e6.json";
  {
    std::ofstream out(poly);
    out << to_json(build_E(6)).dump(2) << "\n";
  }
  fs::path cert = scratch() / "e6.cert.json";
  CHECK(run("certify --in " + poly.string() + " --out " + cert.string() +
            " --precision-bits 320") == 0);
  CHECK(run("verify-cert --in " + cert.string()) == 0);

  // flip one hex digit inside a square coefficient
  std::string text = slurp(cert);
  auto pos = text.find("0x1.");
  REQUIRE(pos != std::string::npos);
  text[pos + 4] = text[pos + 4] == 'f' ? 'e' : 'f';
  fs::path tampered = scratch() / "e6.tampered.json";
  {
    std::ofstream out(tampered, std::ios::binary);
    out << text;
  }
  CHECK(run("verify-cert --in " + tampered.string()) == 1);

  // certify straight from a construction file
  fs::path cons = scratch() / "t1.construction.json";
  if (!fs::exists(cons)) {
    REQUIRE(run("construct --beta 1 --delta e^-5 --c-ell 1 --c-s 1 --c-r 1 "
                "--c-k 1 --out " + (scratch() / "t1").string()) == 0);
  }
  fs::path cert2 = scratch() / "t1.cert.json";
  CHECK(run("certify --in " + cons.string() + " --out " + cert2.string() +
            " --precision-bits 320") == 0);
  CHECK(run("verify-cert --in " + cert2.string()) == 0);
  njson c2 = njson::parse(slurp(cert2));
  CHECK(c2.at("provenance").at("k") == 10);
}

TEST_CASE("bench writes a degree table") {
  fs::path csv = scratch() / "bench.csv";
  CHECK(run("bench --beta 2 --eps 1/1000 --out " + csv.string()) == 0);
  std::string text = slurp(csv);
  std::istringstream lines(text);
  std::string header, row, extra;
  REQUIRE(std::getline(lines, header));
  CHECK(header ==
        "beta,eps,degree_ours,degree_baseline,margin_ours,margin_baseline");
  REQUIRE(std::getline(lines, row));
  CHECK(row.rfind("2,", 0) == 0);
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(fs::exists(scratch() / "bench.csv.json"));

  // empty range: header only, still success
  fs::path csv2 = scratch() / "bench_empty.csv";
  CHECK(run("bench --beta \"\" --out " + csv2.string()) == 0);
  std::string text2 = slurp(csv2);
  CHECK(text2.rfind("beta,eps", 0) == 0);
  CHECK(text2.find('\n') == text2.size() - 1);
}

TEST_CASE("gibbs demo runs deterministically") {
  fs::path rep = scratch() / "g.json";
  CHECK(run("demo-gibbs --n 3 --seed 7 --beta 1 --eps 1/1000 --out " +
            rep.string()) == 0);
  njson report = load(rep);
  CHECK(report.at("pass") == true);
  CHECK(report.at("n") == 3);
  CHECK(report.at("seed") == 7);
  CHECK(report.at("eigenvalues").size() == 8);
  CHECK(report.at("max_error").get<double>() <= 1e-3);
  CHECK(report.at("trace_error").get<double>() <= 9.1e-13);

  std::string first = slurp(rep);
  CHECK(run("demo-gibbs --n 3 --seed 7 --beta 1 --eps 1/1000 --out " +
            rep.string()) == 0);
  CHECK(slurp(rep) == first);
}

TEST_CASE("config dump and reload round trip") {
  fs::path c1 = scratch() / "cfg1.json";
  fs::path c2 = scratch() / "cfg2.json";
  CHECK(run("--dump-config " + c1.string()) == 0);
  CHECK(run("--config " + c1.string() + " --dump-config " + c2.string()) == 0);
  CHECK(slurp(c1) == slurp(c2));
  njson cfg = load(c1);
  CHECK(cfg.at("beta") == "1");
  CHECK(cfg.at("grid") == "default");
}

TEST_CASE("usage errors") {
  CHECK(run("definitely-not-a-command") == 2);
  CHECK(run("--help") == 0);
  CHECK(run("construct --help") == 0);
}
