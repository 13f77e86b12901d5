// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0

#include "jsonio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flatexp {

std::string mpq_num_str(const mpq_class& q) { return q.get_num().get_str(); }
std::string mpq_den_str(const mpq_class& q) { return q.get_den().get_str(); }

mpq_class mpq_from_strings(const std::string& num, const std::string& den) {
  // base 10 always: the default base-0 constructor reads 0-prefixed
  // strings as octal
  mpq_class q{mpz_class(num, 10), mpz_class(den, 10)};
  q.canonicalize();
  return q;
}

mpq_class mpq_from_decimal(const std::string& s) {
  // plain integer, num/den, or decimal point form; exact in all cases
  auto slash = s.find('/');
  if (slash != std::string::npos)
    return mpq_from_strings(s.substr(0, slash), s.substr(slash + 1));
  auto caret = s.find('^');
  if (caret != std::string::npos && s.rfind("2^", 0) == 0) {
    long e = std::stol(s.substr(caret + 1));
    mpq_class q(1);
    mpz_class two(2), p;
    mpz_pow_ui(p.get_mpz_t(), two.get_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
    if (e < 0) q = mpq_class(1) / mpq_class(p);
    else q = mpq_class(p);
    return q;
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return mpq_class(mpz_class(s, 10));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  size_t frac = s.size() - dot - 1;
  mpz_class num(digits, 10), den(1);
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

json to_json(const RationalPoly& p) {
  json j;
  j["vars"] = 1;
  json arr = json::array();
  for (auto& q : p.c) arr.push_back(json::array({mpq_num_str(q), mpq_den_str(q)}));
  j["coeffs"] = arr;
  return j;
}

RationalPoly rational_poly_from_json(const json& j) {
  if (j.value("vars", 1) != 1) throw std::invalid_argument("expected a univariate polynomial");
  RationalPoly p;
  for (auto& e : j.at("coeffs"))
    p.c.push_back(mpq_from_strings(e.at(0).get<std::string>(), e.at(1).get<std::string>()));
  p.canonicalize();
  return p;
}

json to_json(const RationalPoly2& p) {
  json j;
  j["vars"] = 2;
  json arr = json::array();
  for (auto& [k, v] : p.c) {
    json e;
    e["dx"] = k.first;
    e["dy"] = k.second;
    e["num"] = mpq_num_str(v);
    e["den"] = mpq_den_str(v);
    arr.push_back(e);
  }
  j["coeffs"] = arr;
  return j;
}

RationalPoly2 rational_poly2_from_json(const json& j) {
  if (j.value("vars", 2) != 2) throw std::invalid_argument("expected a bivariate polynomial");
  RationalPoly2 p;
  for (auto& e : j.at("coeffs"))
    p.set(e.at("dx").get<int>(), e.at("dy").get<int>(),
          mpq_from_strings(e.at("num").get<std::string>(), e.at("den").get<std::string>()));
  return p;
}

json to_json(const BigPoly& p) {
  json j;
  j["vars"] = 1;
  j["precision_bits"] = static_cast<long>(p.precision_bits);
  json arr = json::array();
  for (auto& v : p.c) arr.push_back(v.to_hex());
  j["coeffs"] = arr;
  return j;
}

BigPoly big_poly_from_json(const json& j) {
  BigPoly p;
  p.precision_bits = j.at("precision_bits").get<long>();
  for (auto& e : j.at("coeffs"))
    p.c.push_back(BigFloat::from_hex(e.get<std::string>(), p.precision_bits));
  return p;
}

json to_json(const BigPoly2& p) {
  json j;
  j["vars"] = 2;
  j["precision_bits"] = static_cast<long>(p.precision_bits);
  json arr = json::array();
  for (auto& [k, v] : p.c) {
    json e;
    e["dx"] = k.first;
    e["dy"] = k.second;
    e["c"] = v.to_hex();
    arr.push_back(e);
  }
  j["coeffs"] = arr;
  return j;
}

BigPoly2 big_poly2_from_json(const json& j) {
  BigPoly2 p;
  p.precision_bits = j.at("precision_bits").get<long>();
  for (auto& e : j.at("coeffs"))
    p.c.emplace(std::make_pair(e.at("dx").get<int>(), e.at("dy").get<int>()),
                BigFloat::from_hex(e.at("c").get<std::string>(), p.precision_bits));
  return p;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("short write: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace flatexp
