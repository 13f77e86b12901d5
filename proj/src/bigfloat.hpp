// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// RAII wrapper over MPFR with explicit precision and rounding control.

#pragma once

#include <mpfr.h>
#include <gmpxx.h>
#include <cstdint>
#include <string>
#include <stdexcept>
#include <utility>

namespace flatexp {

class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 128) { mpfr_init2(v_, prec); mpfr_set_nan(v_); }
  BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  BigFloat(BigFloat&& o) noexcept { mpfr_init2(v_, 2); mpfr_swap(v_, o.v_); }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

  static BigFloat from_long(long x, mpfr_prec_t prec) {
    BigFloat r(prec); mpfr_set_si(r.v_, x, MPFR_RNDN); return r;
  }
  static BigFloat from_double(double x, mpfr_prec_t prec) {
    BigFloat r(prec); mpfr_set_d(r.v_, x, MPFR_RNDN); return r;
  }
  static BigFloat from_mpq(const mpq_class& q, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    BigFloat r(prec); mpfr_set_q(r.v_, q.get_mpq_t(), rnd); return r;
  }
  static BigFloat from_mpz(const mpz_class& z, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    BigFloat r(prec); mpfr_set_z(r.v_, z.get_mpz_t(), rnd); return r;
  }

  // Hexadecimal round-trip format ("0x1.9fp+3"). Parsing accepts what printing emits.
  std::string to_hex() const {
    char* s = nullptr;
    mpfr_asprintf(&s, "%Ra", v_);
    std::string out(s);
    mpfr_free_str(s);
    return out;
  }
  static BigFloat from_hex(const std::string& s, mpfr_prec_t prec) {
    BigFloat r(prec);
    if (mpfr_set_str(r.v_, s.c_str(), 0, MPFR_RNDN) != 0)
      throw std::invalid_argument("BigFloat: bad hex float literal: " + s);
    return r;
  }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  int cmp(const BigFloat& o) const { return mpfr_cmp(v_, o.v_); }
  bool operator<(const BigFloat& o) const { return cmp(o) < 0; }
  bool operator<=(const BigFloat& o) const { return cmp(o) <= 0; }
  bool operator>(const BigFloat& o) const { return cmp(o) > 0; }
  bool operator>=(const BigFloat& o) const { return cmp(o) >= 0; }
  bool operator==(const BigFloat& o) const { return cmp(o) == 0; }

  static BigFloat add(const BigFloat& a, const BigFloat& b, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN) {
    BigFloat out(p); mpfr_add(out.v_, a.v_, b.v_, r); return out;
  }
  static BigFloat sub(const BigFloat& a, const BigFloat& b, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN) {
    BigFloat out(p); mpfr_sub(out.v_, a.v_, b.v_, r); return out;
  }
  static BigFloat mul(const BigFloat& a, const BigFloat& b, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN) {
    BigFloat out(p); mpfr_mul(out.v_, a.v_, b.v_, r); return out;
  }
  static BigFloat div(const BigFloat& a, const BigFloat& b, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN) {
    BigFloat out(p); mpfr_div(out.v_, a.v_, b.v_, r); return out;
  }
  static BigFloat neg(const BigFloat& a) {
    BigFloat out(a.prec()); mpfr_neg(out.v_, a.v_, MPFR_RNDN); return out;
  }
  static BigFloat abs(const BigFloat& a) {
    BigFloat out(a.prec()); mpfr_abs(out.v_, a.v_, MPFR_RNDN); return out;
  }
  static BigFloat sqrt(const BigFloat& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN) {
    BigFloat out(p); mpfr_sqrt(out.v_, a.v_, r); return out;
  }
  static BigFloat exp(const BigFloat& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN) {
    BigFloat out(p); mpfr_exp(out.v_, a.v_, r); return out;
  }
  static BigFloat log(const BigFloat& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN) {
    BigFloat out(p); mpfr_log(out.v_, a.v_, r); return out;
  }
  static BigFloat cos(const BigFloat& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN) {
    BigFloat out(p); mpfr_cos(out.v_, a.v_, r); return out;
  }
  static BigFloat acos(const BigFloat& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN) {
    BigFloat out(p); mpfr_acos(out.v_, a.v_, r); return out;
  }
  static BigFloat pow_ui(const BigFloat& a, unsigned long e, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN) {
    BigFloat out(p); mpfr_pow_ui(out.v_, a.v_, e, r); return out;
  }
  static BigFloat mul_2si(const BigFloat& a, long e) {
    BigFloat out(a.prec()); mpfr_mul_2si(out.v_, a.v_, e, MPFR_RNDN); return out;
  }

  // exponent of the leading bit; 0 for zero/nan
  long exp2() const { return (is_zero() || is_nan()) ? 0 : mpfr_get_exp(v_); }

 private:
  mpfr_t v_;
};

}  // namespace flatexp
