// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON (de)serialization for polynomial types and atomic file output.
//
// Formats:
//   rational univariate: {"vars":1, "coeffs":[["num","den"], ...]}   index = degree
//   rational bivariate:  {"vars":2, "coeffs":[{"dx":i,"dy":j,"num":"..","den":".."}, ...]}
//   big-float polys use hexadecimal float strings plus "precision_bits".

#pragma once

#include "poly.hpp"

#include <nlohmann/json.hpp>
#include <string>

namespace flatexp {

using json = nlohmann::ordered_json;

std::string mpq_num_str(const mpq_class& q);
std::string mpq_den_str(const mpq_class& q);
mpq_class mpq_from_strings(const std::string& num, const std::string& den);
mpq_class mpq_from_decimal(const std::string& s);  // accepts "3", "-1/4", "0.125", "2^-20", "e^-10" is NOT handled here

json to_json(const RationalPoly& p);
RationalPoly rational_poly_from_json(const json& j);
json to_json(const RationalPoly2& p);
RationalPoly2 rational_poly2_from_json(const json& j);
json to_json(const BigPoly& p);
BigPoly big_poly_from_json(const json& j);
json to_json(const BigPoly2& p);
BigPoly2 big_poly2_from_json(const json& j);

// temp-file-then-rename so readers never observe a partial file
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace flatexp
