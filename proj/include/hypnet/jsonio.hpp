#pragma once

#include <string>

#include <json.hpp>

#include "hypnet/core.hpp"

namespace hypnet::jsonio {

using json = nlohmann::json;

// Complex entries are [re, im]; plain numbers are real.
cplx to_cplx(const json& j, const std::string& where);
json from_cplx(cplx z);

// Row-major nested arrays.
Mat to_mat(const json& j, const std::string& where);
json from_mat(const Mat& m);

Vec to_vec(const json& j, const std::string& where);
json from_vec(const Vec& v);

// Columns of the result are the listed vectors; each vector has length n.
Mat to_span(const json& j, int n, const std::string& where);
json from_span(const Mat& basis);

}  // namespace hypnet::jsonio
