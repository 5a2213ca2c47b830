#include "hypnet/jsonio.hpp"

namespace hypnet::jsonio {

namespace {
[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw Error(ErrorCode::ConfigParseError, where + ": " + msg);
}
}  // namespace

cplx to_cplx(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    fail(where, "expected a number or [re, im]");
}

json from_cplx(cplx z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

Mat to_mat(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
    const size_t rows = j.size();
    if (!j[0].is_array()) fail(where, "expected rows as arrays");
    const size_t cols = j[0].size();
    Mat m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) fail(where, "ragged matrix at row " + std::to_string(r));
        for (size_t c = 0; c < cols; ++c)
            m(r, c) = to_cplx(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

json from_mat(const Mat& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(from_cplx(m(r, c)));
        out.push_back(row);
    }
    return out;
}

Vec to_vec(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(i) = to_cplx(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

json from_vec(const Vec& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(from_cplx(v(i)));
    return out;
}

Mat to_span(const json& j, int n, const std::string& where) {
    if (!j.is_array()) fail(where, "expected a list of vectors");
    Mat m(n, j.size());
    for (size_t c = 0; c < j.size(); ++c) {
        Vec v = to_vec(j[c], where + "[" + std::to_string(c) + "]");
        if (v.size() != n) fail(where, "vector " + std::to_string(c) + " must have length " + std::to_string(n));
        m.col(c) = v;
    }
    return m;
}

json from_span(const Mat& basis) {
    json out = json::array();
    for (int c = 0; c < basis.cols(); ++c) out.push_back(from_vec(basis.col(c)));
    return out;
}

}  // namespace hypnet::jsonio
