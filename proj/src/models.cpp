#include "hypnet/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hypnet/jsonio.hpp"
#include "hypnet/linalg.hpp"

namespace hypnet {

using json = nlohmann::json;

namespace {

const cplx I1(0.0, 1.0);

[[noreturn]] void bad(const std::string& model, const std::string& msg) {
    throw Error(ErrorCode::InvalidParameter, model + ": " + msg);
}

// Merge caller params over defaults, rejecting unknown keys.
json merge_params(const ModelInfo& info, const json& given) {
    if (!given.is_null() && !given.is_object()) bad(info.name, "parameters must be a JSON object");
    json p = json::object();
    for (const auto& s : info.params) p[s.name] = s.default_value;
    if (given.is_object())
        for (auto it = given.begin(); it != given.end(); ++it) {
            if (!p.contains(it.key())) bad(info.name, "unknown parameter '" + it.key() + "'");
            p[it.key()] = it.value();
        }
    return p;
}

double positive(const std::string& model, const json& p, const std::string& key) {
    if (!p[key].is_number()) bad(model, key + " must be a number");
    double v = p[key].get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) bad(model, key + " must be positive");
    return v;
}

double real_number(const std::string& model, const json& p, const std::string& key) {
    if (!p[key].is_number()) bad(model, key + " must be a number");
    return p[key].get<double>();
}

// Scalar broadcast or a list of length n.
std::vector<double> per_edge(const std::string& model, const json& v, int n, const std::string& key) {
    if (v.is_number()) return std::vector<double>(n, v.get<double>());
    if (!v.is_array() || static_cast<int>(v.size()) != n)
        bad(model, key + " must be a number or a list of " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) bad(model, key + " entries must be numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Mat mat_param(const std::string& model, const json& v, const std::string& key) {
    try {
        return jsonio::to_mat(v, key);
    } catch (const Error& e) {
        bad(model, e.what());
    }
}

Mat real2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

// Columns e_i of the identity in C^n.
Mat unit_cols(int n, std::initializer_list<int> idx) {
    Mat m = Mat::Zero(n, idx.size());
    int c = 0;
    for (int i : idx) m(i, c++) = 1.0;
    return m;
}

// Scalar weight q acting on the coefficient of a (possibly non-unit) spanning vector v.
Mat scalar_weight_on(const Vec& v, double q) {
    const double n2 = v.squaredNorm();
    return (q / (n2 * n2)) * (v * v.adjoint());
}

EdgeCoefficients constant_coeffs(const Mat& M, const Mat& N, const Mat& Q) {
    return {MatrixField(M), MatrixField(N), MatrixField(Q), std::nullopt};
}

// ---------------------------------------------------------------- transport

ModelInfo transport_info() {
    return {"transport",
            "Transport on a directed network in the global formalism; flow runs along each listed edge "
            "from its first to its second vertex, vertices carry a dynamic mass state.",
            {{"edges", "list of [from, to]", json::array({json::array({"v1", "v2"}), json::array({"v2", "v1"})}),
              "every vertex has at least one incoming and one outgoing edge"},
             {"velocities", "number or list", 1.0, "positive"},
             {"weights", "list or null", nullptr, "positive; sum to 1 over the outgoing edges of each vertex"},
             {"C", "|V|x|V| matrix or null", nullptr,
              "default: -2 on the diagonal, 1/(|V|-1) off the diagonal"},
             {"length", "number", 1.0, "positive"}}};
}

ModelPreset make_transport(const json& p) {
    const std::string nm = "transport";
    if (!p["edges"].is_array() || p["edges"].empty()) bad(nm, "edges must be a non-empty list of [from, to]");
    std::vector<std::string> verts;
    std::vector<std::pair<int, int>> flow;
    auto vid = [&](const json& j) {
        if (!j.is_string()) bad(nm, "vertex ids must be strings");
        auto s = j.get<std::string>();
        auto it = std::find(verts.begin(), verts.end(), s);
        if (it != verts.end()) return static_cast<int>(it - verts.begin());
        verts.push_back(s);
        return static_cast<int>(verts.size()) - 1;
    };
    for (const auto& e : p["edges"]) {
        if (!e.is_array() || e.size() != 2) bad(nm, "each edge must be [from, to]");
        int a = vid(e[0]);
        int b = vid(e[1]);
        flow.emplace_back(a, b);
    }
    const int nE = static_cast<int>(flow.size()), nV = static_cast<int>(verts.size());
    std::vector<int> outdeg(nV, 0), indeg(nV, 0);
    for (auto [a, b] : flow) {
        ++outdeg[a];
        ++indeg[b];
    }
    for (int v = 0; v < nV; ++v)
        if (outdeg[v] == 0 || indeg[v] == 0) bad(nm, "vertex '" + verts[v] + "' is a sink or a source");
    auto c = per_edge(nm, p["velocities"], nE, "velocities");
    for (double x : c)
        if (!(x > 0)) bad(nm, "velocities must be positive");
    std::vector<double> w(nE);
    if (p["weights"].is_null()) {
        for (int e = 0; e < nE; ++e) w[e] = 1.0 / outdeg[flow[e].first];
    } else {
        w = per_edge(nm, p["weights"], nE, "weights");
        std::vector<double> sum(nV, 0.0);
        for (int e = 0; e < nE; ++e) {
            if (!(w[e] > 0)) bad(nm, "weights must be positive");
            sum[flow[e].first] += w[e];
        }
        for (int v = 0; v < nV; ++v)
            if (std::abs(sum[v] - 1.0) > 1e-12) bad(nm, "weights of the edges leaving '" + verts[v] + "' must sum to 1");
    }
    Mat C(nV, nV);
    if (p["C"].is_null()) {
        C.setConstant(nV > 1 ? 1.0 / (nV - 1) : 0.0);
        C.diagonal().setConstant(-2.0);
    } else {
        C = mat_param(nm, p["C"], "C");
        if (C.rows() != nV || C.cols() != nV) bad(nm, "C must be " + std::to_string(nV) + "x" + std::to_string(nV));
    }
    const double len = positive(nm, p, "length");

    // Our x = 0 end is where the flow leaves the edge, so tail = "to" and head = "from".
    GraphSpec gs;
    gs.vertices = verts;
    for (int e = 0; e < nE; ++e)
        gs.edges.push_back({"e" + std::to_string(e + 1), verts[flow[e].second], verts[flow[e].first], len, 1});
    MetricGraph g = MetricGraph::build(gs);

    std::vector<EdgeCoefficients> coeffs;
    for (int e = 0; e < nE; ++e)
        coeffs.push_back(constant_coeffs(Mat::Constant(1, 1, c[e]), Mat::Zero(1, 1), Mat::Identity(1, 1)));

    // Global trace = (u(0) for all edges, u(l) for all edges). Entering values u_e(l) = w_e a_src(e).
    Mat W = Mat::Zero(nE, nV), Iin = Mat::Zero(nV, nE);
    for (int e = 0; e < nE; ++e) {
        W(e, flow[e].first) = w[e];
        Iin(flow[e].second, e) = c[e];
    }
    Mat Wp = (W.adjoint() * W).inverse() * W.adjoint();
    const int n = 2 * nE;
    ConditionInput in;
    Mat Y = Mat::Zero(n, nE + nV);
    Y.topLeftCorner(nE, nE).setIdentity();
    Y.bottomRightCorner(nE, nV) = W;
    in.Y_span = Y;
    in.Yd_span = Mat::Zero(n, nV);
    in.Yd_span.bottomRows(nE) = W;
    Mat B = Mat::Zero(n, n);
    B.bottomLeftCorner(nE, nE) = W * Iin;
    in.B = B;
    Mat Ca = Mat::Zero(n, n);
    Ca.bottomRightCorner(nE, nE) = W * C * Wp;
    in.C = Ca;
    Mat Qa = Mat::Zero(n, n);
    Qa.bottomRightCorner(nE, nE) = Wp.adjoint() * Wp;
    in.Q = Qa;

    ModelPreset out;
    out.system = make_system(std::move(g), std::move(coeffs), ConditionMode::Global, {in});
    out.expected_verdict = "contractive_semigroup";
    out.expected_route = "basis";
    return out;
}

// ---------------------------------------------------------------- maxwell

ModelInfo maxwell_info() {
    return {"maxwell_two_intervals",
            "p' = q, q' = p on (-1,0) and (0,1): electric condition at -1, magnetic at 1, continuity of p and "
            "a dynamic condition at 0.",
            {}};
}

ModelPreset make_maxwell(const json&) {
    GraphSpec gs;
    gs.vertices = {"v-1", "v0", "v1"};
    gs.edges = {{"e1", "v-1", "v0", 1.0, 2}, {"e2", "v0", "v1", 1.0, 2}};
    MetricGraph g = MetricGraph::build(gs);
    Mat M = real2(0, 1, 1, 0);
    std::vector<EdgeCoefficients> coeffs(2, constant_coeffs(M, Mat::Zero(2, 2), Mat::Identity(2, 2)));

    ConditionInput left, mid, right;
    left.Y_span = unit_cols(2, {1});
    left.Yd_span = Mat(2, 0);
    right.Y_span = unit_cols(2, {0});
    right.Yd_span = Mat(2, 0);
    Mat Ym(4, 3);
    Ym << 1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1;
    mid.Y_span = Ym;
    Vec d(4);
    d << 1, 0, 1, 0;
    mid.Yd_span = d;
    Mat B = Mat::Zero(4, 4);
    B(0, 1) = -1;
    B(0, 3) = 1;
    B(2, 1) = -1;
    B(2, 3) = 1;
    mid.B = B;
    mid.Q = scalar_weight_on(d, 1.0);

    ModelPreset out;
    out.system = make_system(std::move(g), std::move(coeffs), ConditionMode::Local, {left, mid, right});
    out.expected_verdict = "unitary_group";
    out.expected_route = "basis";
    return out;
}

// ---------------------------------------------------------------- telegrapher

ModelInfo telegrapher_info() {
    return {"telegrapher_y",
            "Lossless telegrapher equations (V, I) on three edges leaving a common vertex with the improved "
            "Kirchhoff condition there; I = 0 at the end of e0 and V = 0 at the ends of e1, e2.",
            {{"inductance", "2x2 real matrix", json::array({json::array({2.0, 0.5}), json::array({0.5, 1.0})}),
              "symmetric positive definite"},
             {"P", "number", 1.0, "positive"},
             {"L", "number", 1.0, "positive"}}};
}

ModelPreset make_telegrapher(const json& p) {
    const std::string nm = "telegrapher_y";
    Mat Lm = mat_param(nm, p["inductance"], "inductance");
    if (Lm.rows() != 2 || Lm.cols() != 2) bad(nm, "inductance must be 2x2");
    if (la::rel_imag(Lm) > 0 || la::rel_asymmetry(Lm) > 1e-14) bad(nm, "inductance must be real symmetric");
    if (la::herm_eigenvalues(Lm)(0) <= 0) bad(nm, "inductance must be positive definite");
    const double P = positive(nm, p, "P"), L = positive(nm, p, "L");
    Mat A = Lm.inverse();

    GraphSpec gs;
    gs.vertices = {"v1", "v2", "v3", "v4"};
    gs.edges = {{"e0", "v1", "v2", 1.0, 2}, {"e1", "v1", "v3", 1.0, 2}, {"e2", "v1", "v4", 1.0, 2}};
    MetricGraph g = MetricGraph::build(gs);
    Mat M = -real2(0, L, P, 0);
    Mat Q = real2(P, 0, 0, L);
    std::vector<EdgeCoefficients> coeffs(3, constant_coeffs(M, Mat::Zero(2, 2), Q));

    // Junction data written in the order (I1, I2, I0, V1, V2, V0), then moved to the per-edge
    // layout (V0, I0, V1, I1, V2, I2).
    const int to_ours[6] = {3, 5, 1, 2, 4, 0};
    Mat Pi = Mat::Zero(6, 6);
    for (int i = 0; i < 6; ++i) Pi(to_ours[i], i) = 1.0;
    Mat B = Mat::Zero(6, 6);
    B(0, 3) = -A(0, 0);
    B(0, 4) = -A(0, 1);
    B(0, 5) = A(0, 0) + A(0, 1);
    B(1, 3) = -A(1, 0);
    B(1, 4) = -A(1, 1);
    B(1, 5) = A(1, 0) + A(1, 1);
    B(5, 0) = B(5, 1) = B(5, 2) = -1;
    Mat Qv = Mat::Zero(6, 6);
    Qv.topLeftCorner(2, 2) = P * L * Lm;
    Qv(5, 5) = P * L;

    ConditionInput junction;
    junction.Yd_span = Pi * unit_cols(6, {0, 1, 5});
    junction.B = Pi * B * Pi.transpose();
    junction.Q = Pi * Qv * Pi.transpose();
    ConditionInput open_end, shorted_a, shorted_b;
    open_end.Y_span = unit_cols(2, {0});
    open_end.Yd_span = Mat(2, 0);
    shorted_a.Y_span = unit_cols(2, {1});
    shorted_a.Yd_span = Mat(2, 0);
    shorted_b = shorted_a;

    ModelPreset out;
    out.system =
        make_system(std::move(g), std::move(coeffs), ConditionMode::Local, {junction, open_end, shorted_a, shorted_b});
    out.expected_verdict = "unitary_group";
    out.expected_route = "basis";
    return out;
}

// ---------------------------------------------------------------- second sound

ModelInfo second_sound_info() {
    return {"second_sound",
            "Thermoelasticity with second sound on one interval, u = (z', z_t, theta, q); dynamic relaxation "
            "of the heat flux at x = 0, z = theta = 0 at x = l.",
            {{"alpha", "number", 1.0, "positive"},
             {"beta", "number", 1.0, "positive"},
             {"gamma", "number", 1.0, "positive"},
             {"delta", "number", 1.0, "positive"},
             {"kappa", "number", 1.0, "positive"},
             {"tau0", "number", 1.0, "positive"},
             {"length", "number", 1.0, "positive"}}};
}

ModelPreset make_second_sound(const json& p) {
    const std::string nm = "second_sound";
    const double a = positive(nm, p, "alpha"), b = positive(nm, p, "beta"), c = positive(nm, p, "gamma"),
                 d = positive(nm, p, "delta"), k = positive(nm, p, "kappa"), t = positive(nm, p, "tau0"),
                 len = positive(nm, p, "length");
    GraphSpec gs;
    gs.vertices = {"v1", "v2"};
    gs.edges = {{"e", "v1", "v2", len, 4}};
    MetricGraph g = MetricGraph::build(gs);
    Mat M = Mat::Zero(4, 4);
    M(0, 1) = 1;
    M(1, 0) = a;
    M(1, 2) = -b;
    M(2, 1) = -d;
    M(2, 3) = -c;
    M(3, 2) = -k / t;
    Mat Q = Mat::Zero(4, 4);
    Q.diagonal() << a * d, d, b, b * c * t / k;
    Mat N = Mat::Zero(4, 4);
    N(3, 3) = -1.0 / t;
    std::vector<EdgeCoefficients> coeffs{constant_coeffs(M, N, Q)};

    ConditionInput left, right;
    Mat Yl(4, 3);
    Yl << b, 0, 0, 0, 1, 0, a, 0, 0, 0, 0, 1;
    left.Y_span = Yl;
    left.Yd_span = unit_cols(4, {3});
    Mat C = Mat::Zero(4, 4);
    C(3, 3) = -1.0 / t;
    left.C = C;
    Mat Qv = Mat::Zero(4, 4);
    Qv(3, 3) = t * b;
    left.Q = Qv;
    right.Y_span = unit_cols(4, {0, 3});
    right.Yd_span = Mat(4, 0);

    ModelPreset out;
    out.system = make_system(std::move(g), std::move(coeffs), ConditionMode::Local, {left, right});
    out.expected_verdict = "semigroup";
    out.expected_route = "basis";
    return out;
}

// ---------------------------------------------------------------- wave star

ModelInfo wave_star_info() {
    return {"wave_star",
            "Damped wave equations u_tt = u'' + alpha u_t' + beta u_t + gamma u' on a star (e1 into v0, the "
            "others out of v0), U = (u', u_t), Dirichlet at the exterior vertices, point mass delta at v0.",
            {{"J", "integer", 3, ">= 2"},
             {"delta", "number", 1.0, "positive"},
             {"alpha", "number or list of J", 0.0, "real"},
             {"beta", "number or list of J", 0.0, "real"},
             {"gamma", "number or list of J", 0.0, "real"},
             {"length", "number", 1.0, "positive"}}};
}

ModelPreset make_wave_star(const json& p) {
    const std::string nm = "wave_star";
    if (!p["J"].is_number_integer()) bad(nm, "J must be an integer");
    const int J = p["J"].get<int>();
    if (J < 2) bad(nm, "J must be at least 2");
    const double delta = positive(nm, p, "delta"), len = positive(nm, p, "length");
    auto al = per_edge(nm, p["alpha"], J, "alpha");
    auto be = per_edge(nm, p["beta"], J, "beta");
    auto ga = per_edge(nm, p["gamma"], J, "gamma");

    GraphSpec gs;
    gs.vertices.push_back("v0");
    for (int i = 1; i <= J; ++i) gs.vertices.push_back("v" + std::to_string(i));
    gs.edges.push_back({"e1", "v1", "v0", len, 2});
    for (int i = 2; i <= J; ++i) gs.edges.push_back({"e" + std::to_string(i), "v0", "v" + std::to_string(i), len, 2});
    MetricGraph g = MetricGraph::build(gs);
    std::vector<EdgeCoefficients> coeffs;
    for (int e = 0; e < J; ++e)
        coeffs.push_back(constant_coeffs(real2(0, 1, 1, al[e]), real2(0, 0, ga[e], be[e]), Mat::Identity(2, 2)));

    // Trace at v0 per edge: (u'_e, u_t,e). Continuity of u_t, strains free.
    const int n = 2 * J;
    Mat Y = Mat::Zero(n, J + 1);
    Vec ones_t = Vec::Zero(n);
    for (int e = 0; e < J; ++e) {
        Y(2 * e, e) = 1;
        ones_t(2 * e + 1) = 1;
    }
    Y.col(J) = ones_t;
    Mat B = Mat::Zero(n, n);
    for (int i = 0; i < J; ++i)
        for (int j = 0; j < J; ++j) B(2 * i + 1, 2 * j) = -(j == 0 ? 1.0 : -1.0) / delta;
    ConditionInput hub;
    hub.Y_span = Y;
    hub.Yd_span = ones_t;
    hub.B = B;
    hub.Q = scalar_weight_on(ones_t, delta);
    std::vector<ConditionInput> inputs{hub};
    for (int i = 1; i <= J; ++i) {
        ConditionInput ext;
        ext.Y_span = unit_cols(2, {0});
        ext.Yd_span = Mat(2, 0);
        inputs.push_back(ext);
    }

    ModelPreset out;
    out.system = make_system(std::move(g), std::move(coeffs), ConditionMode::Local, inputs);
    out.expected_verdict = "group";
    out.expected_route = "basis";
    return out;
}

// ---------------------------------------------------------------- dirac

ModelInfo dirac_info() {
    return {"dirac_network",
            "One-dimensional Dirac equation on parallel edges between v1 and v2; continuity of the first "
            "spinor component with a dynamic condition driven by the second.",
            {{"edges", "integer", 2, ">= 1"},
             {"c", "number", 1.0, "positive"},
             {"m", "number", 1.0, ">= 0"},
             {"hbar", "number", 1.0, "positive"},
             {"C1", "edges x edges complex matrix or null", nullptr, "skew-Hermitian; used at both vertices"},
             {"length", "number", 1.0, "positive"}}};
}

ModelPreset make_dirac(const json& p) {
    const std::string nm = "dirac_network";
    if (!p["edges"].is_number_integer()) bad(nm, "edges must be an integer");
    const int E = p["edges"].get<int>();
    if (E < 1) bad(nm, "edges must be at least 1");
    const double c = positive(nm, p, "c"), hbar = positive(nm, p, "hbar"), len = positive(nm, p, "length");
    const double m = real_number(nm, p, "m");
    if (m < 0) bad(nm, "m must be nonnegative");
    Mat C1 = Mat::Zero(E, E);
    if (!p["C1"].is_null()) {
        C1 = mat_param(nm, p["C1"], "C1");
        if (C1.rows() != E || C1.cols() != E) bad(nm, "C1 must be " + std::to_string(E) + "x" + std::to_string(E));
        if ((C1 + C1.adjoint()).norm() > 1e-12 * std::max(1.0, C1.norm())) bad(nm, "C1 must be skew-Hermitian");
    }

    GraphSpec gs;
    gs.vertices = {"v1", "v2"};
    for (int e = 1; e <= E; ++e) gs.edges.push_back({"e" + std::to_string(e), "v1", "v2", len, 2});
    MetricGraph g = MetricGraph::build(gs);
    Mat M(2, 2);
    M << 0, I1 * c, -I1 * c, 0;
    Mat N = Mat::Zero(2, 2);
    N(0, 0) = -I1 * (m * c * c / hbar);
    N(1, 1) = I1 * (m * c * c / hbar);
    std::vector<EdgeCoefficients> coeffs(E, constant_coeffs(M, N, Mat::Identity(2, 2)));

    std::vector<ConditionInput> inputs;
    for (int v = 0; v < 2; ++v) {
        const double iota = v == 0 ? -1.0 : 1.0;
        const int n = 2 * E;
        Vec ones1 = Vec::Zero(n);
        Mat Y = Mat::Zero(n, E + 1);
        Mat Cf = Mat::Zero(n, n);
        for (int e = 0; e < E; ++e) {
            ones1(2 * e) = 1;
            Y(2 * e + 1, e) = 1;
            for (int f = 0; f < E; ++f) Cf(2 * e, 2 * f) = C1(e, f);
        }
        Y.col(E) = ones1;
        Mat B = Mat::Zero(n, n);
        for (int e = 0; e < E; ++e)
            for (int f = 0; f < E; ++f) B(2 * e, 2 * f + 1) = -I1 * iota;
        ConditionInput in;
        in.Y_span = Y;
        in.Yd_span = ones1;
        in.B = B;
        Mat Pd = ones1 * ones1.adjoint() / ones1.squaredNorm();
        in.C = Mat(Pd * Cf * Pd);
        in.Q = scalar_weight_on(ones1, c);
        inputs.push_back(in);
    }

    ModelPreset out;
    out.system = make_system(std::move(g), std::move(coeffs), ConditionMode::Local, inputs);
    out.expected_verdict = "unitary_group";
    out.expected_route = "adjoint";
    return out;
}

struct Entry {
    ModelInfo (*info)();
    ModelPreset (*make)(const json&);
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r{{transport_info, make_transport},     {maxwell_info, make_maxwell},
                                      {telegrapher_info, make_telegrapher}, {second_sound_info, make_second_sound},
                                      {wave_star_info, make_wave_star},     {dirac_info, make_dirac}};
    return r;
}

}  // namespace

std::vector<ModelInfo> list_models() {
    std::vector<ModelInfo> out;
    for (const auto& e : registry()) out.push_back(e.info());
    return out;
}

ModelPreset instantiate(const std::string& name, const json& params) {
    for (const auto& e : registry()) {
        ModelInfo info = e.info();
        if (info.name != name) continue;
        json p = merge_params(info, params);
        ModelPreset preset = e.make(p);
        preset.name = name;
        preset.params = p;
        return preset;
    }
    throw Error(ErrorCode::InvalidParameter, "unknown model '" + name + "'");
}

}  // namespace hypnet
