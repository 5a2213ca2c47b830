#include "hypnet/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hypnet/jsonio.hpp"
#include "hypnet/resolvent.hpp"

namespace hypnet::app {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string safe_name(const std::string& id) {
    std::string s = id;
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) c = '_';
    return s;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw Error(ErrorCode::InvalidParameter, "cannot write " + p.string());
    return out;
}

void component_header(std::ostream& os, int k) {
    for (int i = 0; i < k; ++i) os << ",re_" << i << ",im_" << i;
}

void require_valid(const HyperbolicSystem& sys) {
    ValidationReport v = validate_assumptions(sys);
    if (v.ok) return;
    for (const auto& c : v.checks)
        if (!c.pass) {
            std::ostringstream os;
            os << "assumption " << c.name << " fails at " << c.location << " (value " << c.value << ")";
            throw Error(ErrorCode::InvalidParameter, os.str());
        }
}

}  // namespace

json run_check(const HyperbolicSystem& sys) { return config::to_json(validate_assumptions(sys)); }

json run_classify(const HyperbolicSystem& sys, std::optional<double> lambda, std::optional<double> mu) {
    json j = config::to_json(classify(sys));
    auto cone = [](const std::string& name, const ConeCheckResult& c) {
        return json{{"block", name}, {"holds", c.holds}, {"extremal", config::number(c.extremal)}};
    };
    if (lambda) {
        json at = json::array();
        for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi) {
            const auto& b = sys.blocks[bi];
            Mat F = boundary_form(sys, bi) - *lambda * b.Q;
            at.push_back(cone(b.name, cone_check(F, b.Y, ConeMode::Nonpositive, sys.tol.eig)));
        }
        j["at_lambda"] = {{"lambda", *lambda}, {"blocks", at}};
    }
    if (mu) {
        json at = json::array();
        for (int bi = 0; bi < static_cast<int>(sys.blocks.size()); ++bi)
            at.push_back(cone(sys.blocks[bi].name, adjoint_cone_check(sys, bi, *mu, ConeMode::Nonpositive)));
        j["at_mu"] = {{"mu", *mu}, {"blocks", at}};
    }
    j["validation"] = config::to_json(validate_assumptions(sys));
    return j;
}

json run_qual(const HyperbolicSystem& sys, const QualRequest& req) {
    require_valid(sys);
    QualReport r = check_property(sys, req.property, req.probe.seed);
    if (req.dynamic) r.dynamic = dynamic_probe(sys, req.property, req.probe);
    return config::to_json(r);
}

SmoothState initial_state(const HyperbolicSystem& sys, const json& spec, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    const std::string kind = spec.is_object() ? spec.value("kind", "random") : "random";
    if (kind == "random") return random_domain_state(sys, rng, spec.is_object() && spec.value("real", false));
    const auto& g = sys.graph;
    SmoothState st;
    for (const auto& e : g.edges()) {
        SmoothEdge se;
        se.length = e.length;
        se.left = Vec::Zero(e.dim);
        se.right = Vec::Zero(e.dim);
        st.edges.push_back(se);
    }
    st.x = Vec::Zero(sys.total_dd());
    if (kind == "zero") return st;
    if (kind != "smooth") throw Error(ErrorCode::ConfigParseError, "simulation.initial.kind: expected random, zero or smooth");
    const json& edges = spec.value("edges", json::object());
    for (auto it = edges.begin(); it != edges.end(); ++it) {
        const int e = g.edge_index(it.key());
        const std::string w = "simulation.initial.edges." + it.key();
        auto& se = st.edges[e];
        auto vec = [&](const char* key) {
            Vec v = jsonio::to_vec(it.value().at(key), w + "." + key);
            if (v.size() != g.edge(e).dim) throw Error(ErrorCode::ConfigParseError, w + "." + key + ": wrong length");
            return v;
        };
        if (it.value().contains("left")) se.left = vec("left");
        if (it.value().contains("right")) se.right = vec("right");
        if (it.value().contains("bump"))
            for (size_t m = 0; m < it.value().at("bump").size(); ++m) {
                Vec b = jsonio::to_vec(it.value().at("bump")[m], w + ".bump");
                if (b.size() != g.edge(e).dim) throw Error(ErrorCode::ConfigParseError, w + ".bump: wrong length");
                se.bump.push_back(b);
            }
    }
    if (spec.contains("x")) {
        st.x = jsonio::to_vec(spec.at("x"), "simulation.initial.x");
        if (st.x.size() != sys.total_dd())
            throw Error(ErrorCode::ConfigParseError,
                        "simulation.initial.x: expected " + std::to_string(sys.total_dd()) + " coordinates");
    }
    return st;
}

json run_simulate(const HyperbolicSystem& sys, const SimulateRequest& req) {
    require_valid(sys);
    const auto& sim = req.sim;
    if (sim.method != "rk4" && sim.method != "expm")
        throw Error(ErrorCode::InvalidParameter, "method must be rk4 or expm");
    const std::vector<int> cells = uniform_cells(sys, sim.cells);
    DiscreteGenerator gen = assemble_discrete_generator(sys, cells);
    SmoothState init = initial_state(sys, sim.initial, req.seed);
    SimulationOptions opt;
    opt.t_final = sim.t_final;
    opt.outputs = sim.outputs;
    opt.method = sim.method == "expm" ? Method::Expm : Method::RK4;
    opt.dt = sim.dt;
    opt.cfl = sim.cfl;
    opt.keep_states = !req.out_dir.empty();
    Trajectory tr = simulate(sys, gen, init.sample(cells), opt);

    const double e0 = tr.energy.front();
    double dev = 0, cres = 0;
    for (size_t i = 0; i < tr.t.size(); ++i) {
        if (e0 > 0) dev = std::max(dev, std::abs(tr.energy[i] / e0 - 1.0));
        cres = std::max(cres, tr.constraint_residual[i]);
    }
    json files = json::array();
    if (!req.out_dir.empty()) {
        const fs::path dir(req.out_dir);
        fs::create_directories(dir);
        {
            auto out = open_out(dir / "energy.csv");
            out << "t,E,constraint_residual\n";
            for (size_t i = 0; i < tr.t.size(); ++i)
                out << fmt(tr.t[i]) << ',' << fmt(tr.energy[i]) << ',' << fmt(tr.constraint_residual[i]) << '\n';
            files.push_back("energy.csv");
        }
        for (int e = 0; e < sys.graph.num_edges(); ++e) {
            const auto& edge = sys.graph.edge(e);
            const std::string name = "edge_" + safe_name(edge.id) + ".csv";
            auto out = open_out(dir / name);
            out << "t,x";
            component_header(out, edge.dim);
            out << '\n';
            const double h = edge.length / cells[e];
            for (size_t i = 0; i < tr.t.size(); ++i) {
                const Mat& u = tr.states[i].u[e];
                for (int j = 0; j < u.cols(); ++j) {
                    out << fmt(tr.t[i]) << ',' << fmt(j * h);
                    for (int c = 0; c < u.rows(); ++c) out << ',' << fmt(u(c, j).real()) << ',' << fmt(u(c, j).imag());
                    out << '\n';
                }
            }
            files.push_back(name);
        }
        {
            auto out = open_out(dir / "boundary.csv");
            out << "t";
            for (const auto& b : sys.blocks)
                for (int i = 0; i < b.dd(); ++i) out << ',' << b.name << "_re_" << i << ',' << b.name << "_im_" << i;
            out << '\n';
            for (size_t i = 0; i < tr.t.size(); ++i) {
                out << fmt(tr.t[i]);
                const Vec& x = tr.states[i].x;
                for (int c = 0; c < x.size(); ++c) out << ',' << fmt(x(c).real()) << ',' << fmt(x(c).imag());
                out << '\n';
            }
            files.push_back("boundary.csv");
        }
    }
    return {{"method", sim.method},
            {"cells", sim.cells},
            {"reduced_dim", gen.reduced_dim},
            {"t_final", sim.t_final},
            {"outputs", sim.outputs},
            {"dt", tr.dt},
            {"steps", tr.steps},
            {"energy_initial", config::number(e0)},
            {"energy_final", config::number(tr.energy.back())},
            {"max_relative_energy_change", config::number(dev)},
            {"max_constraint_residual", config::number(cres)},
            {"projection_defect", config::number(tr.projection_defect)},
            {"warnings", tr.warnings},
            {"files", files}};
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigParseError, path + ": cannot open file");
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw Error(ErrorCode::ConfigParseError, path + ": line " + std::to_string(lineno) + ": not a number");
            }
        }
        rows.push_back(row);
    }
    return rows;
}

json run_resolvent(const HyperbolicSystem& sys, const ResolventRequest& req) {
    require_valid(sys);
    const auto& g = sys.graph;
    for (const auto& [id, path] : req.f_files) g.edge_index(id);
    std::vector<Mat> f;
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& edge = g.edge(e);
        auto it = req.f_files.find(edge.id);
        if (it == req.f_files.end()) {
            f.push_back(Mat::Zero(edge.dim, req.cells + 1));
            continue;
        }
        auto rows = read_csv(it->second);
        const int m = static_cast<int>(rows.size()) - 1;
        if (m < 4) throw Error(ErrorCode::GridTooCoarse, it->second + ": at least 5 rows are required");
        Mat fe(edge.dim, m + 1);
        for (int j = 0; j <= m; ++j) {
            if (static_cast<int>(rows[j].size()) != 1 + 2 * edge.dim)
                throw Error(ErrorCode::ConfigParseError, it->second + ": expected x plus re/im for " +
                                                             std::to_string(edge.dim) + " components");
            if (std::abs(rows[j][0] - j * edge.length / m) > 1e-9 * std::max(1.0, edge.length))
                throw Error(ErrorCode::ConfigParseError, it->second + ": x must be the uniform grid on [0, length]");
            for (int c = 0; c < edge.dim; ++c) fe(c, j) = cplx(rows[j][1 + 2 * c], rows[j][2 + 2 * c]);
        }
        f.push_back(fe);
    }
    Vec gv = Vec::Zero(sys.total_dd());
    if (!req.g.is_null()) {
        gv = jsonio::to_vec(req.g, "g");
        if (gv.size() != sys.total_dd())
            throw Error(ErrorCode::InvalidParameter, "g must have " + std::to_string(sys.total_dd()) + " coordinates");
    }
    ResolventSolution sol = solve_A0(sys, f, gv);
    StateVector rhs{f, gv};
    StateVector back = apply_A(sys, sol.state, OperatorKind::Reduced);
    const double nr = d_norm(sys, rhs);
    const double rt = d_norm(sys, back - rhs) / (nr > 0 ? nr : 1.0);

    json files = json::array();
    if (!req.out_dir.empty()) {
        const fs::path dir(req.out_dir);
        fs::create_directories(dir);
        for (int e = 0; e < g.num_edges(); ++e) {
            const auto& edge = g.edge(e);
            const std::string name = "solution_" + safe_name(edge.id) + ".csv";
            auto out = open_out(dir / name);
            out << "x";
            component_header(out, edge.dim);
            out << '\n';
            const Mat& u = sol.state.u[e];
            const double h = edge.length / (u.cols() - 1);
            for (int j = 0; j < u.cols(); ++j) {
                out << fmt(j * h);
                for (int c = 0; c < u.rows(); ++c) out << ',' << fmt(u(c, j).real()) << ',' << fmt(u(c, j).imag());
                out << '\n';
            }
            files.push_back(name);
        }
    }
    return {{"condition", config::number(sol.condition)},
            {"boundary_residual", config::number(sol.boundary_residual)},
            {"relative_residual", config::number(rt)},
            {"x", jsonio::from_vec(sol.state.x)},
            {"files", files}};
}

json models_list() { return config::to_json(list_models()); }

json model_dump(const std::string& name, const json& params) {
    ModelPreset p = instantiate(name, params.is_null() ? json::object() : params);
    return config::dump_system(p.system);
}

}  // namespace hypnet::app
