// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hypnet/evolve.hpp"
#include "hypnet/qualinv.hpp"
#include "hypnet/resolvent.hpp"
#include "support.hpp"

using namespace hypnet;
using testsupport::observed_order;
using testsupport::preset;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        o.pass = false;
        o.detail << " [runtime " << secs << " s over budget " << budget_s << " s]";
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s:%s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str(), secs);
    std::fflush(stdout);
}

double max_drift(const Trajectory& tr) {
    double d = 0;
    for (double e : tr.energy) d = std::max(d, std::abs(e / tr.energy.front() - 1.0));
    return d;
}

Trajectory run_expm(const HyperbolicSystem& sys, int n, double t_final, unsigned long long seed, int outputs = 20) {
    std::mt19937_64 rng(seed);
    DiscreteGenerator gen = assemble_discrete_generator(sys, uniform_cells(sys, n));
    SimulationOptions opt;
    opt.method = Method::Expm;
    opt.t_final = t_final;
    opt.outputs = outputs;
    opt.keep_states = false;
    return simulate(sys, gen, random_domain_state(sys, rng).sample(gen.cells), opt);
}

int block_named(const HyperbolicSystem& sys, const std::string& name) {
    for (int b = 0; b < static_cast<int>(sys.blocks.size()); ++b)
        if (sys.blocks[b].name == name) return b;
    throw Error(ErrorCode::UnknownVertex, "no block " + name);
}

GraphSpec random_graph(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nv_pick(2, 8), ne_pick(1, 14), dim_pick(1, 3);
    std::uniform_real_distribution<double> len(0.1, 3.0);
    const int nv = nv_pick(rng), ne = ne_pick(rng);
    std::uniform_int_distribution<int> vpick(0, nv - 1);
    GraphSpec gs;
    for (int v = 0; v < nv; ++v) gs.vertices.push_back("v" + std::to_string(v));
    for (int e = 0; e < ne; ++e) {
        int t = vpick(rng), h = vpick(rng);
        while (h == t) h = vpick(rng);
        gs.edges.push_back({"e" + std::to_string(e), gs.vertices[t], gs.vertices[h], len(rng), dim_pick(rng)});
    }
    return gs;
}

}  // namespace

int main() {
    criterion(1, "handshake identity on 100 random graphs", 1.0, [](Outcome& o) {
        std::mt19937_64 rng(1);
        int bad = 0;
        for (int i = 0; i < 100; ++i) {
            MetricGraph g = MetricGraph::build(random_graph(rng));
            int sum = 0;
            for (int v = 0; v < g.num_vertices(); ++v) sum += g.kv(v);
            if (sum != 2 * g.k()) ++bad;
        }
        o.detail << " mismatches=" << bad;
        o.require(bad == 0, "sum of k_v equals 2k");
    });

    criterion(2, "Maxwell two intervals: unitary group, basis route, energy conserved", 30.0, [](Outcome& o) {
        HyperbolicSystem sys = preset("maxwell_two_intervals");
        ClassificationReport r = classify(sys);
        o.detail << " verdict=" << verdict_name(r.verdict) << " route=" << route_name(r.route) << " counts=";
        std::vector<int> counts;
        for (const auto& b : r.basis.blocks) {
            counts.push_back(b.dim_Z);
            o.detail << b.dim_Z << (counts.size() < r.basis.blocks.size() ? "+" : "");
        }
        o.detail << " k=" << r.basis.k;
        o.require(r.verdict == Verdict::UnitaryGroup && r.route == Route::Basis, "unitary group by the basis route");
        o.require(counts == std::vector<int>{1, 2, 1} && r.basis.count == 4 && r.basis.k == 4 && r.basis.holds,
                  "basis counts 1+2+1 = 4 = k");
        const double drift = max_drift(run_expm(sys, 128, 4.0, 2));
        o.detail << " max|E/E0-1|=" << drift;
        o.require(drift <= 1e-6, "energy constant to 1e-6");
    });

    criterion(3, "Dirac network: adjoint route, shared Z_v, energy conserved", 30.0, [](Outcome& o) {
        HyperbolicSystem sys = preset("dirac_network");
        ClassificationReport r = classify(sys);
        o.detail << " dim_span=" << r.basis.dim_span << " k=" << r.basis.k;
        o.require(!r.basis.holds && r.basis.dim_span == 2 && r.basis.k == 4, "basis condition fails with dim_span 2 < 4");
        Mat want(4, 2);
        want << 1, 0, 0, 1, -1, 0, 0, 1;
        want = la::orth(want, 1e-12);
        double worst = 0;
        for (const char* v : {"v1", "v2"}) {
            WvResult w = build_Wv(sys, block_named(sys, v));
            worst = std::max(worst, w.Z.cols() == 2 ? la::subspace_distance(w.Z, want) : 1.0);
        }
        o.detail << " Z_v distance=" << worst;
        o.require(worst <= sys.tol.sub, "Z_v1 = Z_v2 = span{(1,0,-1,0),(0,1,0,1)}");
        o.detail << " verdict=" << verdict_name(r.verdict) << " route=" << route_name(r.route)
                 << " lambda=" << r.adjoint_route.yd_cone_lambda << " mu=" << r.adjoint_route.adjoint_cone_mu;
        o.require(r.verdict == Verdict::UnitaryGroup && r.route == Route::Adjoint &&
                      r.adjoint_route.yd_cone_lambda == 0.0 && r.adjoint_route.adjoint_cone_mu == 0.0,
                  "unitary group by the adjoint route with lambda = mu = 0");
        const double drift = max_drift(run_expm(sys, 128, 4.0, 3));
        o.detail << " max|E/E0-1|=" << drift;
        o.require(drift <= 1e-6, "energy constant to 1e-6");
    });

    criterion(4, "second sound: speeds, semigroup with finite lambda, energy bound", 60.0, [](Outcome& o) {
        HyperbolicSystem sys = preset("second_sound");
        Eigen::SelfAdjointEigenSolver<Mat> es(la::herm(sys.QM(0, 0.0)));
        RVec ev = es.eigenvalues();
        const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
        const double want[4] = {-phi, -1.0 / phi, 1.0 / phi, phi};
        double err = 0;
        int pos = 0, neg = 0;
        for (int i = 0; i < 4; ++i) {
            err = std::max(err, std::abs(ev(i) - want[i]));
            (ev(i) > 0 ? pos : neg)++;
        }
        o.detail << " eig error=" << err << " signs=" << pos << "+/" << neg << "-";
        o.require(err <= 1e-10 && pos == 2 && neg == 2, "QM eigenvalues");
        ClassificationReport r = classify(sys);
        const double lam = min_lambda(sys, block_named(sys, "v1"));
        o.detail << " verdict=" << verdict_name(r.verdict) << " min_lambda(v1)=" << lam;
        o.require(r.verdict == Verdict::Semigroup && std::isfinite(lam), "semigroup with finite min_lambda at v1");
        // Observed growth rate, reported either way; the bound is only checkable with a finite lambda.
        Trajectory tr = run_expm(sys, 64, 2.0, 4);
        double rate = -std::numeric_limits<double>::infinity();
        for (size_t i = 1; i < tr.t.size(); ++i) rate = std::max(rate, std::log(tr.energy[i] / tr.energy[0]) / (2 * tr.t[i]));
        o.detail << " observed growth rate=" << rate;
        if (std::isfinite(lam)) {
            bool ok = true;
            for (size_t i = 0; i < tr.t.size(); ++i)
                ok = ok && tr.energy[i] <= tr.energy[0] * std::exp(2 * lam * tr.t[i]) * (1 + 1e-3);
            o.require(ok, "E(t) <= E(0) exp(2 lambda t)");
        }
    });

    criterion(5, "wave star J=3: trace count identity, group by the basis route", 5.0, [](Outcome& o) {
        HyperbolicSystem sys = preset("wave_star", {{"J", 3}});
        ClassificationReport r = classify(sys);
        o.detail << " count=" << r.basis.count << " k=" << r.basis.k << " dim_span=" << r.basis.dim_span;
        o.require(r.basis.count == r.basis.k && r.basis.k == 6, "count identity with k = 2J = 6");
        o.detail << " verdict=" << verdict_name(r.verdict) << " route=" << route_name(r.route)
                 << " basis_verdict=" << verdict_name(r.basis_verdict);
        const bool group = r.basis_verdict == Verdict::Group || r.basis_verdict == Verdict::UnitaryGroup;
        o.require(r.basis.holds && group, "group by the basis route");
    });

    criterion(6, "transport: positivity certified and observed, rejected for negative coupling", 60.0, [](Outcome& o) {
        HyperbolicSystem sys = preset("transport");
        QualReport r = check_positive(sys);
        ProbeOptions opt;
        opt.trials = 20;
        DynamicVerdict d = dynamic_probe(sys, Property::Positive, opt);
        o.detail << " static=" << (r.certified ? "certified" : "not_certified") << " min_value=" << d.min_value;
        o.require(r.certified, "certified with Metzler C");
        o.require(d.min_value >= -1e-8 && !d.violated, "min value >= -1e-8 over 20 states");
        QualReport bad = check_positive(preset("transport", {{"C", {{-2.0, -0.5}, {-0.5, -2.0}}}}));
        o.detail << " negative coupling=" << (bad.certified ? "certified" : "not_certified");
        o.require(!bad.certified, "not certified with a negative off-diagonal entry");
    });

    criterion(7, "resolvent round trip on 25 random systems, Dirac singular", 60.0, [](Outcome& o) {
        std::mt19937_64 rng(7);
        double worst = 0;
        int rejected = 0, not_surjective = 0;
        for (int i = 0; i < 25; ++i) {
            int rej = 0;
            HyperbolicSystem sys = testsupport::random_valid_basis_system(rng, &rej);
            rejected += rej;
            for (const auto& b : basis_condition(sys).blocks) not_surjective += b.B_surjective ? 0 : 1;
            std::vector<int> cells = uniform_cells(sys, 1999);
            StateVector rhs = zero_state(sys, cells);
            for (int e = 0; e < sys.graph.num_edges(); ++e) {
                Mat a = la::random_matrix(rng, rhs.u[e].rows(), 3);
                for (int j = 0; j <= cells[e]; ++j) {
                    const double s = double(j) / cells[e];
                    rhs.u[e].col(j) = a.col(0) + a.col(1) * std::cos(3.0 * s) + a.col(2) * std::exp(s);
                }
            }
            rhs.x = la::random_matrix(rng, sys.total_dd(), 1).col(0);
            ResolventSolution sol = solve_A0(sys, rhs.u, rhs.x);
            StateVector back = apply_A(sys, sol.state, OperatorKind::Reduced);
            worst = std::max(worst, d_norm(sys, back - rhs) / d_norm(sys, rhs));
        }
        o.detail << " worst relative residual=" << worst << " rejected draws=" << rejected;
        o.require(not_surjective == 0, "surjective B");
        o.require(worst <= 1e-6, "residual <= 1e-6");
        HyperbolicSystem dirac = preset("dirac_network");
        std::vector<int> cells = uniform_cells(dirac, 64);
        bool singular = false;
        try {
            solve_A0(dirac, zero_state(dirac, cells).u, Vec::Zero(dirac.total_dd()));
        } catch (const Error& e) {
            singular = e.code() == ErrorCode::SingularBoundarySystem;
        }
        o.detail << " dirac=" << (singular ? "SingularBoundarySystem" : "solved");
        o.require(singular, "Dirac raises SingularBoundarySystem");
    });

    criterion(8, "dissipation identity converges at order >= 1.9", 120.0, [](Outcome& o) {
        std::mt19937_64 rng(8);
        const std::vector<int> n{32, 64, 128};
        double worst = std::numeric_limits<double>::infinity();
        std::string where;
        for (const auto& name : testsupport::preset_names()) {
            HyperbolicSystem sys = preset(name);
            for (int i = 0; i < 10; ++i) {
                SmoothState u = random_domain_state(sys, rng);
                std::vector<double> res;
                for (int m : n) res.push_back(std::abs(dissipativity_residual(sys, u, uniform_cells(sys, m)).residual));
                const double p = observed_order(n, res);
                if (p < worst) {
                    worst = p;
                    where = name;
                }
            }
        }
        o.detail << " min order=" << worst << " (" << where << ")";
        o.require(worst >= 1.9, "order >= 1.9 for every state");
    });

    criterion(9, "discrete adjoint consistency and Dirac skewness", 120.0, [](Outcome& o) {
        std::mt19937_64 rng(9);
        const std::vector<int> n{32, 64, 128, 256};
        for (const char* name : {"maxwell_two_intervals", "dirac_network"}) {
            HyperbolicSystem sys = preset(name);
            double worst = std::numeric_limits<double>::infinity();
            for (int pair = 0; pair < 5; ++pair) {
                SmoothState u = random_domain_state(sys, rng), v = random_adjoint_state(sys, rng);
                std::vector<double> err;
                for (int m : n) {
                    DiscreteGenerator gen = assemble_discrete_generator(sys, uniform_cells(sys, m));
                    AdjointCheck c = adjoint_consistency(sys, gen, u, v);
                    err.push_back(c.defect / c.scale);
                }
                worst = std::min(worst, observed_order(n, err));
            }
            o.detail << " " << name << " order=" << worst;
            o.require(worst >= 1.5, std::string(name) + " order >= 1.5");
        }
        HyperbolicSystem dirac = preset("dirac_network");
        double skew = 0;
        for (int m : n) skew = std::max(skew, skew_defect(assemble_discrete_generator(dirac, uniform_cells(dirac, m))));
        o.detail << " dirac skew defect=" << skew;
        o.require(skew <= 1e-10, "A_h + A_h* vanishes for Dirac");
    });

    criterion(10, "qualitative certification matrix and 100 seeded probes", 300.0, [](Outcome& o) {
        const auto& names = testsupport::preset_names();
        std::vector<std::pair<std::string, Property>> certified;
        bool real_ok = true, pos_ok = true;
        for (const auto& name : names) {
            HyperbolicSystem sys = preset(name);
            const bool real = check_real(sys).certified;
            real_ok = real_ok && real == (name != "dirac_network");
            if (real) certified.emplace_back(name, Property::Real);
            const bool pos = check_positive(sys).certified;
            if (name != "transport") pos_ok = pos_ok && !pos;
            if (pos) certified.emplace_back(name, Property::Positive);
            if (check_linf(sys).certified) certified.emplace_back(name, Property::Linf);
        }
        o.require(real_ok, "check_real certifies all but dirac_network");
        o.require(pos_ok, "check_positive rejects presets with coupled M");
        int violations = 0;
        double worst = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < 100; ++s) {
            const auto& [name, prop] = certified[s % certified.size()];
            ProbeOptions opt;
            opt.trials = 2;
            opt.seed = static_cast<unsigned long long>(s);
            DynamicVerdict d = dynamic_probe(preset(name), prop, opt);
            worst = std::max(worst, d.magnitude);
            if (d.violated) {
                ++violations;
                o.detail << " violated: " << name << "/" << property_name(prop) << " seed " << s;
            }
        }
        o.detail << " certified pairs=" << certified.size() << " violations=" << violations
                 << " worst corrected excursion=" << worst;
        o.require(violations == 0, "no certified property is violated");
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
