#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hypnet/system.hpp"

namespace hypnet {

struct Projectors {
    Mat Pd;      // onto Yd
    Mat Pd0;     // onto Ker B* inside Yd
    Mat Pdperp;  // onto the orthogonal complement of Yd inside Y
    Mat PY;      // onto Y
};

Projectors projectors(const ConditionBlock& b, double rank_tol);

enum class ConeMode { Nonpositive, Null };

struct ConeCheckResult {
    bool holds = true;
    ConeMode mode = ConeMode::Nonpositive;
    double extremal = 0.0;
    Vec witness;
    int dim = 0;
};

// Compresses herm(F) to span(S) (orthonormal columns) and inspects eigenvalues.
ConeCheckResult cone_check(const Mat& F, const Mat& S, ConeMode mode, double tol_eig);

// Smallest t >= 0 with herm(F) - t W <= 0 (W Hermitian PSD), +inf if none exists.
double min_shift(const Mat& F, const Mat& W, double tol_eig);

// T + Q B + B* Q for a block.
Mat boundary_form(const HyperbolicSystem& sys, int block);

double min_lambda(const HyperbolicSystem& sys, int block);

struct WvResult {
    Mat vectors;  // k_J x |W|
    int n_perp = 0, n_ranB = 0, n_kerB = 0;
    Mat Z;  // orthonormal basis of span(vectors)
};

WvResult build_Wv(const HyperbolicSystem& sys, int block);

// Sum of slot blocks into C^k (zero off the block's edges).
Mat extend_to_edges(const HyperbolicSystem& sys, int block, const Mat& w);

enum class Shortcut { None, Stationary, SurjectiveB };

struct BasisConditionResult {
    bool holds = false;
    int dim_span = 0;
    int k = 0;
    int count = 0;  // sum of |W_v|
    struct PerBlock {
        std::string name;
        int dim_Yperp = 0, dim_ranBstar = 0, dim_kerBstar = 0, dim_Z = 0;
        int dim_Y = 0, dim_Yd = 0;
        bool B_surjective = false;
    };
    std::vector<PerBlock> blocks;
    Shortcut shortcut = Shortcut::None;
    bool shortcut_identity = false;  // the integer identity of the shortcut
};

BasisConditionResult basis_condition(const HyperbolicSystem& sys);

// Orthonormal basis of the adjoint trace space in (xi, c) coordinates, x = Yd c.
Mat adjoint_space(const HyperbolicSystem& sys, int block);

// Hermitian part of the adjoint block form at mu, in (xi, c) coordinates.
Mat adjoint_form(const HyperbolicSystem& sys, int block, double mu);

ConeCheckResult adjoint_cone_check(const HyperbolicSystem& sys, int block, double mu, ConeMode mode);

// Smallest mu >= 0 making the adjoint form nonpositive on the adjoint space (+inf if none).
double adjoint_min_mu(const HyperbolicSystem& sys, int block);

// Smallest lambda >= 0 for the cone condition restricted to Yd.
double yd_cone_lambda(const HyperbolicSystem& sys, int block);

enum class Verdict { Inconclusive, Semigroup, ContractiveSemigroup, Group, UnitaryGroup };
enum class Route { None, Basis, Adjoint };

const char* verdict_name(Verdict v);
const char* route_name(Route r);

struct ClassificationReport {
    bool assumptions_ok = false;
    BasisConditionResult basis;
    bool basis_ok = false;

    struct BlockInfo {
        std::string name;
        double min_lambda = 0;           // basis route
        ConeCheckResult null_cone;       // F on Y, null mode
        double yd_lambda = 0;            // adjoint route, Yd cone
        std::optional<double> yd_null_lambda;  // lambda giving an exact null cone on Yd
        std::optional<double> y_null_lambda;   // same on Y
        double adjoint_mu = 0;
        std::optional<double> adjoint_null_mu;
        int adjoint_dim = 0;
        ConeCheckResult c_cone;          // Q C + C* Q on Yd, nonpositive
        ConeCheckResult c_null;          // same, null
        ConeCheckResult adjoint_c_null;  // diag(0, QC + C*Q) on adjoint space, null
        ConeCheckResult combined_cone;   // T + QB + B*Q + P(QC + C*Q)P on Y, nonpositive
    };
    std::vector<BlockInfo> blocks;

    std::optional<double> semigroup_lambda;  // max over blocks if finite and basis holds
    bool group_ok = false;

    struct AdjointRoute {
        double yd_cone_lambda = 0;
        double y_cone_lambda = 0;
        double adjoint_cone_mu = 0;
        bool holds = false;
        bool group = false;
    } adjoint_route;

    struct EdgeForm {
        bool nonpositive = true;
        bool null = true;
        double max_eig = -std::numeric_limits<double>::infinity();
        double max_abs = 0;
        std::string location;
    } edge_form;

    bool contractive = false;
    bool unitary = false;
    Verdict verdict = Verdict::Inconclusive;
    Route route = Route::None;
    Verdict basis_verdict = Verdict::Inconclusive;
    Verdict adjoint_verdict = Verdict::Inconclusive;
};

ClassificationReport classify(const HyperbolicSystem& sys);

}  // namespace hypnet
