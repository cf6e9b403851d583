#include "qvar/json_io.hpp"

#include <algorithm>
#include <set>

#include "qvar/errors.hpp"

namespace qvar {

void check_keys(const ojson& obj, const std::vector<std::string>& allowed,
                const std::vector<std::string>& required, const std::string& context) {
    if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
    std::set<std::string> allow(allowed.begin(), allowed.end());
    for (const auto& r : required) allow.insert(r);
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allow.count(it.key()))
            throw ConfigError(context + ": unknown key '" + it.key() + "'");
    for (const auto& r : required)
        if (!obj.contains(r)) throw ConfigError(context + ": missing required key '" + r + "'");
}

ojson vector_to_json(const Eigen::VectorXd& v) {
    ojson j = ojson::array();
    for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

Eigen::VectorXd vector_from_json(const ojson& j, const std::string& context) {
    if (!j.is_array()) throw ConfigError(context + ": expected an array of numbers");
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(context + ": expected a number");
        v[i] = j[i].get<double>();
    }
    return v;
}

ojson matrix_to_json(const Eigen::MatrixXd& M) {
    ojson j = ojson::array();
    for (int r = 0; r < M.rows(); ++r) {
        ojson row = ojson::array();
        for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        j.push_back(row);
    }
    return j;
}

Eigen::MatrixXd matrix_from_json(const ojson& j, const std::string& context) {
    if (!j.is_array() || j.empty()) throw ConfigError(context + ": expected a nested array");
    const size_t rows = j.size();
    if (!j[0].is_array()) throw ConfigError(context + ": expected a nested array");
    const size_t cols = j[0].size();
    Eigen::MatrixXd M(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ConfigError(context + ": ragged matrix rows");
        for (size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) throw ConfigError(context + ": expected a number");
            M(r, c) = j[r][c].get<double>();
        }
    }
    return M;
}

ojson qpoint_to_json(const QPoint& t) {
    ojson j;
    j["n"] = t.dim();
    ojson pts = ojson::array();
    for (const auto& p : t.entries()) pts.push_back(vector_to_json(p));
    j["points"] = pts;
    return j;
}

QPoint qpoint_from_json(const ojson& j) {
    check_keys(j, {}, {"n", "points"}, "qpoint");
    const int n = j["n"].get<int>();
    if (!j["points"].is_array() || j["points"].empty())
        throw ConfigError("qpoint: 'points' must be a nonempty array");
    std::vector<Eigen::VectorXd> pts;
    for (const auto& p : j["points"]) {
        Eigen::VectorXd v = vector_from_json(p, "qpoint.points");
        if (v.size() != n) throw ConfigError("qpoint: point dimension disagrees with n");
        pts.push_back(v);
    }
    return QPoint(n, std::move(pts));
}

ojson affine_qmap_to_json(const AffineQMap& u) {
    ojson j;
    j["m"] = u.m();
    j["n"] = u.n();
    ojson groups = ojson::array();
    for (const auto& g : u.groups()) {
        ojson jg;
        jg["q"] = g.multiplicity;
        jg["a"] = vector_to_json(g.center);
        jg["L"] = matrix_to_json(g.slope);
        groups.push_back(jg);
    }
    j["groups"] = groups;
    return j;
}

AffineQMap affine_qmap_from_json(const ojson& j) {
    check_keys(j, {}, {"m", "n", "groups"}, "affine_map");
    const int m = j["m"].get<int>();
    const int n = j["n"].get<int>();
    std::vector<AffineQMap::Group> groups;
    if (!j["groups"].is_array() || j["groups"].empty())
        throw ConfigError("affine_map: 'groups' must be a nonempty array");
    for (const auto& jg : j["groups"]) {
        check_keys(jg, {}, {"q", "a", "L"}, "affine_map.group");
        AffineQMap::Group g;
        g.multiplicity = jg["q"].get<int>();
        g.center = vector_from_json(jg["a"], "affine_map.group.a");
        g.slope = matrix_from_json(jg["L"], "affine_map.group.L");
        if (g.center.size() != n || g.slope.rows() != n || g.slope.cols() != m)
            throw ConfigError("affine_map: group dimensions disagree with m, n");
        groups.push_back(g);
    }
    try {
        return AffineQMap(m, std::move(groups));
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("affine_map: ") + e.what());
    }
}

ojson field_to_json(const QSheetField& f) {
    QSheetField canon = f;
    canon.canonicalize();
    ojson j;
    j["m"] = canon.m();
    j["n"] = canon.n();
    j["Q"] = canon.q();
    ojson dom;
    dom["center"] = vector_to_json(canon.domain().center);
    dom["side"] = canon.domain().side;
    j["domain"] = dom;
    j["cells_per_side"] = canon.mesh().cells_per_side();
    ojson verts = ojson::array();
    for (const auto& vv : canon.vertex_values()) {
        ojson entries = ojson::array();
        for (const auto& e : vv) entries.push_back(vector_to_json(e));
        verts.push_back(entries);
    }
    j["vertices"] = verts;
    j["matching"] = canon.matchings();
    return j;
}

QSheetField field_from_json(const ojson& j) {
    check_keys(j, {}, {"m", "n", "Q", "domain", "cells_per_side", "vertices", "matching"},
               "field");
    const int m = j["m"].get<int>();
    const int n = j["n"].get<int>();
    const int q = j["Q"].get<int>();
    check_keys(j["domain"], {}, {"center", "side"}, "field.domain");
    CubeDomain dom{vector_from_json(j["domain"]["center"], "field.domain.center"),
                   j["domain"]["side"].get<double>()};
    if (dom.dim() != m) throw ConfigError("field: domain center must have length m");
    const int k = j["cells_per_side"].get<int>();
    KuhnMesh mesh(dom, k);
    if (!j["vertices"].is_array() ||
        static_cast<long>(j["vertices"].size()) != mesh.num_vertices())
        throw ConfigError("field: 'vertices' must list (cells_per_side+1)^m entries");
    std::vector<std::vector<Eigen::VectorXd>> values(mesh.num_vertices());
    for (long v = 0; v < mesh.num_vertices(); ++v) {
        const auto& entries = j["vertices"][v];
        if (!entries.is_array() || static_cast<int>(entries.size()) != q)
            throw ConfigError("field: each vertex must list Q entries");
        for (const auto& e : entries) {
            Eigen::VectorXd val = vector_from_json(e, "field.vertices");
            if (val.size() != n) throw ConfigError("field: entry dimension disagrees with n");
            values[v].push_back(val);
        }
    }
    if (!j["matching"].is_array() ||
        static_cast<long>(j["matching"].size()) != mesh.num_cells())
        throw ConfigError("field: 'matching' must list one table per cell");
    std::vector<std::vector<std::vector<int>>> match(mesh.num_cells());
    for (long c = 0; c < mesh.num_cells(); ++c) {
        const auto& jt = j["matching"][c];
        if (!jt.is_array() || static_cast<int>(jt.size()) != m + 1)
            throw ConfigError("field: matching tables need m+1 rows");
        match[c].resize(m + 1);
        for (int r = 0; r <= m; ++r) {
            if (!jt[r].is_array() || static_cast<int>(jt[r].size()) != q)
                throw ConfigError("field: matching rows need Q entries");
            for (const auto& e : jt[r]) match[c][r].push_back(e.get<int>());
        }
    }
    try {
        return QSheetField(std::move(mesh), n, q, std::move(values), std::move(match));
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("field: ") + e.what());
    }
}

ojson form_to_json(const DifferentialForm& omega) {
    ojson j;
    j["m"] = omega.m();
    j["n"] = omega.n();
    j["degree"] = omega.degree();
    j["D"] = omega.max_coefficient_degree();
    ojson terms = ojson::array();
    for (const auto& t : omega.terms()) {
        ojson jt;
        jt["x_idx"] = t.x_idx;
        jt["y_idx"] = t.y_idx;
        ojson poly = ojson::array();
        for (const auto& [e, c] : t.coeff.terms()) {
            ojson mono;
            mono["exp"] = e;
            mono["c"] = c;
            poly.push_back(mono);
        }
        jt["poly"] = poly;
        terms.push_back(jt);
    }
    j["terms"] = terms;
    return j;
}

DifferentialForm form_from_json(const ojson& j) {
    check_keys(j, {"D"}, {"m", "n", "degree", "terms"}, "form");
    const int m = j["m"].get<int>();
    const int n = j["n"].get<int>();
    const int degree = j["degree"].get<int>();
    DifferentialForm omega(m, n, degree);
    if (!j["terms"].is_array()) throw ConfigError("form: 'terms' must be an array");
    for (const auto& jt : j["terms"]) {
        check_keys(jt, {}, {"x_idx", "y_idx", "poly"}, "form.term");
        std::vector<int> xi = jt["x_idx"].get<std::vector<int>>();
        std::vector<int> yi = jt["y_idx"].get<std::vector<int>>();
        Polynomial coeff(m + n);
        if (!jt["poly"].is_array()) throw ConfigError("form.term: 'poly' must be an array");
        for (const auto& mono : jt["poly"]) {
            check_keys(mono, {}, {"exp", "c"}, "form.term.poly");
            coeff.add_term(mono["exp"].get<std::vector<int>>(), mono["c"].get<double>());
        }
        try {
            omega.add_term(std::move(xi), std::move(yi), std::move(coeff));
        } catch (const InvalidInput& e) {
            throw ConfigError(std::string("form: ") + e.what());
        }
    }
    return omega;
}

ojson polyaffine_to_json(const PolyaffineFn& P) {
    ojson j;
    j["m"] = P.m;
    j["n"] = P.n;
    j["c0"] = P.c0;
    j["zeta"] = vector_to_json(P.zeta);
    return j;
}

PolyaffineFn polyaffine_from_json(const ojson& j) {
    check_keys(j, {}, {"m", "n", "c0", "zeta"}, "polyaffine");
    PolyaffineFn P;
    P.m = j["m"].get<int>();
    P.n = j["n"].get<int>();
    P.c0 = j["c0"].get<double>();
    P.zeta = vector_from_json(j["zeta"], "polyaffine.zeta");
    if (P.zeta.size() != tau(P.m, P.n))
        throw ConfigError("polyaffine: zeta must have length tau(m,n)");
    return P;
}

OptimizerConfig optimizer_from_json(const ojson& j) {
    check_keys(j, {"cells_per_side", "restarts", "max_iters", "seed", "tol", "laminate_seeds"},
               {}, "optimizer");
    OptimizerConfig cfg;
    if (j.contains("cells_per_side")) cfg.cells_per_side = j["cells_per_side"].get<int>();
    if (j.contains("restarts")) cfg.restarts = j["restarts"].get<int>();
    if (j.contains("max_iters")) cfg.max_iters = j["max_iters"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("laminate_seeds")) cfg.laminate_seeds = j["laminate_seeds"].get<bool>();
    if (cfg.cells_per_side < 1 || cfg.restarts < 1 || cfg.max_iters < 0 || cfg.tol <= 0)
        throw ConfigError("optimizer: invalid configuration values");
    return cfg;
}

ojson optimizer_to_json(const OptimizerConfig& cfg) {
    ojson j;
    j["cells_per_side"] = cfg.cells_per_side;
    j["restarts"] = cfg.restarts;
    j["max_iters"] = cfg.max_iters;
    j["seed"] = cfg.seed;
    j["tol"] = cfg.tol;
    j["laminate_seeds"] = cfg.laminate_seeds;
    return j;
}

QuadraticIntegrand quadratic_from_json(const ojson& j, int n, int m) {
    Eigen::MatrixXd M = matrix_from_json(j, "integrand.matrix");
    if (M.rows() != n * m || M.cols() != n * m)
        throw ConfigError("integrand.matrix: must be (n*m) x (n*m)");
    return QuadraticIntegrand(n, m, M);
}

std::unique_ptr<QIntegrand> integrand_from_json(const ojson& j, int m, int n, int q) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("integrand: object with 'kind' required");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "dirichlet") {
        check_keys(j, {}, {"kind"}, "integrand");
        return std::make_unique<DirichletIntegrand>(m, n, q);
    }
    if (kind == "quadratic") {
        check_keys(j, {}, {"kind", "matrix"}, "integrand");
        return std::make_unique<MattilaIntegrand>(quadratic_from_json(j["matrix"], n, m), q);
    }
    if (kind == "family_a") {
        check_keys(j, {}, {"kind", "g"}, "integrand");
        check_keys(j["g"], {"scale"}, {"kind", "exponent"}, "integrand.g");
        if (j["g"]["kind"].get<std::string>() != "power")
            throw ConfigError("integrand.g: family_a supports kind 'power'");
        double e = j["g"]["exponent"].get<double>();
        double s = j["g"].contains("scale") ? j["g"]["scale"].get<double>() : 1.0;
        if (e < 1.0 || s <= 0) throw ConfigError("integrand.g: need exponent >= 1, scale > 0");
        ConvexScalarFn g;
        g.value = [s, e](double t) { return s * std::pow(t, e); };
        g.derivative = [s, e](double t) { return s * e * std::pow(t, e - 1.0); };
        return polyconvex_family_a(m, n, q, std::move(g));
    }
    if (kind == "family_b") {
        check_keys(j, {}, {"kind", "g"}, "integrand");
        check_keys(j["g"], {}, {"kind"}, "integrand.g");
        const std::string gk = j["g"]["kind"].get<std::string>();
        ConvexMatrixFn g;
        if (gk == "frobenius_sq") {
            g.value = [](const Eigen::MatrixXd& M) { return M.squaredNorm(); };
            g.subgradient = [](const Eigen::MatrixXd& M) { return Eigen::MatrixXd(2.0 * M); };
        } else if (gk == "frobenius") {
            g.value = [](const Eigen::MatrixXd& M) { return M.norm(); };
            g.subgradient = [](const Eigen::MatrixXd& M) {
                double nn = M.norm();
                return nn > 0 ? Eigen::MatrixXd(M / nn)
                              : Eigen::MatrixXd(Eigen::MatrixXd::Zero(M.rows(), M.cols()));
            };
        } else {
            throw ConfigError("integrand.g: family_b supports 'frobenius_sq' or 'frobenius'");
        }
        return polyconvex_family_b(m, n, q, std::move(g));
    }
    if (kind == "family_c") {
        check_keys(j, {}, {"kind", "g"}, "integrand");
        check_keys(j["g"], {}, {"kind"}, "integrand.g");
        if (j["g"]["kind"].get<std::string>() != "dirichlet_pair")
            throw ConfigError("integrand.g: family_c supports kind 'dirichlet_pair'");
        PolyconvexPairFn g;
        const int first_block = n * m;
        g.value_minors = [first_block](const Eigen::VectorXd& a, const Eigen::VectorXd& Mv) {
            return a.squaredNorm() + Mv.head(first_block).squaredNorm();
        };
        g.subgradient_minors = [first_block](const Eigen::VectorXd&, const Eigen::VectorXd& Mv) {
            Eigen::VectorXd z = Eigen::VectorXd::Zero(Mv.size());
            z.head(first_block) = 2.0 * Mv.head(first_block);
            return z;
        };
        return polyconvex_family_c(m, n, q, std::move(g));
    }
    throw ConfigError("integrand: unknown kind '" + kind + "'");
}

SampledFunctionSeq sampled_seq_from_json(const ojson& j) {
    check_keys(j, {}, {"num_cells", "cell_volume", "members"}, "sequence");
    SampledFunctionSeq seq;
    seq.num_cells = j["num_cells"].get<long>();
    seq.cell_volume = j["cell_volume"].get<double>();
    if (!j["members"].is_array()) throw ConfigError("sequence: 'members' must be an array");
    for (const auto& mem : j["members"]) seq.members.push_back(mem.get<std::vector<double>>());
    try {
        seq.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("sequence: ") + e.what());
    }
    return seq;
}

ojson verdict_to_json(const QCVerdict& v, bool include_certificate) {
    ojson j;
    j["status"] =
        v.status == QCStatus::kViolation ? "violation" : "no-violation-found";
    j["margin"] = v.margin;
    ojson log;
    log["restarts"] = v.log.restarts;
    log["iterations"] = v.log.total_iterations;
    log["seed"] = v.log.seed;
    log["restart_final_energies"] = v.log.restart_final_energies;
    j["search_log"] = log;
    if (include_certificate && v.certificate)
        j["certificate"] = field_to_json(*v.certificate);
    return j;
}

}  // namespace qvar
