#include "qvar/integrand.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qvar/errors.hpp"
#include "qvar/minors.hpp"
#include "qvar/rng.hpp"

namespace qvar {

std::vector<Eigen::MatrixXd> QIntegrand::grad_slots(const Eigen::VectorXd&,
                                                    const std::vector<Eigen::VectorXd>&,
                                                    const std::vector<Eigen::MatrixXd>&) const {
    throw Error("QIntegrand: analytic gradient not provided");
}

QuadraticIntegrand::QuadraticIntegrand(int n, int m, Eigen::MatrixXd form)
    : n_(n), m_(m), form_(std::move(form)) {
    if (n_ < 1 || m_ < 1) throw InvalidInput("QuadraticIntegrand: dimensions must be >= 1");
    if (form_.rows() != n_ * m_ || form_.cols() != n_ * m_)
        throw InvalidInput("QuadraticIntegrand: form must be (n*m) x (n*m)");
    form_ = 0.5 * (form_ + form_.transpose()).eval();
}

double QuadraticIntegrand::apply(const Eigen::MatrixXd& M) const {
    if (M.rows() != n_ || M.cols() != m_) throw InvalidInput("QuadraticIntegrand: shape mismatch");
    Eigen::Map<const Eigen::VectorXd> v(M.data(), n_ * m_);
    return v.dot(form_ * v);
}

Eigen::MatrixXd QuadraticIntegrand::gradient(const Eigen::MatrixXd& M) const {
    Eigen::Map<const Eigen::VectorXd> v(M.data(), n_ * m_);
    Eigen::VectorXd g = 2.0 * (form_ * v);
    return Eigen::Map<const Eigen::MatrixXd>(g.data(), n_, m_);
}

QuadraticIntegrand QuadraticIntegrand::identity(int n, int m) {
    return QuadraticIntegrand(n, m, Eigen::MatrixXd::Identity(n * m, n * m));
}

QuadraticIntegrand QuadraticIntegrand::scaled_identity(int n, int m, double s) {
    return QuadraticIntegrand(n, m, s * Eigen::MatrixXd::Identity(n * m, n * m));
}

QuadraticIntegrand QuadraticIntegrand::determinant_form_2x2() {
    // col-major vec of 2x2: (M11, M21, M12, M22); 2 det M = 2(v0 v3 - v1 v2)
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
    A(0, 3) = A(3, 0) = 1.0;
    A(1, 2) = A(2, 1) = -1.0;
    return QuadraticIntegrand(2, 2, A);
}

double DirichletIntegrand::eval(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
                                const std::vector<Eigen::MatrixXd>& grads) const {
    double s = 0.0;
    for (const auto& L : grads) s += L.squaredNorm();
    return s;
}

std::vector<Eigen::MatrixXd> DirichletIntegrand::grad_slots(
    const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
    const std::vector<Eigen::MatrixXd>& grads) const {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(grads.size());
    for (const auto& L : grads) out.push_back(2.0 * L);
    return out;
}

double MattilaIntegrand::eval(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
                              const std::vector<Eigen::MatrixXd>& grads) const {
    double s = 0.0;
    for (const auto& L : grads) s += form_.apply(L);
    return s;
}

std::vector<Eigen::MatrixXd> MattilaIntegrand::grad_slots(
    const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
    const std::vector<Eigen::MatrixXd>& grads) const {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(grads.size());
    for (const auto& L : grads) out.push_back(form_.gradient(L));
    return out;
}

GrowthBound::GrowthBound(double C_, double p_, int m, double user_q_at_critical)
    : C(C_), p(p_), q(0.0) {
    if (C < 0) throw InvalidInput("GrowthBound: C must be >= 0");
    if (p < 1) throw InvalidInput("GrowthBound: p must be >= 1");
    if (m < 1) throw InvalidInput("GrowthBound: m must be >= 1");
    if (p > m) {
        q = 0.0;
    } else if (p < m) {
        q = m * p / (m - p);  // p*
    } else {
        if (user_q_at_critical < 1)
            throw InvalidInput("GrowthBound: at p = m a value exponent q >= 1 must be chosen");
        q = user_q_at_critical;
    }
}

double energy(const QIntegrand& f, const QSheetField& u, int points_per_axis) {
    if (f.m() != u.m() || f.n() != u.n() || f.q() != u.q())
        throw InvalidInput("energy: integrand/field dimension mismatch");
    const auto& mesh = u.mesh();
    const double vol = mesh.cell_volume();
    const bool constant_density = !f.depends_on_x() && !f.depends_on_values();
    double acc = 0.0;
    for (long c = 0; c < mesh.num_cells(); ++c) {
        auto grads = u.differential(c);
        if (constant_density) {
            Eigen::VectorXd lambda = Eigen::VectorXd::Constant(u.m() + 1, 1.0 / (u.m() + 1));
            auto vals = u.piece_values_at(c, lambda);
            Eigen::VectorXd centroid = Eigen::VectorXd::Zero(u.m());
            acc += vol * f.eval(centroid, vals, grads);
        } else {
            auto rule = mesh.cell_quadrature(c, points_per_axis);
            for (size_t t = 0; t < rule.points.size(); ++t) {
                auto vals = u.piece_values_at(c, rule.lambdas[t]);
                acc += rule.weights[t] * f.eval(rule.points[t], vals, grads);
            }
        }
    }
    return acc;
}

double mattila_energy(const QuadraticIntegrand& form, const QSheetField& u) {
    if (form.m() != u.m() || form.n() != u.n())
        throw InvalidInput("mattila_energy: dimension mismatch");
    const auto& mesh = u.mesh();
    const double vol = mesh.cell_volume();
    double acc = 0.0;
    for (long c = 0; c < mesh.num_cells(); ++c) {
        auto grads = u.differential(c);
        double cell = 0.0;
        for (const auto& L : grads) cell += form.apply(L);
        acc += vol * cell;
    }
    return acc;
}

namespace {

struct SampleTuple {
    Eigen::VectorXd x;
    std::vector<Eigen::VectorXd> a;
    std::vector<Eigen::MatrixXd> grads;
};

SampleTuple random_tuple(const QIntegrand& f, CounterRng& rng, double a_scale, double g_scale) {
    SampleTuple s;
    s.x.resize(f.m());
    for (int d = 0; d < f.m(); ++d) s.x[d] = rng.uniform(-0.5, 0.5);
    for (int i = 0; i < f.q(); ++i) {
        Eigen::VectorXd a(f.n());
        for (int r = 0; r < f.n(); ++r) a[r] = a_scale * rng.normal();
        s.a.push_back(a);
        Eigen::MatrixXd L(f.n(), f.m());
        for (int r = 0; r < f.n(); ++r)
            for (int c = 0; c < f.m(); ++c) L(r, c) = g_scale * rng.normal();
        s.grads.push_back(L);
    }
    return s;
}

}  // namespace

bool check_perm_invariance(const QIntegrand& f, int samples, std::uint64_t seed, double tol) {
    if (samples < 1) throw InvalidInput("check_perm_invariance: samples must be >= 1");
    CounterRng rng(seed);
    for (int s = 0; s < samples; ++s) {
        auto t = random_tuple(f, rng, 1.0, 1.0);
        double base = f.eval(t.x, t.a, t.grads);
        std::vector<int> perm(f.q());
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = f.q() - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.index(i + 1)]);
        std::vector<Eigen::VectorXd> pa(f.q());
        std::vector<Eigen::MatrixXd> pg(f.q());
        for (int i = 0; i < f.q(); ++i) {
            pa[i] = t.a[perm[i]];
            pg[i] = t.grads[perm[i]];
        }
        if (std::abs(f.eval(t.x, pa, pg) - base) > tol) return false;
    }
    return true;
}

bool check_growth(const QIntegrand& f, const GrowthBound& bound, int samples,
                  std::uint64_t seed) {
    if (samples < 1) throw InvalidInput("check_growth: samples must be >= 1");
    CounterRng rng(seed);
    for (int s = 0; s < samples; ++s) {
        // |a|, |A| log-uniform in [1e-3, 1e3]
        double sa = std::pow(10.0, rng.uniform(-3.0, 3.0));
        double sg = std::pow(10.0, rng.uniform(-3.0, 3.0));
        auto t = random_tuple(f, rng, 1.0, 1.0);
        double na = 0.0, ng = 0.0;
        for (const auto& v : t.a) na += v.squaredNorm();
        for (const auto& L : t.grads) ng += L.squaredNorm();
        na = std::sqrt(na);
        ng = std::sqrt(ng);
        if (na > 0)
            for (auto& v : t.a) v *= sa / na;
        if (ng > 0)
            for (auto& L : t.grads) L *= sg / ng;
        double val = f.eval(t.x, t.a, t.grads);
        double cap = bound.C * (1.0 + std::pow(sa, bound.q) + std::pow(sg, bound.p));
        if (val < -1e-12 || val > cap * (1.0 + 1e-12)) return false;
    }
    return true;
}

namespace {

class FamilyAIntegrand : public QIntegrand {
public:
    FamilyAIntegrand(int m, int n, int q, ConvexScalarFn g)
        : m_(m), n_(n), q_(q), g_(std::move(g)) {}
    int m() const override { return m_; }
    int n() const override { return n_; }
    int q() const override { return q_; }
    double eval(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
                const std::vector<Eigen::MatrixXd>& grads) const override {
        double s = 0.0;
        for (const auto& L : grads) s += L.squaredNorm();
        return g_.value(std::sqrt(s));
    }
    bool depends_on_x() const override { return false; }
    bool depends_on_values() const override { return false; }

private:
    int m_, n_, q_;
    ConvexScalarFn g_;
};

class FamilyBIntegrand : public QIntegrand {
public:
    FamilyBIntegrand(int m, int n, int q, ConvexMatrixFn g)
        : m_(m), n_(n), q_(q), g_(std::move(g)) {}
    int m() const override { return m_; }
    int n() const override { return n_; }
    int q() const override { return q_; }
    double eval(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
                const std::vector<Eigen::MatrixXd>& grads) const override {
        double s = 0.0;
        for (int i = 0; i < q_; ++i)
            for (int j = 0; j < q_; ++j) s += g_.value(grads[i] - grads[j]);
        return s;
    }
    bool depends_on_x() const override { return false; }
    bool depends_on_values() const override { return false; }
    bool has_gradient() const override { return true; }
    std::vector<Eigen::MatrixXd> grad_slots(const Eigen::VectorXd&,
                                            const std::vector<Eigen::VectorXd>&,
                                            const std::vector<Eigen::MatrixXd>& grads) const override {
        std::vector<Eigen::MatrixXd> out(q_, Eigen::MatrixXd::Zero(n_, m_));
        for (int i = 0; i < q_; ++i)
            for (int j = 0; j < q_; ++j) {
                Eigen::MatrixXd s = g_.subgradient(grads[i] - grads[j]);
                out[i] += s;
                out[j] -= s;
            }
        return out;
    }

private:
    int m_, n_, q_;
    ConvexMatrixFn g_;
};

class FamilyCIntegrand : public QIntegrand {
public:
    FamilyCIntegrand(int m, int n, int q, PolyconvexPairFn g)
        : m_(m), n_(n), q_(q), g_(std::move(g)), basis_(m, n) {}
    int m() const override { return m_; }
    int n() const override { return n_; }
    int q() const override { return q_; }
    double eval(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>& a,
                const std::vector<Eigen::MatrixXd>& grads) const override {
        double s = 0.0;
        for (int i = 0; i < q_; ++i) s += g_.value_minors(a[i], all_minors(grads[i], basis_));
        return s;
    }
    bool depends_on_x() const override { return false; }

private:
    int m_, n_, q_;
    PolyconvexPairFn g_;
    MinorBasis basis_;
};

}  // namespace

std::unique_ptr<QIntegrand> polyconvex_family_a(int m, int n, int q, ConvexScalarFn g) {
    if (!g.value || !g.derivative)
        throw ConfigError("polyconvex_family_a: convex oracle with derivative required");
    return std::make_unique<FamilyAIntegrand>(m, n, q, std::move(g));
}

std::unique_ptr<QIntegrand> polyconvex_family_b(int m, int n, int q, ConvexMatrixFn g) {
    if (!g.value || !g.subgradient)
        throw ConfigError("polyconvex_family_b: convex oracle with subgradient required");
    return std::make_unique<FamilyBIntegrand>(m, n, q, std::move(g));
}

std::unique_ptr<QIntegrand> polyconvex_family_c(int m, int n, int q, PolyconvexPairFn g) {
    if (!g.value_minors || !g.subgradient_minors)
        throw ConfigError("polyconvex_family_c: polyconvex oracle with subgradient required");
    return std::make_unique<FamilyCIntegrand>(m, n, q, std::move(g));
}

}  // namespace qvar
