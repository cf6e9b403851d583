#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "qvar/qsheet_field.hpp"

namespace qvar {

// Energy density f(x, a_1..a_Q, A_1..A_Q), invariant under simultaneous
// permutation of the (a_i, A_i) pairs.
class QIntegrand {
public:
    virtual ~QIntegrand() = default;

    virtual int m() const = 0;
    virtual int n() const = 0;
    virtual int q() const = 0;

    virtual double eval(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& a,
                        const std::vector<Eigen::MatrixXd>& grads) const = 0;

    virtual bool depends_on_x() const { return true; }
    virtual bool depends_on_values() const { return true; }

    virtual bool has_gradient() const { return false; }
    virtual std::vector<Eigen::MatrixXd> grad_slots(const Eigen::VectorXd& x,
                                                    const std::vector<Eigen::VectorXd>& a,
                                                    const std::vector<Eigen::MatrixXd>& grads) const;
};

// Symmetric bilinear form on vectorized (column-major) n x m matrices;
// Mattila's quadratic energy density is sum_i <A vec(Du_i), vec(Du_i)>.
class QuadraticIntegrand {
public:
    QuadraticIntegrand(int n, int m, Eigen::MatrixXd form);  // symmetrized on construction

    int n() const { return n_; }
    int m() const { return m_; }
    const Eigen::MatrixXd& matrix() const { return form_; }

    double apply(const Eigen::MatrixXd& M) const;
    Eigen::MatrixXd gradient(const Eigen::MatrixXd& M) const;  // 2 A vec(M), reshaped

    static QuadraticIntegrand identity(int n, int m);
    static QuadraticIntegrand scaled_identity(int n, int m, double s);
    // <A M, M> = 2 det M on 2x2 matrices
    static QuadraticIntegrand determinant_form_2x2();

private:
    int n_, m_;
    Eigen::MatrixXd form_;
};

// f = sum_i |A_i|_F^2 (Almgren's Dirichlet density)
class DirichletIntegrand : public QIntegrand {
public:
    DirichletIntegrand(int m, int n, int q) : m_(m), n_(n), q_(q) {}
    int m() const override { return m_; }
    int n() const override { return n_; }
    int q() const override { return q_; }
    double eval(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
                const std::vector<Eigen::MatrixXd>& grads) const override;
    bool depends_on_x() const override { return false; }
    bool depends_on_values() const override { return false; }
    bool has_gradient() const override { return true; }
    std::vector<Eigen::MatrixXd> grad_slots(const Eigen::VectorXd&,
                                            const std::vector<Eigen::VectorXd>&,
                                            const std::vector<Eigen::MatrixXd>& grads) const override;

private:
    int m_, n_, q_;
};

// f = sum_i <A Du_i, Du_i> for a QuadraticIntegrand A
class MattilaIntegrand : public QIntegrand {
public:
    MattilaIntegrand(QuadraticIntegrand form, int q) : form_(std::move(form)), q_(q) {}
    int m() const override { return form_.m(); }
    int n() const override { return form_.n(); }
    int q() const override { return q_; }
    double eval(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
                const std::vector<Eigen::MatrixXd>& grads) const override;
    bool depends_on_x() const override { return false; }
    bool depends_on_values() const override { return false; }
    bool has_gradient() const override { return true; }
    std::vector<Eigen::MatrixXd> grad_slots(const Eigen::VectorXd&,
                                            const std::vector<Eigen::VectorXd>&,
                                            const std::vector<Eigen::MatrixXd>& grads) const override;
    const QuadraticIntegrand& form() const { return form_; }

private:
    QuadraticIntegrand form_;
    int q_;
};

// Arbitrary callable (used by tests and custom experiments).
class FunctionIntegrand : public QIntegrand {
public:
    using Fn = std::function<double(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
                                    const std::vector<Eigen::MatrixXd>&)>;
    FunctionIntegrand(int m, int n, int q, Fn fn, bool x_dep = true, bool a_dep = true)
        : m_(m), n_(n), q_(q), fn_(std::move(fn)), x_dep_(x_dep), a_dep_(a_dep) {}
    int m() const override { return m_; }
    int n() const override { return n_; }
    int q() const override { return q_; }
    double eval(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& a,
                const std::vector<Eigen::MatrixXd>& grads) const override {
        return fn_(x, a, grads);
    }
    bool depends_on_x() const override { return x_dep_; }
    bool depends_on_values() const override { return a_dep_; }

private:
    int m_, n_, q_;
    Fn fn_;
    bool x_dep_, a_dep_;
};

// Growth bound 0 <= f <= C (1 + |a|^q + |A|^p). The value exponent follows the
// critical-exponent rule: q = 0 when p > m, q = mp/(m-p) when p < m, and a
// caller-chosen q >= 1 when p = m.
struct GrowthBound {
    double C;
    double p;
    double q;

    GrowthBound(double C, double p, int m, double user_q_at_critical = -1.0);
};

// F(u) = integral of f(x, u, Du); cellwise quadrature, constant-in-x densities
// are integrated exactly with a single evaluation per cell.
double energy(const QIntegrand& f, const QSheetField& u, int points_per_axis = 4);

double mattila_energy(const QuadraticIntegrand& form, const QSheetField& u);

bool check_perm_invariance(const QIntegrand& f, int samples, std::uint64_t seed,
                           double tol = 1e-12);

bool check_growth(const QIntegrand& f, const GrowthBound& bound, int samples, std::uint64_t seed);

// Convex oracles for the polyconvex families.
struct ConvexScalarFn {
    std::function<double(double)> value;
    std::function<double(double)> derivative;  // subgradient for nonsmooth g
};

struct ConvexMatrixFn {
    std::function<double(const Eigen::MatrixXd&)> value;
    std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> subgradient;
};

// Pair function g(a, L) = h(a, M(L)) with h convex in the minor vector.
struct PolyconvexPairFn {
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> value_minors;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
        subgradient_minors;
};

// f = g(G(L, Q[[0]])) with g convex increasing
std::unique_ptr<QIntegrand> polyconvex_family_a(int m, int n, int q, ConvexScalarFn g);
// f = sum_{i,j} g(L_i - L_j) with g convex
std::unique_ptr<QIntegrand> polyconvex_family_b(int m, int n, int q, ConvexMatrixFn g);
// f = sum_i g(a_i, L_i) with g polyconvex
std::unique_ptr<QIntegrand> polyconvex_family_c(int m, int n, int q, PolyconvexPairFn g);

}  // namespace qvar
