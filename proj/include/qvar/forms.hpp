#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

namespace qvar {

// Multivariate polynomial with double coefficients; exponent keys are dense
// vectors of length num_vars.
class Polynomial {
public:
    explicit Polynomial(int num_vars) : num_vars_(num_vars) {}

    int num_vars() const { return num_vars_; }
    const std::map<std::vector<int>, double>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int total_degree() const;

    void add_term(const std::vector<int>& exponents, double coeff);
    double evaluate(const Eigen::VectorXd& vars) const;
    Polynomial derivative(int var) const;
    Polynomial scaled(double s) const;
    Polynomial plus(const Polynomial& other) const;

    // substitute vars[var] = value and drop that variable slot
    Polynomial substitute_and_remove(int var, double value) const;

    static Polynomial constant(int num_vars, double c);
    static Polynomial monomial(int num_vars, const std::vector<int>& exponents, double c);

private:
    int num_vars_;
    std::map<std::vector<int>, double> terms_;

    void prune();
};

// Differential form on R^{m+n} with polynomial coefficients:
// sum over terms of coeff(x, y) dx_{x_idx} ^ dy_{y_idx}; index lists strictly
// increasing, |x_idx| + |y_idx| = degree. Coefficient polynomials use the
// variable layout (x_1..x_m, y_1..y_n).
class DifferentialForm {
public:
    struct Term {
        std::vector<int> x_idx;  // 0-based, strictly increasing
        std::vector<int> y_idx;
        Polynomial coeff;
    };

    DifferentialForm(int m, int n, int degree);

    int m() const { return m_; }
    int n() const { return n_; }
    int degree() const { return degree_; }
    const std::vector<Term>& terms() const { return terms_; }
    int max_coefficient_degree() const;

    // adds coeff * dx_{x_idx} ^ dy_{y_idx}; merges duplicate index pairs
    void add_term(std::vector<int> x_idx, std::vector<int> y_idx, Polynomial coeff);

    DifferentialForm scaled(double s) const;
    DifferentialForm plus(const DifferentialForm& other) const;

private:
    int m_, n_, degree_;
    std::vector<Term> terms_;
};

// Formal exterior derivative; d(d(omega)) = 0 identically.
DifferentialForm exterior_derivative(const DifferentialForm& omega);

}  // namespace qvar
