#include "qvar/forms.hpp"

#include <algorithm>
#include <cmath>

#include "qvar/errors.hpp"

namespace qvar {

int Polynomial::total_degree() const {
    int deg = 0;
    for (const auto& [e, c] : terms_) {
        int d = 0;
        for (int k : e) d += k;
        deg = std::max(deg, d);
    }
    return deg;
}

void Polynomial::add_term(const std::vector<int>& exponents, double coeff) {
    if (static_cast<int>(exponents.size()) != num_vars_)
        throw InvalidInput("Polynomial: exponent vector length mismatch");
    for (int e : exponents)
        if (e < 0) throw InvalidInput("Polynomial: negative exponent");
    terms_[exponents] += coeff;
    prune();
}

void Polynomial::prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
        it = (it->second == 0.0) ? terms_.erase(it) : std::next(it);
}

double Polynomial::evaluate(const Eigen::VectorXd& vars) const {
    if (vars.size() != num_vars_) throw InvalidInput("Polynomial: evaluation arity mismatch");
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (int v = 0; v < num_vars_; ++v)
            for (int k = 0; k < e[v]; ++k) t *= vars[v];
        acc += t;
    }
    return acc;
}

Polynomial Polynomial::derivative(int var) const {
    Polynomial out(num_vars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        auto ne = e;
        ne[var] -= 1;
        out.terms_[ne] += c * e[var];
    }
    out.prune();
    return out;
}

Polynomial Polynomial::scaled(double s) const {
    Polynomial out(num_vars_);
    for (const auto& [e, c] : terms_) out.terms_[e] = c * s;
    out.prune();
    return out;
}

Polynomial Polynomial::plus(const Polynomial& other) const {
    if (other.num_vars_ != num_vars_) throw InvalidInput("Polynomial: arity mismatch");
    Polynomial out = *this;
    for (const auto& [e, c] : other.terms_) out.terms_[e] += c;
    out.prune();
    return out;
}

Polynomial Polynomial::substitute_and_remove(int var, double value) const {
    Polynomial out(num_vars_ - 1);
    for (const auto& [e, c] : terms_) {
        double factor = 1.0;
        for (int k = 0; k < e[var]; ++k) factor *= value;
        std::vector<int> ne;
        ne.reserve(num_vars_ - 1);
        for (int v = 0; v < num_vars_; ++v)
            if (v != var) ne.push_back(e[v]);
        out.terms_[ne] += c * factor;
    }
    out.prune();
    return out;
}

Polynomial Polynomial::constant(int num_vars, double c) {
    Polynomial p(num_vars);
    if (c != 0.0) p.terms_[std::vector<int>(num_vars, 0)] = c;
    return p;
}

Polynomial Polynomial::monomial(int num_vars, const std::vector<int>& exponents, double c) {
    Polynomial p(num_vars);
    p.add_term(exponents, c);
    return p;
}

DifferentialForm::DifferentialForm(int m, int n, int degree) : m_(m), n_(n), degree_(degree) {
    if (m_ < 1 || n_ < 1) throw InvalidInput("DifferentialForm: dimensions must be >= 1");
    if (degree_ < 0 || degree_ > m_ + n_) throw InvalidInput("DifferentialForm: bad degree");
}

int DifferentialForm::max_coefficient_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.coeff.total_degree());
    return d;
}

void DifferentialForm::add_term(std::vector<int> x_idx, std::vector<int> y_idx,
                                Polynomial coeff) {
    if (static_cast<int>(x_idx.size() + y_idx.size()) != degree_)
        throw InvalidInput("DifferentialForm: index degree mismatch");
    if (coeff.num_vars() != m_ + n_)
        throw InvalidInput("DifferentialForm: coefficient arity must be m+n");
    auto strictly_increasing = [](const std::vector<int>& v, int bound) {
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 0 || v[i] >= bound) return false;
            if (i > 0 && v[i] <= v[i - 1]) return false;
        }
        return true;
    };
    if (!strictly_increasing(x_idx, m_) || !strictly_increasing(y_idx, n_))
        throw InvalidInput("DifferentialForm: index lists must be strictly increasing");
    if (coeff.is_zero()) return;
    for (auto& t : terms_)
        if (t.x_idx == x_idx && t.y_idx == y_idx) {
            t.coeff = t.coeff.plus(coeff);
            return;
        }
    terms_.push_back({std::move(x_idx), std::move(y_idx), std::move(coeff)});
}

DifferentialForm DifferentialForm::scaled(double s) const {
    DifferentialForm out(m_, n_, degree_);
    for (const auto& t : terms_) out.add_term(t.x_idx, t.y_idx, t.coeff.scaled(s));
    return out;
}

DifferentialForm DifferentialForm::plus(const DifferentialForm& other) const {
    if (other.m_ != m_ || other.n_ != n_ || other.degree_ != degree_)
        throw InvalidInput("DifferentialForm: shape mismatch");
    DifferentialForm out = *this;
    for (const auto& t : other.terms_) out.add_term(t.x_idx, t.y_idx, t.coeff);
    return out;
}

DifferentialForm exterior_derivative(const DifferentialForm& omega) {
    const int m = omega.m(), n = omega.n();
    if (omega.degree() >= m + n)
        throw InvalidInput("exterior_derivative: form already has top degree");
    DifferentialForm out(m, n, omega.degree() + 1);
    for (const auto& t : omega.terms()) {
        // d/dx_a: insert dx_a into dx_{x_idx}
        for (int a = 0; a < m; ++a) {
            if (std::find(t.x_idx.begin(), t.x_idx.end(), a) != t.x_idx.end()) continue;
            Polynomial dc = t.coeff.derivative(a);
            if (dc.is_zero()) continue;
            int before = 0;
            for (int e : t.x_idx)
                if (e < a) ++before;
            auto nx = t.x_idx;
            nx.insert(nx.begin() + before, a);
            double sign = (before % 2 == 0) ? 1.0 : -1.0;
            out.add_term(nx, t.y_idx, dc.scaled(sign));
        }
        // d/dy_b: dy_b passes the whole dx block, then sorts into dy_{y_idx}
        for (int b = 0; b < n; ++b) {
            if (std::find(t.y_idx.begin(), t.y_idx.end(), b) != t.y_idx.end()) continue;
            Polynomial dc = t.coeff.derivative(m + b);
            if (dc.is_zero()) continue;
            int before = 0;
            for (int e : t.y_idx)
                if (e < b) ++before;
            auto ny = t.y_idx;
            ny.insert(ny.begin() + before, b);
            double sign = ((t.x_idx.size() + before) % 2 == 0) ? 1.0 : -1.0;
            out.add_term(t.x_idx, ny, dc.scaled(sign));
        }
    }
    return out;
}

}  // namespace qvar
