#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qvar/affine_qmap.hpp"
#include "qvar/integrand.hpp"
#include "qvar/qsheet_field.hpp"

namespace qvar {

struct OptimizerConfig {
    int cells_per_side = 8;
    int restarts = 8;
    int max_iters = 150;
    std::uint64_t seed = 0;
    double tol = 1e-7;  // violation threshold on the margin
    bool laminate_seeds = true;
    int threads = 1;
    double fd_step = 1e-6;
    double grad_tol = 1e-10;
    int rematch_every = 5;
};

struct SearchLog {
    int restarts = 0;
    long long total_iterations = 0;
    std::uint64_t seed = 0;
    std::vector<double> restart_final_energies;
    std::vector<std::vector<double>> energy_traces;  // per restart, non-increasing
};

enum class QCStatus { kNoViolationFound, kViolation };

// Inequality test outcome. A violation is only reported with an admissible
// certificate attached; "no-violation-found" reflects the search budget,
// never a proof.
struct QCVerdict {
    QCStatus status = QCStatus::kNoViolationFound;
    double margin = 0.0;  // (best competitor energy - affine energy) per unit volume
    std::optional<QSheetField> certificate;
    SearchLog log;
};

// Def-style quasiconvexity probe: minimizes the frozen-argument energy over
// boundary-pinned competitors per group, by projected gradient descent with
// per-step re-matching and multistart (affine, laminate, random seeds).
QCVerdict quasiconvexity_test(const QIntegrand& f, const AffineQMap& u,
                              const OptimizerConfig& cfg);

// Mattila's condition: minimizes E over Lipschitz Q-fields pinned to Q[[0]]
// on the boundary. Equivalent to quasiconvexity at the zero affine map;
// seeded and driven independently as a cross-check.
QCVerdict semiellipticity_test(const QuadraticIntegrand& form, int q, const OptimizerConfig& cfg);

// E(g) - E(f) - k <A L, L> vol for g = sum_i [[f_i + L x]]; zero in theory for
// boundary-pinned f, quadrature-exact discretely.
double translation_identity_gap(const QuadraticIntegrand& form, const QSheetField& f,
                                const Eigen::MatrixXd& L);

struct RankOneResult {
    double value;
    Eigen::VectorXd a;  // unit, R^n
    Eigen::VectorXd b;  // unit, R^m
};

// min over unit a, b of <A (a b^T), a b^T> by alternating smallest-eigenvector
// iteration with multistart.
RankOneResult rank_one_min(const QuadraticIntegrand& form, int multistarts = 12,
                           std::uint64_t seed = 0x9d2c5680);

struct PolyconvexityCertificate {
    Eigen::VectorXd lambdas;  // coefficients on the 2x2-minor forms
    double min_eigenvalue;    // lambda_min(A + sum_k lambda_k D_k)
};

struct PolyconvexityOutcome {
    bool feasible = false;
    PolyconvexityCertificate best;
};

// Quadratic polyconvexity via the PSD + minor-shift decomposition: maximizes
// lambda_min(A + sum lambda_k D_k); feasible when the optimum is >= -1e-8.
PolyconvexityOutcome polyconvexity_certificate(const QuadraticIntegrand& form,
                                               std::uint64_t seed = 0x832c1e5f);

// The 2x2-minor quadratic forms D_k on vectorized n x m matrices, in the
// canonical (row pair, column pair) order.
std::vector<Eigen::MatrixXd> minor_quadratic_forms(int n, int m);

// f with x pinned to 0 and the value slots pinned to u's group centers, per
// the frozen-argument convention of the quasiconvexity inequality.
std::unique_ptr<QIntegrand> freeze_integrand(const QIntegrand& f, const AffineQMap& u);

struct NecessityReport {
    double affine_energy = 0.0;  // F(u, C_r)
    std::vector<int> fold_counts;
    std::vector<double> folded_energies;  // F(u_{k,r}, C_r)
    double competitor_energy_scaled = 0.0;  // r^m int_{C_1} f(0, a.., Dw)
    bool gradient_only = false;
    double max_fold_deviation = 0.0;
    bool k_independent = false;
    bool semicontinuity_violated = false;
};

// Folding experiment: builds u_{k,r} for each fold count, compares energies
// against the affine energy and the rescaled competitor energy.
NecessityReport necessity_experiment(const QIntegrand& F, const AffineQMap& u,
                                     const std::vector<QSheetField>& competitors,
                                     const std::vector<int>& fold_counts, double scale);

}  // namespace qvar
