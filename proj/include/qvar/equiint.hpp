#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qvar {

// Sequence of nonnegative piecewise-constant functions on a common grid of
// equal-volume cells.
struct SampledFunctionSeq {
    long num_cells = 0;
    double cell_volume = 1.0;
    std::vector<std::vector<double>> members;

    void validate() const;
    double l1_norm(int k) const;
    double l1_bound() const;  // sup_k ||g_k||_L1
};

// phi(t) = integral over {|g| >= t} of |g|; exact on the grid, non-increasing
// in t and right-continuous on the value lattice.
double distribution_tail(const std::vector<double>& values, double cell_volume, double t);

struct DlvpResult {
    bool ok = true;
    double sup = 0.0;  // sup_k integral of phi(|g_k|)
    double cap = 0.0;
};

// De la Vallee Poussin criterion on a finite family: sup_k int phi(|g_k|)
// below the configured cap. Empty sequences pass vacuously.
DlvpResult dlvp_check(const SampledFunctionSeq& seq, const std::function<double(double)>& phi,
                      double cap);

struct BitingSchedule {
    std::function<double(double)> epsilon;  // tail target at threshold t
    std::vector<double> ladder;             // candidate truncation levels, increasing
};

// Default: epsilon(t) = C / sqrt(t) with C the L1 bound; dyadic ladder.
BitingSchedule default_biting_schedule(const SampledFunctionSeq& seq);

struct BitingSelection {
    std::vector<int> indices;               // selected member indices k_j (increasing)
    std::vector<double> levels;             // truncation levels t_j (increasing)
    std::vector<double> achieved_sup_tails;  // sup_t tail(g_{k_j} ^ t_j, t) per j
    bool ok = false;
    std::string message;
};

// Greedy shadow of the biting lemma: walks the level ladder, picking for each
// level the first unused member whose truncation meets the tail schedule.
// Reports the best achievable tails if the schedule cannot be met.
BitingSelection biting_truncations(const SampledFunctionSeq& seq, const BitingSchedule& schedule);

enum class SobolevTransferVerdict { kTransferVerified, kHypothesisFailed, kTransferFailed };

struct SobolevCriticalReport {
    double p = 0.0;
    double p_star = 0.0;
    std::vector<double> thresholds;
    std::vector<double> value_p_tails;     // sup_k tail(|g_k|^p, t)
    std::vector<double> gradient_p_tails;  // sup_k tail(|grad g_k|^p, t)
    std::vector<double> value_pstar_tails;
    double chebyshev_sup = 0.0;  // sup_k sup_j j^p meas{|g_k| > j}
    // tails compared at a reference threshold set by the tamest member
    // (twice its max), where an equi-integrable family has already died off
    double value_p_sup_at_ref = 0.0;
    double gradient_p_sup_at_ref = 0.0;
    double value_pstar_sup_at_ref = 0.0;
    bool hypothesis_ok = false;
    bool conclusion_ok = false;
    SobolevTransferVerdict verdict = SobolevTransferVerdict::kTransferFailed;
    double tail_cap = 0.0;
};

// Critical-exponent transfer diagnostic: equi-integrability of |g_k|^p and
// |grad g_k|^p should propagate to |g_k|^{p*}, p* = mp/(m-p). values/grads are
// |g_k| and |grad g_k| sampled on the same grid; requires 1 <= p < m.
SobolevCriticalReport sobolev_critical_check(const SampledFunctionSeq& values,
                                             const SampledFunctionSeq& grads, double p, int m,
                                             double tail_cap = -1.0);

// CSV with columns (k, cell_index, value); members ordered by ascending k.
SampledFunctionSeq read_sampled_csv(const std::string& path, double cell_volume);

}  // namespace qvar
