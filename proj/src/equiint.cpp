#include "qvar/equiint.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "qvar/errors.hpp"

namespace qvar {

void SampledFunctionSeq::validate() const {
    if (num_cells < 1) throw InvalidInput("SampledFunctionSeq: need at least one cell");
    if (!(cell_volume > 0)) throw InvalidInput("SampledFunctionSeq: cell volume must be positive");
    for (const auto& g : members) {
        if (static_cast<long>(g.size()) != num_cells)
            throw InvalidInput("SampledFunctionSeq: member length mismatch");
        for (double v : g)
            if (!(v >= 0) || !std::isfinite(v))
                throw InvalidInput("SampledFunctionSeq: values must be finite and nonnegative");
    }
}

double SampledFunctionSeq::l1_norm(int k) const {
    double s = 0.0;
    for (double v : members.at(k)) s += v;
    return s * cell_volume;
}

double SampledFunctionSeq::l1_bound() const {
    double b = 0.0;
    for (size_t k = 0; k < members.size(); ++k) b = std::max(b, l1_norm(static_cast<int>(k)));
    return b;
}

double distribution_tail(const std::vector<double>& values, double cell_volume, double t) {
    if (t < 0) throw InvalidInput("distribution_tail: threshold must be >= 0");
    double s = 0.0;
    for (double v : values)
        if (std::abs(v) >= t) s += std::abs(v);
    return s * cell_volume;
}

DlvpResult dlvp_check(const SampledFunctionSeq& seq, const std::function<double(double)>& phi,
                      double cap) {
    seq.validate();
    if (!phi) throw InvalidInput("dlvp_check: profile function required");
    DlvpResult res;
    res.cap = cap;
    for (const auto& g : seq.members) {
        double s = 0.0;
        for (double v : g) s += phi(std::abs(v));
        res.sup = std::max(res.sup, s * seq.cell_volume);
    }
    res.ok = res.sup <= cap;
    return res;
}

BitingSchedule default_biting_schedule(const SampledFunctionSeq& seq) {
    BitingSchedule s;
    const double C = std::max(1e-300, seq.l1_bound());
    s.epsilon = [C](double t) { return C / std::sqrt(std::max(t, 1e-300)); };
    double vmax = 1.0;
    for (const auto& g : seq.members)
        for (double v : g) vmax = std::max(vmax, v);
    for (double t = 1.0; t <= 2.0 * vmax; t *= 2.0) s.ladder.push_back(t);
    return s;
}

namespace {

// sup over thresholds of tail(trunc, s) - eps(s) <= 0, checked on the value
// lattice of the truncated member (tails are constant between values).
bool truncation_meets_schedule(const std::vector<double>& member, double cell_volume,
                               double level, const BitingSchedule& schedule, double* sup_tail) {
    std::vector<double> trunc(member.size());
    for (size_t i = 0; i < member.size(); ++i) trunc[i] = std::min(member[i], level);
    std::vector<double> lattice = trunc;
    std::sort(lattice.begin(), lattice.end());
    lattice.erase(std::unique(lattice.begin(), lattice.end()), lattice.end());
    bool ok = true;
    double worst = 0.0;
    for (double s : lattice) {
        if (s <= 0) continue;
        double tail = distribution_tail(trunc, cell_volume, s);
        worst = std::max(worst, tail);
        if (tail > schedule.epsilon(s)) ok = false;
    }
    if (sup_tail) *sup_tail = worst;
    return ok;
}

}  // namespace

BitingSelection biting_truncations(const SampledFunctionSeq& seq,
                                   const BitingSchedule& schedule) {
    seq.validate();
    if (seq.members.empty()) throw InvalidInput("biting_truncations: empty sequence");
    if (!schedule.epsilon || schedule.ladder.empty())
        throw InvalidInput("biting_truncations: schedule with ladder required");

    BitingSelection sel;
    int next_member = 0;
    size_t ladder_pos = 0;
    while (ladder_pos < schedule.ladder.size() &&
           next_member < static_cast<int>(seq.members.size())) {
        const double level = schedule.ladder[ladder_pos];
        bool found = false;
        for (int k = next_member; k < static_cast<int>(seq.members.size()); ++k) {
            double sup_tail = 0.0;
            if (truncation_meets_schedule(seq.members[k], seq.cell_volume, level, schedule,
                                          &sup_tail)) {
                sel.indices.push_back(k);
                sel.levels.push_back(level);
                sel.achieved_sup_tails.push_back(sup_tail);
                next_member = k + 1;
                found = true;
                break;
            }
        }
        ++ladder_pos;
        (void)found;  // an unmatched level just moves on to the next one
    }

    if (sel.indices.empty()) {
        sel.ok = false;
        // diagnostic: best achievable tails at the first ladder level
        double best = std::numeric_limits<double>::infinity();
        for (const auto& g : seq.members) {
            double sup_tail = 0.0;
            truncation_meets_schedule(g, seq.cell_volume, schedule.ladder.front(), schedule,
                                      &sup_tail);
            best = std::min(best, sup_tail);
        }
        std::ostringstream msg;
        msg << "schedule unattainable: best achievable sup tail at level "
            << schedule.ladder.front() << " is " << best;
        sel.message = msg.str();
        sel.achieved_sup_tails.push_back(best);
        return sel;
    }
    sel.ok = true;
    sel.message = "selected " + std::to_string(sel.indices.size()) + " truncations";
    return sel;
}

SobolevCriticalReport sobolev_critical_check(const SampledFunctionSeq& values,
                                             const SampledFunctionSeq& grads, double p, int m,
                                             double tail_cap) {
    values.validate();
    grads.validate();
    if (values.members.size() != grads.members.size() || values.num_cells != grads.num_cells)
        throw InvalidInput("sobolev_critical_check: values/gradients mismatch");
    if (p < 1.0 || p >= m)
        throw InvalidInput("sobolev_critical_check: invalid-exponent, need 1 <= p < m");

    SobolevCriticalReport rep;
    rep.p = p;
    rep.p_star = m * p / (m - p);

    auto powered = [](const std::vector<double>& v, double e) {
        std::vector<double> out(v.size());
        for (size_t i = 0; i < v.size(); ++i) out[i] = std::pow(std::abs(v[i]), e);
        return out;
    };

    double vmax = 1.0;
    for (const auto& g : values.members)
        for (double v : g) vmax = std::max(vmax, std::pow(v, rep.p_star));
    for (const auto& g : grads.members)
        for (double v : g) vmax = std::max(vmax, std::pow(v, p));
    for (double t = 1.0; t <= 2.0 * vmax; t *= 2.0) rep.thresholds.push_back(t);
    if (rep.thresholds.empty()) rep.thresholds.push_back(1.0);

    auto sup_tails = [&](const SampledFunctionSeq& seq, double e) {
        std::vector<double> out(rep.thresholds.size(), 0.0);
        for (const auto& g : seq.members) {
            auto w = powered(g, e);
            for (size_t t = 0; t < rep.thresholds.size(); ++t)
                out[t] = std::max(out[t],
                                  distribution_tail(w, seq.cell_volume, rep.thresholds[t]));
        }
        return out;
    };
    rep.value_p_tails = sup_tails(values, p);
    rep.gradient_p_tails = sup_tails(grads, p);
    rep.value_pstar_tails = sup_tails(values, rep.p_star);

    rep.chebyshev_sup = 0.0;
    for (const auto& g : values.members) {
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, v);
        for (long j = 1; j <= static_cast<long>(gmax) + 1; ++j) {
            double meas = 0.0;
            for (double v : g)
                if (v > j) meas += values.cell_volume;
            rep.chebyshev_sup = std::max(rep.chebyshev_sup, std::pow(double(j), p) * meas);
        }
    }

    double l1 = 0.0;
    for (size_t k = 0; k < values.members.size(); ++k) {
        auto w = powered(values.members[k], p);
        double s = 0.0;
        for (double v : w) s += v;
        l1 = std::max(l1, s * values.cell_volume);
    }
    rep.tail_cap = tail_cap > 0 ? tail_cap : 0.01 * std::max(1.0, l1);

    // reference threshold: twice the max of the tamest member; for an
    // equi-integrable family every tail has died there, a concentrating one
    // keeps mass above it
    auto sup_tail_at_ref = [&](const SampledFunctionSeq& seq, double e) {
        double min_max = std::numeric_limits<double>::infinity();
        for (const auto& g : seq.members) {
            double mx = 0.0;
            for (double v : g) mx = std::max(mx, std::pow(std::abs(v), e));
            min_max = std::min(min_max, mx);
        }
        const double ref = 2.0 * std::max(1e-12, min_max);
        double sup = 0.0;
        for (const auto& g : seq.members)
            sup = std::max(sup, distribution_tail(powered(g, e), seq.cell_volume, ref));
        return sup;
    };
    rep.value_p_sup_at_ref = sup_tail_at_ref(values, p);
    rep.gradient_p_sup_at_ref = sup_tail_at_ref(grads, p);
    rep.value_pstar_sup_at_ref = sup_tail_at_ref(values, rep.p_star);

    rep.hypothesis_ok = rep.value_p_sup_at_ref <= rep.tail_cap &&
                        rep.gradient_p_sup_at_ref <= rep.tail_cap;
    rep.conclusion_ok = rep.value_pstar_sup_at_ref <= rep.tail_cap;
    if (!rep.hypothesis_ok)
        rep.verdict = SobolevTransferVerdict::kHypothesisFailed;
    else if (rep.conclusion_ok)
        rep.verdict = SobolevTransferVerdict::kTransferVerified;
    else
        rep.verdict = SobolevTransferVerdict::kTransferFailed;
    return rep;
}

SampledFunctionSeq read_sampled_csv(const std::string& path, double cell_volume) {
    std::ifstream in(path);
    if (!in) throw ConfigError("read_sampled_csv: cannot open " + path);
    std::map<long, std::map<long, double>> rows;  // k -> cell -> value
    std::string line;
    long max_cell = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!std::isdigit(line[line.find_first_not_of(" \t\r")]) &&
            line[line.find_first_not_of(" \t\r")] != '-')
            continue;  // header
        std::istringstream ss(line);
        std::string tok;
        long k, cell;
        double value;
        if (!std::getline(ss, tok, ',')) throw ConfigError("read_sampled_csv: bad line " + line);
        k = std::stol(tok);
        if (!std::getline(ss, tok, ',')) throw ConfigError("read_sampled_csv: bad line " + line);
        cell = std::stol(tok);
        if (!std::getline(ss, tok, ',')) throw ConfigError("read_sampled_csv: bad line " + line);
        value = std::stod(tok);
        rows[k][cell] = value;
        max_cell = std::max(max_cell, cell);
    }
    if (rows.empty()) throw ConfigError("read_sampled_csv: no data rows in " + path);
    SampledFunctionSeq seq;
    seq.num_cells = max_cell + 1;
    seq.cell_volume = cell_volume;
    for (const auto& [k, cells] : rows) {
        std::vector<double> member(seq.num_cells, 0.0);
        for (const auto& [cell, value] : cells) {
            if (cell < 0 || cell >= seq.num_cells)
                throw ConfigError("read_sampled_csv: cell index out of range");
            member[cell] = value;
        }
        seq.members.push_back(std::move(member));
    }
    seq.validate();
    return seq;
}

}  // namespace qvar
