#include "qvar/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "qvar/errors.hpp"
#include "qvar/qfield_ops.hpp"
#include "qvar/rng.hpp"

namespace qvar {

namespace {

// Search state: per group, per sheet, an n x V matrix of vertex values.
using State = std::vector<std::vector<Eigen::MatrixXd>>;

struct Workspace {
    KuhnMesh mesh;
    int m, n, q_total;
    std::vector<AffineQMap::Group> groups;
    std::vector<Eigen::VectorXd> frozen_a;   // group-major repeated centers
    std::vector<Eigen::MatrixXd> affine_L;   // group-major repeated slopes
    Eigen::VectorXd x0;
    const QIntegrand* f = nullptr;
    double fd_step = 1e-6;

    std::vector<std::vector<long>> cell_verts;
    std::vector<char> boundary_vertex;
    std::vector<std::vector<long>> vertex_cells;

    Workspace(const QIntegrand& fn, std::vector<AffineQMap::Group> gs, int cells_per_side,
              double fd)
        : mesh(CubeDomain::unit(fn.m()), cells_per_side),
          m(fn.m()),
          n(fn.n()),
          groups(std::move(gs)),
          x0(Eigen::VectorXd::Zero(fn.m())),
          f(&fn),
          fd_step(fd) {
        q_total = 0;
        for (const auto& g : groups) {
            for (int i = 0; i < g.multiplicity; ++i) {
                frozen_a.push_back(g.center);
                affine_L.push_back(g.slope);
            }
            q_total += g.multiplicity;
        }
        if (q_total != fn.q()) throw InvalidInput("optimizer: integrand Q mismatch");
        cell_verts.resize(mesh.num_cells());
        vertex_cells.resize(mesh.num_vertices());
        for (long c = 0; c < mesh.num_cells(); ++c) {
            cell_verts[c] = mesh.cell_vertices(c);
            for (long v : cell_verts[c]) vertex_cells[v].push_back(c);
        }
        boundary_vertex.resize(mesh.num_vertices(), 0);
        for (long v = 0; v < mesh.num_vertices(); ++v) {
            auto mi = mesh.vertex_multi_index(v);
            for (int d = 0; d < m; ++d)
                if (mi[d] == 0 || mi[d] == cells_per_side) boundary_vertex[v] = 1;
        }
    }

    int sheet_count(int group) const { return groups[group].multiplicity; }

    void cell_grads(const State& s, long c, std::vector<Eigen::MatrixXd>& grads) const {
        const auto& vs = cell_verts[c];
        const auto& perm = mesh.perm(mesh.cell_perm_rank(c));
        const double h = mesh.h();
        int slot = 0;
        for (size_t g = 0; g < groups.size(); ++g)
            for (int i = 0; i < groups[g].multiplicity; ++i, ++slot) {
                Eigen::MatrixXd& L = grads[slot];
                for (int j = 1; j <= m; ++j)
                    L.col(perm[j - 1]) =
                        (s[g][i].col(vs[j]) - s[g][i].col(vs[j - 1])) / h;
            }
    }

    double cell_energy(const State& s, long c, std::vector<Eigen::MatrixXd>& grads) const {
        cell_grads(s, c, grads);
        return mesh.cell_volume() * f->eval(x0, frozen_a, grads);
    }

    double total_energy(const State& s) const {
        std::vector<Eigen::MatrixXd> grads(q_total, Eigen::MatrixXd::Zero(n, m));
        double acc = 0.0;
        for (long c = 0; c < mesh.num_cells(); ++c) acc += cell_energy(s, c, grads);
        return acc;
    }

    std::vector<Eigen::MatrixXd> density_slot_grads(std::vector<Eigen::MatrixXd>& grads) const {
        if (f->has_gradient()) return f->grad_slots(x0, frozen_a, grads);
        std::vector<Eigen::MatrixXd> out(q_total, Eigen::MatrixXd::Zero(n, m));
        const double d = fd_step;
        for (int s = 0; s < q_total; ++s)
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < m; ++c) {
                    const double keep = grads[s](r, c);
                    grads[s](r, c) = keep + d;
                    double fp = f->eval(x0, frozen_a, grads);
                    grads[s](r, c) = keep - d;
                    double fm = f->eval(x0, frozen_a, grads);
                    grads[s](r, c) = keep;
                    out[s](r, c) = (fp - fm) / (2.0 * d);
                }
        return out;
    }

    // dE/d(vertex values); boundary columns zeroed (pinned)
    void energy_gradient(const State& s, State& grad) const {
        for (size_t g = 0; g < groups.size(); ++g)
            for (auto& G : grad[g]) G.setZero();
        std::vector<Eigen::MatrixXd> grads(q_total, Eigen::MatrixXd::Zero(n, m));
        const double h = mesh.h();
        const double vol = mesh.cell_volume();
        for (long c = 0; c < mesh.num_cells(); ++c) {
            cell_grads(s, c, grads);
            auto slotg = density_slot_grads(grads);
            const auto& vs = cell_verts[c];
            const auto& perm = mesh.perm(mesh.cell_perm_rank(c));
            int slot = 0;
            for (size_t g = 0; g < groups.size(); ++g)
                for (int i = 0; i < groups[g].multiplicity; ++i, ++slot)
                    for (int j = 1; j <= m; ++j) {
                        Eigen::VectorXd col = (vol / h) * slotg[slot].col(perm[j - 1]);
                        grad[g][i].col(vs[j]) += col;
                        grad[g][i].col(vs[j - 1]) -= col;
                    }
        }
        for (size_t g = 0; g < groups.size(); ++g)
            for (auto& G : grad[g])
                for (long v = 0; v < mesh.num_vertices(); ++v)
                    if (boundary_vertex[v]) G.col(v).setZero();
    }

    State make_affine_state() const {
        State s(groups.size());
        for (size_t g = 0; g < groups.size(); ++g) {
            Eigen::MatrixXd sheet(n, mesh.num_vertices());
            for (long v = 0; v < mesh.num_vertices(); ++v)
                sheet.col(v) = groups[g].center + groups[g].slope * mesh.vertex_coord(v);
            s[g].assign(groups[g].multiplicity, sheet);
        }
        return s;
    }

    double affine_energy() const {
        auto L = affine_L;
        return mesh.domain().volume() * f->eval(x0, frozen_a, L);
    }

    QSheetField state_to_field(const State& s) const {
        std::vector<std::vector<Eigen::VectorXd>> values(mesh.num_vertices());
        for (long v = 0; v < mesh.num_vertices(); ++v) {
            values[v].reserve(q_total);
            for (size_t g = 0; g < groups.size(); ++g)
                for (int i = 0; i < groups[g].multiplicity; ++i) values[v].push_back(s[g][i].col(v));
        }
        std::vector<int> id(q_total);
        std::iota(id.begin(), id.end(), 0);
        std::vector<std::vector<std::vector<int>>> match(
            mesh.num_cells(), std::vector<std::vector<int>>(m + 1, id));
        return QSheetField(KuhnMesh(mesh.domain(), mesh.cells_per_side()), n, q_total,
                           std::move(values), std::move(match));
    }
};

class FrozenIntegrand : public QIntegrand {
public:
    FrozenIntegrand(const QIntegrand& f, std::vector<Eigen::VectorXd> frozen_a)
        : f_(&f), frozen_a_(std::move(frozen_a)), x0_(Eigen::VectorXd::Zero(f.m())) {}
    int m() const override { return f_->m(); }
    int n() const override { return f_->n(); }
    int q() const override { return f_->q(); }
    double eval(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
                const std::vector<Eigen::MatrixXd>& grads) const override {
        return f_->eval(x0_, frozen_a_, grads);
    }
    bool depends_on_x() const override { return false; }
    bool depends_on_values() const override { return false; }
    bool has_gradient() const override { return f_->has_gradient(); }
    std::vector<Eigen::MatrixXd> grad_slots(const Eigen::VectorXd&,
                                            const std::vector<Eigen::VectorXd>&,
                                            const std::vector<Eigen::MatrixXd>& grads) const override {
        return f_->grad_slots(x0_, frozen_a_, grads);
    }

private:
    const QIntegrand* f_;
    std::vector<Eigen::VectorXd> frozen_a_;
    Eigen::VectorXd x0_;
};

double sawtooth01(double t) {  // distance to nearest integer, PA, period 1
    double frac = t - std::floor(t);
    return std::min(frac, 1.0 - frac);
}

double pyramid_envelope(const Eigen::VectorXd& x) {  // 1 at center of C_1, 0 on the boundary
    double v = 1.0;
    for (int d = 0; d < x.size(); ++d) v = std::min(v, 1.0 - 2.0 * std::abs(x[d]));
    return std::max(0.0, v);
}

struct LaminateDir {
    int group = 0;
    Eigen::VectorXd a;  // R^n
    Eigen::VectorXd b;  // R^m
    bool split = false;
    double curvature = 0.0;
};

LaminateDir pick_laminate_direction(const Workspace& w, CounterRng rng) {
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> dirs;
    if (const auto* mat = dynamic_cast<const MattilaIntegrand*>(w.f)) {
        auto r1 = rank_one_min(mat->form());
        dirs.push_back({r1.a, r1.b});
    }
    for (int r = 0; r < w.n; ++r)
        for (int c = 0; c < w.m; ++c)
            dirs.push_back({Eigen::VectorXd::Unit(w.n, r), Eigen::VectorXd::Unit(w.m, c)});
    for (int t = 0; t < 6; ++t) {
        Eigen::VectorXd a(w.n), b(w.m);
        for (int r = 0; r < w.n; ++r) a[r] = rng.normal();
        for (int c = 0; c < w.m; ++c) b[c] = rng.normal();
        if (a.norm() == 0 || b.norm() == 0) continue;
        dirs.push_back({a.normalized(), b.normalized()});
    }

    LaminateDir best;
    bool have = false;
    const double t = 1e-4;
    auto base = w.affine_L;
    const double f0 = w.f->eval(w.x0, w.frozen_a, base);
    for (size_t gi = 0; gi < w.groups.size(); ++gi) {
        int first_slot = 0;
        for (size_t g2 = 0; g2 < gi; ++g2) first_slot += w.groups[g2].multiplicity;
        const int mult = w.groups[gi].multiplicity;
        for (const auto& [a, b] : dirs) {
            Eigen::MatrixXd D = a * b.transpose();
            for (int pattern = 0; pattern < (mult >= 2 ? 2 : 1); ++pattern) {
                auto plus = base;
                auto minus = base;
                for (int i = 0; i < mult; ++i) {
                    double eps = pattern == 0 ? 1.0 : (i % 2 == 0 ? 1.0 : -1.0);
                    plus[first_slot + i] += t * eps * D;
                    minus[first_slot + i] -= t * eps * D;
                }
                double kappa = (w.f->eval(w.x0, w.frozen_a, plus) - 2.0 * f0 +
                                w.f->eval(w.x0, w.frozen_a, minus)) /
                               (t * t);
                if (!have || kappa < best.curvature) {
                    have = true;
                    best = {static_cast<int>(gi), a, b, pattern == 1, kappa};
                }
            }
        }
    }
    return best;
}

State make_laminate_state(const Workspace& w, const LaminateDir& dir, int oscillations,
                          double slope) {
    State s = w.make_affine_state();
    const double amp = slope / (2.0 * oscillations);
    for (int i = 0; i < w.groups[dir.group].multiplicity; ++i) {
        double eps = dir.split ? (i % 2 == 0 ? 1.0 : -1.0) : 1.0;
        for (long v = 0; v < w.mesh.num_vertices(); ++v) {
            if (w.boundary_vertex[v]) continue;
            Eigen::VectorXd x = w.mesh.vertex_coord(v);
            double phi = 2.0 * amp * sawtooth01(oscillations * dir.b.dot(x));
            s[dir.group][i].col(v) += eps * phi * pyramid_envelope(x) * dir.a;
        }
    }
    return s;
}

State make_random_state(const Workspace& w, CounterRng rng, double amp) {
    State s = w.make_affine_state();
    for (size_t g = 0; g < w.groups.size(); ++g)
        for (auto& sheet : s[g])
            for (long v = 0; v < w.mesh.num_vertices(); ++v) {
                if (w.boundary_vertex[v]) continue;
                for (int r = 0; r < w.n; ++r) sheet.col(v)[r] += amp * rng.normal();
            }
    return s;
}

struct RestartResult {
    double energy = 0.0;
    std::vector<double> trace;
    State state;
    long long iterations = 0;
};

void axpy_state(State& dst, double alpha, const State& src) {
    for (size_t g = 0; g < dst.size(); ++g)
        for (size_t i = 0; i < dst[g].size(); ++i) dst[g][i] += alpha * src[g][i];
}

double state_grad_norm2(const State& g) {
    double s = 0.0;
    for (const auto& grp : g)
        for (const auto& sheet : grp) s += sheet.squaredNorm();
    return s;
}

// In-place sweep over interior vertices trying within-group sheet relabelings;
// accepts only improvements beyond the hysteresis threshold.
double rematch_sweep(const Workspace& w, State& s, double energy) {
    std::vector<Eigen::MatrixXd> grads(w.q_total, Eigen::MatrixXd::Zero(w.n, w.m));
    for (long v = 0; v < w.mesh.num_vertices(); ++v) {
        if (w.boundary_vertex[v] || w.vertex_cells[v].empty()) continue;
        for (size_t g = 0; g < w.groups.size(); ++g) {
            const int mult = w.groups[g].multiplicity;
            if (mult < 2) continue;
            double base = 0.0;
            for (long c : w.vertex_cells[v]) base += w.cell_energy(s, c, grads);
            std::vector<int> perm(mult);
            std::iota(perm.begin(), perm.end(), 0);
            std::vector<int> best_perm;
            double best_delta = -1e-12;
            std::vector<Eigen::VectorXd> orig(mult);
            for (int i = 0; i < mult; ++i) orig[i] = s[g][i].col(v);
            while (std::next_permutation(perm.begin(), perm.end())) {
                for (int i = 0; i < mult; ++i) s[g][i].col(v) = orig[perm[i]];
                double cand = 0.0;
                for (long c : w.vertex_cells[v]) cand += w.cell_energy(s, c, grads);
                if (cand - base < best_delta) {
                    best_delta = cand - base;
                    best_perm = perm;
                }
            }
            if (!best_perm.empty()) {
                for (int i = 0; i < mult; ++i) s[g][i].col(v) = orig[best_perm[i]];
                energy += best_delta;
            } else {
                for (int i = 0; i < mult; ++i) s[g][i].col(v) = orig[i];
            }
        }
    }
    return energy;
}

RestartResult run_descent(const Workspace& w, State s, const OptimizerConfig& cfg) {
    RestartResult res;
    double energy = w.total_energy(s);
    res.trace.push_back(energy);
    double step = 0.25;
    State grad = s;
    const double scale = 1.0 + std::abs(energy);
    // unbounded-below integrands: once the energy is this far under the affine
    // reference the verdict cannot change, stop with a finite certificate
    const double floor = w.affine_energy() - 1e3 * (1.0 + std::abs(w.affine_energy()));
    for (int it = 0; it < cfg.max_iters; ++it) {
        ++res.iterations;
        if (energy <= floor) break;
        if (cfg.rematch_every > 0 && it > 0 && it % cfg.rematch_every == 0) {
            double e2 = rematch_sweep(w, s, energy);
            if (e2 < energy) {
                energy = e2;
                res.trace.push_back(energy);
            }
        }
        w.energy_gradient(s, grad);
        double g2 = state_grad_norm2(grad);
        if (!std::isfinite(g2)) break;
        if (std::sqrt(g2) <= cfg.grad_tol * scale) break;
        step *= 2.0;
        bool accepted = false;
        while (step > 1e-16) {
            State cand = s;
            axpy_state(cand, -step, grad);
            double ec = w.total_energy(cand);
            if (std::isfinite(ec) && ec <= energy - 1e-4 * step * g2) {
                s = std::move(cand);
                energy = ec;
                res.trace.push_back(energy);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    // final re-matching pass
    double e2 = rematch_sweep(w, s, energy);
    if (e2 < energy) {
        energy = e2;
        res.trace.push_back(energy);
    }
    res.energy = energy;
    res.state = std::move(s);
    return res;
}

QCVerdict run_search(const Workspace& w, const OptimizerConfig& cfg, std::uint64_t stream_tag) {
    CounterRng root(cfg.seed);
    CounterRng stream = root.child(stream_tag);

    // seed schedule: affine, laminates, random perturbations
    std::vector<std::function<State()>> seeds;
    seeds.push_back([&w]() { return w.make_affine_state(); });
    if (cfg.laminate_seeds) {
        LaminateDir dir = pick_laminate_direction(w, stream.child(1));
        const std::vector<std::pair<int, double>> variants = {{1, 1.0}, {2, 1.0}, {1, 2.0},
                                                              {2, 2.0}, {4, 1.0}, {4, 2.0}};
        for (const auto& [osc, slope] : variants)
            seeds.push_back([&w, dir, osc = osc, slope = slope]() {
                return make_laminate_state(w, dir, osc, slope);
            });
    }
    const double amps[] = {0.05, 0.2, 0.5};
    for (int r = static_cast<int>(seeds.size()); r < cfg.restarts; ++r) {
        CounterRng sub = stream.child(100 + r);
        double amp = amps[r % 3];
        seeds.push_back([&w, sub, amp]() { return make_random_state(w, sub, amp); });
    }
    if (static_cast<int>(seeds.size()) > cfg.restarts) seeds.resize(std::max(1, cfg.restarts));

    std::vector<RestartResult> results(seeds.size());
    if (cfg.threads > 1) {
        std::vector<std::future<RestartResult>> futs;
        futs.reserve(seeds.size());
        for (size_t r = 0; r < seeds.size(); ++r)
            futs.push_back(std::async(std::launch::async, [&w, &cfg, &seeds, r]() {
                return run_descent(w, seeds[r](), cfg);
            }));
        for (size_t r = 0; r < seeds.size(); ++r) results[r] = futs[r].get();
    } else {
        for (size_t r = 0; r < seeds.size(); ++r) results[r] = run_descent(w, seeds[r](), cfg);
    }

    int best = 0;
    for (size_t r = 1; r < results.size(); ++r)
        if (results[r].energy < results[best].energy) best = static_cast<int>(r);

    const double vol = w.mesh.domain().volume();
    QCVerdict verdict;
    // final margin goes through the public energy() path so an independent
    // re-evaluation of the certificate reproduces it bit for bit
    QSheetField best_field = w.state_to_field(results[best].state);
    FrozenIntegrand frozen(*w.f, w.frozen_a);
    verdict.margin = (energy(frozen, best_field) - w.affine_energy()) / vol;
    verdict.log.restarts = static_cast<int>(results.size());
    verdict.log.seed = cfg.seed;
    for (const auto& r : results) {
        verdict.log.total_iterations += r.iterations;
        verdict.log.restart_final_energies.push_back(r.energy);
        verdict.log.energy_traces.push_back(r.trace);
    }
    if (verdict.margin < -cfg.tol) {
        verdict.status = QCStatus::kViolation;
        verdict.certificate = std::move(best_field);
    } else {
        verdict.status = QCStatus::kNoViolationFound;
    }
    return verdict;
}

}  // namespace

QCVerdict quasiconvexity_test(const QIntegrand& f, const AffineQMap& u,
                              const OptimizerConfig& cfg) {
    if (f.m() != u.m() || f.n() != u.n() || f.q() != u.total_q())
        throw InvalidInput("quasiconvexity_test: integrand/map dimension mismatch");
    if (!check_perm_invariance(f, 12, CounterRng(cfg.seed).child(0xA11CE).key()))
        throw InvalidInput("quasiconvexity_test: integrand is not permutation invariant");
    Workspace w(f, u.groups(), cfg.cells_per_side, cfg.fd_step);
    return run_search(w, cfg, 0x9C0FFEEULL);
}

QCVerdict semiellipticity_test(const QuadraticIntegrand& form, int q,
                               const OptimizerConfig& cfg) {
    if (q < 1) throw InvalidInput("semiellipticity_test: Q must be >= 1");
    MattilaIntegrand f(form, q);
    std::vector<AffineQMap::Group> groups = {
        {q, Eigen::VectorXd::Zero(form.n()), Eigen::MatrixXd::Zero(form.n(), form.m())}};
    Workspace w(f, groups, cfg.cells_per_side, cfg.fd_step);
    return run_search(w, cfg, 0x5E111ULL);
}

double translation_identity_gap(const QuadraticIntegrand& form, const QSheetField& f,
                                const Eigen::MatrixXd& L) {
    if (L.rows() != f.n() || L.cols() != f.m())
        throw InvalidInput("translation_identity_gap: L shape mismatch");
    AffineQMap pinned(f.m(), {{f.q(), Eigen::VectorXd::Zero(f.n()),
                               Eigen::MatrixXd::Zero(f.n(), f.m())}});
    if (f.boundary_trace_distance(pinned) > 1e-9)
        throw InvalidInput("translation_identity_gap: field is not boundary-pinned to k[[0]]");
    auto values = f.vertex_values();
    for (long v = 0; v < f.mesh().num_vertices(); ++v) {
        Eigen::VectorXd shift = L * f.mesh().vertex_coord(v);
        for (auto& e : values[v]) e += shift;
    }
    QSheetField g(KuhnMesh(f.domain(), f.mesh().cells_per_side()), f.n(), f.q(),
                  std::move(values), f.matchings());
    return mattila_energy(form, g) - mattila_energy(form, f) -
           f.q() * form.apply(L) * f.domain().volume();
}

RankOneResult rank_one_min(const QuadraticIntegrand& form, int multistarts, std::uint64_t seed) {
    const int n = form.n(), m = form.m();
    const auto& A = form.matrix();

    auto embed_b = [&](const Eigen::VectorXd& b) {
        // columns: vec(e_r b^T), col-major layout idx = c*n + r
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n * m, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < m; ++c) B(c * n + r, r) = b[c];
        return B;
    };
    auto embed_a = [&](const Eigen::VectorXd& a) {
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n * m, m);
        for (int c = 0; c < m; ++c)
            for (int r = 0; r < n; ++r) C(c * n + r, c) = a[r];
        return C;
    };

    CounterRng rng(seed);
    RankOneResult best;
    best.value = std::numeric_limits<double>::infinity();
    std::vector<Eigen::VectorXd> starts;
    for (int c = 0; c < m; ++c) starts.push_back(Eigen::VectorXd::Unit(m, c));
    for (int t = static_cast<int>(starts.size()); t < multistarts; ++t) {
        Eigen::VectorXd b(m);
        for (int c = 0; c < m; ++c) b[c] = rng.normal();
        if (b.norm() == 0) b = Eigen::VectorXd::Unit(m, 0);
        starts.push_back(b.normalized());
    }

    for (auto b : starts) {
        Eigen::VectorXd a = Eigen::VectorXd::Unit(n, 0);
        double value = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 80; ++it) {
            Eigen::MatrixXd B = embed_b(b);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_a(B.transpose() * A * B);
            a = es_a.eigenvectors().col(0);
            Eigen::MatrixXd C = embed_a(a);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_b(C.transpose() * A * C);
            b = es_b.eigenvectors().col(0);
            double v = es_b.eigenvalues()(0);
            if (std::abs(v - value) < 1e-15) {
                value = v;
                break;
            }
            value = v;
        }
        if (value < best.value) {
            best.value = value;
            best.a = a;
            best.b = b;
        }
    }
    return best;
}

std::vector<Eigen::MatrixXd> minor_quadratic_forms(int n, int m) {
    std::vector<Eigen::MatrixXd> out;
    auto idx = [n](int r, int c) { return c * n + r; };
    for (int r = 0; r < n; ++r)
        for (int s = r + 1; s < n; ++s)
            for (int c = 0; c < m; ++c)
                for (int d = c + 1; d < m; ++d) {
                    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n * m, n * m);
                    D(idx(r, c), idx(s, d)) += 0.5;
                    D(idx(s, d), idx(r, c)) += 0.5;
                    D(idx(r, d), idx(s, c)) -= 0.5;
                    D(idx(s, c), idx(r, d)) -= 0.5;
                    out.push_back(D);
                }
    return out;
}

PolyconvexityOutcome polyconvexity_certificate(const QuadraticIntegrand& form,
                                               std::uint64_t seed) {
    const int n = form.n(), m = form.m();
    auto minors = minor_quadratic_forms(n, m);
    const int K = static_cast<int>(minors.size());
    const auto& A = form.matrix();

    auto phi = [&](const Eigen::VectorXd& lam, Eigen::VectorXd* eigvec) {
        Eigen::MatrixXd S = A;
        for (int k = 0; k < K; ++k) S += lam[k] * minors[k];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        if (eigvec) *eigvec = es.eigenvectors().col(0);
        return es.eigenvalues()(0);
    };

    PolyconvexityOutcome out;
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(K);
    if (K == 0) {
        out.best = {lam, phi(lam, nullptr)};
        out.feasible = out.best.min_eigenvalue >= -1e-8;
        return out;
    }

    double best_val;
    Eigen::VectorXd best_lam = lam;
    if (K == 1) {
        // concave 1-d maximization by golden section on a safe bracket
        double B = 8.0 * (1.0 + A.cwiseAbs().maxCoeff() * A.rows());
        double lo = -B, hi = B;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        Eigen::VectorXd l1(1), l2(1);
        l1[0] = x1;
        l2[0] = x2;
        double f1 = phi(l1, nullptr), f2 = phi(l2, nullptr);
        for (int it = 0; it < 200; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                l2[0] = x2;
                f2 = phi(l2, nullptr);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                l1[0] = x1;
                f1 = phi(l1, nullptr);
            }
        }
        best_lam[0] = 0.5 * (lo + hi);
        best_val = phi(best_lam, nullptr);
        // keep lambda = 0 if it is already at least as good (clean certificates)
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
        double f0 = phi(zero, nullptr);
        if (f0 >= best_val - 1e-14) {
            best_val = f0;
            best_lam = zero;
        }
    } else {
        // supergradient ascent with multistart
        CounterRng rng(seed);
        const double scale = 1.0 + A.cwiseAbs().maxCoeff() * A.rows();
        best_val = -std::numeric_limits<double>::infinity();
        for (int start = 0; start < 4; ++start) {
            Eigen::VectorXd cur = Eigen::VectorXd::Zero(K);
            if (start > 0)
                for (int k = 0; k < K; ++k) cur[k] = scale * rng.normal();
            for (int it = 0; it < 4000; ++it) {
                Eigen::VectorXd v;
                double val = phi(cur, &v);
                if (val > best_val) {
                    best_val = val;
                    best_lam = cur;
                }
                Eigen::VectorXd g(K);
                for (int k = 0; k < K; ++k) g[k] = v.dot(minors[k] * v);
                double gn = g.norm();
                if (gn < 1e-14) break;
                cur += (scale / std::sqrt(1.0 + it)) * g / gn;
            }
        }
        best_val = phi(best_lam, nullptr);
    }
    out.best = {best_lam, best_val};
    out.feasible = best_val >= -1e-8;
    return out;
}

std::unique_ptr<QIntegrand> freeze_integrand(const QIntegrand& f, const AffineQMap& u) {
    std::vector<Eigen::VectorXd> frozen;
    for (const auto& g : u.groups())
        for (int i = 0; i < g.multiplicity; ++i) frozen.push_back(g.center);
    return std::make_unique<FrozenIntegrand>(f, std::move(frozen));
}

NecessityReport necessity_experiment(const QIntegrand& F, const AffineQMap& u,
                                     const std::vector<QSheetField>& competitors,
                                     const std::vector<int>& fold_counts, double scale) {
    if (fold_counts.empty()) throw InvalidInput("necessity_experiment: no fold counts");
    NecessityReport rep;
    rep.fold_counts = fold_counts;
    rep.gradient_only = !F.depends_on_x() && !F.depends_on_values();

    const int kw = competitors.empty() ? 1 : competitors.front().mesh().cells_per_side();
    QSheetField u_field = QSheetField::sample_affine(
        u, CubeDomain{Eigen::VectorXd::Zero(u.m()), scale}, kw);
    rep.affine_energy = energy(F, u_field);

    for (int k : fold_counts) {
        QSheetField folded = fold_sequence(u, competitors, k, scale);
        rep.folded_energies.push_back(energy(F, folded));
    }

    auto frozen = freeze_integrand(F, u);
    QSheetField merged = merge_fields(competitors);
    rep.competitor_energy_scaled =
        std::pow(scale, u.m()) * energy(*frozen, merged);

    rep.max_fold_deviation = 0.0;
    for (double e : rep.folded_energies)
        rep.max_fold_deviation =
            std::max(rep.max_fold_deviation, std::abs(e - rep.folded_energies.front()));
    rep.k_independent =
        rep.max_fold_deviation <= 1e-10 * std::max(1.0, std::abs(rep.folded_energies.front()));
    double min_folded = *std::min_element(rep.folded_energies.begin(), rep.folded_energies.end());
    rep.semicontinuity_violated = min_folded < rep.affine_energy - 1e-9;
    return rep;
}

}  // namespace qvar
