#include "wavelab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "wavelab/parallel.hpp"

namespace wavelab {

namespace {

struct StencilGeom {
    std::vector<std::vector<double>> face_w;  // per-axis sqrt(det g) g^aa / h^2 at centers
    std::vector<double> inv_sqrtg;
};

StencilGeom make_geom(const GridSpec& grid, const Metric& m) {
    StencilGeom g;
    const int d = grid.dim;
    const std::size_t cells = grid.cells();
    g.face_w.assign(d, std::vector<double>(cells));
    g.inv_sqrtg.assign(cells, 0.0);
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    for (std::size_t c = 0; c < cells; ++c) {
        Vec3 x = grid.cell_center(c);
        double sg = m.sqrt_det_g(x);
        Vec3 gs = m.g_star_diag(x);
        g.inv_sqrtg[c] = 1.0 / sg;
        for (int a = 0; a < d; ++a) g.face_w[a][c] = sg * gs[a] * inv_h2;
    }
    return g;
}

std::vector<double> make_sponge(const GridSpec& grid, const SolverConfig& cfg) {
    std::vector<double> s(grid.cells(), 0.0);
    if (cfg.boundary != SolverConfig::Boundary::Sponge || cfg.sponge_width <= 0 ||
        cfg.sponge_strength <= 0)
        return s;
    const int d = grid.dim;
    const int w = cfg.sponge_width;
    const int nx = grid.n[0], ny = grid.n[1], nz = (d == 3) ? grid.n[2] : 1;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int depth = 0;
                int idx3[3] = {i, j, k};
                for (int a = 0; a < d; ++a) {
                    int dd = std::min(idx3[a], grid.n[a] - 1 - idx3[a]);
                    if (dd < w) depth = std::max(depth, w - dd);
                }
                if (depth > 0) {
                    double r = static_cast<double>(depth) / w;
                    s[grid.index(i, j, k)] = cfg.sponge_strength * r * r;
                }
            }
    return s;
}

/// Core update into `next`. Writes every cell exactly once; deterministic for
/// any chunking of the row range.
void update_rows(const GridSpec& grid, const StencilGeom& geom, const std::vector<double>& sponge,
                 const SolverConfig& cfg, const std::vector<double>* a_grid,
                 const std::vector<double>* q_grid, const double* f, double dt,
                 const std::vector<double>& up, const std::vector<double>& uc,
                 std::vector<double>& un, std::size_t row_begin, std::size_t row_end) {
    const int d = grid.dim;
    const int nx = grid.n[0];
    const int ny = grid.n[1];
    const bool periodic = cfg.boundary == SolverConfig::Boundary::Periodic;
    const double dt2 = dt * dt;
    const std::size_t sx = 1;
    const std::size_t sy = static_cast<std::size_t>(nx);
    const std::size_t sz = sy * static_cast<std::size_t>(ny);
    const std::size_t strides[3] = {sx, sy, sz};

    for (std::size_t row = row_begin; row < row_end; ++row) {
        const int j = static_cast<int>(row % ny);
        const int kz = static_cast<int>(row / ny);
        const std::size_t base = row * sy;
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = base + i;
            const int idx3[3] = {i, j, kz};
            double flux = 0.0;
            for (int a = 0; a < d; ++a) {
                const std::size_t s = strides[a];
                const double wc = geom.face_w[a][c];
                // plus face
                double fp;
                if (idx3[a] + 1 < grid.n[a]) {
                    const std::size_t cp = c + s;
                    fp = 0.5 * (wc + geom.face_w[a][cp]) * (uc[cp] - uc[c]);
                } else if (periodic) {
                    const std::size_t cp = c - s * static_cast<std::size_t>(grid.n[a] - 1);
                    fp = 0.5 * (wc + geom.face_w[a][cp]) * (uc[cp] - uc[c]);
                } else {
                    fp = wc * (0.0 - uc[c]);
                }
                // minus face
                double fm;
                if (idx3[a] > 0) {
                    const std::size_t cm = c - s;
                    fm = 0.5 * (wc + geom.face_w[a][cm]) * (uc[c] - uc[cm]);
                } else if (periodic) {
                    const std::size_t cm = c + s * static_cast<std::size_t>(grid.n[a] - 1);
                    fm = 0.5 * (wc + geom.face_w[a][cm]) * (uc[c] - uc[cm]);
                } else {
                    fm = wc * (uc[c] - 0.0);
                }
                flux += fp - fm;
            }
            double rhs = geom.inv_sqrtg[c] * flux;
            if (q_grid) rhs -= (*q_grid)[c] * uc[c];
            if (a_grid) rhs -= (*a_grid)[c] * uc[c] * uc[c];
            if (f) rhs += f[c];
            const double sig = sponge[c];
            if (sig > 0.0) {
                const double sd = 0.5 * sig * dt;
                un[c] = (2.0 * uc[c] - up[c] + sd * up[c] + dt2 * rhs) / (1.0 + sd);
            } else {
                un[c] = 2.0 * uc[c] - up[c] + dt2 * rhs;
            }
        }
    }
}

}  // namespace

void apply_laplacian_flux(const GridSpec& grid, const Metric& m, const SolverConfig& cfg,
                          const std::vector<double>& u, std::vector<double>& out) {
    StencilGeom geom = make_geom(grid, m);
    std::vector<double> zero_prev(grid.cells(), 0.0);
    std::vector<double> sponge(grid.cells(), 0.0);
    out.assign(grid.cells(), 0.0);
    // Run the stencil with dt = 1, u_prev = 2u so that un = dt^2 * flux term.
    std::vector<double> up(grid.cells());
    for (std::size_t c = 0; c < up.size(); ++c) up[c] = 2.0 * u[c];
    const int ny = grid.n[1];
    const int nz = (grid.dim == 3) ? grid.n[2] : 1;
    update_rows(grid, geom, sponge, cfg, nullptr, nullptr, nullptr, 1.0, up, u, out, 0,
                static_cast<std::size_t>(ny) * nz);
}

std::vector<double> leapfrog_step(const std::vector<double>& u_prev,
                                  const std::vector<double>& u_curr,
                                  const std::vector<double>* a_grid,
                                  const std::vector<double>* q_grid, const double* f_slice,
                                  const GridSpec& grid, const Metric& m, const SolverConfig& cfg) {
    StencilGeom geom = make_geom(grid, m);
    std::vector<double> sponge = make_sponge(grid, cfg);
    std::vector<double> un(grid.cells());
    const int ny = grid.n[1];
    const int nz = (grid.dim == 3) ? grid.n[2] : 1;
    const std::size_t rows = static_cast<std::size_t>(ny) * nz;
    parallel_for(rows, cfg.threads, [&](std::size_t b, std::size_t e) {
        update_rows(grid, geom, sponge, cfg, a_grid, q_grid, f_slice, grid.dt, u_prev, u_curr, un,
                    b, e);
    });
    return un;
}

Stepper::Stepper(const GridSpec& grid, const Metric& m, const SolverConfig& cfg)
    : grid_(grid), metric_(m), cfg_(cfg) {
    if (grid.cfl > 0.5) throw ValidationError("cfl must be <= 0.5", "grid.cfl");
    precompute();
}

void Stepper::precompute() {
    StencilGeom geom = make_geom(grid_, metric_);
    face_w_ = std::move(geom.face_w);
    inv_sqrtg_ = std::move(geom.inv_sqrtg);
    sponge_ = make_sponge(grid_, cfg_);
}

void Stepper::check_blowup(const std::vector<double>& u, int step) {
    double amax = 0.0;
    for (double v : u) amax = std::max(amax, std::abs(v));
    if (!std::isfinite(amax)) throw BlowUp(step, amax);
    // Calibrate over the first steps so source-driven runs that start near
    // zero get a meaningful scale.
    if (step <= 10 || cap_ == 0.0) {
        if (amax > 0.0) cap_ = std::max(cap_, cfg_.blowup_factor * amax);
        return;
    }
    if (amax > cap_) throw BlowUp(step, amax);
}

void Stepper::seed_cauchy(const std::vector<double>& u0, const std::vector<double>& v0,
                          const double* f0) {
    prev_ = u0;
    // Second-order Taylor start.
    StencilGeom geom{face_w_, inv_sqrtg_};
    std::vector<double> lap(grid_.cells());
    const int ny = grid_.n[1];
    const int nz = (grid_.dim == 3) ? grid_.n[2] : 1;
    const std::size_t rows = static_cast<std::size_t>(ny) * nz;
    std::vector<double> up(grid_.cells());
    for (std::size_t c = 0; c < up.size(); ++c) up[c] = 2.0 * u0[c];
    std::vector<double> no_sponge(grid_.cells(), 0.0);
    parallel_for(rows, cfg_.threads, [&](std::size_t b, std::size_t e) {
        update_rows(grid_, geom, no_sponge, cfg_, nullptr, nullptr, nullptr, 1.0, up, u0, lap, b,
                    e);
    });
    curr_.assign(grid_.cells(), 0.0);
    const double dt = grid_.dt;
    for (std::size_t c = 0; c < curr_.size(); ++c) {
        double rhs = lap[c];
        if (q_) rhs -= (*q_)[c] * u0[c];
        if (a_) rhs -= (*a_)[c] * u0[c] * u0[c];
        if (f0) rhs += f0[c];
        curr_[c] = u0[c] + dt * v0[c] + 0.5 * dt * dt * rhs;
    }
    k_ = 1;
    cap_ = 0.0;
    check_blowup(prev_, 0);
    check_blowup(curr_, 1);
}

void Stepper::seed_slices(std::vector<double> s0, std::vector<double> s1) {
    prev_ = std::move(s0);
    curr_ = std::move(s1);
    k_ = 1;
    cap_ = 0.0;
    check_blowup(prev_, 0);
    check_blowup(curr_, 1);
}

const std::vector<double>& Stepper::advance(const double* f) {
    next_.resize(grid_.cells());
    StencilGeom geom{face_w_, inv_sqrtg_};
    const int ny = grid_.n[1];
    const int nz = (grid_.dim == 3) ? grid_.n[2] : 1;
    const std::size_t rows = static_cast<std::size_t>(ny) * nz;
    parallel_for(rows, cfg_.threads, [&](std::size_t b, std::size_t e) {
        update_rows(grid_, geom, sponge_, cfg_, a_, q_, f, grid_.dt, prev_, curr_, next_, b, e);
    });
    ++k_;
    check_blowup(next_, k_);
    std::swap(prev_, curr_);
    std::swap(curr_, next_);
    return curr_;
}

WaveField solve_linear(const GridSpec& grid, const Metric& m, const SolverConfig& cfg,
                       const CauchyData* initial, const SourceFn& source,
                       const std::vector<double>* q_grid) {
    Stepper st(grid, m, cfg);
    st.set_potential(q_grid);
    WaveField out;
    out.grid = grid;
    out.slices.reserve(grid.n_t + 1);
    const double* f0 = source ? source(0) : nullptr;
    if (initial) {
        st.seed_cauchy(initial->u0, initial->u1, f0);
    } else {
        std::vector<double> z(grid.cells(), 0.0);
        st.seed_cauchy(z, z, f0);
    }
    out.slices.push_back(st.prev());
    out.slices.push_back(st.curr());
    for (int k = 1; k < grid.n_t; ++k) {
        const double* f = source ? source(k) : nullptr;
        out.slices.push_back(st.advance(f));
    }
    return out;
}

namespace {

CauchyData combined_pulses(const Problem& prob, double eps1, double eps2) {
    CauchyData d;
    d.u0.assign(prob.grid.cells(), 0.0);
    d.u1.assign(prob.grid.cells(), 0.0);
    if (eps1 != 0.0) {
        CauchyData p1 = build_pulse(prob.grid, prob.metric, prob.src1);
        for (std::size_t c = 0; c < d.u0.size(); ++c) {
            d.u0[c] += eps1 * p1.u0[c];
            d.u1[c] += eps1 * p1.u1[c];
        }
    }
    if (eps2 != 0.0) {
        CauchyData p2 = build_pulse(prob.grid, prob.metric, prob.src2);
        for (std::size_t c = 0; c < d.u0.size(); ++c) {
            d.u0[c] += eps2 * p2.u0[c];
            d.u1[c] += eps2 * p2.u1[c];
        }
    }
    return d;
}

}  // namespace

WaveField solve_semilinear(const Problem& prob, double eps1, double eps2) {
    std::vector<double> a = build_coefficient(prob.grid, prob.coeff);
    std::vector<double> q = build_potential(prob.grid, prob.coeff);
    const bool has_q = prob.coeff.potential_enabled;

    Stepper st(prob.grid, prob.metric, prob.cfg);
    st.set_nonlinear(&a);
    if (has_q) st.set_potential(&q);

    CauchyData init = combined_pulses(prob, eps1, eps2);
    st.seed_cauchy(init.u0, init.u1);

    WaveField out;
    out.grid = prob.grid;
    out.slices.reserve(prob.grid.n_t + 1);
    out.slices.push_back(st.prev());
    out.slices.push_back(st.curr());
    for (int k = 1; k < prob.grid.n_t; ++k) out.slices.push_back(st.advance());
    return out;
}

PicardResult picard_solve(const Problem& prob, double eps1, double eps2) {
    std::vector<double> a = build_coefficient(prob.grid, prob.coeff);
    std::vector<double> q = build_potential(prob.grid, prob.coeff);
    const std::vector<double>* qp = prob.coeff.potential_enabled ? &q : nullptr;
    CauchyData init = combined_pulses(prob, eps1, eps2);

    PicardResult res;
    WaveField prev_it;  // u_{m-1}
    std::vector<double> src_slice(prob.grid.cells());
    int bad_ratio_streak = 0;
    for (int m = 0; m < prob.cfg.picard_max_iter; ++m) {
        SourceFn src = nullptr;
        if (m > 0) {
            src = [&](int k) -> const double* {
                const auto& u = prev_it.slices[static_cast<std::size_t>(k)];
                for (std::size_t c = 0; c < src_slice.size(); ++c)
                    src_slice[c] = -a[c] * u[c] * u[c];
                return src_slice.data();
            };
        }
        WaveField um = solve_linear(prob.grid, prob.metric, prob.cfg, &init, src, qp);
        if (m > 0) {
            WaveField diff;
            diff.grid = prob.grid;
            diff.slices.resize(um.slices.size());
            for (std::size_t k = 0; k < um.slices.size(); ++k) {
                diff.slices[k].resize(um.slices[k].size());
                for (std::size_t c = 0; c < um.slices[k].size(); ++c)
                    diff.slices[k][c] = um.slices[k][c] - prev_it.slices[k][c];
            }
            double B = field_norm(diff, NormKind::L4, prob.metric);
            res.B.push_back(B);
            std::size_t nb = res.B.size();
            if (nb >= 2 && res.B[nb - 2] > 0.0) {
                double ratio = res.B[nb - 1] / res.B[nb - 2];
                bad_ratio_streak = (ratio > 0.9) ? bad_ratio_streak + 1 : 0;
                if (bad_ratio_streak >= 2)
                    throw NoContraction("Picard increments not contracting: eps too large");
            }
            if (B < prob.cfg.picard_tol) {
                res.field = std::move(um);
                return res;
            }
        }
        prev_it = std::move(um);
    }
    res.field = std::move(prev_it);
    return res;
}

double energy_drift(const WaveField& field, const Metric& m, double t_lo, double t_hi,
                    const std::optional<Box>& region) {
    const GridSpec& g = field.grid;
    int k_lo = std::max(1, static_cast<int>(std::ceil(t_lo / g.dt)));
    int k_hi = std::min(static_cast<int>(field.slices.size()) - 2,
                        static_cast<int>(std::floor(t_hi / g.dt)));
    if (k_hi < k_lo) throw ValidationError("empty energy window");
    double emin = 1e300, emax = -1e300, esum = 0.0;
    int cnt = 0;
    for (int k = k_lo; k <= k_hi; ++k) {
        double e = energy_at_slice(field, m, k, region);
        emin = std::min(emin, e);
        emax = std::max(emax, e);
        esum += e;
        ++cnt;
    }
    double mean = esum / cnt;
    if (mean == 0.0) return 0.0;
    return (emax - emin) / mean;
}

}  // namespace wavelab
