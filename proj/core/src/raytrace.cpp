#include "wavelab/raytrace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wavelab/parallel.hpp"

namespace wavelab {

namespace {

struct FlowState {
    double t, tau;
    Vec3 x, xi;
};

FlowState to_state(const PhasePoint& pp) {
    return {pp.x.t, pp.zeta.tau, pp.x.x, pp.zeta.xi};
}

PhasePoint to_phase(const FlowState& s) {
    PhasePoint pp;
    pp.x.t = s.t;
    pp.x.x = s.x;
    pp.zeta.tau = s.tau;
    pp.zeta.xi = s.xi;
    return pp;
}

FlowState rate(const Metric& m, const FlowState& s) {
    HamiltonRate r = hamiltonian_field(m, to_phase(s));
    return {r.dx.t, r.dzeta.tau, r.dx.x, r.dzeta.xi};
}

FlowState axpy_state(const FlowState& a, double c, const FlowState& b, int dim) {
    FlowState r = a;
    r.t += c * b.t;
    r.tau += c * b.tau;
    for (int i = 0; i < dim; ++i) {
        r.x[i] += c * b.x[i];
        r.xi[i] += c * b.xi[i];
    }
    return r;
}

FlowState rk4_step(const Metric& m, const FlowState& s, double h) {
    const int d = m.dim();
    FlowState k1 = rate(m, s);
    FlowState k2 = rate(m, axpy_state(s, 0.5 * h, k1, d));
    FlowState k3 = rate(m, axpy_state(s, 0.5 * h, k2, d));
    FlowState k4 = rate(m, axpy_state(s, h, k3, d));
    FlowState r = s;
    r.t += h / 6.0 * (k1.t + 2 * k2.t + 2 * k3.t + k4.t);
    r.tau += h / 6.0 * (k1.tau + 2 * k2.tau + 2 * k3.tau + k4.tau);
    for (int i = 0; i < d; ++i) {
        r.x[i] += h / 6.0 * (k1.x[i] + 2 * k2.x[i] + 2 * k3.x[i] + k4.x[i]);
        r.xi[i] += h / 6.0 * (k1.xi[i] + 2 * k2.xi[i] + 2 * k3.xi[i] + k4.xi[i]);
    }
    return r;
}

double hat_distance_sq(const Metric& m, const SpacetimePoint& a, const SpacetimePoint& b) {
    const int d = m.dim();
    Vec3 dx{};
    Vec3 mid{};
    for (int i = 0; i < d; ++i) {
        dx[i] = a.x[i] - b.x[i];
        mid[i] = 0.5 * (a.x[i] + b.x[i]);
    }
    double dt = a.t - b.t;
    return dt * dt + m.g_quad(mid, dx, dx);
}

}  // namespace

Ray trace(const Metric& m, const PhasePoint& start, double t_end, double step,
          const DomainBox* box) {
    Ray ray;
    ray.theta_step = step;
    FlowState s = to_state(start);
    ray.samples.push_back(to_phase(s));
    ray.p_drift = std::abs(symbol_p(m, ray.samples.back()));
    const int max_steps = 10'000'000;
    for (int k = 0; k < max_steps && s.t < t_end; ++k) {
        double h = step;
        double dtdtheta = -2.0 * s.tau;
        if (dtdtheta > 0.0 && s.t + dtdtheta * step > t_end) {
            h = (t_end - s.t) / dtdtheta;  // partial step to land on t_end
        }
        FlowState next;
        try {
            next = rk4_step(m, s, h);
        } catch (const OutOfDomain&) {
            ray.left_domain = true;
            break;
        }
        if (box && !box->contains(next.x, m.dim())) {
            ray.left_domain = true;
            break;
        }
        s = next;
        ray.samples.push_back(to_phase(s));
        ray.p_drift = std::max(ray.p_drift, std::abs(symbol_p(m, ray.samples.back())));
        if (dtdtheta <= 0.0) break;  // not moving forward in t; bail out
    }
    return ray;
}

InterfaceSpec InterfaceSpec::plane(const Vec3& normal, double offset, int dim) {
    InterfaceSpec s;
    s.shape_ = Shape::Plane;
    s.dim_ = dim;
    s.a_ = normal;
    s.b_ = offset;
    return s;
}

InterfaceSpec InterfaceSpec::sphere(const Vec3& center, double radius, int dim) {
    InterfaceSpec s;
    s.shape_ = Shape::Sphere;
    s.dim_ = dim;
    s.a_ = center;
    s.b_ = radius;
    return s;
}

double InterfaceSpec::phi(const Vec3& x) const {
    if (shape_ == Shape::Plane) return dot(a_, x, dim_) - b_;
    Vec3 d{};
    for (int i = 0; i < dim_; ++i) d[i] = x[i] - a_[i];
    return std::sqrt(norm2(d, dim_)) - b_;
}

Covector InterfaceSpec::conormal(const Vec3& x) const {
    Covector c;
    c.tau = 0.0;
    if (shape_ == Shape::Plane) {
        c.xi = a_;
    } else {
        Vec3 d{};
        for (int i = 0; i < dim_; ++i) d[i] = x[i] - a_[i];
        double r = std::sqrt(norm2(d, dim_));
        if (r == 0.0) throw ValidationError("interface conormal undefined at sphere center");
        c.xi = scaled(1.0 / r, d, dim_);
    }
    return c;
}

double InterfaceSpec::noncharacteristic_margin(const Metric& m, const Vec3& x) const {
    Covector c = conormal(x);
    double q = m.gstar_quad(x, c.xi, c.xi);
    return std::abs(c.tau * c.tau - q) / q;
}

Covector reflect_at_interface(const Metric& m, const SpacetimePoint& p, const Covector& zeta_in,
                              const InterfaceSpec& iface) {
    const int d = m.dim();
    const double tau_in = zeta_in.tau;
    if (tau_in == 0.0) throw TangentialIncidence("incident covector has tau = 0");
    // Normalize to (1, alpha).
    Covector u;
    u.tau = 1.0;
    u.xi = scaled(1.0 / tau_in, zeta_in.xi, d);
    Covector w = iface.conormal(p.x);  // (s, beta)

    // p((1,alpha) + b (s,beta)) = c0 + c1 b + c2 b^2
    const double c0 = -1.0 + m.gstar_quad(p.x, u.xi, u.xi);
    const double c1 = 2.0 * m.lorentz_dual(p.x, u, w);
    const double c2 = m.lorentz_dual(p.x, w, w);

    const double scale = m.hat_dual_sq(p.x, u) * m.hat_dual_sq(p.x, w);
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc <= 1e-12 * scale)
        throw TangentialIncidence("double root at b = 0: grazing incidence");
    const double sq = std::sqrt(disc);
    // Roots; one is ~0 (reproduces the incident covector), take the other.
    const double r1 = (-c1 + sq) / (2.0 * c2);
    const double r2 = (-c1 - sq) / (2.0 * c2);
    const double b = (std::abs(r1) > std::abs(r2)) ? r1 : r2;

    Covector out;
    out.tau = tau_in * (u.tau + b * w.tau);
    out.xi = scaled(tau_in, axpy(b, w.xi, u.xi, d), d);
    return out;
}

std::vector<PhasePoint> cone_covectors(const Metric& m, const SpacetimePoint& p0,
                                       const std::vector<SpacetimeVec>& tangents, int n_samples) {
    const int d = m.dim();
    for (const auto& th : tangents) {
        if (m.lorentz_tangent_sq(p0.x, th) <= 0.0)
            throw NotSpacelike("interaction-set tangent is causal");
    }
    std::vector<PhasePoint> out;
    out.reserve(n_samples);
    const double two_pi = 2.0 * std::numbers::pi;

    if (d == 2) {
        if (!tangents.empty())
            throw ValidationError("in d=2 the interaction set is a point; no tangents expected");
        for (int k = 0; k < n_samples; ++k) {
            double th = two_pi * k / n_samples;
            Vec3 dir{std::cos(th), std::sin(th), 0.0};
            double nrm = std::sqrt(m.gstar_quad(p0.x, dir, dir));
            PhasePoint pp;
            pp.x = p0;
            pp.zeta.tau = -1.0;
            pp.zeta.xi = scaled(1.0 / nrm, dir, d);
            out.push_back(pp);
        }
        return out;
    }

    if (tangents.size() != 1)
        throw ValidationError("in d=3 exactly one space-like tangent is expected");
    const SpacetimeVec& v = tangents[0];
    double nsp2 = norm2(v.x, d);
    if (nsp2 == 0.0) throw NotSpacelike("tangent has no spatial part");  // unreachable: causal
    // Covectors (-1, xi) with <zeta, v> = 0  =>  xi . v_x = v_t, and g*(xi,xi) = 1.
    Vec3 xi_p = scaled(v.t / nsp2, v.x, d);
    // Euclidean-orthonormal basis of {xi . v_x = 0}.
    Vec3 n = scaled(1.0 / std::sqrt(nsp2), v.x, d);
    Vec3 ref = (std::abs(n[0]) < 0.9) ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 w1{};
    double rn = dot(ref, n, d);
    for (int i = 0; i < d; ++i) w1[i] = ref[i] - rn * n[i];
    double w1n = std::sqrt(norm2(w1, d));
    w1 = scaled(1.0 / w1n, w1, d);
    Vec3 w2{n[1] * w1[2] - n[2] * w1[1], n[2] * w1[0] - n[0] * w1[2],
            n[0] * w1[1] - n[1] * w1[0]};

    for (int k = 0; k < n_samples; ++k) {
        double th = two_pi * k / n_samples;
        Vec3 u{};
        for (int i = 0; i < d; ++i) u[i] = std::cos(th) * w1[i] + std::sin(th) * w2[i];
        const double A = m.gstar_quad(p0.x, u, u);
        const double B = m.gstar_quad(p0.x, xi_p, u);
        const double C = m.gstar_quad(p0.x, xi_p, xi_p) - 1.0;
        const double disc = B * B - A * C;
        if (disc < 0.0) throw NotSpacelike("no null covector in the annihilator plane");
        const double r = (-B + std::sqrt(disc)) / A;
        PhasePoint pp;
        pp.x = p0;
        pp.zeta.tau = -1.0;
        pp.zeta.xi = axpy(r, u, xi_p, d);
        out.push_back(pp);
    }
    return out;
}

namespace {

SpacetimeVec ray_velocity(const Metric& m, const PhasePoint& pp) {
    HamiltonRate r = hamiltonian_field(m, pp);
    double n2 = r.dx.t * r.dx.t + norm2(r.dx.x, m.dim());
    double inv = (n2 > 0) ? 1.0 / std::sqrt(n2) : 0.0;
    return {r.dx.t * inv, scaled(inv, r.dx.x, m.dim())};
}

SpacetimeVec conormal_frame(const Metric& m, const PhasePoint& pp) {
    // Raise the covector with hat-g and normalize.
    const int d = m.dim();
    Vec3 gs = m.g_star_diag(pp.x.x);
    SpacetimeVec v;
    v.t = pp.zeta.tau;
    for (int i = 0; i < d; ++i) v.x[i] = gs[i] * pp.zeta.xi[i];
    double n2 = m.hat_dual_sq(pp.x.x, pp.zeta);
    double inv = (n2 > 0) ? 1.0 / std::sqrt(n2) : 0.0;
    v.t *= inv;
    v.x = scaled(inv, v.x, d);
    return v;
}

/// Appends decimated samples of a ray to a surface.
void append_ray_samples(const Metric& m, const Ray& ray, double spacing, double t_min,
                        Surface& surf) {
    bool have_last = false;
    SpacetimePoint last;
    for (const auto& pp : ray.samples) {
        if (pp.x.t < t_min) continue;
        if (have_last && hat_distance_sq(m, pp.x, last) < spacing * spacing) continue;
        SurfaceSample s;
        s.p = pp.x;
        s.tangent = ray_velocity(m, pp);
        s.normal = conormal_frame(m, pp);
        surf.samples.push_back(s);
        last = pp.x;
        have_last = true;
    }
}

/// Fan of null covectors around a central one, within hat-norm aperture s0.
std::vector<PhasePoint> make_fan(const Metric& m, const PhasePoint& central, double s0,
                                 int count) {
    const int d = m.dim();
    const double speed = std::abs(central.zeta.tau);
    Vec3 dir0 = central.zeta.xi;
    double d0 = std::sqrt(norm2(dir0, d));
    dir0 = scaled(1.0 / d0, dir0, d);

    auto lift_dir = [&](const Vec3& dir) {
        double nrm = std::sqrt(m.gstar_quad(central.x.x, dir, dir));
        PhasePoint pp;
        pp.x = central.x;
        pp.zeta.xi = scaled(speed / nrm, dir, d);
        pp.zeta.tau = central.zeta.tau < 0 ? -speed : speed;
        return pp;
    };
    auto aperture_dist = [&](const Vec3& dir) {
        PhasePoint pp = lift_dir(dir);
        Covector diff;
        diff.tau = pp.zeta.tau - central.zeta.tau;
        for (int i = 0; i < d; ++i) diff.xi[i] = pp.zeta.xi[i] - central.zeta.xi[i];
        return std::sqrt(m.hat_dual_sq(central.x.x, diff));
    };

    std::vector<PhasePoint> fan;
    fan.reserve(count);
    if (d == 2) {
        double psi0 = std::atan2(dir0[1], dir0[0]);
        // Scan for the angular aperture matching s0 in the hat norm.
        double psi_max = 0.0;
        for (double psi = 0.0; psi < 1.5; psi += 1e-3) {
            Vec3 dir{std::cos(psi0 + psi), std::sin(psi0 + psi), 0.0};
            if (aperture_dist(dir) >= s0) break;
            psi_max = psi;
        }
        for (int k = 0; k < count; ++k) {
            double psi = psi0 - psi_max + 2.0 * psi_max * k / (count - 1);
            fan.push_back(lift_dir({std::cos(psi), std::sin(psi), 0.0}));
        }
    } else {
        // Spherical cap around dir0, Fibonacci-style.
        Vec3 ref = (std::abs(dir0[0]) < 0.9) ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        Vec3 e1{};
        double rn = dot(ref, dir0, d);
        for (int i = 0; i < d; ++i) e1[i] = ref[i] - rn * dir0[i];
        e1 = scaled(1.0 / std::sqrt(norm2(e1, d)), e1, d);
        Vec3 e2{dir0[1] * e1[2] - dir0[2] * e1[1], dir0[2] * e1[0] - dir0[0] * e1[2],
                dir0[0] * e1[1] - dir0[1] * e1[0]};
        double chi_max = 0.0;
        for (double chi = 0.0; chi < 1.5; chi += 1e-3) {
            Vec3 dir{};
            for (int i = 0; i < d; ++i)
                dir[i] = std::cos(chi) * dir0[i] + std::sin(chi) * e1[i];
            if (aperture_dist(dir) >= s0) break;
            chi_max = chi;
        }
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            double u = (k + 0.5) / count;
            double chi = chi_max * std::sqrt(u);
            double az = golden * k;
            Vec3 dir{};
            for (int i = 0; i < d; ++i)
                dir[i] = std::cos(chi) * dir0[i] +
                         std::sin(chi) * (std::cos(az) * e1[i] + std::sin(az) * e2[i]);
            fan.push_back(lift_dir(dir));
        }
    }
    return fan;
}

/// First crossing of the interface along a ray, linearly refined.
std::optional<PhasePoint> find_crossing(const Metric& m, const Ray& ray,
                                        const InterfaceSpec& iface) {
    const int d = m.dim();
    for (std::size_t k = 1; k < ray.samples.size(); ++k) {
        double f0 = iface.phi(ray.samples[k - 1].x.x);
        double f1 = iface.phi(ray.samples[k].x.x);
        if (f0 == 0.0) return ray.samples[k - 1];
        if (f0 * f1 < 0.0) {
            double w = f0 / (f0 - f1);
            const PhasePoint& a = ray.samples[k - 1];
            const PhasePoint& b = ray.samples[k];
            PhasePoint c;
            c.x.t = a.x.t + w * (b.x.t - a.x.t);
            c.zeta.tau = a.zeta.tau + w * (b.zeta.tau - a.zeta.tau);
            for (int i = 0; i < d; ++i) {
                c.x.x[i] = a.x.x[i] + w * (b.x.x[i] - a.x.x[i]);
                c.zeta.xi[i] = a.zeta.xi[i] + w * (b.zeta.xi[i] - a.zeta.xi[i]);
            }
            return c;
        }
    }
    return std::nullopt;
}

}  // namespace

Surface cone_flowout(const Metric& m, const DomainBox& box, double t_end,
                     const SpacetimePoint& p0, const std::vector<SpacetimeVec>& tangents,
                     const RayParams& prm) {
    Surface surf;
    surf.id = "cone";
    std::vector<PhasePoint> cov = cone_covectors(m, p0, tangents, prm.cone_count);
    std::vector<Ray> rays(cov.size());
    parallel_for(cov.size(), prm.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) rays[k] = trace(m, cov[k], t_end, prm.step, &box);
    });
    for (const auto& r : rays) append_ray_samples(m, r, prm.sample_spacing, -1e300, surf);
    return surf;
}

PredictedSupport predict_support(const Metric& m, const DomainBox& box, double t_end,
                                 const PhasePoint& launch1, double s0_1,
                                 const PhasePoint& launch2, double s0_2,
                                 const InterfaceSpec& iface, const RayParams& prm) {
    const int d = m.dim();
    PredictedSupport out;
    out.transmitted_1.id = "transmitted_1";
    out.transmitted_2.id = "transmitted_2";
    out.reflected_1.id = "reflected_1";
    out.reflected_2.id = "reflected_2";
    out.cone.id = "cone";

    Ray central1 = trace(m, launch1, t_end, prm.step, &box);
    Ray central2 = trace(m, launch2, t_end, prm.step, &box);

    // Closest approach of the central rays in the hat-g norm.
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < central1.samples.size(); ++i)
        for (std::size_t j = 0; j < central2.samples.size(); ++j) {
            double ds = hat_distance_sq(m, central1.samples[i].x, central2.samples[j].x);
            if (ds < best) {
                best = ds;
                bi = i;
                bj = j;
            }
        }
    if (std::isfinite(best) && std::sqrt(best) <= prm.d_hit) {
        out.has_interaction = true;
        const SpacetimePoint& a = central1.samples[bi].x;
        const SpacetimePoint& b = central2.samples[bj].x;
        out.p0.t = 0.5 * (a.t + b.t);
        for (int i = 0; i < d; ++i) out.p0.x[i] = 0.5 * (a.x[i] + b.x[i]);
        Covector cn = iface.conormal(out.p0.x);
        double dphi_norm = std::sqrt(norm2(cn.xi, d));
        out.on_interface = std::abs(iface.phi(out.p0.x)) <= prm.d_hit * dphi_norm;
    }

    const double sin_grazing = std::sin(prm.grazing_angle_deg * std::numbers::pi / 180.0);

    auto build_bundle = [&](const PhasePoint& launch, double s0, Surface& transmitted,
                            Surface& reflected) {
        std::vector<PhasePoint> fan = make_fan(m, launch, s0, prm.fan_count);
        std::vector<Ray> rays(fan.size());
        std::vector<std::optional<Ray>> refl(fan.size());
        parallel_for(fan.size(), prm.threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) {
                rays[k] = trace(m, fan[k], t_end, prm.step, &box);
                auto cross = find_crossing(m, rays[k], iface);
                if (!cross) continue;
                // Drop grazing rays instead of failing the whole prediction.
                HamiltonRate hr = hamiltonian_field(m, *cross);
                Vec3 v = hr.dx.x;
                double vn = std::sqrt(norm2(v, d));
                Covector cn = iface.conormal(cross->x.x);
                double nn = std::sqrt(norm2(cn.xi, d));
                double s = std::abs(dot(v, cn.xi, d)) / (vn * nn);
                if (s < sin_grazing) continue;
                try {
                    Covector zr = reflect_at_interface(m, cross->x, cross->zeta, iface);
                    PhasePoint start{cross->x, zr};
                    refl[k] = trace(m, start, t_end, prm.step, &box);
                } catch (const TangentialIncidence&) {
                    // grazing within tolerance; skip
                }
            }
        });
        // Ordered, deterministic merge.
        for (std::size_t k = 0; k < rays.size(); ++k) {
            append_ray_samples(m, rays[k], prm.sample_spacing, -1e300, transmitted);
            if (refl[k])
                append_ray_samples(m, *refl[k], prm.sample_spacing, refl[k]->samples.front().x.t,
                                   reflected);
        }
    };

    build_bundle(launch1, s0_1, out.transmitted_1, out.reflected_1);
    build_bundle(launch2, s0_2, out.transmitted_2, out.reflected_2);

    if (out.has_interaction && out.on_interface) {
        std::vector<SpacetimeVec> tangents;
        if (d == 3) {
            // Tangent of the interaction curve: annihilated by the two incident
            // covectors and by d phi. Solve the 3x4 system by elimination.
            Covector z1 = central1.samples[bi].zeta;
            Covector z2 = central2.samples[bj].zeta;
            Covector cn = iface.conormal(out.p0.x);
            double A[3][4] = {{z1.tau, z1.xi[0], z1.xi[1], z1.xi[2]},
                              {z2.tau, z2.xi[0], z2.xi[1], z2.xi[2]},
                              {cn.tau, cn.xi[0], cn.xi[1], cn.xi[2]}};
            int piv_col[3] = {-1, -1, -1};
            int row = 0;
            for (int col = 0; col < 4 && row < 3; ++col) {
                int pr = -1;
                double pv = 1e-12;
                for (int r = row; r < 3; ++r)
                    if (std::abs(A[r][col]) > pv) {
                        pv = std::abs(A[r][col]);
                        pr = r;
                    }
                if (pr < 0) continue;
                std::swap_ranges(A[row], A[row] + 4, A[pr]);
                double inv = 1.0 / A[row][col];
                for (int c = 0; c < 4; ++c) A[row][c] *= inv;
                for (int r = 0; r < 3; ++r)
                    if (r != row)
                        for (int c = 3; c >= 0; --c) A[r][c] -= A[r][col] * A[row][c];
                piv_col[row++] = col;
            }
            // Free column gives the null vector.
            bool is_pivot[4] = {false, false, false, false};
            for (int r = 0; r < row; ++r) is_pivot[piv_col[r]] = true;
            int fc = 0;
            while (fc < 4 && is_pivot[fc]) ++fc;
            double v[4] = {0, 0, 0, 0};
            if (fc < 4) {
                v[fc] = 1.0;
                for (int r = 0; r < row; ++r) v[piv_col[r]] = -A[r][fc];
            }
            SpacetimeVec tv{v[0], {v[1], v[2], v[3]}};
            tangents.push_back(tv);
        }
        out.cone = cone_flowout(m, box, t_end, out.p0, tangents, prm);
    }
    return out;
}

}  // namespace wavelab
