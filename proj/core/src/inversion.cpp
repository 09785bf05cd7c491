#include "wavelab/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wavelab {

namespace {

struct TubeMask {
    std::vector<std::uint8_t> in;  // one flag per (slice, cell)
    std::size_t count = 0;
    int k_lo = 0, k_hi = -1;  // slice range actually touched
};

TubeMask rasterize_tube(const GridSpec& grid, std::size_t n_slices, const Surface& surface,
                        double radius) {
    TubeMask tm;
    tm.in.assign(n_slices * grid.cells(), 0);
    tm.k_lo = static_cast<int>(n_slices);
    tm.k_hi = -1;
    const int d = grid.dim;
    const double r2 = radius * radius;
    const int cr = static_cast<int>(std::ceil(radius / grid.h));
    const int nx = grid.n[0], ny = grid.n[1], nz = (d == 3) ? grid.n[2] : 1;

    for (const auto& s : surface.samples) {
        const double ts = s.p.t;
        int k0 = static_cast<int>(std::floor((ts - radius) / grid.dt));
        int k1 = static_cast<int>(std::ceil((ts + radius) / grid.dt));
        k0 = std::max(k0, 0);
        k1 = std::min(k1, static_cast<int>(n_slices) - 1);
        auto loc = grid.locate(s.p.x);
        if (!loc) continue;
        const auto& c0 = *loc;
        for (int k = k0; k <= k1; ++k) {
            const double dt2 = (k * grid.dt - ts) * (k * grid.dt - ts);
            if (dt2 > r2) continue;
            const std::size_t base = static_cast<std::size_t>(k) * grid.cells();
            for (int dk = (d == 3) ? -cr : 0; dk <= ((d == 3) ? cr : 0); ++dk) {
                int kz = c0[2] + dk;
                if (kz < 0 || kz >= nz) continue;
                for (int dj = -cr; dj <= cr; ++dj) {
                    int j = c0[1] + dj;
                    if (j < 0 || j >= ny) continue;
                    for (int di = -cr; di <= cr; ++di) {
                        int i = c0[0] + di;
                        if (i < 0 || i >= nx) continue;
                        std::array<int, 3> idx{i, j, kz};
                        double dd = dt2;
                        for (int a = 0; a < d; ++a) {
                            double delta = grid.origin[a] + (idx[a] + 0.5) * grid.h - s.p.x[a];
                            dd += delta * delta;
                        }
                        if (dd > r2) continue;
                        std::size_t flat = base + grid.index(i, j, kz);
                        if (!tm.in[flat]) {
                            tm.in[flat] = 1;
                            ++tm.count;
                        }
                    }
                }
            }
            tm.k_lo = std::min(tm.k_lo, k);
            tm.k_hi = std::max(tm.k_hi, k);
        }
    }
    return tm;
}

/// Truncated-window moving average along one axis, in place.
void blur_axis(std::vector<double>& s, const GridSpec& grid, int axis, int hw) {
    const int n = grid.n[axis];
    const std::size_t stride = (axis == 0)   ? 1
                               : (axis == 1) ? static_cast<std::size_t>(grid.n[0])
                                             : static_cast<std::size_t>(grid.n[0]) * grid.n[1];
    const int lines_a = (axis == 0) ? grid.n[1] : grid.n[0];
    const int lines_b =
        (grid.dim == 3) ? ((axis == 2) ? grid.n[1] : grid.n[2]) : 1;
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1);
    std::vector<double> line(n);

    for (int b = 0; b < lines_b; ++b)
        for (int a = 0; a < lines_a; ++a) {
            // Base offset of this line.
            std::size_t base;
            if (axis == 0) {
                int j = a, k = b;
                base = grid.index(0, j, grid.dim == 3 ? k : 0);
            } else if (axis == 1) {
                int i = a, k = b;
                base = grid.index(i, 0, grid.dim == 3 ? k : 0);
            } else {
                int i = a, j = b;
                base = grid.index(i, j, 0);
            }
            prefix[0] = 0.0;
            for (int p = 0; p < n; ++p) {
                line[p] = s[base + stride * p];
                prefix[p + 1] = prefix[p] + line[p];
            }
            for (int p = 0; p < n; ++p) {
                int lo = std::max(0, p - hw);
                int hi = std::min(n - 1, p + hw);
                s[base + stride * p] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
            }
        }
}

/// Returns slice minus its box blur of half-width hw cells per axis.
std::vector<double> highpass_slice(const std::vector<double>& slice, const GridSpec& grid,
                                   int hw) {
    std::vector<double> blur = slice;
    for (int a = 0; a < grid.dim; ++a) blur_axis(blur, grid, a, hw);
    std::vector<double> out(slice.size());
    for (std::size_t c = 0; c < slice.size(); ++c) out[c] = slice[c] - blur[c];
    return out;
}

Surface translate_surface(const Surface& surface, const GridSpec& grid, std::size_t n_slices,
                          double shift) {
    Surface out;
    out.id = surface.id + "_background";
    DomainBox box = grid.box();
    const double t_max = (static_cast<double>(n_slices) - 1.0) * grid.dt;
    for (const auto& s : surface.samples) {
        SurfaceSample b = s;
        b.p.t += shift * s.normal.t;
        for (int i = 0; i < grid.dim; ++i) b.p.x[i] += shift * s.normal.x[i];
        if (b.p.t < 0.0 || b.p.t > t_max) continue;
        if (!box.contains(b.p.x, grid.dim)) continue;
        out.samples.push_back(b);
    }
    return out;
}

/// Removes from tm every cell within excl_radius of the exclusion surfaces.
void subtract_tubes(TubeMask& tm, const GridSpec& grid, std::size_t n_slices,
                    const std::vector<const Surface*>& exclude, double excl_radius) {
    for (const Surface* ex : exclude) {
        if (!ex || ex->samples.empty()) continue;
        TubeMask em = rasterize_tube(grid, n_slices, *ex, excl_radius);
        for (std::size_t f = 0; f < tm.in.size(); ++f)
            if (tm.in[f] && em.in[f]) {
                tm.in[f] = 0;
                --tm.count;
            }
    }
}

double tube_energy_impl(const WaveField& field, const Surface& surface, double radius,
                        double highpass_cut, const std::vector<const Surface*>& exclude,
                        double excl_radius) {
    const GridSpec& grid = field.grid;
    if (radius < 2.0 * grid.h)
        throw ValidationError("tube radius must be at least 2h", "radius");
    TubeMask tm = rasterize_tube(grid, field.slices.size(), surface, radius);
    if (excl_radius > 0.0) subtract_tubes(tm, grid, field.slices.size(), exclude, excl_radius);
    if (tm.count == 0) throw EmptyTube("no grid cells within the surface tube");

    const int hw = std::max(1, static_cast<int>(std::lround(radius / grid.h)));
    double acc = 0.0;
    for (int k = tm.k_lo; k <= tm.k_hi; ++k) {
        const std::size_t base = static_cast<std::size_t>(k) * grid.cells();
        bool any = false;
        for (std::size_t c = 0; c < grid.cells(); ++c)
            if (tm.in[base + c]) {
                any = true;
                break;
            }
        if (!any) continue;
        const auto& slice = field.slices[static_cast<std::size_t>(k)];
        if (highpass_cut > 0.0) {
            std::vector<double> hp = highpass_slice(slice, grid, hw);
            for (std::size_t c = 0; c < grid.cells(); ++c)
                if (tm.in[base + c]) acc += hp[c] * hp[c];
        } else {
            for (std::size_t c = 0; c < grid.cells(); ++c)
                if (tm.in[base + c]) acc += slice[c] * slice[c];
        }
    }
    return acc / static_cast<double>(tm.count);
}

}  // namespace

double tube_energy(const WaveField& field, const Surface& surface, double radius,
                   double highpass_cut) {
    return tube_energy_impl(field, surface, radius, highpass_cut, {}, 0.0);
}

double tube_pairing(const WaveField& a, const WaveField& b, const Surface& surface,
                    double radius) {
    const GridSpec& grid = a.grid;
    if (b.slices.size() != a.slices.size() || b.grid.cells() != grid.cells())
        throw ValidationError("tube pairing requires matching grids");
    TubeMask tm = rasterize_tube(grid, a.slices.size(), surface, radius);
    if (tm.count == 0) throw EmptyTube("no grid cells within the surface tube");
    double acc = 0.0;
    for (int k = tm.k_lo; k <= tm.k_hi; ++k) {
        const std::size_t base = static_cast<std::size_t>(k) * grid.cells();
        const auto& sa = a.slices[static_cast<std::size_t>(k)];
        const auto& sb = b.slices[static_cast<std::size_t>(k)];
        for (std::size_t c = 0; c < grid.cells(); ++c)
            if (tm.in[base + c]) acc += sa[c] * sb[c];
    }
    return acc;
}

namespace {

DetectionReport detect_one(const WaveField& field, const Surface& surface,
                           const DetectionConfig& cfg, double radius,
                           const std::vector<const Surface*>& exclude = {},
                           bool two_sided_bg = false) {
    DetectionReport rep;
    rep.surface_id = surface.id;
    if (surface.samples.empty()) {
        rep.empty_tube = true;
        return rep;
    }
    const double er = cfg.exclusion_radius > 0.0 ? cfg.exclusion_radius * radius : 0.0;
    try {
        rep.tube_energy = tube_energy_impl(field, surface, radius, cfg.highpass_cut,
                                           exclude, er);
    } catch (const EmptyTube&) {
        rep.empty_tube = true;
        return rep;
    }
    // The cone separates causally distinct regions, so residual noise is
    // one-sided; the conservative background is the louder of the two sides.
    std::vector<double> shifts{cfg.background_shift * radius};
    if (two_sided_bg) shifts.push_back(-cfg.background_shift * radius);
    double bg_energy = 0.0;
    for (double sh : shifts) {
        Surface bg = translate_surface(surface, field.grid, field.slices.size(), sh);
        try {
            bg_energy = std::max(
                bg_energy, tube_energy_impl(field, bg, radius, cfg.highpass_cut, exclude, er));
        } catch (const EmptyTube&) {
            // background fully clipped; fall through to the floor below
        }
    }
    const double scale = field.max_abs();
    const double floor = std::numeric_limits<double>::epsilon() * scale * scale;
    rep.background_energy = bg_energy;
    rep.snr = rep.tube_energy / std::max(bg_energy, floor > 0.0 ? floor : 1e-300);
    rep.detected = rep.snr > cfg.snr_threshold;
    return rep;
}

}  // namespace

std::vector<DetectionReport> detect_surfaces(const WaveField& field, const PredictedSupport& pred,
                                             const DetectionConfig& cfg) {
    const double radius = cfg.radius > 0.0 ? cfg.radius : 3.0 * field.grid.h;
    const std::vector<const Surface*> bundles{&pred.transmitted_1, &pred.transmitted_2,
                                              &pred.reflected_1, &pred.reflected_2};
    std::vector<DetectionReport> out;
    for (const Surface* s : bundles) out.push_back(detect_one(field, *s, cfg, radius));
    // The cone tube masks out the linear bundles, which all run through p0.
    out.push_back(detect_one(field, pred.cone, cfg, radius, bundles, true));
    return out;
}

LocateResult locate_interface(const Problem& prob, const RayParams& ray_prm,
                              const std::vector<double>& s0_ladder, double eps,
                              const DetectionConfig& det) {
    LocateResult res;
    res.s0_ladder = s0_ladder;
    const double radius = det.radius > 0.0 ? det.radius : 3.0 * prob.grid.h;
    bool all = !s0_ladder.empty();

    for (double s0 : s0_ladder) {
        Problem p = prob;
        p.src1.s0 = s0;
        p.src2.s0 = s0;
        PhasePoint launch1{p.src1.p_launch, p.src1.zeta};
        PhasePoint launch2{p.src2.p_launch, p.src2.zeta};
        PredictedSupport pred =
            predict_support(prob.metric, prob.grid.box(), prob.grid.t_end, launch1, s0, launch2,
                            s0, prob.coeff.iface, ray_prm);
        if (!pred.has_interaction)
            throw NoIntersection("central rays do not come close enough to interact");

        Surface cone = pred.cone;
        if (cone.samples.empty() && prob.grid.dim == 2) {
            // Measurement cone from the crossing point even when it is off the
            // interface; detection then decides.
            cone = cone_flowout(prob.metric, prob.grid.box(), prob.grid.t_end, pred.p0, {},
                                ray_prm);
        }

        CrossResponse cr = cross_difference(p, eps, eps);
        const std::vector<const Surface*> bundles{&pred.transmitted_1, &pred.transmitted_2,
                                                  &pred.reflected_1, &pred.reflected_2};
        DetectionReport rep = detect_one(cr.field, cone, det, radius, bundles, true);
        all = all && rep.detected;
        res.cone_reports.push_back(std::move(rep));
    }
    res.on_interface = all;
    return res;
}

JumpEstimate recover_jump(const WaveField& observed, const WaveField& reference,
                          double alpha_ref, const Surface& cone, double radius,
                          const std::string& method) {
    JumpEstimate est;
    est.reference_alpha = alpha_ref;
    est.method = method;

    const double den = tube_pairing(reference, reference, cone, radius);
    const double rscale = reference.max_abs();
    const double floor = std::numeric_limits<double>::epsilon() * rscale * rscale;
    if (den <= (floor > 0.0 ? floor : 1e-300))
        throw DegenerateReference("reference response vanishes on the cone tube");
    const double num = tube_pairing(observed, reference, cone, radius);
    est.alpha_hat = alpha_ref * num / den;

    const double obs2 = tube_pairing(observed, observed, cone, radius);
    // ||obs - c ref||^2 = obs2 - 2 c num + c^2 den, c = num/den.
    const double c = num / den;
    double mis2 = obs2 - 2.0 * c * num + c * c * den;
    mis2 = std::max(mis2, 0.0);
    est.residual = (obs2 > 0.0) ? std::sqrt(mis2 / obs2) : 0.0;
    return est;
}

ScalingProbeResult frequency_scaling_probe(const Problem& prob, const RayParams& ray_prm,
                                           const std::vector<double>& omega_ladder, double eps,
                                           const DetectionConfig& det) {
    ScalingProbeResult res;
    const double radius = det.radius > 0.0 ? det.radius : 3.0 * prob.grid.h;
    const double two_pi = 6.283185307179586;
    for (double om : omega_ladder) {
        double ppw = two_pi / (om * prob.grid.h);
        if (ppw < 8.0)
            throw UnderResolved("carrier frequency above the 8 points-per-wavelength limit");
    }

    PhasePoint launch1{prob.src1.p_launch, prob.src1.zeta};
    PhasePoint launch2{prob.src2.p_launch, prob.src2.zeta};
    PredictedSupport pred =
        predict_support(prob.metric, prob.grid.box(), prob.grid.t_end, launch1, prob.src1.s0,
                        launch2, prob.src2.s0, prob.coeff.iface, ray_prm);
    if (!pred.has_interaction)
        throw NoIntersection("central rays do not come close enough to interact");
    Surface cone = pred.cone;
    if (cone.samples.empty() && prob.grid.dim == 2)
        cone = cone_flowout(prob.metric, prob.grid.box(), prob.grid.t_end, pred.p0, {}, ray_prm);

    for (double om : omega_ladder) {
        Problem p = prob;
        p.src1.omega = om;
        p.src2.omega = om;
        CrossResponse cr = cross_difference(p, eps, eps);
        const std::vector<const Surface*> bundles{&pred.transmitted_1, &pred.transmitted_2,
                                                  &pred.reflected_1, &pred.reflected_2};
        const double er = det.exclusion_radius > 0.0 ? det.exclusion_radius * radius : 0.0;
        double e = tube_energy_impl(cr.field, cone, radius, det.highpass_cut, bundles, er);
        res.omegas.push_back(om);
        res.amplitudes.push_back(std::sqrt(e));
    }
    res.fit = fit_power_law(res.omegas, res.amplitudes);
    return res;
}

}  // namespace wavelab
