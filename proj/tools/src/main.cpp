// Experiment driver: parses a scene config, runs one of the pipeline stages,
// and writes deterministic artifacts (snapshots, CSV curves, JSON reports).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavelab/inversion.hpp"
#include "wavelab/scene.hpp"
#include "wavelab/snapshot.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace wavelab;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write " + p.string(), "out");
    f << text;
}

void write_error_json(const fs::path& out_dir, const std::string& type, const std::string& msg,
                      const std::string& field = "") {
    ordered_json j;
    j["error"] = type;
    j["message"] = msg;
    if (!field.empty()) j["field"] = field;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    write_text(out_dir / "error.json", j.dump(2) + "\n");
}

void write_manifest(const fs::path& out_dir, const std::string& subcommand,
                    const SceneConfig& cfg, double wall_s) {
    ordered_json j;
    j["subcommand"] = subcommand;
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(cfg.config_hash()));
    j["config_hash"] = hash;
    j["versions"] = {{"wavelab", "0.1.0"}, {"format", "WFGRID1"}};
    j["wall_time_s"] = wall_s;
    write_text(out_dir / "manifest.json", j.dump(2) + "\n");
}

std::string csv_vec(const Vec3& v, int dim) {
    std::string s;
    for (int i = 0; i < dim; ++i) {
        s += ',';
        s += fmt17(v[i]);
    }
    return s;
}

void write_surface_csv(std::ofstream& f, const Surface& surf, int dim) {
    for (std::size_t k = 0; k < surf.samples.size(); ++k) {
        const auto& s = surf.samples[k];
        f << surf.id << ',' << k << ',' << fmt17(s.p.t) << csv_vec(s.p.x, dim) << ','
          << fmt17(s.tangent.t) << csv_vec(s.tangent.x, dim) << ',' << fmt17(s.normal.t)
          << csv_vec(s.normal.x, dim) << '\n';
    }
}

PredictedSupport run_prediction(const SceneConfig& cfg, const Problem& prob) {
    PhasePoint l1{prob.src1.p_launch, prob.src1.zeta};
    PhasePoint l2{prob.src2.p_launch, prob.src2.zeta};
    return predict_support(prob.metric, prob.grid.box(), prob.grid.t_end, l1, prob.src1.s0, l2,
                           prob.src2.s0, prob.coeff.iface, cfg.rays);
}

Surface measurement_cone(const SceneConfig& cfg, const Problem& prob,
                         const PredictedSupport& pred) {
    if (!pred.cone.samples.empty()) return pred.cone;
    if (prob.grid.dim != 2)
        throw NoIntersection("no interaction cone available for this scene");
    return cone_flowout(prob.metric, prob.grid.box(), prob.grid.t_end, pred.p0, {}, cfg.rays);
}

std::vector<int> snapshot_indices(int n_t) {
    std::vector<int> idx;
    for (int q = 0; q <= 4; ++q) {
        int k = (n_t * q) / 4;
        if (idx.empty() || idx.back() != k) idx.push_back(k);
    }
    return idx;
}

ordered_json report_json(const DetectionReport& r) {
    ordered_json j;
    j["surface"] = r.surface_id;
    j["tube_energy"] = r.tube_energy;
    j["background_energy"] = r.background_energy;
    j["snr"] = r.snr;
    j["detected"] = r.detected;
    j["empty_tube"] = r.empty_tube;
    return j;
}

void cmd_rays(const SceneConfig& cfg, const Problem& prob, const fs::path& out) {
    PredictedSupport pred = run_prediction(cfg, prob);
    std::ofstream f(out / "predicted_support.csv", std::ios::binary | std::ios::trunc);
    f << "surface,sample";
    const char* groups[3] = {"p", "tan", "nrm"};
    for (const char* g : groups) {
        f << ',' << g << "_t";
        for (int i = 0; i < cfg.dim; ++i) f << ',' << g << "_x" << i;
    }
    f << '\n';
    for (const Surface* s : {&pred.transmitted_1, &pred.transmitted_2, &pred.reflected_1,
                             &pred.reflected_2, &pred.cone})
        write_surface_csv(f, *s, cfg.dim);

    ordered_json j;
    j["has_interaction"] = pred.has_interaction;
    j["on_interface"] = pred.on_interface;
    if (pred.has_interaction) {
        j["p0_t"] = pred.p0.t;
        for (int i = 0; i < cfg.dim; ++i) j["p0_x" + std::to_string(i)] = pred.p0.x[i];
    }
    write_text(out / "rays.json", j.dump(2) + "\n");
}

void cmd_forward(const SceneConfig& cfg, const Problem& prob, const fs::path& out) {
    WaveField u = solve_semilinear(prob, cfg.experiment.eps, cfg.experiment.eps);
    std::ofstream f(out / "diagnostics.csv", std::ios::binary | std::ios::trunc);
    f << "time_index,t,slice_l2,energy\n";
    for (int k = 0; k < static_cast<int>(u.slices.size()); ++k) {
        double e = (k > 0 && k + 1 < static_cast<int>(u.slices.size()))
                       ? energy_at_slice(u, prob.metric, k)
                       : 0.0;
        f << k << ',' << fmt17(k * prob.grid.dt) << ','
          << fmt17(slice_l2(prob.grid, prob.metric, u.slices[static_cast<std::size_t>(k)])) << ','
          << fmt17(e) << '\n';
    }
    for (int k : snapshot_indices(prob.grid.n_t)) {
        char name[32];
        std::snprintf(name, sizeof(name), "forward_%04d.wfgrid", k);
        write_snapshot(slice_snapshot(u, k), (out / name).string());
    }
}

void cmd_cross(const SceneConfig& cfg, const Problem& prob, const fs::path& out) {
    CrossResponse cr = cross_difference(prob, cfg.experiment.eps, cfg.experiment.eps);
    for (int k : snapshot_indices(prob.grid.n_t)) {
        char name[32];
        std::snprintf(name, sizeof(name), "cross_%04d.wfgrid", k);
        write_snapshot(slice_snapshot(cr.field, k), (out / name).string());
    }
    ordered_json j;
    j["eps1"] = cr.eps1;
    j["eps2"] = cr.eps2;
    j["field_l2"] = field_norm(cr.field, NormKind::L2, prob.metric);
    j["field_max_abs"] = cr.field.max_abs();
    write_text(out / "cross.json", j.dump(2) + "\n");
}

void cmd_expand(const SceneConfig& cfg, const Problem& prob, const fs::path& out) {
    if (cfg.experiment.eps_ladder.empty())
        throw ValidationError("expand requires a nonempty eps_ladder", "experiment.eps_ladder");
    std::vector<double> defects;
    for (double e : cfg.experiment.eps_ladder)
        defects.push_back(expansion_defect(prob, e));
    PowerFit fit = fit_power_law(cfg.experiment.eps_ladder, defects);
    ordered_json j;
    j["eps_ladder"] = cfg.experiment.eps_ladder;
    j["defects"] = defects;
    j["slope"] = fit.exponent;
    j["r2"] = fit.r2;
    write_text(out / "expand.json", j.dump(2) + "\n");
}

void cmd_perturb(const SceneConfig& cfg, const Problem& prob, const fs::path& out) {
    PerturbationSplit sp = perturbation_split(prob, cfg.experiment.delta, cfg.experiment.eps);
    PredictedSupport pred = run_prediction(cfg, prob);
    ordered_json j;
    j["delta"] = cfg.experiment.delta;
    j["eps"] = cfg.experiment.eps;
    ordered_json jv = ordered_json::array();
    for (const auto& r : detect_surfaces(sp.V_est, pred, cfg.detection))
        jv.push_back(report_json(r));
    j["linear_split_reports"] = jv;
    Surface cone = measurement_cone(cfg, prob, pred);
    PredictedSupport cone_only;
    cone_only.cone = cone;
    DetectionReport cone_rep = detect_surfaces(sp.W_est, cone_only, cfg.detection).back();
    j["nonlinear_cone_report"] = report_json(cone_rep);
    write_text(out / "perturb.json", j.dump(2) + "\n");
}

void cmd_invert(const SceneConfig& cfg, const Problem& prob, const fs::path& out) {
    if (cfg.experiment.s0_ladder.empty())
        throw ValidationError("invert requires a nonempty s0_ladder", "experiment.s0_ladder");
    PredictedSupport pred = run_prediction(cfg, prob);
    if (!pred.has_interaction)
        throw NoIntersection("central rays do not interact; nothing to invert");
    LocateResult loc =
        locate_interface(prob, cfg.rays, cfg.experiment.s0_ladder, cfg.experiment.eps,
                         cfg.detection);

    ordered_json j;
    j["p0_t"] = pred.p0.t;
    for (int i = 0; i < cfg.dim; ++i) j["p0_x" + std::to_string(i)] = pred.p0.x[i];
    j["on_interface"] = loc.on_interface;
    ordered_json jr = ordered_json::array();
    for (std::size_t k = 0; k < loc.cone_reports.size(); ++k) {
        ordered_json r = report_json(loc.cone_reports[k]);
        r["s0"] = loc.s0_ladder[k];
        jr.push_back(r);
    }
    j["per_s0"] = jr;

    if (loc.on_interface) {
        Surface cone = measurement_cone(cfg, prob, pred);
        const double radius =
            cfg.detection.radius > 0.0 ? cfg.detection.radius : 3.0 * prob.grid.h;
        CrossResponse obs = cross_difference(prob, cfg.experiment.eps, cfg.experiment.eps);
        // Born reference at the known calibration jump.
        CauchyData p1 = build_pulse(prob.grid, prob.metric, prob.src1);
        CauchyData p2 = build_pulse(prob.grid, prob.metric, prob.src2);
        WaveField v1 = solve_linear(prob.grid, prob.metric, prob.cfg, &p1);
        WaveField v2 = solve_linear(prob.grid, prob.metric, prob.cfg, &p2);
        CoefficientSpec ref_coeff = prob.coeff;
        ref_coeff.alpha = cfg.experiment.alpha_ref;
        std::vector<double> a_ref = build_coefficient(prob.grid, ref_coeff);
        WaveField x12 = born_single(v1, v2, a_ref, prob.metric, prob.cfg);
        for (auto& s : x12.slices)
            for (auto& v : s) v *= -2.0;
        JumpEstimate est = recover_jump(obs.field, x12, cfg.experiment.alpha_ref, cone, radius,
                                        "nonlinear-cross");
        j["alpha_hat"] = est.alpha_hat;
        j["residual"] = est.residual;
    }

    if (!cfg.experiment.omega_ladder.empty()) {
        ScalingProbeResult probe = frequency_scaling_probe(
            prob, cfg.rays, cfg.experiment.omega_ladder, cfg.experiment.eps, cfg.detection);
        j["frequency_exponent"] = probe.fit.exponent;
        j["frequency_r2"] = probe.fit.r2;
    }
    write_text(out / "invert.json", j.dump(2) + "\n");
}

void cmd_scaling(const SceneConfig& cfg, const Problem& prob, const fs::path& out) {
    if (cfg.experiment.omega_ladder.empty())
        throw ValidationError("scaling requires a nonempty omega_ladder",
                              "experiment.omega_ladder");
    ScalingProbeResult probe = frequency_scaling_probe(
        prob, cfg.rays, cfg.experiment.omega_ladder, cfg.experiment.eps, cfg.detection);
    ordered_json j;
    j["omegas"] = probe.omegas;
    j["amplitudes"] = probe.amplitudes;
    j["exponent"] = probe.fit.exponent;
    j["r2"] = probe.fit.r2;
    write_text(out / "scaling.json", j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wave interaction experiment driver"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 1;
    bool verbose = false;
    app.add_option("--config", config_path, "scene config JSON")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--verbose", verbose, "progress output on stderr");

    const char* names[] = {"rays", "forward", "cross", "expand", "perturb", "invert", "scaling"};
    // fallthrough lets `wavelab cross --config ...` reach the shared options
    for (const char* n : names) app.add_subcommand(n)->fallthrough();

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();
    const fs::path out(out_dir);

    auto t_start = std::chrono::steady_clock::now();
    SceneConfig cfg;
    try {
        std::error_code ec;
        fs::create_directories(out, ec);
        cfg = SceneConfig::load(config_path);
        cfg.solver.threads = threads;
        cfg.rays.threads = threads;
        Problem prob = cfg.build_problem();
        if (verbose)
            std::cerr << "[wavelab] " << sub << ": grid " << prob.grid.n[0] << "x"
                      << prob.grid.n[1] << ", " << prob.grid.n_t << " steps\n";

        if (sub == "rays") cmd_rays(cfg, prob, out);
        else if (sub == "forward") cmd_forward(cfg, prob, out);
        else if (sub == "cross") cmd_cross(cfg, prob, out);
        else if (sub == "expand") cmd_expand(cfg, prob, out);
        else if (sub == "perturb") cmd_perturb(cfg, prob, out);
        else if (sub == "invert") cmd_invert(cfg, prob, out);
        else cmd_scaling(cfg, prob, out);
    } catch (const ValidationError& e) {
        write_error_json(out, "validation", e.what(), e.field);
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const BlowUp& e) {
        write_error_json(out, "blow-up", e.what());
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        write_error_json(out, "detection-precondition", e.what());
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }

    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    write_manifest(out, sub, cfg, wall);
    return 0;
}
