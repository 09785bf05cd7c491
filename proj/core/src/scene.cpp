#include "wavelab/scene.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wavelab/snapshot.hpp"

namespace wavelab {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json vec_json(const Vec3& v, int dim) {
    ordered_json a = ordered_json::array();
    for (int i = 0; i < dim; ++i) a.push_back(v[i]);
    return a;
}

Vec3 vec_from(const ordered_json& j, int dim, const char* field) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ValidationError(std::string(field) + " must be an array of length " +
                                  std::to_string(dim),
                              field);
    Vec3 v{};
    for (int i = 0; i < dim; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

std::string profile_name(CoeffProfile p) {
    switch (p) {
        case CoeffProfile::Jump: return "jump";
        case CoeffProfile::MollifiedJump: return "mollified-jump";
        case CoeffProfile::Power: return "power";
    }
    return "jump";
}

CoeffProfile profile_from(const std::string& s, const char* field) {
    if (s == "jump") return CoeffProfile::Jump;
    if (s == "mollified-jump") return CoeffProfile::MollifiedJump;
    if (s == "power") return CoeffProfile::Power;
    throw ValidationError("unknown profile '" + s + "'", field);
}

ordered_json source_json(const SourceSpec& s, const Vec3& xi, int dim) {
    ordered_json j;
    j["launch_t"] = s.p_launch.t;
    j["launch_x"] = vec_json(s.p_launch.x, dim);
    j["xi"] = vec_json(xi, dim);
    j["s0"] = s.s0;
    j["t0"] = s.t0;
    j["omega"] = s.omega;
    j["sigma"] = s.sigma;
    j["amplitude"] = s.amplitude;
    j["mu"] = s.mu_proxy;
    return j;
}

void source_from(const ordered_json& j, int dim, SourceSpec& s, Vec3& xi, const char* field) {
    s.p_launch.t = j.value("launch_t", 0.0);
    s.p_launch.x = vec_from(j.at("launch_x"), dim, field);
    xi = vec_from(j.at("xi"), dim, field);
    s.s0 = j.at("s0").get<double>();
    s.t0 = j.value("t0", 0.0);
    s.omega = j.at("omega").get<double>();
    s.sigma = j.at("sigma").get<double>();
    s.amplitude = j.value("amplitude", 1.0);
    s.mu_proxy = j.value("mu", 1.0);
}

void check_ladder(const std::vector<double>& v, bool increasing, const char* field) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] <= 0.0) throw ValidationError("ladder entries must be positive", field);
        if (i > 0) {
            bool ok = increasing ? v[i] > v[i - 1] : v[i] < v[i - 1];
            if (!ok) throw ValidationError("ladder must be strictly monotone", field);
        }
    }
}

}  // namespace

std::string SceneConfig::to_json_text() const {
    ordered_json j;

    ordered_json jm;
    jm["kind"] = metric_kind;
    if (metric_kind == "diag-linear") {
        jm["base"] = vec_json(metric_base, dim);
        ordered_json slopes = ordered_json::array();
        for (int a = 0; a < dim; ++a) slopes.push_back(vec_json(metric_slope[a], dim));
        jm["slope"] = slopes;
    } else if (metric_kind == "sampled") {
        jm["files"] = metric_files;
    }
    j["metric"] = jm;

    ordered_json jg;
    jg["dim"] = dim;
    jg["origin"] = vec_json(origin, dim);
    jg["extent"] = vec_json(extent, dim);
    ordered_json jn = ordered_json::array();
    for (int a = 0; a < dim; ++a) jn.push_back(n[a]);
    jg["n"] = jn;
    jg["t_end"] = t_end;
    jg["cfl"] = cfl;
    j["grid"] = jg;

    j["source1"] = source_json(src1, xi1, dim);
    j["source2"] = source_json(src2, xi2, dim);

    ordered_json jc;
    ordered_json ji;
    if (coeff.iface.shape() == InterfaceSpec::Shape::Plane) {
        ji["shape"] = "plane";
        ji["normal"] = vec_json(coeff.iface.normal_param(), dim);
        ji["offset"] = coeff.iface.scalar_param();
    } else {
        ji["shape"] = "sphere";
        ji["center"] = vec_json(coeff.iface.normal_param(), dim);
        ji["radius"] = coeff.iface.scalar_param();
    }
    jc["interface"] = ji;
    jc["alpha"] = coeff.alpha;
    jc["profile"] = profile_name(coeff.profile);
    jc["mollify_width"] = coeff.mollify_width;
    jc["power_kappa"] = coeff.power_kappa;
    ordered_json jq;
    jq["enabled"] = coeff.potential_enabled;
    jq["strength"] = coeff.potential_strength;
    jq["profile"] = profile_name(coeff.potential_profile);
    jc["potential"] = jq;
    j["coefficient"] = jc;

    ordered_json js;
    js["sponge_width"] = solver.sponge_width;
    js["sponge_strength"] = solver.sponge_strength;
    js["blowup_factor"] = solver.blowup_factor;
    js["picard_max_iter"] = solver.picard_max_iter;
    js["picard_tol"] = solver.picard_tol;
    js["boundary"] = (solver.boundary == SolverConfig::Boundary::Periodic) ? "periodic" : "sponge";
    j["solver"] = js;

    ordered_json jr;
    jr["step"] = rays.step;
    jr["fan_count"] = rays.fan_count;
    jr["cone_count"] = rays.cone_count;
    jr["d_hit"] = rays.d_hit;
    jr["grazing_angle_deg"] = rays.grazing_angle_deg;
    jr["sample_spacing"] = rays.sample_spacing;
    j["rays"] = jr;

    ordered_json jd;
    jd["radius"] = detection.radius;
    jd["snr_threshold"] = detection.snr_threshold;
    jd["highpass_cut"] = detection.highpass_cut;
    jd["background_shift"] = detection.background_shift;
    jd["exclusion_radius"] = detection.exclusion_radius;
    j["detection"] = jd;

    ordered_json je;
    je["eps"] = experiment.eps;
    je["delta"] = experiment.delta;
    je["eps_ladder"] = experiment.eps_ladder;
    je["s0_ladder"] = experiment.s0_ladder;
    je["omega_ladder"] = experiment.omega_ladder;
    je["alpha_ref"] = experiment.alpha_ref;
    j["experiment"] = je;

    j["rng_seed"] = rng_seed;
    return j.dump(2);
}

SceneConfig SceneConfig::from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what(), "config");
    }

    SceneConfig c;
    try {
        const auto& jg = j.at("grid");
        c.dim = jg.at("dim").get<int>();
        if (c.dim != 2 && c.dim != 3) throw ValidationError("dim must be 2 or 3", "grid.dim");
        c.origin = vec_from(jg.at("origin"), c.dim, "grid.origin");
        c.extent = vec_from(jg.at("extent"), c.dim, "grid.extent");
        const auto& jn = jg.at("n");
        if (!jn.is_array() || static_cast<int>(jn.size()) != c.dim)
            throw ValidationError("grid.n must match dim", "grid.n");
        for (int a = 0; a < c.dim; ++a) c.n[a] = jn[static_cast<std::size_t>(a)].get<int>();
        c.t_end = jg.at("t_end").get<double>();
        c.cfl = jg.at("cfl").get<double>();

        const auto& jm = j.at("metric");
        c.metric_kind = jm.at("kind").get<std::string>();
        if (c.metric_kind == "diag-linear") {
            c.metric_base = vec_from(jm.at("base"), c.dim, "metric.base");
            const auto& slopes = jm.at("slope");
            if (!slopes.is_array() || static_cast<int>(slopes.size()) != c.dim)
                throw ValidationError("metric.slope must have one row per axis", "metric.slope");
            for (int a = 0; a < c.dim; ++a)
                c.metric_slope[a] =
                    vec_from(slopes[static_cast<std::size_t>(a)], c.dim, "metric.slope");
        } else if (c.metric_kind == "sampled") {
            c.metric_files = jm.at("files").get<std::vector<std::string>>();
        } else if (c.metric_kind != "flat") {
            throw ValidationError("unknown metric kind '" + c.metric_kind + "'", "metric.kind");
        }

        source_from(j.at("source1"), c.dim, c.src1, c.xi1, "source1");
        source_from(j.at("source2"), c.dim, c.src2, c.xi2, "source2");

        const auto& jc = j.at("coefficient");
        const auto& ji = jc.at("interface");
        std::string shape = ji.at("shape").get<std::string>();
        if (shape == "plane") {
            c.coeff.iface = InterfaceSpec::plane(
                vec_from(ji.at("normal"), c.dim, "coefficient.interface.normal"),
                ji.at("offset").get<double>(), c.dim);
        } else if (shape == "sphere") {
            c.coeff.iface = InterfaceSpec::sphere(
                vec_from(ji.at("center"), c.dim, "coefficient.interface.center"),
                ji.at("radius").get<double>(), c.dim);
        } else {
            throw ValidationError("unknown interface shape '" + shape + "'",
                                  "coefficient.interface.shape");
        }
        c.coeff.alpha = jc.at("alpha").get<double>();
        c.coeff.profile = profile_from(jc.value("profile", "jump"), "coefficient.profile");
        c.coeff.mollify_width = jc.value("mollify_width", 0.0);
        c.coeff.power_kappa = jc.value("power_kappa", 1.0);
        if (jc.contains("potential")) {
            const auto& jq = jc.at("potential");
            c.coeff.potential_enabled = jq.value("enabled", false);
            c.coeff.potential_strength = jq.value("strength", 0.0);
            c.coeff.potential_profile =
                profile_from(jq.value("profile", "jump"), "coefficient.potential.profile");
        }

        if (j.contains("solver")) {
            const auto& js = j.at("solver");
            c.solver.sponge_width = js.value("sponge_width", c.solver.sponge_width);
            c.solver.sponge_strength = js.value("sponge_strength", c.solver.sponge_strength);
            c.solver.blowup_factor = js.value("blowup_factor", c.solver.blowup_factor);
            c.solver.picard_max_iter = js.value("picard_max_iter", c.solver.picard_max_iter);
            c.solver.picard_tol = js.value("picard_tol", c.solver.picard_tol);
            std::string b = js.value("boundary", "sponge");
            if (b == "periodic")
                c.solver.boundary = SolverConfig::Boundary::Periodic;
            else if (b == "sponge")
                c.solver.boundary = SolverConfig::Boundary::Sponge;
            else
                throw ValidationError("unknown boundary '" + b + "'", "solver.boundary");
        }

        if (j.contains("rays")) {
            const auto& jr = j.at("rays");
            c.rays.step = jr.value("step", c.rays.step);
            c.rays.fan_count = jr.value("fan_count", c.rays.fan_count);
            c.rays.cone_count = jr.value("cone_count", c.rays.cone_count);
            c.rays.d_hit = jr.value("d_hit", c.rays.d_hit);
            c.rays.grazing_angle_deg = jr.value("grazing_angle_deg", c.rays.grazing_angle_deg);
            c.rays.sample_spacing = jr.value("sample_spacing", c.rays.sample_spacing);
        }

        if (j.contains("detection")) {
            const auto& jd = j.at("detection");
            c.detection.radius = jd.value("radius", c.detection.radius);
            c.detection.snr_threshold = jd.value("snr_threshold", c.detection.snr_threshold);
            c.detection.highpass_cut = jd.value("highpass_cut", c.detection.highpass_cut);
            c.detection.background_shift =
                jd.value("background_shift", c.detection.background_shift);
            c.detection.exclusion_radius =
                jd.value("exclusion_radius", c.detection.exclusion_radius);
        }

        if (j.contains("experiment")) {
            const auto& je = j.at("experiment");
            c.experiment.eps = je.value("eps", c.experiment.eps);
            c.experiment.delta = je.value("delta", c.experiment.delta);
            c.experiment.eps_ladder =
                je.value("eps_ladder", std::vector<double>{});
            c.experiment.s0_ladder = je.value("s0_ladder", std::vector<double>{});
            c.experiment.omega_ladder = je.value("omega_ladder", std::vector<double>{});
            c.experiment.alpha_ref = je.value("alpha_ref", 1.0);
        }

        c.rng_seed = j.value("rng_seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config field error: ") + e.what(), "config");
    }

    c.validate();
    return c;
}

SceneConfig SceneConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config file: " + path, "config");
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_json_text(ss.str());
}

void SceneConfig::validate() const {
    for (int a = 0; a < dim; ++a) {
        if (n[a] <= 0) throw ValidationError("grid.n entries must be positive", "grid.n");
        if (extent[a] <= 0.0)
            throw ValidationError("grid.extent entries must be positive", "grid.extent");
    }
    if (t_end <= 0.0) throw ValidationError("t_end must be positive", "grid.t_end");
    if (cfl <= 0.0 || cfl > 0.5)
        throw ValidationError("cfl must lie in (0, 0.5]", "grid.cfl");
    if (metric_kind == "sampled" && static_cast<int>(metric_files.size()) != dim)
        throw ValidationError("sampled metric needs one file per axis", "metric.files");
    auto check_src = [](const SourceSpec& s, const Vec3& xi, int d, const char* field) {
        if (s.sigma <= 0.0) throw ValidationError("sigma must be positive", field);
        if (s.omega <= 0.0) throw ValidationError("omega must be positive", field);
        if (s.s0 <= 0.0) throw ValidationError("s0 must be positive", field);
        if (norm2(xi, d) == 0.0) throw ValidationError("xi must be nonzero", field);
    };
    check_src(src1, xi1, dim, "source1");
    check_src(src2, xi2, dim, "source2");
    if (coeff.profile == CoeffProfile::MollifiedJump && coeff.mollify_width <= 0.0)
        throw ValidationError("mollify_width must be positive for the mollified profile",
                              "coefficient.mollify_width");
    check_ladder(experiment.eps_ladder, false, "experiment.eps_ladder");
    check_ladder(experiment.s0_ladder, false, "experiment.s0_ladder");
    check_ladder(experiment.omega_ladder, true, "experiment.omega_ladder");
}

Metric SceneConfig::build_metric() const {
    if (metric_kind == "flat") return Metric::flat(dim);
    if (metric_kind == "diag-linear") return Metric::diag_linear(dim, metric_base, metric_slope);
    // sampled: every component file must agree on the sampling geometry.
    std::vector<Snapshot> snaps;
    for (const auto& f : metric_files) snaps.push_back(read_snapshot(f));
    const Snapshot& s0 = snaps.front();
    std::size_t cells = s0.data.size();
    for (const auto& s : snaps) {
        if (s.dim != dim || s.dims != s0.dims || s.h != s0.h || s.data.size() != cells)
            throw ValidationError("sampled metric component files disagree on geometry",
                                  "metric.files");
    }
    std::vector<Vec3> diag(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        for (int a = 0; a < dim; ++a) diag[c][a] = snaps[static_cast<std::size_t>(a)].data[c];
    }
    return Metric::sampled(dim, s0.origin, s0.h, s0.dims, std::move(diag));
}

GridSpec SceneConfig::build_grid(const Metric& m) const {
    return GridSpec::make(dim, origin, extent, n, t_end, cfl, m);
}

Problem SceneConfig::build_problem() const {
    Problem p;
    p.metric = build_metric();
    p.grid = build_grid(p.metric);
    p.cfg = solver;
    p.src1 = src1;
    p.src2 = src2;
    p.coeff = coeff;
    p.src1.zeta = null_lift(p.metric, src1.p_launch, xi1, Orientation::Forward).zeta;
    p.src2.zeta = null_lift(p.metric, src2.p_launch, xi2, Orientation::Forward).zeta;
    return p;
}

std::uint64_t SceneConfig::config_hash() const {
    const std::string s = to_json_text();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace wavelab
