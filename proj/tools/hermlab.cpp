#include <hermlab/acceptance.hpp>
#include <hermlab/hermlab.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace hermlab;

namespace {

struct Common {
    std::optional<std::uint64_t> seed;
    unsigned threads = default_threads();
    std::string out;
};

std::uint64_t master_seed(const Common& c)
{
    if (c.seed) return *c.seed;
    if (const char* env = std::getenv("HERMLAB_SEED")) {
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(env, &pos, 0);
            if (pos == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw DomainError(std::string("HERMLAB_SEED is not an unsigned integer: ") + env);
    }
    return 42;
}

void add_common(CLI::App* app, Common& c, bool with_out = true)
{
    app->add_option("--seed", c.seed, "master seed (fallback: HERMLAB_SEED, then 42)");
    app->add_option("--threads", c.threads, "replicate threads")->check(CLI::Range(1u, 4096u));
    if (with_out) app->add_option("--out", c.out, "output file (default: stdout)");
}

json flags_of(const CLI::App* app)
{
    json f = json::object();
    for (const CLI::Option* o : app->get_options()) {
        if (o->get_name() == "--help" || o->get_name() == "-h") continue;
        std::string key = o->get_name();
        while (!key.empty() && key.front() == '-') key.erase(0, 1);
        if (o->count() == 0) {
            if (!o->get_default_str().empty()) f[key] = o->get_default_str();
            continue;
        }
        const auto res = o->results();
        if (res.size() == 1) f[key] = res.front();
        else f[key] = res;
    }
    return f;
}

void write_manifest(const std::string& path, const std::string& command, const CLI::App* app, std::uint64_t seed,
                    std::chrono::system_clock::time_point start)
{
    RunManifest m;
    m.command = command;
    m.flags = flags_of(app);
    m.seed = seed;
    m.start = start;
    m.end = std::chrono::system_clock::now();
    std::ofstream os(path);
    if (!os) throw DomainError("cannot write " + path);
    os << m.to_json().dump(2) << '\n';
}

// JSON payload to --out (plus a sidecar manifest) or stdout.
void emit(const json& payload, const Common& c, const std::string& command, const CLI::App* app, std::uint64_t seed,
          std::chrono::system_clock::time_point start)
{
    if (c.out.empty()) {
        std::cout << payload.dump(2) << '\n';
        return;
    }
    std::ofstream os(c.out);
    if (!os) throw DomainError("cannot write " + c.out);
    os << payload.dump(2) << '\n';
    write_manifest(c.out + ".manifest.json", command, app, seed, start);
}

std::string replicate_path(const std::string& out, std::size_t i, std::size_t reps)
{
    if (reps == 1) return out;
    std::filesystem::path p(out);
    const std::string stem = p.stem().string() + "_" + std::to_string(i);
    return (p.parent_path() / (stem + p.extension().string())).string();
}

Integrand make_integrand(const std::string& kind, double lambda, double t, double a, double b)
{
    if (kind == "exp_window") return Integrand::exp_window(lambda, t);
    if (kind == "indicator") {
        detail::require(b > a, "indicator needs --b > --a");
        return Integrand::unit_interval(a, b);
    }
    throw DomainError("unknown integrand " + kind);
}

double integrand_integral(const Integrand& f)
{
    const auto& v = f.variant();
    if (const auto* e = std::get_if<ExpWindow>(&v)) return (1.0 - std::exp(-e->lambda * (e->t - e->lo))) / e->lambda;
    const Box s = f.support();
    return s.hi[0] - s.lo[0];
}

bool strictly_monotone_toward(const std::vector<double>& v, double target)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(std::abs(v[i] - target) < std::abs(v[i - 1] - target))) return false;
    return true;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hermite sheets, Wiener-Hermite integrals and their limits"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", version);
    const auto start = std::chrono::system_clock::now();

    // simulate
    Common sim_c;
    int sim_q = 1;
    std::vector<double> sim_h{0.7};
    std::size_t sim_grid = 512, sim_reps = 1, sim_nint = 0;
    double sim_t = 1.0;
    auto* sim = app.add_subcommand("simulate", "Hermite sheet paths to CSV");
    sim->add_option("--q", sim_q, "chaos order")->check(CLI::Range(1, 8));
    sim->add_option("--hurst", sim_h, "Hurst index per axis")->delimiter(',')->check(CLI::Range(0.5, 1.0));
    sim->add_option("--grid", sim_grid, "steps per axis")->check(CLI::Range(1, 1 << 20));
    sim->add_option("--t-max", sim_t, "extent per axis")->check(CLI::PositiveNumber);
    sim->add_option("--reps", sim_reps, "number of paths")->check(CLI::Range(1, 1 << 20));
    sim->add_option("--n-internal", sim_nint, "fine cells per axis (default 2^14 for d=1, 2^9 otherwise)")
        ->check(CLI::Range(64, 1 << 24));
    add_common(sim, sim_c);
    sim->get_option("--out")->required();

    // integral
    Common int_c;
    std::string int_f = "exp_window";
    int int_q = 2;
    double int_h = 0.7, int_lambda = 1.0, int_t = 1.0, int_a = 0.0, int_b = 1.0;
    std::size_t int_grid = 512, int_reps = 5000, int_nint = std::size_t{1} << 14, int_panels = 256;
    auto* integ = app.add_subcommand("integral", "Wiener-Hermite integral MC against the isometry quadrature");
    integ->add_option("--f", int_f, "integrand")->check(CLI::IsMember({"exp_window", "indicator"}));
    integ->add_option("--q", int_q, "chaos order")->check(CLI::Range(1, 8));
    integ->add_option("--hurst", int_h, "Hurst index")->check(CLI::Range(0.5, 1.0));
    integ->add_option("--lambda", int_lambda, "exp_window rate")->check(CLI::PositiveNumber);
    integ->add_option("--t", int_t, "exp_window end point")->check(CLI::PositiveNumber);
    integ->add_option("--a", int_a, "indicator left end")->check(CLI::Range(0.0, 1e6));
    integ->add_option("--b", int_b, "indicator right end")->check(CLI::PositiveNumber);
    integ->add_option("--grid", int_grid, "field steps")->check(CLI::Range(8, 1 << 20));
    integ->add_option("--reps", int_reps, "replicates")->check(CLI::Range(2, 1 << 24));
    integ->add_option("--n-internal", int_nint, "fine cells")->check(CLI::Range(64, 1 << 24));
    integ->add_option("--panels", int_panels, "quadrature panels")->check(CLI::Range(8, 1 << 14));
    add_common(integ, int_c);

    // sweep
    Common sw_c;
    std::string sw_target = "half";
    int sw_q = 2;
    std::vector<double> sw_grid_h;
    double sw_lambda = 1.0, sw_t = 1.0;
    std::size_t sw_reps = 2000, sw_grid = 512, sw_nint = std::size_t{1} << 14;
    auto* sw = app.add_subcommand("sweep", "H-grid limit experiment for an exp_window integral");
    sw->add_option("--target", sw_target, "limit: half or one")->check(CLI::IsMember({"half", "one"}));
    sw->add_option("--q", sw_q, "chaos order")->check(CLI::Range(1, 8));
    sw->add_option("--hurst-grid", sw_grid_h, "Hurst values in order")->delimiter(',')->check(CLI::Range(0.5, 1.0));
    sw->add_option("--lambda", sw_lambda, "exp_window rate")->check(CLI::PositiveNumber);
    sw->add_option("--t", sw_t, "exp_window end point")->check(CLI::PositiveNumber);
    sw->add_option("--reps", sw_reps, "replicates per H (0 = quadrature only)")->check(CLI::Range(0, 1 << 24));
    sw->add_option("--grid", sw_grid, "field steps")->check(CLI::Range(8, 1 << 20));
    sw->add_option("--n-internal", sw_nint, "fine cells")->check(CLI::Range(64, 1 << 24));
    add_common(sw, sw_c);

    // heat
    Common heat_c;
    int heat_q = 2;
    double heat_h0 = 0.55, heat_t = 1.0, heat_s = 1.0, heat_x = 0.0;
    std::vector<double> heat_h{0.55};
    std::size_t heat_reps = 0, heat_ts = 512, heat_xs = 512;
    auto* heat = app.add_subcommand("heat", "heat equation: mild-solution MC, covariance quadrature, limits");
    heat->add_option("--q", heat_q, "chaos order")->check(CLI::Range(1, 8));
    heat->add_option("--H0", heat_h0, "time Hurst index")->check(CLI::Range(0.5, 1.0));
    heat->add_option("--H", heat_h, "spatial Hurst indices")->delimiter(',')->check(CLI::Range(0.5, 1.0));
    heat->add_option("--t", heat_t, "time t")->check(CLI::Range(0.0, 1e6));
    heat->add_option("--s", heat_s, "time s")->check(CLI::Range(0.0, 1e6));
    heat->add_option("--x", heat_x, "spatial point (d = 1)")->check(CLI::Range(-1e6, 1e6));
    heat->add_option("--reps", heat_reps, "MC replicates of u(t, x) (0 = none)")->check(CLI::Range(0, 1 << 24));
    heat->add_option("--time-steps", heat_ts, "time cells")->check(CLI::Range(8, 1 << 16));
    heat->add_option("--space-steps", heat_xs, "space cells")->check(CLI::Range(8, 1 << 16));
    add_common(heat, heat_c);

    // ou
    Common ou_c;
    std::string ou_limit_cov;
    double ou_lambda = 1.0, ou_sigma = 1.0, ou_t = 1.0, ou_s = 1.0, ou_h = 0.7, ou_xi = 0.0;
    int ou_q = 2;
    bool ou_stationary = false;
    std::size_t ou_reps = 2000, ou_grid = 512;
    auto* ou = app.add_subcommand("ou", "Hermite Ornstein-Uhlenbeck simulation and limit checks");
    ou->add_option("--limit-cov", ou_limit_cov, "print a limit covariance and exit")
        ->check(CLI::IsMember({"nonstationary", "stationary"}));
    ou->add_option("--lambda", ou_lambda, "drift rate")->check(CLI::PositiveNumber);
    ou->add_option("--sigma", ou_sigma, "noise scale")->check(CLI::PositiveNumber);
    ou->add_option("--t", ou_t, "time t")->check(CLI::Range(0.0, 1e6));
    ou->add_option("--s", ou_s, "time s")->check(CLI::Range(0.0, 1e6));
    ou->add_option("--H", ou_h, "Hurst index")->check(CLI::Range(0.5, 1.0));
    ou->add_option("--q", ou_q, "chaos order")->check(CLI::Range(1, 8));
    ou->add_option("--xi", ou_xi, "constant initial condition")->check(CLI::Range(-1e12, 1e12));
    ou->add_flag("--stationary", ou_stationary, "stationary solution");
    ou->add_option("--reps", ou_reps, "replicates")->check(CLI::Range(2, 1 << 24));
    ou->add_option("--grid", ou_grid, "steps on [0, t]")->check(CLI::Range(8, 1 << 20));
    add_common(ou, ou_c);

    // powercount
    Common pc_c;
    std::string pc_spec, pc_H, pc_gamma;
    auto* pc = app.add_subcommand("powercount", "power counting verdict for a functional system");
    pc->add_option("--spec", pc_spec, "system JSON")->required()->check(CLI::ExistingFile);
    pc->add_option("--H", pc_H, "rational value substituted for H, e.g. 3/5");
    pc->add_option("--gamma", pc_gamma, "rational value substituted for gamma, e.g. 4/5");
    pc->add_option("--out", pc_c.out, "output file (default: stdout)");

    // verify
    std::vector<int> ver_ids;
    Common ver_c;
    auto* ver = app.add_subcommand("verify", "run the acceptance suite");
    ver->add_option("--only", ver_ids, "criterion ids")->delimiter(',')->check(CLI::Range(1, 10));
    add_common(ver, ver_c, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*sim) {
            // exclusive open bounds: CLI11 ranges are closed
            for (double h : sim_h) detail::require(h > 0.5 && h < 1.0, "--hurst entries must lie in (1/2, 1)");
            const std::uint64_t seed = master_seed(sim_c);
            const std::size_t d = sim_h.size();
            const GridSpec grid = GridSpec::cube(d, sim_t, sim_grid);
            const std::size_t nint = sim_nint ? sim_nint : default_n_internal(d);
            const HermiteSheetGenerator gen(HermiteSpec(sim_q, HurstMultiIndex(sim_h)), grid, nint);
            auto paths = run_replicates<RandomField>(sim_reps, seed, sim_c.threads, [&](Stream& s, std::size_t) {
                RandomField f = gen.sample(s);
                f.meta.seed = seed;
                return f;
            });
            for (std::size_t i = 0; i < sim_reps; ++i) {
                const std::string path = replicate_path(sim_c.out, i, sim_reps);
                std::ofstream os(path);
                if (!os) throw DomainError("cannot write " + path);
                write_csv(paths[i], os);
            }
            write_manifest(sim_c.out + ".manifest.json", "simulate", sim, seed, start);
            return 0;
        }

        if (*integ) {
            detail::require(int_h > 0.5 && int_h < 1.0, "--hurst must lie in (1/2, 1)");
            const std::uint64_t seed = master_seed(int_c);
            const Integrand f = make_integrand(int_f, int_lambda, int_t, int_a, int_b);
            const double T = f.support().hi[0];
            const GridSpec grid = GridSpec::cube(1, T, int_grid);
            const HurstMultiIndex H({int_h});
            const HermiteSheetGenerator gen(HermiteSpec(int_q, H), grid, int_nint);
            const WienerIntegrator I(f, grid);
            const MCReport r = mc_report([&](Stream& s) { return I(gen.sample(s)); }, int_reps, seed, int_c.threads);
            QuadratureConfig qc;
            qc.panels = int_panels;
            const double quad = inner_product_HH(f, f, H, qc);
            json out = to_json(r);
            out["quadrature_variance"] = quad;
            out["relative_error"] = std::abs(r.variance - quad) / quad;
            out["z_score"] = r.stderr_variance > 0 ? (r.variance - quad) / r.stderr_variance : 0.0;
            emit(out, int_c, "integral", integ, seed, start);
            return 0;
        }

        if (*sw) {
            if (sw_grid_h.empty())
                sw_grid_h = sw_target == "half" ? std::vector<double>{0.75, 0.65, 0.55, 0.51}
                                                : std::vector<double>{0.9, 0.95, 0.99};
            for (double h : sw_grid_h) detail::require(h > 0.5 && h < 1.0, "--hurst-grid entries must lie in (1/2, 1)");
            const std::uint64_t seed = master_seed(sw_c);
            const Integrand f = Integrand::exp_window(sw_lambda, sw_t);
            const GridSpec grid = GridSpec::cube(1, sw_t, sw_grid);
            const WienerIntegrator I(f, grid);
            const LimitScenario sc(1, {0}, sw_target == "half" ? LimitTarget::half : LimitTarget::one);
            json out;
            out["target"] = sw_target;
            out["hurst"] = sw_grid_h;
            std::vector<double> quad, mc, se, ks, kurt;
            const double mass = integrand_integral(f);
            const double limit = sw_target == "half" ? sigma_limit(f, sc) : mass * mass;
            const Cdf law = sw_target == "one" ? scaled_cdf(target_cdf_hermite_limit(sw_q), mass) : Cdf(normal_cdf);
            for (double h : sw_grid_h) {
                quad.push_back(inner_product_HH(f, f, HurstMultiIndex({h})));
                if (sw_reps == 0) continue;
                const HermiteSheetGenerator gen(HermiteSpec(sw_q, HurstMultiIndex({h})), grid, sw_nint);
                auto x = run_replicates<double>(sw_reps, seed, sw_c.threads,
                                                [&](Stream& s, std::size_t) { return I(gen.sample(s)); });
                const MCReport r = summarize(x, seed);
                mc.push_back(r.variance);
                se.push_back(r.stderr_variance);
                if (sw_reps >= 100) kurt.push_back(excess_kurtosis(x));
                if (sw_target == "one") {
                    ks.push_back(ks_distance(x, law));
                } else {
                    for (auto& v : x) v /= std::sqrt(r.variance);
                    ks.push_back(ks_distance(x, normal_cdf));
                }
            }
            out["quadrature_variance"] = quad;
            out["limit_variance"] = limit;
            out["quadrature_monotone"] = strictly_monotone_toward(quad, limit);
            out["quadrature_relative_error_last"] = std::abs(quad.back() - limit) / limit;
            if (sw_reps > 0) {
                out["reps"] = sw_reps;
                out["mc_variance"] = mc;
                out["mc_stderr_variance"] = se;
                out["ks_distance"] = ks;
                out["ks_reference"] = sw_target == "one" ? "scaled Hermite law" : "standard normal (standardized)";
                if (!kurt.empty()) out["excess_kurtosis"] = kurt;
                bool dec = true;
                for (std::size_t i = 1; i < ks.size(); ++i) dec = dec && ks[i] < ks[i - 1];
                out["ks_decreasing"] = dec;
            }
            out["seed"] = seed;
            emit(out, sw_c, "sweep", sw, seed, start);
            return 0;
        }

        if (*heat) {
            detail::require(heat_h0 > 0.5 && heat_h0 < 1.0, "--H0 must lie in (1/2, 1)");
            for (double h : heat_h) detail::require(h > 0.5 && h < 1.0, "--H entries must lie in (1/2, 1)");
            const std::uint64_t seed = master_seed(heat_c);
            HeatSpec spec(heat_q, heat_h0, HurstMultiIndex(heat_h));
            spec.time_steps = heat_ts;
            spec.space_steps = heat_xs;
            const auto ex = existence_condition(heat_h0, heat_h, heat_h.size());
            json out;
            out["d"] = heat_h.size();
            out["gamma_cond"] = ex.gamma_cond;
            out["existence_ok"] = ex.ok;
            if (heat_h.size() == 1) {
                out["covariance_quadrature"] = heat_covariance_quadrature(spec, heat_t, heat_s);
                const LimitScenario sc(1, {0}, LimitTarget::half);
                out["white_noise_limit_covariance"] = heat_limit_covariance(HeatLimitCase::three, sc, 0.5, heat_t, heat_s);
            }
            if (heat_reps > 0) {
                detail::require(heat_t > 0.0, "MC needs --t > 0");
                std::vector<double> x(heat_h.size(), heat_x);
                const MildSolutionSampler sampler(spec, heat_t, x);
                const MCReport r = mc_report([&](Stream& s) { return sampler.sample(s)[0]; }, heat_reps, seed, heat_c.threads);
                out["mc"] = to_json(r);
                if (heat_h.size() == 1) {
                    const double qv = heat_covariance_quadrature(spec, heat_t, heat_t);
                    out["mc_variance_quadrature"] = qv;
                    out["mc_relative_error"] = std::abs(r.variance - qv) / qv;
                }
            }
            out["seed"] = seed;
            emit(out, heat_c, "heat", heat, seed, start);
            return 0;
        }

        if (*ou) {
            if (!ou_limit_cov.empty()) {
                const OUKind k = ou_limit_cov == "stationary" ? OUKind::stationary : OUKind::nonstationary;
                json out{{"kind", ou_limit_cov}, {"limit_covariance", ou_limit_covariance(k, ou_t, ou_s, ou_lambda, ou_sigma)}};
                emit(out, ou_c, "ou", ou, 0, start);
                return 0;
            }
            detail::require(ou_h > 0.5 && ou_h < 1.0, "--H must lie in (1/2, 1)");
            detail::require(ou_t > 0.0, "--t must be > 0 for simulation");
            const std::uint64_t seed = master_seed(ou_c);
            OUSpec spec;
            spec.lambda = ou_lambda;
            spec.sigma = ou_sigma;
            spec.q = ou_q;
            spec.H = ou_h;
            spec.xi = InitialCondition::constant(ou_xi);
            spec.stationary = ou_stationary;
            const GridSpec grid = GridSpec::cube(1, ou_t, ou_grid);
            std::vector<double> y;
            if (ou_stationary) {
                const StationaryHouSimulator sim_ou(spec, grid);
                y = run_replicates<double>(ou_reps, seed, ou_c.threads,
                                           [&](Stream& s, std::size_t) { return sim_ou.sample(s).values.back(); });
            } else {
                const HouSimulator sim_ou(spec, grid);
                y = run_replicates<double>(ou_reps, seed, ou_c.threads,
                                           [&](Stream& s, std::size_t) { return sim_ou.sample(s).values.back(); });
            }
            const MCReport r = summarize(y, seed);
            const double lo = ou_stationary ? -std::ceil(spec.horizon() / grid.mesh(0) - 1e-9) * grid.mesh(0) : 0.0;
            const Integrand w = ou_window(ou_lambda, ou_t, lo);
            const double quad = ou_sigma * ou_sigma * inner_product_HH(w, w, HurstMultiIndex({ou_h}));
            const OUKind kind = ou_stationary ? OUKind::stationary : OUKind::nonstationary;
            const double one = ou_stationary ? std::pow(ou_sigma / ou_lambda, 2)
                                             : std::pow(ou_sigma / ou_lambda * (1.0 - std::exp(-ou_lambda * ou_t)), 2);
            json out = to_json(r);
            out["H"] = ou_h;
            out["stationary"] = ou_stationary;
            out["quadrature_variance"] = quad;
            out["half_limit_variance"] = ou_limit_covariance(kind, ou_t, ou_t, ou_lambda, ou_sigma);
            out["one_limit_variance"] = one;
            out["excess_kurtosis"] = ou_reps >= 100 ? json(excess_kurtosis(y)) : json(nullptr);
            emit(out, ou_c, "ou", ou, seed, start);
            return 0;
        }

        if (*pc) {
            SymbolValues env;
            if (!pc_H.empty()) env.H = parse_rational(pc_H);
            if (!pc_gamma.empty()) env.gamma = parse_rational(pc_gamma);
            const FunctionalSystem s = load_system(pc_spec, env);
            const auto r = check_integrability(s);
            emit(to_json(s, r), pc_c, "powercount", pc, 0, start);
            return 0;
        }

        if (*ver) {
            acceptance::Options o;
            o.seed = master_seed(ver_c);
            o.threads = ver_c.threads;
            const auto res = acceptance::run(o, ver_ids, std::cout);
            std::size_t ok = 0;
            for (const auto& r : res) ok += r.passed ? 1 : 0;
            std::cout << ok << "/" << res.size() << " criteria passed\n";
            return ok == res.size() ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "hermlab: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
