// abcf: command-line front end for the (a,b)-continued fraction library.
//
// Exit status: 0 success, 2 a verification check failed, 1 anything else
// (bad flags, parameters outside the admissible set, runtime errors).

#include "abcf/abcf.hpp"
#include "abcf/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace abcf;

namespace {

struct usage_error : error {
    using error::error;
};

struct RunConfig {
    std::string command;
    std::string a, b, preset;
    std::string mode = "exact";
    std::string x;
    std::string which = "both";
    std::string format = "json";
    std::string out;
    std::string plan = "m=3;1x2,2x1,1x3,2x2,1x2,2x1,1x2,2x1";
    std::string side = "b";
    std::string figure;
    std::size_t cap = 100000;
    std::size_t digits = 50;
    std::size_t points = 100000;
    std::size_t burn_in = 300;
    std::size_t grid = 100;
    std::size_t scan_cap = 10000;
    std::size_t check_cap = 1000;
    std::uint64_t seed = 1;
    double width = 1e-6;
    std::vector<double> window{-4, 4, -4, 4};
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, command, a, b, preset, mode, x, which, format, out, plan, side, figure, cap, digits,
                                                points, burn_in, grid, scan_cap, check_cap, seed, width, window)

const char* golden_b = "(-1+sqrt(5))/2";

struct Figure {
    const char* name;
    const char* a;
    const char* b;
};
const Figure figures[] = {{"fig1", "-4/5", "2/5"}, {"fig4a", "-1", "0"}, {"fig4b", "-1", "1"}, {"fig4c", "-1/2", "1/2"}};

void emit(const RunConfig& cfg, const std::string& text)
{
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f)
        throw usage_error("cannot write " + cfg.out);
    f << text;
}

// JSON output carries the config; other formats echo it to stderr and, with
// --out, next to the artifact.
int finish(const RunConfig& cfg, json result, const std::string& artifact = "", int status = 0)
{
    json echo = json::parse(nlohmann::json(cfg).dump());
    if (cfg.format == "json") {
        result["config"] = echo;
        emit(cfg, result.dump(2) + "\n");
    } else {
        emit(cfg, artifact);
        std::cerr << "config: " << echo.dump() << "\n";
        if (!cfg.out.empty())
            std::ofstream(cfg.out + ".config.json") << echo.dump(2) << "\n";
    }
    return status;
}

Window window_of(const RunConfig& cfg)
{
    if (cfg.window.size() != 4)
        throw usage_error("--window takes four numbers: x0 x1 y0 y1");
    return {cfg.window[0], cfg.window[1], cfg.window[2], cfg.window[3]};
}

template <Scalar S>
S scalar_of(const std::string& text)
{
    if constexpr (std::same_as<S, Float>)
        return Float(parse_rational(text).convert_to<double>());
    else if constexpr (std::same_as<S, QuadSurd>)
        return parse_surd(text);
    else
        return parse_rational(text);
}

template <Scalar S>
int run(const RunConfig& cfg, const Params<S>& P)
{
    const std::string& cmd = cfg.command;
    if (cmd == "expand") {
        if (cfg.x.empty())
            throw usage_error("expand needs --x");
        S x = scalar_of<S>(cfg.x);
        Expansion e = expand(x, P, cfg.digits);
        json r = expansion_json(e);
        r["x"] = value_json(x);
        std::string text;
        for (const Integer& n : e.digits)
            text += n.str() + " ";
        return finish(cfg, r, text + "\n");
    }
    if (cmd == "cycle") {
        json r;
        std::string text;
        auto one = [&](Endpoint e) {
            auto c = detect_cycle(P, e, cfg.cap);
            text += std::string(e == Endpoint::A ? "a" : "b") + ": " + class_name(c.cls) + (c.end ? " end " + c.end->str() : "") + "\n";
            return cycle_json(c);
        };
        if (cfg.which == "a")
            r = one(Endpoint::A);
        else if (cfg.which == "b")
            r = one(Endpoint::B);
        else if (cfg.which == "both")
            r = {{"a", one(Endpoint::A)}, {"b", one(Endpoint::B)}};
        else
            throw usage_error("--which must be a, b or both");
        r["finite"] = finiteness_check(P, cfg.cap).finite;
        return finish(cfg, r, text);
    }

    if constexpr (std::same_as<S, Float>) {
        throw usage_error(cmd + " needs exact parameters (--mode exact)");
    } else {
        if (cmd == "measures") {
            if (!simple_case_applies(P))
                throw usage_error("measures needs 1 <= -1/a <= b+1 and a-1 <= -1/b <= -1");
            MeasureSummary m = measure_summary(P, cfg.points, cfg.seed);
            double pi = boost::math::constants::pi<double>();
            bool ok = std::fabs(m.nu_mass - 1) <= 1e-8 && std::fabs(m.mu_mass - 1) <= 1e-8 && std::fabs(m.h_rokhlin - m.h_closed) <= 1e-5 &&
                      std::fabs(m.log_integral + pi * pi / 6) <= 1e-6 && m.ks.escaped == 0;
            // KS bound scales as n^-1/2; 3e-3 at 10^6 points.
            if (!m.ks.empty())
                ok = ok && m.ks.statistic() <= 3.0 / std::sqrt(static_cast<double>(m.ks.samples));
            json r = measures_json(m);
            r["ok"] = ok;
            return finish(cfg, r, r.dump(2) + "\n", ok ? 0 : 2);
        }

        RectDomain<S> D = build_attractor(P, cfg.cap);
        if (cmd == "attractor") {
            json r = domain_json(D);
            std::string art;
            if (cfg.format == "svg")
                art = render_svg(D, nullptr, window_of(cfg));
            else if (cfg.format == "text")
                for (const auto& b : D.boxes())
                    art += "[" + b.x0.str() + ", " + b.x1.str() + "] x [" + b.y0.str() + ", " + b.y1.str() + "]\n";
            return finish(cfg, r, art);
        }
        if (cmd == "oracle" || cmd == "plot") {
            Cloud c = sample_attractor(P, cfg.points, cfg.burn_in, cfg.seed);
            if (cmd == "plot" || cfg.format == "svg")
                return finish(cfg, {}, render_svg(D, &c, window_of(cfg)));
            OracleComparison o = compare_with_oracle(D, c);
            return finish(cfg, oracle_json(o), oracle_json(o).dump(2) + "\n");
        }
        if (cmd == "verify") {
            json r;
            ConnectivityReport con = verify_connectivity(D);
            r["connectivity"] = {{"ok", con.ok}, {"failures", con.failures}};
            auto bij = verify_bijectivity(D);
            r["bijectivity"] = bijectivity_json(bij);
            Cloud c = sample_attractor(P, cfg.points, cfg.burn_in, cfg.seed);
            OracleComparison o = compare_with_oracle(D, c);
            r["oracle"] = oracle_json(o);
            bool ok = con.ok && bij.tiles() && o.inside_fraction >= 0.999 && o.boundary_gap <= 0.05;
            if (cfg.grid > 0) {
                ReductionReport red = reduction_scan(D, cfg.grid, cfg.scan_cap);
                r["reduction"] = reduction_json(red);
                ok = ok && red.reached == red.points;
            }
            r["ok"] = ok;
            return finish(cfg, r, r.dump(2) + "\n", ok ? 0 : 2);
        }
    }
    throw usage_error("unknown command " + cmd);
}

int run_exceptional(const RunConfig& cfg)
{
    if (cfg.side != "a" && cfg.side != "b")
        throw usage_error("--side must be a or b");
    Plan plan = parse_plan(cfg.plan);
    ExceptionalResult res = exceptional_b(plan, Rational(cfg.width));
    Params<Rational> P(res.b - 1, res.b);
    FinitenessReport F = finiteness_check(P, cfg.check_cap);
    json r = exceptional_json(res);
    if (cfg.side == "a") {
        Params<Rational> M = mirror(P);
        r["mirrored"] = params_json(M);
    }
    bool nested = true;
    for (const auto& g : res.generations)
        nested = nested && g.nested;
    r["finiteness"] = {{"cap", cfg.check_cap}, {"finite", F.finite}, {"suspect", F.suspect ? (*F.suspect == Endpoint::A ? "a" : "b") : "none"}};
    r["finiteness"]["digit_pattern"] = F.digit_pattern;
    bool ok = nested && !F.finite;
    r["ok"] = ok;
    return finish(cfg, r, r.dump(2) + "\n", ok ? 0 : 2);
}

int dispatch(RunConfig cfg)
{
    if (const char* s = std::getenv("ABCF_SEED"))
        cfg.seed = std::stoull(s);
    if (cfg.format != "json" && cfg.format != "svg" && cfg.format != "text")
        throw usage_error("--format must be json, svg or text");
    if (cfg.command == "plot") {
        cfg.format = "svg";
        if (!cfg.figure.empty()) {
            bool found = false;
            for (const Figure& f : figures)
                if (cfg.figure == f.name) {
                    cfg.a = f.a;
                    cfg.b = f.b;
                    found = true;
                }
            if (!found)
                throw usage_error("unknown figure " + cfg.figure + " (fig1, fig4a, fig4b, fig4c)");
        }
    }
    if (cfg.command == "exceptional")
        return run_exceptional(cfg);

    std::string a = cfg.a, b = cfg.b;
    if (!cfg.preset.empty()) {
        if (cfg.preset != "golden")
            throw usage_error("unknown preset " + cfg.preset);
        a = std::string("-") + golden_b;
        b = golden_b;
    }
    if (a.empty() || b.empty())
        throw usage_error("parameters needed: --a and --b, or --preset");
    if (cfg.mode == "float")
        return run(cfg, Params<Float>(scalar_of<Float>(a), scalar_of<Float>(b)));
    if (cfg.mode != "exact")
        throw usage_error("--mode must be exact or float");
    if (a.find("sqrt") != std::string::npos || b.find("sqrt") != std::string::npos || cfg.x.find("sqrt") != std::string::npos)
        return run(cfg, Params<QuadSurd>(parse_surd(a), parse_surd(b)));
    return run(cfg, Params<Rational>(parse_rational(a), parse_rational(b)));
}

// --config is read before the flags so explicit flags override it.
RunConfig load_config(int argc, char** argv)
{
    RunConfig cfg;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) != "--config")
            continue;
        std::ifstream f(argv[i + 1]);
        if (!f)
            throw usage_error(std::string("cannot read config ") + argv[i + 1]);
        nlohmann::json j = nlohmann::json::parse(f);
        if (j.contains("config"))
            j = j["config"];
        cfg = j.get<RunConfig>();
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    RunConfig cfg;
    try {
        cfg = load_config(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "abcf: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"(a,b)-continued fractions, reduction attractors and exceptional parameters"};
    app.require_subcommand(0, 1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config (a previous run's echo)");

    auto common = [&](CLI::App* sc) {
        sc->add_option("--a", cfg.a, "parameter a, e.g. -4/5");
        sc->add_option("--b", cfg.b, "parameter b, e.g. 2/5");
        sc->add_option("--preset", cfg.preset, "named parameters: golden");
        sc->add_option("--mode", cfg.mode, "exact or float");
        sc->add_option("--format", cfg.format, "json, svg or text");
        sc->add_option("--out", cfg.out, "output file (default stdout)");
        sc->add_option("--cap", cfg.cap, "orbit step cap");
        sc->add_option("--config", config_path, "JSON config (a previous run's echo)");
    };
    auto sampling = [&](CLI::App* sc) {
        sc->add_option("--points", cfg.points, "sample size");
        sc->add_option("--burn-in", cfg.burn_in, "iterations before a point is kept");
        sc->add_option("--seed", cfg.seed, "RNG seed (ABCF_SEED overrides)");
        sc->add_option("--window", cfg.window, "SVG window x0 x1 y0 y1")->expected(4);
    };

    auto* expand_cmd = app.add_subcommand("expand", "digits of x");
    common(expand_cmd);
    expand_cmd->add_option("--x", cfg.x, "number to expand")->required();
    expand_cmd->add_option("--digits", cfg.digits, "maximum number of digits");

    auto* cycle_cmd = app.add_subcommand("cycle", "cycle classification of a and b");
    common(cycle_cmd);
    cycle_cmd->add_option("--which", cfg.which, "a, b or both");

    auto* attr_cmd = app.add_subcommand("attractor", "the attractor as step functions and boxes");
    common(attr_cmd);
    attr_cmd->add_option("--window", cfg.window, "x0 x1 y0 y1")->expected(4);

    auto* oracle_cmd = app.add_subcommand("oracle", "compare the attractor with forward iterates");
    common(oracle_cmd);
    sampling(oracle_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "connectivity, tiling, oracle and reduction checks");
    common(verify_cmd);
    sampling(verify_cmd);
    verify_cmd->add_option("--grid", cfg.grid, "reduction scan grid (0 skips the scan)");
    verify_cmd->add_option("--scan-cap", cfg.scan_cap, "iteration cap per scan point");

    auto* exc_cmd = app.add_subcommand("exceptional", "construct an exceptional parameter on b = a + 1");
    exc_cmd->add_option("--plan", cfg.plan, "e.g. m=3;1x2,2x1,1x3");
    exc_cmd->add_option("--width", cfg.width, "target enclosure width");
    exc_cmd->add_option("--check-cap", cfg.check_cap, "cap for the finiteness check");
    exc_cmd->add_option("--side", cfg.side, "b, or a for the mirrored parameter");
    exc_cmd->add_option("--out", cfg.out, "output file (default stdout)");
    exc_cmd->add_option("--config", config_path, "JSON config (a previous run's echo)");

    auto* meas_cmd = app.add_subcommand("measures", "invariant measure and entropy checks (simple case)");
    common(meas_cmd);
    meas_cmd->add_option("--points", cfg.points, "samples for the invariance statistic");
    meas_cmd->add_option("--seed", cfg.seed, "RNG seed (ABCF_SEED overrides)");

    auto* plot_cmd = app.add_subcommand("plot", "SVG of the attractor with a point cloud");
    common(plot_cmd);
    sampling(plot_cmd);
    plot_cmd->add_option("--figure", cfg.figure, "fig1, fig4a, fig4b or fig4c");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    for (CLI::App* sc : app.get_subcommands())
        cfg.command = sc->get_name();  // otherwise the command comes from --config
    if (cfg.command.empty()) {
        std::cerr << app.help();
        return 1;
    }
    try {
        return dispatch(cfg);
    } catch (const std::exception& e) {
        std::cerr << "abcf: " << e.what() << "\n";
        return 1;
    }
}
