#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "painleve3/io.hpp"

using namespace p3;
using io::json;

namespace {

int log_level() {
    const char* v = std::getenv("PAINLEVE3_LOG");
    if (!v || !*v) return 0;
    std::string s = v;
    if (s == "info") return 1;
    if (s == "debug" || s == "trace") return 2;
    try {
        return std::stoi(s);
    } catch (...) {
        return 1;
    }
}

void logf(int level, const std::string& msg) {
    static const int lv = log_level();
    if (level <= lv) std::cerr << "[painleve3] " << msg << '\n';
}

cplx parse_complex(const std::string& text, const char* name) {
    std::string t = text;
    for (char& c : t)
        if (c == ',') c = ' ';
    std::istringstream is(t);
    double re = 0, im = 0;
    if (!(is >> re)) throw Error(ErrorKind::Usage, std::string("cannot parse --") + name + " '" + text + "'");
    if (!(is >> im)) im = 0;
    std::string rest;
    if (is >> rest) throw Error(ErrorKind::Usage, std::string("cannot parse --") + name + " '" + text + "'");
    return {re, im};
}

struct Config {
    std::optional<std::string> s, b1, b2;
    std::optional<double> b5, b6;
    std::optional<double> x0, x1;
    double tol_abs = 1e-10, tol_rel = 1e-10;
    std::string format = "json";
    std::string out;
    int jobs = int(std::max(1u, std::thread::hardware_concurrency()));
    bool gap_safety = false;
    std::string precision = "auto";
    // command specific
    std::optional<std::string> f, g, xi;
    int count = 6;
    std::string grid;
    int k = 1;
    int b6_sign = 1;
};

// input points are checked against the surface with a loose tolerance and then normalized onto it
constexpr double input_tol = 1e-5;

MonodromyPoint normalize(MonodromyPoint p) {
    cplx q = p.b1 * p.b1 + p.b2 * p.b2 + p.s * p.b1 * p.b2;
    cplx sc = std::sqrt(q);
    p.b1 /= sc;
    p.b2 /= sc;
    p.residual = constraint_residual(p.s, p.b1, p.b2);
    return p;
}

MonodromyPoint read_point(const Config& c) {
    if (!c.s) throw Error(ErrorKind::Usage, "--s is required");
    cplx s = parse_complex(*c.s, "s");
    bool real_form = c.b5 || c.b6;
    bool mat_form = c.b1 || c.b2;
    if (real_form && mat_form) throw Error(ErrorKind::Usage, "give either --b1/--b2 or --b5/--b6, not both");
    if (real_form) {
        if (!c.b5 || !c.b6) throw Error(ErrorKind::Usage, "--b5 and --b6 must be given together");
        if (s.imag() != 0) throw Error(ErrorKind::Usage, "the real form needs real s");
        return normalize(from_real_form(s, *c.b5, *c.b6, input_tol));
    }
    if (!c.b1 || !c.b2) throw Error(ErrorKind::Usage, "--b1 and --b2 (or --b5 and --b6) are required");
    return normalize(make_point(s, parse_complex(*c.b1, "b1"), parse_complex(*c.b2, "b2"), input_tol));
}

void positive(double v, const char* name) {
    if (!(v > 0)) throw Error(ErrorKind::Usage, std::string("--") + name + " must be positive");
}

TrajectoryOptions trajectory_options(const Config& c) {
    TrajectoryOptions o;
    o.gap_safety = c.gap_safety;
    o.seed.gap_safety = c.gap_safety;
    o.flow.atol = c.tol_abs;
    o.flow.rtol = c.tol_rel;
    if (c.precision == "double") o.precision = Precision::Double;
    else if (c.precision == "extended") o.precision = Precision::Extended;
    else if (c.precision != "auto") throw Error(ErrorKind::Usage, "--precision must be auto, double or extended");
    return o;
}

void emit(const Config& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw Error(ErrorKind::Usage, "cannot write " + c.out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

json stratum_json(const RealStratum& st) {
    PredictedPattern pp = predicted_sequence(st);
    json sp = json::array();
    for (const auto& x : pp.splittings) sp.push_back(x.label);
    return {{"near_zero", to_string(st.near_zero)},
            {"near_infinity", to_string(st.near_infinity)},
            {"label", pp.label},
            {"checked_splittings", sp},
            {"printed_phase", pp.printed_phase}};
}

// ------------------------------------------------------------------ commands

int cmd_classify(const Config& c) {
    MonodromyPoint p = read_point(c);
    RealStratum st = stratum(p);
    json j = stratum_json(st);
    j["point"] = io::to_json(p);
    json terp = {{"nilpotent_orbit", std::abs(p.b2) <= 1e-9 && std::abs(p.b1 - 1.0) <= 1e-9},
                 {"sabbah_orbit", std::abs(p.s.real()) <= 2.0 + 1e-9 && p.b5().real() >= 1.0 - 1e-9}};
    if (c.x1) {
        double x = *c.x1;
        positive(x, "x1");
        double x0 = c.x0 ? *c.x0 : std::min(1e-3, x);
        TrajectoryOptions o = trajectory_options(c);
        o.gap_safety = o.seed.gap_safety = true;
        Trajectory tr = trajectory(p, x0, x, o);
        SolutionValue v{sample_f0(tr.final_state())};
        for (const auto& e : tr.events)
            if (!is_zero(e.kind) && std::abs(e.x - x) <= 1e-9 * x) v.f.reset();
        TerpStatus t = terp_status(p, x, v);
        terp = {{"x", x},
                {"f", v.f ? io::to_json(*v.f) : json(nullptr)},
                {"pure", t.pure},
                {"polarized", t.polarized},
                {"nilpotent_orbit", t.nilpotent_orbit},
                {"sabbah_orbit", t.sabbah_orbit}};
    }
    j["terp"] = terp;
    emit(c, io::dump(j));
    return 0;
}

int cmd_spectral(const Config& c) {
    if (!c.s) throw Error(ErrorKind::Usage, "--s is required");
    cplx s = parse_complex(*c.s, "s");
    SpectralData d = spectral(s);
    auto [M, T] = structure_matrices(s);
    json j = {{"s", io::to_json(s)},
              {"sqrt_disc", io::to_json(d.sqrt_disc)},
              {"lambda_plus", io::to_json(d.lambda_plus)},
              {"lambda_minus", io::to_json(d.lambda_minus)},
              {"alpha_plus", io::to_json(d.alpha_plus)},
              {"alpha_minus", io::to_json(d.alpha_minus)},
              {"v_plus", {io::to_json(d.v_plus[0]), io::to_json(d.v_plus[1])}},
              {"v_minus", {io::to_json(d.v_minus[0]), io::to_json(d.v_minus[1])}},
              {"t_NI", d.t_NI ? json(*d.t_NI) : json(nullptr)},
              {"jordan", d.jordan_flag},
              {"case", to_string(asymptotic_case(s))},
              {"Mon0", io::to_json(M)},
              {"T", io::to_json(T)}};
    if (c.b1 || c.b2 || c.b5 || c.b6) {
        MonodromyPoint p = read_point(c);
        EigenData e = eigen_data(p);
        auto opt = [](const std::optional<cplx>& z) { return z ? io::to_json(*z) : json(nullptr); };
        QuotientInvariants q = quotient_invariants(p);
        j["point"] = io::to_json(p);
        j["b_plus"] = opt(e.b_plus);
        j["b_minus"] = opt(e.b_minus);
        j["b_tilde1"] = opt(e.b_tilde1);
        j["delta_NI"] = opt(e.delta_NI);
        j["quotient"] = {{"y1", io::to_json(q.y1)}, {"y2", io::to_json(q.y2)}, {"y3", io::to_json(q.y3)},
                         {"residual", q.residual}};
        j["reality_class"] = to_string(reality_class(p));
    }
    emit(c, io::dump(j));
    return 0;
}

json events_json(const Trajectory& tr) {
    json ev = json::array();
    for (const auto& e : tr.events) ev.push_back(io::to_json(e));
    return ev;
}

int cmd_flow(const Config& c) {
    MonodromyPoint p = read_point(c);
    double x0 = c.x0.value_or(1e-3), x1 = c.x1.value_or(1.0);
    positive(x0, "x0");
    positive(x1, "x1");
    TrajectoryOptions o = trajectory_options(c);
    logf(1, std::string("flow with ") + (wants_extended(p, o.precision) ? "extended" : "double") + " precision");
    Trajectory tr = trajectory(p, x0, x1, o);
    logf(1, "accepted " + std::to_string(tr.diagnostics.accepted) + " steps, " +
                std::to_string(tr.events.size()) + " events");
    json meta = {{"x_seed", tr.samples.front().x},
                 {"x_end", tr.samples.back().x},
                 {"events", events_json(tr)},
                 {"steps", tr.diagnostics.accepted},
                 {"rejected", tr.diagnostics.rejected},
                 {"chart_switches", tr.diagnostics.switches}};
    if (c.format == "csv") {
        std::ostringstream os;
        os << "x,re_f0,im_f0,chart,event_flag\n";
        for (const auto& s : tr.samples) {
            os << io::format_double(s.x) << ',';
            if (s.f0) os << io::format_double(s.f0->real()) << ',' << io::format_double(s.f0->imag());
            else os << "inf,inf";
            os << ',' << s.chart << ',' << (s.event_flag ? 1 : 0) << '\n';
        }
        emit(c, os.str());
        if (!c.out.empty()) {
            std::ofstream f(c.out + ".events.json");
            f << io::dump(meta) << '\n';
        }
        return 0;
    }
    if (c.format != "json") throw Error(ErrorKind::Usage, "--format must be json or csv");
    json samples = json::array();
    for (const auto& s : tr.samples)
        samples.push_back({{"x", s.x},
                           {"f", s.f0 ? io::to_json(*s.f0) : json(nullptr)},
                           {"chart", s.chart},
                           {"event", s.event_flag}});
    meta["samples"] = samples;
    emit(c, io::dump(meta));
    return 0;
}

json stokes_json(const StokesOutput& o) {
    return {{"s", io::to_json(o.s)},
            {"B", io::to_json(o.B)},
            {"B_raw", io::to_json(o.B_raw)},
            {"Sa_raw", io::to_json(o.Sa_raw)},
            {"Sb_raw", io::to_json(o.Sb_raw)},
            {"beta", o.beta},
            {"residual_structure", o.residual_structure},
            {"residual_transport", o.residual_transport},
            {"residual_stokes", o.residual_stokes},
            {"radii_used", {o.radii_used.first, o.radii_used.second}}};
}

int cmd_monodromy(const Config& c) {
    if (!c.f || !c.g) throw Error(ErrorKind::Usage, "monodromy needs --x1, --f and --g (state in the base chart)");
    double x = c.x1.value_or(1.0);
    positive(x, "x1");
    ChartState st = from_fg(x, parse_complex(*c.f, "f"), parse_complex(*c.g, "g"), 0);
    StokesOutput out = stokes_data(st);
    emit(c, io::dump(stokes_json(out)));
    return 0;
}

int cmd_roundtrip(const Config& c) {
    MonodromyPoint p = read_point(c);
    double x0 = c.x0.value_or(1e-3), x1 = c.x1.value_or(1.0);
    positive(x0, "x0");
    positive(x1, "x1");
    RoundTripResult r = round_trip(p, x0, x1, trajectory_options(c));
    json j = {{"input", io::to_json(p)},
              {"s_err", r.s_err},
              {"B_err", r.B_err},
              {"x_seed", r.x_seed},
              {"x_probe", x1},
              {"events", r.events},
              {"recovered", stokes_json(r.recovered)}};
    emit(c, io::dump(j));
    return 0;
}

int cmd_asymptotics(const Config& c) {
    MonodromyPoint p = read_point(c);
    double x = c.x0.value_or(1e-3);
    positive(x, "x0");
    AsymptoticCase ac = asymptotic_case(p.s);
    SpectralData sd = spectral(reciprocal_case(ac) ? -p.s : p.s);
    json j = {{"case", to_string(ac)}, {"x", x}, {"point", io::to_json(p)}};
    if (ac != AsymptoticCase::CPlus && ac != AsymptoticCase::CMinus) {  // Gamma poles at alpha = 1/2
        auto kc = kappa_constants(sd.alpha_minus);
        j["kappa01"] = io::to_json(kc.first);
        j["kappa1m1"] = io::to_json(kc.second);
    }
    Expansion e = expansion(p);
    json terms = json::array();
    for (const auto& t : e.terms)
        terms.push_back({{"coefficient", io::to_json(t.coefficient)},
                         {"exponent", io::to_json(t.exponent)},
                         {"log_power", t.log_power}});
    j["terms"] = terms;
    j["reciprocal"] = e.reciprocal;
    j["radius_hint"] = e.valid_radius_hint;
    j["leading_term"] = io::to_json(leading_term(p, x));
    if (ac == AsymptoticCase::BPlus || ac == AsymptoticCase::BMinus) {
        json pe = json::array();
        for (const auto& ev : predict_small_x_events(p, c.count))
            pe.push_back({{"k", ev.k}, {"x", io::to_json(ev.x)}, {"kind", detail::kind_label(ev.kind)}});
        j["predicted_events"] = pe;
    }
    if (ac == AsymptoticCase::A || c.gap_safety) {
        SeedOptions so;
        so.gap_safety = c.gap_safety;
        ChartState st = seed_state(p, x, so);
        j["seed"] = {{"x", st.x}, {"chart", st.k}, {"f", io::to_json(st.f)}, {"gt", io::to_json(st.gt)}};
    }
    emit(c, io::dump(j));
    return 0;
}

// grid format: name=a:b:n with name in {s, b5, phase}
std::vector<SheetNode> parse_grid(const Config& c) {
    auto bad = [&] { return Error(ErrorKind::Usage, "malformed --grid '" + c.grid + "', expected name=a:b:n"); };
    auto eq = c.grid.find('=');
    if (eq == std::string::npos) throw bad();
    std::string name = c.grid.substr(0, eq);
    std::string rest = c.grid.substr(eq + 1);
    for (char& ch : rest)
        if (ch == ':') ch = ' ';
    std::istringstream is(rest);
    double a, b;
    int n;
    std::string extra;
    if (!(is >> a >> b >> n) || (is >> extra) || n < 1) throw bad();
    double s0 = c.s ? parse_complex(*c.s, "s").real() : 0.0;
    std::vector<SheetNode> out;
    for (int i = 0; i < n; ++i) {
        double v = n == 1 ? a : a + (b - a) * i / (n - 1);
        double s = s0, b5 = c.b5.value_or(1.0), b6;
        if (name == "s") s = v;
        else if (name == "b5") b5 = v;
        else if (name != "phase") throw bad();
        double w = s * s / 4 - 1;
        if (name == "phase") {
            if (!(w > 0)) throw Error(ErrorKind::Usage, "a phase sweep needs |s| > 2");
            b5 = std::cos(v);
            b6 = std::sin(v) / std::sqrt(w);
        } else {
            double q = w == 0 ? -1 : (1 - b5 * b5) / w;
            if (q < -1e-12) throw Error(ErrorKind::Usage, "grid node leaves the real surface");
            b6 = c.b6_sign * std::sqrt(std::max(q, 0.0));
        }
        out.push_back({s, b5, b6});
    }
    return out;
}

int cmd_sheets(const Config& c) {
    if (c.grid.empty()) throw Error(ErrorKind::Usage, "--grid is required");
    auto grid = parse_grid(c);
    SheetOptions o;
    o.x_min = c.x0.value_or(1e-6);
    o.x_max = c.x1.value_or(20.0);
    positive(o.x_min, "x0");
    positive(o.x_max, "x1");
    o.traj = trajectory_options(c);
    o.traj.gap_safety = true;
    o.traj.seed.gap_safety = true;
    o.jobs = c.jobs;
    logf(1, "sheet sweep over " + std::to_string(grid.size()) + " nodes with " + std::to_string(c.jobs) + " jobs");
    auto rows = sheet_trace(grid, c.k, o);
    if (c.format == "json") {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"s", r.s}, {"b5", r.b5}, {"b6", r.b6}, {"k", r.k}, {"x_k", r.x_k},
                           {"kind", detail::kind_label(r.kind)}, {"continuity_break", r.continuity_break}});
        emit(c, io::dump(json{{"rows", arr}}));
        return 0;
    }
    std::ostringstream os;
    os << "s,b5,b6,k,x_k,kind,continuity_break\n";
    for (const auto& r : rows)
        os << io::format_double(r.s) << ',' << io::format_double(r.b5) << ',' << io::format_double(r.b6) << ','
           << r.k << ',' << io::format_double(r.x_k) << ',' << detail::kind_label(r.kind) << ','
           << (r.continuity_break ? 1 : 0) << '\n';
    emit(c, os.str());
    return 0;
}

double point_distance(const MonodromyPoint& a, const MonodromyPoint& b) {
    return std::max({std::abs(a.s - b.s), std::abs(a.b1 - b.b1), std::abs(a.b2 - b.b2)});
}

int cmd_symmetry_check(const Config& c) {
    MonodromyPoint p = read_point(c);
    cplx xi = c.xi ? parse_complex(*c.xi, "xi") : cplx(0.0);
    json images = json::object();
    for (Symmetry sy : {Symmetry::R1, Symmetry::R2, Symmetry::R3, Symmetry::R4, Symmetry::R5, Symmetry::M1,
                        Symmetry::M1_inv}) {
        auto [x2, q] = apply_symmetry(sy, xi, p);
        images[to_string(sy)] = {{"xi", io::to_json(x2)}, {"point", io::to_json(q)}};
    }
    auto twice = [&](Symmetry a, Symmetry b) {
        auto [x1, q1] = apply_symmetry(a, xi, p);
        return apply_symmetry(b, x1, q1);
    };
    auto dev = [&](std::pair<cplx, MonodromyPoint> u, std::pair<cplx, MonodromyPoint> v) {
        return std::max(std::abs(u.first - v.first), point_distance(u.second, v.second));
    };
    std::pair<cplx, MonodromyPoint> id{xi, p};
    json checks = {{"R1_squared", dev(twice(Symmetry::R1, Symmetry::R1), id)},
                   {"R2_squared", dev(twice(Symmetry::R2, Symmetry::R2), id)},
                   {"R3_squared", dev(twice(Symmetry::R3, Symmetry::R3), id)},
                   {"R5_squared", dev(twice(Symmetry::R5, Symmetry::R5), id)},
                   {"R4_squared_vs_R2_M1inv", dev(twice(Symmetry::R4, Symmetry::R4), twice(Symmetry::M1_inv, Symmetry::R2))},
                   {"M1_M1inv", dev(twice(Symmetry::M1, Symmetry::M1_inv), id)}};
    double worst = 0;
    for (Symmetry sy : {Symmetry::R1, Symmetry::R2, Symmetry::R3, Symmetry::R4, Symmetry::R5, Symmetry::M1,
                        Symmetry::M1_inv})
        worst = std::max(worst, apply_symmetry(sy, xi, p).second.residual);
    json j = {{"input", io::to_json(p)},
              {"xi", io::to_json(xi)},
              {"images", images},
              {"deviations", checks},
              {"max_constraint_residual", worst}};
    emit(c, io::dump(j));
    return 0;
}

void add_point_options(CLI::App* sc, Config& c) {
    sc->add_option("--s", c.s, "s as re,im");
    sc->add_option("--b1", c.b1, "b1 as re,im");
    sc->add_option("--b2", c.b2, "b2 as re,im");
    sc->add_option("--b5", c.b5, "real form b5");
    sc->add_option("--b6", c.b6, "real form b6");
}

void add_common(CLI::App* sc, Config& c) {
    sc->add_option("--x0", c.x0, "seed or evaluation point");
    sc->add_option("--x1", c.x1, "target point");
    sc->add_option("--tol-abs", c.tol_abs, "absolute integrator tolerance");
    sc->add_option("--tol-rel", c.tol_rel, "relative integrator tolerance");
    sc->add_option("--format", c.format, "json or csv");
    sc->add_option("--out", c.out, "output file");
    sc->add_option("--jobs", c.jobs, "worker threads for sweeps");
    sc->add_flag("--gap-safety", c.gap_safety, "seed between predicted zeros/poles when |s| > 2");
    sc->add_option("--precision", c.precision, "auto, double or extended");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Painleve III(0,0,4,-4) monodromy tools"};
    app.require_subcommand(1);
    Config c;
    struct Cmd {
        const char* name;
        const char* help;
        int (*run)(const Config&);
    };
    const Cmd cmds[] = {{"classify", "stratum and TERP flags of a real point", cmd_classify},
                        {"spectral", "spectral data of s (and eigen data of a point)", cmd_spectral},
                        {"flow", "seed near 0 and integrate", cmd_flow},
                        {"monodromy", "monodromy data of a state (x, f, g)", cmd_monodromy},
                        {"roundtrip", "seed, flow and recover the monodromy data", cmd_roundtrip},
                        {"asymptotics", "small-x asymptotic data", cmd_asymptotics},
                        {"sheets", "event locations over a parameter grid", cmd_sheets},
                        {"symmetry-check", "symmetry images and composition laws", cmd_symmetry_check}};
    std::vector<std::pair<CLI::App*, const Cmd*>> subs;
    for (const auto& cmd : cmds) {
        CLI::App* sc = app.add_subcommand(cmd.name, cmd.help);
        add_point_options(sc, c);
        add_common(sc, c);
        subs.push_back({sc, &cmd});
    }
    subs[3].first->add_option("--f", c.f, "f as re,im");
    subs[3].first->add_option("--g", c.g, "g as re,im");
    subs[5].first->add_option("--count", c.count, "number of predicted events");
    subs[6].first->add_option("--grid", c.grid, "name=a:b:n with name in s, b5, phase");
    subs[6].first->add_option("--k", c.k, "event index relative to the split point");
    subs[6].first->add_option("--b6-sign", c.b6_sign, "sign of b6 for s and b5 sweeps")->check(CLI::IsMember({-1, 1}));
    subs[7].first->add_option("--xi", c.xi, "xi as re,im");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    for (auto& [sc, cmd] : subs) {
        if (!sc->parsed()) continue;
        if (std::string(cmd->name) == "sheets" && sc->count("--format") == 0) c.format = "csv";
        try {
            return cmd->run(c);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return e.exit_code();
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 3;
        }
    }
    return 2;
}
