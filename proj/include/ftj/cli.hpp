#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "scenarios.hpp"

namespace ftj::cli {

enum ExitCode { kOk = 0, kInternal = 1, kClaimFailed = 2, kConfigError = 3 };

inline int exitCodeFor(ErrorKind k) {
    switch (k) {
        case ErrorKind::ConfigParseError:
        case ErrorKind::UnknownSuite:
        case ErrorKind::InvalidArgument:
        case ErrorKind::ConstraintViolated:
        case ErrorKind::HypothesisViolated:
        case ErrorKind::SearchBudgetExceeded:
            return kConfigError;
        case ErrorKind::ClaimFailed:
            return kClaimFailed;
        default:
            return kInternal;
    }
}

inline std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.12g", v);
    return buf;
}

inline std::string csv12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
    std::string path;
    std::string scenario = "custom";
    FluxModel model;
    StepFunction u0;
    std::optional<StepFunction> k1, k2;
    double T = 0.0;
    double delta = 1e-3;
    double eps_match = -1.0, eps_time = -1.0, eps_J = -1.0, eps_F = -1.0;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    Example41Params ex41;
    Example42Params ex42;
    int depth = 6;
    bool has_search = false;
    SearchSpec search;
};

[[noreturn]] inline void configError(const std::string& msg) { throw Error(ErrorKind::ConfigParseError, msg); }

inline double parseNumber(const std::string& field, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    std::string t = text;
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        configError(field + ": not a number: '" + text + "'");
    }
    if (used != t.size()) configError(field + ": not a number: '" + text + "'");
    return v;
}

inline std::vector<double> parseList(const std::string& field, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(parseNumber(field, item));
    }
    return out;
}

class Section {
public:
    Section(const boost::property_tree::ptree* node, std::string name) : node_(node), name_(std::move(name)) {}

    bool present() const { return node_ != nullptr; }
    bool has(const std::string& key) const { return node_ && node_->get_child_optional(key); }

    std::string str(const std::string& key, const std::string& fallback) const {
        return has(key) ? node_->get<std::string>(key) : fallback;
    }
    double num(const std::string& key) const {
        if (!has(key)) configError("missing field [" + name_ + "] " + key);
        return parseNumber("[" + name_ + "] " + key, node_->get<std::string>(key));
    }
    double num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }
    std::vector<double> list(const std::string& key) const {
        if (!has(key)) configError("missing field [" + name_ + "] " + key);
        return parseList("[" + name_ + "] " + key, node_->get<std::string>(key));
    }

private:
    const boost::property_tree::ptree* node_;
    std::string name_;
};

inline Section section(const boost::property_tree::ptree& pt, const std::string& name) {
    auto c = pt.get_child_optional(name);
    return Section(c ? &*c : nullptr, name);
}

inline FluxModel parseFlux(const Section& s) {
    const std::string fam = s.str("family", "lwr");
    try {
        if (fam == "lwr")
            return FluxModel::lwr(s.num("alpha", 1.0), s.num("beta", 1.0), s.num("c", 0.0), s.num("u_lo", 0.0),
                                  s.num("u_hi", 1.0));
        if (fam == "neg_half_square") return FluxModel::negHalfSquare(s.num("u_lo", -1.5), s.num("u_hi", 1.5));
        if (fam == "tabulated") return FluxModel::tabulated(s.list("grid"), s.list("values"));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigParseError) throw;
        configError(std::string("[flux] ") + e.what());
    }
    configError("[flux] family: unknown family '" + fam + "'");
}

inline StepFunction parseStep(const Section& s, const std::string& name, double lo, double hi) {
    std::vector<double> br = s.has("breakpoints") ? s.list("breakpoints") : std::vector<double>{};
    std::vector<double> v = s.list("values");
    if (v.size() != br.size() + 1)
        configError("[" + name + "] values: expected " + std::to_string(br.size() + 1) + " values, got " +
                    std::to_string(v.size()));
    for (std::size_t i = 1; i < br.size(); ++i)
        if (!(br[i] > br[i - 1])) configError("[" + name + "] breakpoints: not strictly increasing");
    return StepFunction(lo, hi, br, v);
}

inline void checkRange(const FluxModel& m, const StepFunction& g, const std::string& name) {
    for (double v : g.values())
        if (!m.inDomain(v))
            configError("[" + name + "] values: " + csv12(v) + " outside [" + csv12(m.uLo()) + ", " + csv12(m.uHi()) +
                        "]");
}

inline RunConfig loadConfig(const std::string& path) {
    boost::property_tree::ptree pt;
    std::ifstream in(path);
    if (!in) configError("cannot open config file: " + path);
    try {
        boost::property_tree::ini_parser::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        configError(path + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    RunConfig c;
    c.path = path;
    Section run = section(pt, "run");
    if (!run.present()) configError("missing section [run]");
    c.scenario = run.str("scenario", "custom");
    c.T = run.num("T");
    if (!(c.T > 0.0)) configError("[run] T: must be positive");
    c.delta = run.num("delta", 1e-3);
    if (!(c.delta > 0.0)) configError("[run] delta: must be positive");
    double seed = run.num("seed", 1.0);
    if (seed < 0.0 || seed != std::floor(seed)) configError("[run] seed: must be a non-negative integer");
    c.seed = static_cast<std::uint64_t>(seed);
    c.out_dir = run.str("out", c.out_dir);

    Section tol = section(pt, "tolerances");
    c.eps_match = tol.num("eps_match", -1.0);
    c.eps_time = tol.num("eps_time", -1.0);
    c.eps_J = tol.num("eps_J", -1.0);
    c.eps_F = tol.num("eps_F", -1.0);

    c.model = parseFlux(section(pt, "flux"));
    Section sc = section(pt, "scenario");
    if (c.scenario == "example41") {
        Example41Params& p = c.ex41;
        p = {sc.num("a1", p.a1), sc.num("a2", p.a2), sc.num("a3", p.a3),
             sc.num("x1", p.x1), sc.num("x2", p.x2), sc.num("f_b", p.fb)};
        c.u0 = lineDatum({p.x1, p.x2}, {p.a1, p.a2, p.a3});
    } else if (c.scenario == "example42") {
        Example42Params& p = c.ex42;
        p = {sc.num("a1", p.a1), sc.num("a2", p.a2), sc.num("a3", p.a3),
             sc.num("x1", p.x1), sc.num("x2", p.x2), sc.num("f_a4", p.fa4)};
        c.u0 = lineDatum({p.x1, p.x2}, {p.a1, p.a2, p.a3});
    } else if (c.scenario == "fractal") {
        double d = sc.num("depth", 6.0);
        if (d < 0.0 || d != std::floor(d) || d > 40.0) configError("[scenario] depth: must be an integer in [0, 40]");
        c.depth = static_cast<int>(d);
    } else if (c.scenario == "custom") {
        Section id = section(pt, "initial_data");
        if (!id.present()) configError("missing section [initial_data]");
        c.u0 = parseStep(id, "initial_data", -StepFunction::kInf, StepFunction::kInf);
        Section s1 = section(pt, "k1"), s2 = section(pt, "k2");
        if (s1.present() != s2.present()) configError("sections [k1] and [k2] must be given together");
        if (s1.present()) {
            c.k1 = parseStep(s1, "k1", 0.0, c.T);
            c.k2 = parseStep(s2, "k2", 0.0, c.T);
        }
    } else {
        configError("[run] scenario: unknown scenario '" + c.scenario + "'");
    }
    if (c.scenario != "fractal") {
        checkRange(c.model, c.u0, "initial_data");
        if (c.k1) checkRange(c.model, *c.k1, "k1");
        if (c.k2) checkRange(c.model, *c.k2, "k2");
    }

    Section se = section(pt, "search");
    if (se.present()) {
        c.has_search = true;
        SearchSpec& s = c.search;
        double pieces = se.num("pieces", 1.0);
        if (pieces < 1.0 || pieces != std::floor(pieces)) configError("[search] pieces: must be a positive integer");
        s.pieces = static_cast<int>(pieces);
        s.level_min = se.num("level_min", s.level_min);
        s.level_max = se.num("level_max", s.level_max);
        s.level_step = se.num("level_step", s.level_step);
        if (!(s.level_step > 0.0)) configError("[search] level_step: must be positive");
        double lmin = std::isnan(s.level_min) ? s.level_step : s.level_min;
        double lmax = std::isnan(s.level_max) ? c.model.fmax() : std::min(s.level_max, c.model.fmax());
        if (lmin > lmax + 1e-12) configError("[search] level grid is empty");
        s.time_step = se.num("time_step", s.time_step);
        s.method = se.str("method", s.method);
        if (s.method != "auto" && s.method != "exhaustive" && s.method != "descent")
            configError("[search] method: unknown method '" + s.method + "'");
        s.restarts = static_cast<int>(se.num("restarts", s.restarts));
        s.budget = static_cast<std::size_t>(se.num("budget", static_cast<double>(s.budget)));
        s.seed = static_cast<std::uint64_t>(se.num("seed", static_cast<double>(c.seed)));
        s.M = se.num("M", s.M);
        s.eps_J = c.eps_J;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Artifacts

inline std::ofstream openOut(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error(ErrorKind::InvalidArgument, "cannot write " + p.string());
    return os;
}

inline void writeFronts(std::ostream& os, const FTSolution& sol, const std::string& road) {
    for (const Front& f : sol.fronts) {
        double te = std::min(f.t_death, sol.T);
        os << road << ',' << f.id << ',' << frontKindName(f.kind) << ',' << csv12(f.t_birth) << ','
           << csv12(f.x_birth) << ',' << csv12(te) << ',' << csv12(f.position(te)) << ',' << csv12(f.ul) << ','
           << csv12(f.ur) << ',' << csv12(f.speed) << '\n';
    }
}

inline const char* kFrontsHeader = "road,front_id,kind,t_start,x_start,t_end,x_end,u_left,u_right,speed\n";

inline void writeTrace(const std::filesystem::path& p, const FluxModel& m, const StepFunction& tr) {
    std::ofstream os = openOut(p);
    os << "t_break,value,flux_value\n";
    for (std::size_t i = 0; i < tr.pieces(); ++i) {
        double v = tr.values()[i];
        os << csv12(tr.pieceStart(i)) << ',' << csv12(v) << ',' << csv12(m.flux(v)) << '\n';
    }
}

inline void writeControl(const std::filesystem::path& p, const Control& c) {
    std::ofstream os = openOut(p);
    os << "t_break,gamma,k1,k2\n";
    std::vector<double> all{c.gamma.lo()};
    for (const StepFunction* g : {&c.gamma, &c.k1, &c.k2})
        for (double b : g->breakpoints()) all.push_back(b);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    for (double t : all)
        os << csv12(t) << ',' << csv12(c.gamma.value(t)) << ',' << csv12(c.k1.value(t)) << ',' << csv12(c.k2.value(t))
           << '\n';
}

class Report {
public:
    void add(const std::string& key, double v) { lines_.push_back(key + "=" + fmt12(v)); }
    void add(const std::string& key, const std::string& v) { lines_.push_back(key + "=" + v); }
    void flag(const std::string& key, bool v) { lines_.push_back(key + "=" + (v ? "pass" : "fail")); }
    void functional(const std::string& prefix, const FunctionalReport& r) {
        add("J_" + prefix, r.J);
        add("F_" + prefix, r.F);
        add("tv_interior_" + prefix, r.tv_interior);
        add("initial_left_" + prefix, r.initial_left);
        add("terminal_left_" + prefix, r.terminal_left);
        add("initial_right_" + prefix, r.initial_right);
        add("terminal_right_" + prefix, r.terminal_right);
    }
    void write(const std::filesystem::path& p) const {
        std::ofstream os = openOut(p);
        for (const auto& l : lines_) os << l << '\n';
    }
    const std::vector<std::string>& lines() const { return lines_; }

private:
    std::vector<std::string> lines_;
};

inline void reportTolerances(Report& rep, const RunConfig& c) {
    rep.add("delta", c.delta);
    rep.add("eps_match", c.eps_match < 0.0 ? defaultEpsMatch(c.model) : c.eps_match);
    rep.add("eps_time", c.eps_time < 0.0 ? 1e-9 * std::max(1.0, c.T) : c.eps_time);
    rep.add("eps_J", c.eps_J < 0.0 ? defaultEpsJ(c.model, c.T, c.delta) : c.eps_J);
    rep.add("eps_F", c.eps_F < 0.0 ? defaultEpsF(c.delta) : c.eps_F);
    rep.add("seed", std::to_string(c.seed));
}

inline JunctionOptions junctionOptions(const RunConfig& c) {
    JunctionOptions o;
    o.delta = c.delta;
    o.eps_match = c.eps_match;
    o.eps_time = c.eps_time;
    o.eps_J = c.eps_J;
    return o;
}

// ---------------------------------------------------------------------------
// Commands

inline int writeScenario(const RunConfig& c, const ScenarioResult& r, const std::filesystem::path& out) {
    {
        std::ofstream os = openOut(out / "fronts.csv");
        os << kFrontsHeader;
        writeFronts(os, r.constructed.left, "incoming");
        writeFronts(os, r.constructed.right, "outgoing");
    }
    writeTrace(out / "trace_left.csv", c.model, r.constructed.left.boundaryTrace());
    writeTrace(out / "trace_right.csv", c.model, r.constructed.right.boundaryTrace());
    writeControl(out / "control.csv", r.constructed.control);

    Report rep;
    rep.add("scenario", r.name);
    rep.add("T", r.T);
    reportTolerances(rep, c);
    for (const auto& [k, v] : r.parameters) rep.add(k, v);
    rep.functional("entropy", r.entropy_report);
    rep.functional("constructed", r.constructed_report);
    rep.add("admissible", r.constructed.control.certificate.admissible ? "true" : "false");
    rep.add("max_flux_mismatch", r.constructed.control.certificate.max_flux_mismatch);
    rep.add("worst_time", r.constructed.control.certificate.worst_time);
    for (const auto& [k, v] : r.times) rep.add(k, v);
    for (const auto& [k, v] : r.values) rep.add(k, v);
    for (const auto& [k, v] : r.claims) rep.flag("claim_" + k, v);
    rep.write(out / "report.txt");
    for (const auto& [k, v] : r.claims)
        if (!v) std::cerr << "claim failed: " << k << '\n';
    return r.allClaimsPass() ? kOk : kClaimFailed;
}

inline int runFractal(const RunConfig& c, const std::filesystem::path& out) {
    FractalResult f = fractalCounterexample(c.depth, c.delta);
    const FluxModel m = FluxModel::negHalfSquare(-0.5, 1.5);
    {
        std::ofstream os = openOut(out / "fronts.csv");
        os << kFrontsHeader;
        writeFronts(os, f.solution, "outgoing");
    }
    StepFunction tr = f.solution.boundaryTrace();
    writeTrace(out / "trace_left.csv", m, StepFunction());
    writeTrace(out / "trace_right.csv", m, tr);
    Control ctl;
    ctl.gamma = fluxOf(m, tr);
    ctl.k1 = StepFunction::constant(m.theta(), 0.0, f.solution.T);
    ctl.k2 = f.solution.boundary_datum;
    writeControl(out / "control.csv", ctl);

    BVBoundReport b = bvTraceBound(m, f.u0, f.solution.boundary_datum, f.solution);
    const bool grows = f.tv_flux_trace >= 0.375 * c.depth - 10.0 * c.delta;
    Report rep;
    rep.add("scenario", "fractal");
    rep.add("T", f.solution.T);
    rep.add("delta", c.delta);
    rep.add("seed", std::to_string(c.seed));
    rep.add("depth", std::to_string(c.depth));
    rep.add("J", fluxIntegralJ(ctl.gamma, f.solution.T));
    rep.add("tv_trace", f.tv_trace);
    rep.add("tv_flux_trace", f.tv_flux_trace);
    rep.add("tv_flux_boundary_datum", b.tv_fk);
    rep.add("tv_initial_datum", b.tv_u);
    rep.add("bv_lhs", b.lhs);
    rep.add("bv_rhs", b.rhs);
    rep.add("bv_osc", b.osc);
    rep.flag("claim_bv_bound_holds", b.holds);
    rep.flag("claim_linear_growth", grows);
    rep.write(out / "report.txt");
    return b.holds && grows ? kOk : kClaimFailed;
}

inline int runCustom(const RunConfig& c, const std::filesystem::path& out) {
    EntropyResult e = entropyControl(c.model, c.u0, c.T, c.delta);
    FunctionalReport fe = controlReport(c.model, e, c.u0);
    Report rep;
    rep.add("scenario", "custom");
    rep.add("T", c.T);
    reportTolerances(rep, c);
    rep.functional("entropy", fe);
    std::ofstream fronts = openOut(out / "fronts.csv");
    fronts << kFrontsHeader;
    bool ok = true;
    if (c.k1) {
        CoupledSolution cs = evaluateControl(c.model, c.u0, *c.k1, *c.k2, c.T, junctionOptions(c));
        FunctionalReport fc = controlReport(c.model, cs, c.u0);
        writeFronts(fronts, cs.left, "incoming");
        writeFronts(fronts, cs.right, "outgoing");
        writeTrace(out / "trace_left.csv", c.model, cs.left.boundaryTrace());
        writeTrace(out / "trace_right.csv", c.model, cs.right.boundaryTrace());
        writeControl(out / "control.csv", cs.control);
        rep.functional("constructed", fc);
        rep.add("admissible", cs.control.certificate.admissible ? "true" : "false");
        rep.add("max_flux_mismatch", cs.control.certificate.max_flux_mismatch);
        rep.add("worst_time", cs.control.certificate.worst_time);
        const double eps_J = c.eps_J < 0.0 ? defaultEpsJ(c.model, c.T, c.delta) : c.eps_J;
        const bool in_umax = membershipUmax(cs, fe.J, eps_J);
        rep.add("in_maximizer_set", in_umax ? "true" : "false");
        ok = cs.control.certificate.admissible;
        rep.flag("claim_admissible", ok);
    } else {
        writeFronts(fronts, e.full, "full");
        writeTrace(out / "trace_left.csv", c.model, e.full.trace(0.0, Side::Left));
        writeTrace(out / "trace_right.csv", c.model, e.full.trace(0.0, Side::Right));
        writeControl(out / "control.csv", e.control);
    }
    rep.write(out / "report.txt");
    return ok ? kOk : kClaimFailed;
}

inline int cmdRun(const RunConfig& c, const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    if (c.scenario == "example41")
        return writeScenario(c, runExample41(c.model, c.ex41, c.T, c.delta, junctionOptions(c)), out);
    if (c.scenario == "example42")
        return writeScenario(c, runExample42(c.model, c.ex42, c.T, c.delta, junctionOptions(c)), out);
    if (c.scenario == "fractal") return runFractal(c, out);
    return runCustom(c, out);
}

inline void printSuite(std::ostream& os, const SuiteReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s seed=%llu  %zu/%zu pass  worst_margin=%.6e\n", r.name.c_str(),
                  static_cast<unsigned long long>(r.seed), r.passed(), r.cases.size(), r.worstMargin());
    os << buf;
    for (const auto& c : r.cases)
        if (!c.pass) os << "  FAIL " << c.label << ": " << c.detail << '\n';
}

/// Monotone suite flattened into pass/fail cases (half non-decreasing, half non-increasing data).
inline SuiteReport monotoneSuiteReport(std::uint64_t seed, int count, double delta) {
    SuiteReport rep;
    rep.name = "monotone";
    rep.seed = seed;
    int survivors = 0;
    for (auto dir : {Monotonicity::NonDecreasing, Monotonicity::NonIncreasing}) {
        bool inc = dir == Monotonicity::NonDecreasing;
        int n = inc ? (count + 1) / 2 : count / 2;
        MonotoneSuiteResult r = randomMonotoneSuite(inc ? seed : seed + 1, n, dir, delta);
        for (std::size_t i = 0; i < r.cases.size(); ++i) {
            const MonotoneCase& mc = r.cases[i];
            survivors += mc.survivors;
            double gap = mc.survivors ? mc.min_survivor_F - (mc.F_entropy - r.eps_F) : r.eps_F;
            double slack = delta * std::max(1.0, FluxModel::lwr().maxSpeed()) - mc.trace_violation;
            char buf[160];
            std::snprintf(buf, sizeof buf, "F_entropy=%.12g min_survivor_F=%.12g survivors=%d trace_violation=%.3e",
                          mc.F_entropy, mc.min_survivor_F, mc.survivors, mc.trace_violation);
            rep.cases.push_back({std::string(inc ? "non-decreasing " : "non-increasing ") + std::to_string(i), mc.pass,
                                 std::min(gap, slack), buf});
        }
    }
    rep.stats = {{"survivors", static_cast<double>(survivors)}};
    return rep;
}

/// Solutions of the two worked examples, used by the conservation suite.
struct WorkedSolutions {
    ScenarioResult ex41, ex42;
    std::vector<NamedSolution> list() const {
        return {{"example41 entropy", &ex41.entropy.full, nullptr},
                {"example41 constructed", nullptr, &ex41.constructed},
                {"example42 entropy", &ex42.entropy.full, nullptr},
                {"example42 constructed", nullptr, &ex42.constructed}};
    }
};

inline WorkedSolutions workedSolutions(double delta) {
    const FluxModel m = FluxModel::lwr();
    Example42Params p42;
    p42.fa4 = 0.23;
    return {runExample41(m, {}, 3.0, delta), runExample42(m, p42, 8.0, delta)};
}

inline SuiteReport runSuite(const std::string& name, std::uint64_t seed, int count, double delta) {
    if (count < 1) throw Error(ErrorKind::InvalidArgument, "count must be positive");
    if (name == "maximality") return maximalitySuite(seed, count, std::min(20, count), delta);
    if (name == "monotone") return monotoneSuiteReport(seed, count, delta);
    if (name == "bvbound") return bvBoundSuite(seed, count, delta);
    if (name == "conservation") {
        WorkedSolutions w = workedSolutions(delta);
        return conservationSuite(seed, count, w.list());
    }
    throw Error(ErrorKind::UnknownSuite, "unknown suite '" + name + "'");
}

inline int cmdSuite(const std::string& name, std::uint64_t seed, int count, double delta,
                    const std::optional<std::filesystem::path>& out, std::ostream& os) {
    SuiteReport r = runSuite(name, seed, count, delta);
    printSuite(os, r);
    if (out) {
        std::filesystem::create_directories(*out);
        std::ofstream f = openOut(*out / ("suite_" + name + ".csv"));
        f << "case,pass,margin,detail\n";
        for (const auto& c : r.cases)
            f << '"' << c.label << "\"," << (c.pass ? 1 : 0) << ',' << csv12(c.margin) << ",\"" << c.detail << "\"\n";
    }
    return r.ok() ? kOk : kClaimFailed;
}

inline SearchProblem searchProblem(const RunConfig& c) {
    if (c.scenario == "fractal") throw Error(ErrorKind::ConfigParseError, "[run] scenario: search needs a line datum");
    return {c.scenario, c.model, c.u0, c.T, c.delta};
}

inline int cmdSearch(const RunConfig& c, const std::filesystem::path& out) {
    if (!c.has_search) configError("missing section [search]");
    SearchResult r = searchMinF(searchProblem(c), c.search);
    std::filesystem::create_directories(out);
    {
        std::ofstream os = openOut(out / "search_trace.csv");
        os << "iteration,F,J\n";
        for (const auto& s : r.trace) os << s.iteration << ',' << csv12(s.F) << ',' << csv12(s.J) << '\n';
    }
    Report rep;
    rep.add("scenario", c.scenario);
    rep.add("T", c.T);
    reportTolerances(rep, c);
    rep.add("method", r.method);
    rep.add("evaluations", std::to_string(r.evaluations));
    rep.add("feasible", std::to_string(r.trace.size()));
    rep.add("J_entropy", r.J_entropy);
    rep.add("F_entropy", r.F_entropy);
    rep.add("found", r.found ? "true" : "false");
    if (r.found) {
        writeControl(out / "best_control.csv", r.best.control);
        FunctionalReport fb = controlReport(c.model, r.best, c.u0);
        rep.functional("best", fb);
        for (std::size_t i = 0; i < r.levels.size(); ++i) rep.add("level_" + std::to_string(i), r.levels[i]);
        for (std::size_t i = 0; i < r.breaks.size(); ++i) rep.add("break_" + std::to_string(i), r.breaks[i]);
        rep.add("tangential_shock", r.tangential.found ? "true" : "false");
        if (r.tangential.found) {
            rep.add("tangential_side", r.tangential.side == RoadSide::Incoming ? "incoming" : "outgoing");
            rep.add("tangential_birth_time", r.tangential.t_birth);
            rep.add("tangential_speed", r.tangential.speed);
        }
    }
    rep.write(out / "report.txt");
    return r.found ? kOk : kClaimFailed;
}

}  // namespace ftj::cli
