#include "commands.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "ergolab/acceptance.hpp"
#include "ergolab/averages.hpp"
#include "ergolab/equidistribution.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/family.hpp"
#include "ergolab/patterns.hpp"

namespace ergolab::cli {

using json = nlohmann::json;
using dyn::cplx;
using hardy::HardyExpr;

namespace {

// ---- text parsing ----

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// split on sep at bracket depth zero
std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

// "name(args)" -> name, args
std::pair<std::string, std::string> call(const std::string& s, const char* what) {
    std::string t = trim(s);
    size_t open = t.find('(');
    if (open == std::string::npos || t.back() != ')') throw ParseError(what, "expected name(...) in '" + s + "'");
    return {trim(t.substr(0, open)), t.substr(open + 1, t.size() - open - 2)};
}

double parse_double(const std::string& s, const char* what) {
    std::string t = trim(s);
    size_t used = 0;
    double v = 0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size()) throw ParseError(what, "bad number '" + s + "'");
    return v;
}

long parse_long(const std::string& s, const char* what) {
    double v = parse_double(s, what);
    if (v != std::floor(v) || std::abs(v) > 9.2e18) throw ParseError(what, "expected an integer, got '" + s + "'");
    return static_cast<long>(v);
}

template <class T>
std::vector<T> map_list(const std::string& s, char sep, T (*f)(const std::string&)) {
    std::vector<T> out;
    for (auto& p : split_top(s, sep)) out.push_back(f(p));
    return out;
}

long to_long(const std::string& s) { return parse_long(s, "cli"); }

// ---- output ----

struct Sink {
    std::string dir;  // empty: report to stdout, no table
    std::ofstream report, table, timing;

    void open(const std::string& d, const std::string& config) {
        dir = d;
        if (dir.empty()) return;
        std::filesystem::create_directories(dir);
        report.open(dir + "/report.jsonl");
        table.open(dir + "/table.csv");
        timing.open(dir + "/timing.csv");
        std::ofstream(dir + "/config.toml") << config;
        timing << "stage,seconds\n";
        if (!report || !table || !timing) throw UsageError("cli", "cannot write to " + dir);
    }
    void record(const json& j) {
        if (dir.empty()) std::cout << j.dump() << "\n";
        else report << j.dump() << "\n";
    }
    void row(const std::string& line) {
        if (!dir.empty()) table << line << "\n";
    }
    void time(const std::string& stage, double s) {
        if (!dir.empty()) timing << stage << "," << s << "\n";
        else std::cerr << "time " << stage << " " << s << " s\n";
    }
};

json cj(cplx c) { return json::array({c.real(), c.imag()}); }

std::string csv(double x) {
    std::ostringstream o;
    o.precision(17);
    o << x;
    return o.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- shared option groups ----

struct Global {
    std::string out;
    std::uint64_t seed = 1;
    int threads = 0;
    unsigned precision_bits = 8192;
};

struct SystemOpts {
    std::vector<std::string> T;
    std::vector<std::size_t> index;
    std::size_t samples = 16;
    std::string kind = "lowdisc";

    void add(CLI::App* sub, bool need_T = true) {
        auto* o = sub->add_option("--T", T, "transform: rotation(a,..), cyclic(m,step), skew(alpha,beta)")->delimiter('|');
        if (need_T) o->required();
        sub->add_option("--transform-index", index, "transform used by each iterate (default i -> i)");
        sub->add_option("--samples", samples, "number of sample points")->capture_default_str();
        sub->add_option("--sample-kind", kind, "uniform, lowdisc or all (every residue)")->capture_default_str();
    }
    dyn::System system(std::uint64_t seed) const {
        dyn::System s;
        for (auto& t : T) s.transforms.push_back(parse_transform(t));
        dyn::SampleSpec::Kind k;
        if (kind == "uniform") k = dyn::SampleSpec::Kind::Uniform;
        else if (kind == "lowdisc") k = dyn::SampleSpec::Kind::LowDiscrepancy;
        else if (kind == "all") k = dyn::SampleSpec::Kind::AllResidues;
        else throw UsageError("cli", "unknown sample kind '" + kind + "'");
        s.samples = {k, samples, seed};
        s.validate();
        return s;
    }
};

std::vector<HardyExpr> exprs(const std::vector<std::string>& a) {
    std::vector<HardyExpr> out;
    for (auto& s : a) out.push_back(HardyExpr::parse(s));
    return out;
}

std::vector<dyn::Observable> observables(const std::vector<std::string>& f) {
    std::vector<dyn::Observable> out;
    for (auto& s : f) out.push_back(parse_observable(s));
    return out;
}

json strings(const std::vector<std::string>& v) { return json(v); }

// ---- subcommands ----

struct ReduceCmd {
    std::string family, file;
    int max_steps = 64;
    std::size_t max_tuples = 4096;
    bool excluded = false;

    void add(CLI::App* app) {
        auto* s = app->add_subcommand("reduce", "vdC reduction of a nice tuple family");
        s->add_option("--family", family, "family text [(a, b); (c, d)]");
        s->add_option("--family-file", file, "file holding the family text");
        s->add_option("--max-steps", max_steps)->capture_default_str();
        s->add_option("--max-tuples", max_tuples)->capture_default_str();
        s->add_flag("--excluded-h", excluded, "scan integer shifts that break each step");
    }

    static json step_record(size_t i, const reduction::ReductionStep& st) {
        json tuples = json::array();
        for (auto& t : st.after.tuples) tuples.push_back(reduction::format_tuple(t));
        return {{"record", "step"},
                {"step", i + 1},
                {"anchor", reduction::format_tuple(st.anchor.coords)},
                {"anchor_source", st.anchor.source},
                {"anchor_row", st.anchor.row},
                {"rule", st.anchor.rule},
                {"symbol", "h" + std::to_string(st.symbol)},
                {"type_before", st.type_before.str()},
                {"type_after", st.type_after.str()},
                {"m_before", st.before.m()},
                {"m_after", st.after.m()},
                {"decreased", st.decreased},
                {"nice", st.nice_after.nice},
                {"violations", st.nice_after.violations},
                {"excluded_h", st.excluded_h},
                {"tuples", tuples}};
    }

    int run(Sink& out) {
        std::string text = family;
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) throw UsageError("reduce", "cannot read " + file);
            std::stringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        if (trim(text).empty()) throw UsageError("reduce", "give --family or --family-file");
        auto f = reduction::parse_family(text);
        out.record({{"record", "family"}, {"family", f.str()}, {"type", reduction::type_matrix(f).str()}});
        out.row("step,type_before,type_after,m,decreased,nice");
        auto emit = [&](const reduction::ReductionTrace& tr) {
            for (size_t i = 0; i < tr.steps.size(); ++i) {
                auto& st = tr.steps[i];
                out.record(step_record(i, st));
                out.row(std::to_string(i + 1) + "," + st.type_before.str() + "," + st.type_after.str() + "," +
                        std::to_string(st.after.m()) + "," + (st.decreased ? "1" : "0") + "," +
                        (st.nice_after.nice ? "1" : "0"));
            }
        };
        reduction::ReductionTrace tr;
        try {
            tr = reduction::reduce_fully(f, {max_steps, max_tuples, excluded});
        } catch (const reduction::TupleBudgetExceeded& e) {
            emit(e.partial);
            throw;
        } catch (const reduction::MaxStepsExceeded& e) {
            emit(e.partial);
            throw;
        }
        emit(tr);
        bool sound = tr.sound();
        std::string type = tr.steps.empty() ? reduction::type_matrix(f).str() : tr.steps.back().type_after.str();
        out.record({{"record", "summary"},
                    {"steps", tr.steps.size()},
                    {"terminal_type", type},
                    {"terminal_pairs", tr.terminal.m()},
                    {"sound", sound},
                    {"verdict", sound ? "terminated" : "unsound step"}});
        std::cerr << "reduce: " << tr.steps.size() << " steps, terminal type " << type << " with " << tr.terminal.m()
                  << " pairs\n";
        return sound ? 0 : 2;
    }
};

struct AverageCmd {
    SystemOpts sys;
    std::vector<std::string> f, a, schedule{"1000", "10000", "100000"};
    std::string tag = "theorem-regime";
    double tolerance = 0;

    void add(CLI::App* app) {
        auto* s = app->add_subcommand("average", "multiple ergodic averages against the product of projections");
        sys.add(s);
        s->add_option("--f", f, "observable per iterate")->required()->delimiter('|');
        s->add_option("--a", a, "iterate per observable")->required()->delimiter('|');
        s->add_option("--schedule", schedule)->delimiter(',')->capture_default_str();
        s->add_option("--tag", tag, "theorem-regime or 'out-of-regime: <integer exponent|equal growth|noncommuting>'")
            ->capture_default_str();
        s->add_option("--tolerance", tolerance, "0 picks 10/sqrt(N)")->capture_default_str();
    }

    avg::AverageExperiment experiment(const Global& g) const {
        avg::AverageExperiment e;
        e.system = sys.system(g.seed);
        e.f = observables(f);
        e.a = exprs(a);
        e.transform = sys.index;
        e.schedule = parse_schedule(schedule);
        if (tag == "theorem-regime") e.out_of_regime = avg::Failure::None;
        else if (tag.rfind("out-of-regime:", 0) == 0) e.out_of_regime = avg::parse_failure(trim(tag.substr(14)));
        else throw UsageError("average", "tag must be theorem-regime or out-of-regime: <hypothesis>");
        if (tag != "theorem-regime" && e.out_of_regime == avg::Failure::None)
            throw UsageError("average", "out-of-regime tag must name a hypothesis");
        return e;
    }

    json header(const avg::AverageExperiment& e) const {
        return {{"record", "experiment"}, {"tag", tag},      {"transforms", strings(sys.T)},
                {"observables", strings(f)}, {"iterates", strings(a)}, {"schedule", e.schedule},
                {"seed", e.system.samples.seed}, {"samples", e.system.samples.count}};
    }

    int run(Sink& out, const Global& g) {
        auto e = experiment(g);
        out.record(header(e));
        auto rep = avg::limit_formula_report(e, tolerance);
        out.row("N,value,target,distance");
        for (auto& r : rep.rows) {
            json vals = json::array();
            for (auto& v : r.values) vals.push_back(cj(v));
            out.record({{"record", "row"}, {"N", r.N}, {"mean_abs", r.mean_abs}, {"distance", r.distance}, {"values", vals}});
            out.row(std::to_string(r.N) + "," + csv(r.mean_abs) + "," + csv(rep.target_abs) + "," + csv(r.distance));
            out.time("N=" + std::to_string(r.N), r.seconds);
        }
        json target = json::array();
        for (auto& v : rep.target) target.push_back(cj(v));
        bool theorem = e.out_of_regime == avg::Failure::None;
        std::string verdict = rep.verdict;
        if (!theorem) {
            double d = rep.rows.back().distance;
            verdict = "failure demo (" + avg::failure_name(e.out_of_regime) + "): distance " + csv(d) +
                      (rep.consistent ? " reached the tolerance" : " stays away from the projection");
        }
        out.record({{"record", "verdict"},
                    {"tag", rep.tag},
                    {"target", target},
                    {"target_abs", rep.target_abs},
                    {"target_exact", rep.target_exact},
                    {"tolerance", rep.tolerance},
                    {"tail_nonincreasing", rep.tail_nonincreasing},
                    {"consistent", rep.consistent},
                    {"verdict", verdict}});
        std::cerr << "average: " << verdict << "\n";
        return theorem && !rep.consistent ? 2 : 0;
    }
};

struct RecurrenceCmd {
    SystemOpts sys;
    std::string A;
    std::vector<std::string> a, schedule{"1000", "10000", "100000"};

    void add(CLI::App* app) {
        auto* s = app->add_subcommand("recurrence", "multiple recurrence against mu(A)^(l+1)");
        sys.add(s);
        s->add_option("--A", A, "set A as box(lo:hi, ..) or table(0/1, ..)")->required();
        s->add_option("--a", a)->required()->delimiter('|');
        s->add_option("--schedule", schedule)->delimiter(',')->capture_default_str();
    }

    int run(Sink& out, const Global& g) {
        auto system = sys.system(g.seed);
        auto rep = avg::recurrence_report(system, parse_observable(A), exprs(a), parse_schedule(schedule), sys.index);
        out.record({{"record", "experiment"}, {"transforms", strings(sys.T)}, {"A", A}, {"iterates", strings(a)},
                    {"seed", rep.seed}, {"samples", rep.samples}, {"exact", rep.exact}});
        out.row("N,estimate,std_error,bound");
        for (auto& r : rep.rows) {
            out.record({{"record", "row"}, {"N", r.N}, {"estimate", r.estimate}, {"std_error", r.std_error}});
            out.row(std::to_string(r.N) + "," + csv(r.estimate) + "," + csv(r.std_error) + "," + csv(rep.bound));
            out.time("N=" + std::to_string(r.N), r.seconds);
        }
        out.record({{"record", "verdict"}, {"measure", rep.measure}, {"bound", rep.bound}, {"holds", rep.holds},
                    {"verdict", rep.holds ? "floor holds" : "floor broken"}});
        std::cerr << "recurrence: estimate " << rep.rows.back().estimate << " vs bound " << rep.bound << "\n";
        return rep.holds ? 0 : 2;
    }
};

struct BlocksCmd {
    AverageCmd base;
    std::vector<std::string> R{"10", "100", "1000"};
    std::string N = "1000";
    bool constancy = false;

    void add(CLI::App* app) {
        auto* s = app->add_subcommand("blocks", "block averages (1/N) sum_n |(1/R) sum_r F(Rn+r) - target|");
        s->add_option("--T", base.sys.T)->delimiter('|');
        s->add_option("--transform-index", base.sys.index);
        s->add_option("--samples", base.sys.samples)->capture_default_str();
        s->add_option("--sample-kind", base.sys.kind)->capture_default_str();
        s->add_option("--f", base.f)->delimiter('|');
        s->add_option("--a", base.a)->required()->delimiter('|');
        s->add_option("--R", R)->delimiter(',')->capture_default_str();
        s->add_option("--N", N)->capture_default_str();
        s->add_flag("--constancy", constancy, "degree-zero iterates: share of n with [a(nR+r)] = [a(nR)]");
    }

    int run(Sink& out, const Global& g) {
        auto Rs = parse_schedule(R);
        long n = parse_schedule({N})[0];
        if (constancy) {
            out.row("a,R,N,fraction");
            for (auto& s : base.a) {
                for (long r : Rs) {
                    auto rows = avg::block_constancy(HardyExpr::parse(s), r, {n});
                    out.record({{"record", "constancy"}, {"a", s}, {"R", r}, {"N", n}, {"fraction", rows[0].fraction}});
                    out.row("\"" + s + "\"," + std::to_string(r) + "," + std::to_string(n) + "," + csv(rows[0].fraction));
                }
            }
            return 0;
        }
        base.schedule = {N};
        auto e = base.experiment(g);
        auto rep = avg::block_average_check(e, Rs, n);
        out.record(base.header(e));
        out.row("R,value");
        for (auto& r : rep.rows) {
            out.record({{"record", "row"}, {"R", r.R}, {"N", rep.N}, {"value", r.value}});
            out.row(std::to_string(r.R) + "," + csv(r.value));
        }
        out.record({{"record", "verdict"}, {"decreasing", rep.decreasing},
                    {"verdict", rep.decreasing ? "decreasing in R" : "not decreasing in R"}});
        return rep.decreasing ? 0 : 2;
    }
};

struct ParityCmd {
    std::string a, N = "1000000";
    void add(CLI::App* app) {
        auto* s = app->add_subcommand("parity", "longest run of constant parity of [a(n)]");
        s->add_option("--a", a)->required();
        s->add_option("--N", N)->capture_default_str();
    }
    int run(Sink& out) {
        auto r = avg::parity_runs(HardyExpr::parse(a), parse_schedule({N})[0]);
        out.record({{"record", "parity"}, {"a", a}, {"N", r.N}, {"longest", r.longest}, {"start", r.start},
                    {"parity", r.parity ? "odd" : "even"}});
        out.row("longest,start,parity");
        out.row(std::to_string(r.longest) + "," + std::to_string(r.start) + "," + std::to_string(r.parity));
        std::cerr << "parity: run of " << r.longest << " from n = " << r.start << "\n";
        return 0;
    }
};

struct WeylCmd {
    std::string a, alpha;
    long k = 1;
    std::vector<std::string> schedule{"10000", "100000", "1000000"};
    void add(CLI::App* app) {
        auto* s = app->add_subcommand("weyl", "|(1/N) sum e(k [a(n)] alpha)| over a schedule");
        s->add_option("--a", a)->required();
        s->add_option("--alpha", alpha)->required();
        s->add_option("--k", k)->capture_default_str();
        s->add_option("--schedule", schedule)->delimiter(',')->capture_default_str();
    }
    int run(Sink& out) {
        auto r = equi::weyl_sum(HardyExpr::parse(a), dyn::Angle::parse(alpha), k, parse_schedule(schedule));
        out.record({{"record", "weyl"}, {"a", a}, {"alpha", r.alpha}, {"alpha_fix", dyn::fix_hex(r.alpha_fix)},
                    {"k", k}, {"phase_error", r.phase_error}});
        out.row("N,magnitude");
        for (size_t i = 0; i < r.schedule.size(); ++i) {
            out.record({{"record", "row"}, {"N", r.schedule[i]}, {"magnitude", r.magnitudes[i]}});
            out.row(std::to_string(r.schedule[i]) + "," + csv(r.magnitudes[i]));
        }
        return 0;
    }
};

struct EquiCmd {
    std::vector<std::string> a, alpha;
    std::string N = "100000";
    int grid = 8;
    bool subsequence = false;
    double threshold = 0.05;
    void add(CLI::App* app) {
        auto* s = app->add_subcommand("equi", "joint equidistribution of ([a_i(n)] alpha_i) or the change-of-variables check");
        s->add_option("--a", a)->required()->delimiter('|');
        s->add_option("--alpha", alpha)->required()->delimiter('|');
        s->add_option("--N", N)->capture_default_str();
        s->add_option("--grid", grid)->capture_default_str();
        s->add_flag("--subsequence", subsequence, "compare averages of e(n beta) and e([a(n)] beta), beta = alpha");
        s->add_option("--threshold", threshold)->capture_default_str();
    }
    int run(Sink& out) {
        long n = parse_schedule({N})[0];
        if (a.size() != alpha.size()) throw UsageError("equi", "need one --alpha per --a");
        if (subsequence) {
            if (a.size() != 1) throw UsageError("equi", "--subsequence takes one iterate");
            auto r = avg::subsequence_average_check(HardyExpr::parse(a[0]), dyn::Angle::parse(alpha[0]), n, threshold);
            out.record({{"record", "subsequence"}, {"a", a[0]}, {"beta", alpha[0]}, {"N", n}, {"first", r.first},
                        {"uniform_average", r.uniform_average}, {"subsequence_average", r.subsequence_average},
                        {"both_small", r.both_small}});
            out.row("N,uniform_average,subsequence_average");
            out.row(std::to_string(n) + "," + csv(r.uniform_average) + "," + csv(r.subsequence_average));
            return 0;
        }
        std::vector<equi::JointSpec> specs;
        for (size_t i = 0; i < a.size(); ++i) specs.push_back({HardyExpr::parse(a[i]), dyn::Angle::parse(alpha[i]), 0});
        auto r = equi::joint_equidistribution_check(specs, n, grid);
        out.record({{"record", "joint"}, {"a", strings(a)}, {"alpha", strings(alpha)}, {"N", n}, {"grid", grid},
                    {"max_dev_lebesgue", r.max_dev_lebesgue}, {"max_dev_target", r.max_dev_target},
                    {"target", r.target}, {"regime_ok", r.regime_ok}, {"regime_note", r.regime_note}});
        out.row("N,grid,max_dev_lebesgue,max_dev_target");
        out.row(std::to_string(n) + "," + std::to_string(grid) + "," + csv(r.max_dev_lebesgue) + "," + csv(r.max_dev_target));
        return 0;
    }
};

struct SeminormCmd {
    SystemOpts sys;
    std::string f;
    int k = 2;
    std::vector<std::string> schedule{"1000", "10000"};
    double cap = 1e11;
    void add(CLI::App* app) {
        auto* s = app->add_subcommand("seminorm", "finite-N estimate of |||f|||_k for one transform");
        sys.samples = 4;
        sys.add(s);
        s->add_option("--f", f)->required();
        s->add_option("--k", k)->capture_default_str();
        s->add_option("--schedule", schedule)->delimiter(',')->capture_default_str();
        s->add_option("--loop-cap", cap, "budget for samples * N^k")->capture_default_str();
    }
    int run(Sink& out, const Global& g) {
        auto system = sys.system(g.seed);
        auto r = dyn::ghk_seminorm(system, 0, parse_observable(f), k, parse_schedule(schedule), {cap});
        out.record({{"record", "seminorm"}, {"T", strings(sys.T)}, {"f", f}, {"k", k}, {"seed", r.seed},
                    {"samples", r.samples}, {"oracle", r.oracle ? json(*r.oracle) : json(nullptr)}});
        out.row("N,value,oracle");
        for (size_t i = 0; i < r.schedule.size(); ++i) {
            out.record({{"record", "row"}, {"N", r.schedule[i]}, {"value", r.values[i]}});
            out.row(std::to_string(r.schedule[i]) + "," + csv(r.values[i]) + "," + (r.oracle ? csv(*r.oracle) : ""));
        }
        return 0;
    }
};

struct DualCmd {
    SystemOpts sys;
    std::string f;
    int k = 2;
    long M = 1000, n0 = 0, count = 1000;
    void add(CLI::App* app) {
        auto* s = app->add_subcommand("dual", "dual sequence at the first sample point and its correlation with f");
        sys.add(s);
        s->add_option("--f", f)->required();
        s->add_option("--k", k)->capture_default_str();
        s->add_option("--M", M)->capture_default_str();
        s->add_option("--n0", n0)->capture_default_str();
        s->add_option("--count", count)->capture_default_str();
    }
    int run(Sink& out, const Global& g) {
        sys.samples = 1;
        auto system = sys.system(g.seed);
        auto obs = parse_observable(f);
        auto x = dyn::sample_points(system)[0];
        auto d = dyn::dual_sequence(system.transforms[0], obs, k, x, M, n0, count, system.modulus());
        cplx corr = dyn::dual_correlation(system.transforms[0], obs, d, x, system.modulus());
        out.record({{"record", "dual"}, {"T", strings(sys.T)}, {"f", f}, {"k", k}, {"M", M}, {"n0", n0},
                    {"seed", g.seed}, {"correlation", cj(corr)}});
        out.row("n,re,im");
        for (size_t i = 0; i < d.values.size(); ++i)
            out.row(std::to_string(n0 + static_cast<long>(i)) + "," + csv(d.values[i].real()) + "," + csv(d.values[i].imag()));
        return 0;
    }
};

// 2-D bitmap: 2L lines of 2L characters, '1' or '#' marks a member; row i is x_0 = i - L
pat::DenseSet read_bitmap(const std::string& path, long L) {
    std::ifstream in(path);
    if (!in) throw UsageError("patterns", "cannot read " + path);
    pat::DenseSet E(2, L);
    std::string line;
    long row = 0;
    while (std::getline(in, line) && row < 2 * L) {
        for (long col = 0; col < std::min<long>(2 * L, static_cast<long>(line.size())); ++col)
            if (line[static_cast<size_t>(col)] == '1' || line[static_cast<size_t>(col)] == '#') E.insert({row - L, col - L});
        ++row;
    }
    return E;
}

pat::SyndeticSet parse_syndetic(const std::string& s, long L) {
    auto [name, args] = call(s, "patterns");
    if (name == "all") return pat::SyndeticSet::progression(1, 1, L);
    if (name == "ap") {
        auto v = map_list<long>(args, ',', to_long);
        if (v.size() != 2) throw ParseError("patterns", "ap(first, step)");
        return pat::SyndeticSet::progression(v[0], v[1], L);
    }
    throw ParseError("patterns", "syndetic set must be ap(first, step) or all()");
}

struct PatternsCmd {
    std::string mode = "config", bitmap, nrange = "1:30";
    int dim = 2;
    long L = 500, N = 50, c = 1;
    double density = 0.6;
    std::vector<std::string> v, a, sets;
    std::vector<long> ci, k;
    std::size_t cap = 100;

    void add(CLI::App* app) {
        auto* s = app->add_subcommand("patterns", "configuration and syndetic-system witnesses");
        s->add_option("--mode", mode, "config, syndetic or intersection")->capture_default_str();
        s->add_option("--dim", dim)->capture_default_str();
        s->add_option("--L", L, "box [-L, L)^d, or [1, L] for syndetic sets")->capture_default_str();
        s->add_option("--density", density, "random set density (seeded by --seed)")->capture_default_str();
        s->add_option("--bitmap", bitmap, "2-D set from a text bitmap instead of a random set");
        s->add_option("--v", v, "vector per iterate, e.g. 1,0")->delimiter('|');
        s->add_option("--a", a)->required()->delimiter('|');
        s->add_option("--n-range", nrange, "lo:hi")->capture_default_str();
        s->add_option("--cap", cap, "witnesses kept")->capture_default_str();
        s->add_option("--set", sets, "syndetic E_0..E_l: ap(first, step) or all()")->delimiter('|');
        s->add_option("--c", c)->capture_default_str();
        s->add_option("--ci", ci)->delimiter(',');
        s->add_option("--N", N)->capture_default_str();
        s->add_option("--k", k, "shifts k_i for the hypothesis density")->delimiter(',');
    }

    std::pair<long, long> range() const {
        auto p = split_top(nrange, ':');
        if (p.size() != 2) throw ParseError("patterns", "n range is lo:hi");
        return {parse_long(p[0], "patterns"), parse_long(p[1], "patterns")};
    }

    std::vector<pat::Vec> vectors() const {
        std::vector<pat::Vec> out;
        for (auto& s : v) out.push_back(map_list<long>(s, ',', to_long));
        return out;
    }

    int run(Sink& out, const Global& g) {
        auto as = exprs(a);
        if (mode == "syndetic") {
            std::vector<pat::SyndeticSet> E;
            for (auto& s : sets) E.push_back(parse_syndetic(s, L));
            auto [lo, hi] = range();
            auto w = pat::syndetic_system_solve(E, c, ci, as, lo, hi);
            out.record({{"record", "syndetic"}, {"sets", strings(sets)}, {"c", c}, {"ci", ci}, {"a", strings(a)},
                        {"L", L}, {"found", w.found}, {"x", w.x}, {"n", w.n}, {"checked", w.checked},
                        {"verdict", w.found ? "witness found" : "NotFoundAtScale: " + w.note}});
            out.row("found,n,x");
            std::string xs;
            for (long x : w.x) xs += (xs.empty() ? "" : " ") + std::to_string(x);
            out.row(std::string(w.found ? "1" : "0") + "," + std::to_string(w.n) + "," + xs);
            return 0;
        }
        pat::DenseSet E = bitmap.empty() ? pat::DenseSet::random(dim, L, density, g.seed) : read_bitmap(bitmap, L);
        json set = {{"dim", E.dim()}, {"L", E.L()}, {"count", E.count()}, {"density", E.density().get_d()},
                    {"source", bitmap.empty() ? "random" : bitmap}, {"seed", g.seed}};
        if (mode == "config") {
            auto [lo, hi] = range();
            auto r = pat::find_multidim_config(E, vectors(), as, lo, hi, cap);
            out.record({{"record", "set"}, {"set", set}});
            out.row("v,n");
            for (auto& w : r.witnesses) {
                out.record({{"record", "witness"}, {"v", w.v}, {"n", w.n}});
                std::string vs;
                for (long x : w.v) vs += (vs.empty() ? "" : " ") + std::to_string(x);
                out.row(vs + "," + std::to_string(w.n));
            }
            out.record({{"record", "summary"}, {"total", r.total}, {"checked", r.checked}, {"regime_ok", r.regime_ok},
                        {"verdict", r.total ? "witness found" : "NotFoundAtScale"}});
            return 0;
        }
        if (mode == "intersection") {
            size_t l = as.size();
            std::vector<pat::DenseSet> sets_e(l + 1, E);
            auto r = pat::intersection_average(sets_e, vectors(), as, N, k);
            out.record({{"record", "intersection"}, {"set", set}, {"N", N}, {"value", r.value}, {"alpha", r.alpha},
                        {"bound", r.bound}, {"boundary", r.boundary}, {"sampling", r.sampling},
                        {"vacuous", r.vacuous}, {"holds", r.holds}});
            out.row("N,value,bound,boundary");
            out.row(std::to_string(N) + "," + csv(r.value) + "," + csv(r.bound) + "," + csv(r.boundary));
            return r.holds ? 0 : 2;
        }
        throw UsageError("patterns", "mode must be config, syndetic or intersection");
    }
};

struct SelftestCmd {
    std::vector<int> ids;
    void add(CLI::App* app) {
        auto* s = app->add_subcommand("selftest", "run the acceptance criteria");
        s->add_option("--criteria", ids, "subset of 1..12")->delimiter(',');
    }
    int run(Sink& out) {
        int failed = 0;
        out.row("id,pass,seconds,limit");
        for (int id : ids.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12} : ids) {
            auto r = acc::run(id);
            std::cerr << r.line() << "\n";
            out.record({{"record", "criterion"}, {"id", r.id}, {"title", r.title}, {"pass", r.pass()},
                        {"property", r.property}, {"detail", r.detail}});
            out.row(std::to_string(r.id) + "," + (r.pass() ? "1" : "0") + "," + csv(r.seconds) + "," + csv(r.limit));
            failed += !r.pass();
        }
        return failed ? 2 : 0;
    }
};

// TOML holding the global settings and the chosen subcommand's section; --config and --out are left out
// so that a re-run can write elsewhere
std::string emit_config(const CLI::App& app, const CLI::App& sub) {
    auto value = [](const CLI::Option* o) -> std::string {
        std::vector<std::string> v = o->results();
        if (v.empty()) {
            std::string d = o->get_default_str();
            if (d.empty()) return "";
            if (o->get_items_expected_max() > 1 && d.front() == '[') {
                v.clear();
                for (auto& part : split_top(d.substr(1, d.size() - 2), ',')) v.push_back(part);
            } else {
                v = {d};
            }
        }
        if (o->get_type_size() == 0 && o->get_items_expected_max() <= 1) return v.back() == "false" ? "false" : "true";
        if (o->get_items_expected_max() <= 1) return json(v.back()).dump();
        json arr = json::array();
        for (auto& x : v) arr.push_back(x);
        return arr.dump();
    };
    std::ostringstream os;
    for (const CLI::Option* o : app.get_options()) {
        std::string name = o->get_single_name();
        if (name == "help" || name == "config" || name == "out") continue;
        std::string v = value(o);
        if (!v.empty()) os << name << " = " << v << "\n";
    }
    os << "\n[" << sub.get_name() << "]\n";
    for (const CLI::Option* o : sub.get_options()) {
        std::string name = o->get_single_name();
        if (name == "help") continue;
        std::string v = value(o);
        if (!v.empty()) os << name << " = " << v << "\n";
    }
    return os.str();
}

std::string error_kind(const Error& e) {
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const PrecisionExhausted*>(&e)) return "PrecisionExhausted";
    if (dynamic_cast<const BudgetExceeded*>(&e)) return "BudgetExceeded";
    if (dynamic_cast<const UsageError*>(&e)) return "UsageError";
    if (dynamic_cast<const Overflow*>(&e)) return "Overflow";
    if (dynamic_cast<const NotInFragment*>(&e)) return "NotInFragment";
    if (dynamic_cast<const NotNice*>(&e)) return "NotNice";
    if (dynamic_cast<const reduction::TupleBudgetExceeded*>(&e)) return "TupleBudgetExceeded";
    if (dynamic_cast<const reduction::MaxStepsExceeded*>(&e)) return "MaxStepsExceeded";
    return "DomainError";
}

}  // namespace

cplx parse_complex(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw ParseError("parse_complex", "empty number");
    if (t.back() != 'i') return {parse_double(t, "parse_complex"), 0};
    std::string body = t.substr(0, t.size() - 1);
    size_t split = std::string::npos;
    for (size_t i = body.size(); i-- > 1;)
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    std::string re = split == std::string::npos ? "0" : body.substr(0, split);
    std::string im = split == std::string::npos ? body : body.substr(split);
    if (im.empty() || im == "+") im = "1";
    if (im == "-") im = "-1";
    return {parse_double(re, "parse_complex"), parse_double(im, "parse_complex")};
}

dyn::TransformSpec parse_transform(const std::string& s) {
    auto [name, args] = call(s, "parse_transform");
    auto parts = split_top(args, ',');
    if (name == "rotation") {
        std::vector<dyn::Angle> a;
        for (auto& p : parts) a.push_back(dyn::Angle::parse(p));
        if (a.empty()) throw ParseError("parse_transform", "rotation needs at least one angle");
        return dyn::TransformSpec::rotation(std::move(a));
    }
    if (name == "cyclic") {
        if (parts.size() != 2) throw ParseError("parse_transform", "cyclic(m, step)");
        return dyn::TransformSpec::cyclic(parse_long(parts[0], "parse_transform"), parse_long(parts[1], "parse_transform"));
    }
    if (name == "skew") {
        if (parts.size() != 2) throw ParseError("parse_transform", "skew(alpha, beta)");
        return dyn::TransformSpec::skew(dyn::Angle::parse(parts[0]), dyn::Angle::parse(parts[1]));
    }
    throw ParseError("parse_transform", "unknown transform '" + name + "'");
}

dyn::Observable parse_observable(const std::string& s) {
    auto [name, args] = call(s, "parse_observable");
    if (name == "char") return dyn::Observable::character(map_list<long>(args, ',', to_long));
    if (name == "const") {
        auto parts = split_top(args, ',');
        size_t dim = parts.size() > 1 ? static_cast<size_t>(parse_long(parts[1], "parse_observable")) : 1;
        return dyn::Observable::constant(parse_complex(parts.at(0)), dim);
    }
    if (name == "fourier") {
        std::vector<std::pair<std::vector<long>, cplx>> terms;
        for (auto& term : split_top(args, ';')) {
            size_t colon = term.find(':');
            if (colon == std::string::npos) throw ParseError("parse_observable", "fourier term is 'k1 k2 ..: c'");
            std::vector<long> k;
            std::istringstream ks(term.substr(0, colon));
            std::string tok;
            while (ks >> tok) k.push_back(parse_long(tok, "parse_observable"));
            terms.push_back({k, parse_complex(term.substr(colon + 1))});
        }
        return dyn::Observable::fourier(std::move(terms));
    }
    if (name == "box") {
        std::vector<std::pair<double, double>> iv;
        for (auto& p : split_top(args, ',')) {
            auto lh = split_top(p, ':');
            if (lh.size() != 2) throw ParseError("parse_observable", "box interval is lo:hi");
            iv.push_back({parse_double(lh[0], "parse_observable"), parse_double(lh[1], "parse_observable")});
        }
        return dyn::Observable::box(std::move(iv));
    }
    if (name == "table") {
        std::vector<cplx> v;
        for (auto& p : split_top(args, ',')) v.push_back(parse_complex(p));
        return dyn::Observable::table(std::move(v));
    }
    if (name == "cychar") {
        auto v = map_list<long>(args, ',', to_long);
        if (v.size() != 2) throw ParseError("parse_observable", "cychar(m, k)");
        return dyn::Observable::cyclic_character(v[0], v[1]);
    }
    throw ParseError("parse_observable", "unknown observable '" + name + "'");
}

std::vector<long> parse_schedule(const std::vector<std::string>& items) {
    std::vector<long> out;
    for (auto& s : items) out.push_back(parse_long(s, "schedule"));
    return out;
}

int main(int argc, char** argv) {
    CLI::App app{"ergolab: Hardy-field iterates, multiple ergodic averages and their finite-N checks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML config; every run writes one to --out");
    Global g;
    app.add_option("--out", g.out, "directory for report.jsonl, table.csv, timing.csv and config.toml");
    app.add_option("--seed", g.seed, "seed for sample points and random sets")->capture_default_str();
    app.add_option("--threads", g.threads, "OpenMP threads, 0 keeps the default")->capture_default_str();
    app.add_option("--precision-bits", g.precision_bits, "MPFR escalation cap for floor evaluation")
        ->capture_default_str();

    ReduceCmd reduce;
    AverageCmd average;
    RecurrenceCmd recurrence;
    BlocksCmd blocks;
    ParityCmd parity;
    WeylCmd weyl;
    EquiCmd equi_cmd;
    SeminormCmd seminorm;
    DualCmd dual;
    PatternsCmd patterns;
    SelftestCmd selftest;
    reduce.add(&app);
    average.add(&app);
    recurrence.add(&app);
    blocks.add(&app);
    parity.add(&app);
    weyl.add(&app);
    equi_cmd.add(&app);
    seminorm.add(&app);
    dual.add(&app);
    patterns.add(&app);
    selftest.add(&app);
    for (auto* s : app.get_subcommands({})) s->configurable();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const CLI::App& subapp = *app.get_subcommands().front();
    std::string sub = subapp.get_name();
    try {
        if (g.threads > 0) omp_set_num_threads(g.threads);
        hardy::set_default_floor_bits(g.precision_bits);
        Sink out;
        out.open(g.out, emit_config(app, subapp));
        auto t0 = std::chrono::steady_clock::now();
        int rc = 0;
        if (sub == "reduce") rc = reduce.run(out);
        else if (sub == "average") rc = average.run(out, g);
        else if (sub == "recurrence") rc = recurrence.run(out, g);
        else if (sub == "blocks") rc = blocks.run(out, g);
        else if (sub == "parity") rc = parity.run(out);
        else if (sub == "weyl") rc = weyl.run(out);
        else if (sub == "equi") rc = equi_cmd.run(out);
        else if (sub == "seminorm") rc = seminorm.run(out, g);
        else if (sub == "dual") rc = dual.run(out, g);
        else if (sub == "patterns") rc = patterns.run(out, g);
        else rc = selftest.run(out);
        out.time("total", seconds_since(t0));
        return rc;
    } catch (const Error& e) {
        json d = {{"record", "error"}, {"subcommand", sub}, {"where", e.where()}, {"type", error_kind(e)}, {"message", e.what()}};
        std::cerr << d.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json d = {{"record", "error"}, {"subcommand", sub}, {"where", "cli"}, {"type", "internal"}, {"message", e.what()}};
        std::cerr << d.dump() << "\n";
        return 1;
    }
}

}  // namespace ergolab::cli
