// hclab: command-line front end.
//
// Exit codes: 0 pass / feasible, 1 fail / infeasible, 2 usage or input
// error, 3 internal failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hclab/battery.hpp"
#include "hclab/criterion.hpp"
#include "hclab/errors.hpp"
#include "hclab/hs_lift.hpp"
#include "hclab/literals.hpp"
#include "hclab/operators.hpp"
#include "hclab/oracle.hpp"
#include "hclab/serialize.hpp"

using namespace hclab;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

const char* kLiteralHelp = R"(
Literals:
  vector   e1   e1+0.5e3   -2e2   0          (0.5e3 means 0.5 * e_3)
  ball     <vector>:<radius>, e.g. e1:0.1, or @ball.json = {"center": [...], "radius": r}
           complex entries in files are [re, im] pairs
  matrix   e1xe2 (maps e_2 to e_1), e1xe1+0.5e2xe3, or @m.json = list of rows
  seq      k   linear:a,b   pow:b   list:n1,n2,...

Config file (--config): JSON object with any of
  op, d, n_max, tol, K, seed, seq, eps, battery {d, n_max, m_copies, hs_dim,
  ball_samples, radius_min, radius_max, patch_span, patch_dim, certificate_k,
  subsequences, keep_probability}
Flags override the file; the file overrides defaults. The seed falls back to
$HCLAB_SEED, then 0.

Exit codes: 0 pass/feasible, 1 fail/infeasible, 2 usage error, 3 internal error.
)";

// The single place defaults live.
struct RunConfig {
    std::string op;
    std::size_t d = 32;  ///< a floor: raised to the guard band when an input needs more room
    std::size_t n_max = kDefaultNMax;
    double tol = 1e-8;
    std::size_t K = 10;
    std::uint64_t seed = 0;
    std::string seq = "k";
    double eps = 0.5;
    BatteryConfig battery;
};

struct Flags {
    std::string config, out, csv;
    bool json_stdout = false;
    unsigned threads = 1;  // results never depend on it
};

// Value set on the command line wins; otherwise the file's; otherwise keep.
template <class T>
void layer(T& target, const CLI::Option* flag, const T& flag_value, const json& file, const char* key) {
    if (flag != nullptr && flag->count() > 0) {
        target = flag_value;
    } else if (file.contains(key)) {
        target = file.at(key).get<T>();
    }
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config '" + path + "'");
    try {
        auto j = json::parse(in);
        if (!j.is_object()) throw InvalidArgument("config '" + path + "' must hold a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
}

std::uint64_t env_seed() {
    const char* s = std::getenv("HCLAB_SEED");
    if (s == nullptr || *s == '\0') return 0;
    try {
        return std::stoull(s);
    } catch (const std::logic_error&) {
        throw InvalidArgument(std::string("HCLAB_SEED is not an unsigned integer: ") + s);
    }
}

// Runs fn at truncation d; when the guard band asks for more room, reruns
// once at the required size. Answers do not change with d past the band.
template <class Fn>
auto at_guard_band(std::size_t d, Fn fn) {
    try {
        return fn(d);
    } catch (const GuardBandError& e) {
        return fn(e.required());
    }
}

void emit(const json& report, const Flags& f) {
    if (!f.out.empty()) {
        std::ofstream out(f.out);
        if (!out) throw InvalidArgument("cannot write '" + f.out + "'");
        out << report.dump(2) << '\n';
    }
    if (f.json_stdout) std::cout << report.dump(2) << '\n';
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// ---- subcommands ----

int cmd_zoo(const Flags& f) {
    json list = json::array();
    for (const auto& e : zoo_entries()) {
        if (!f.json_stdout) std::cout << std::left << std::setw(20) << e.id << e.description << '\n';
        list.push_back({{"id", e.id}, {"description", e.description}});
    }
    emit({{"schema", kSchemaVersion}, {"kind", "zoo"}, {"operators", list}}, f);
    return kPass;
}

int cmd_certify(const RunConfig& c, const std::string& cert_path, std::size_t generators, const Flags& f) {
    const auto t = make_operator(c.op);
    Certificate cert = default_certificate(generators);
    if (!cert_path.empty()) {
        std::ifstream in(cert_path);
        if (!in) throw InvalidArgument("cannot open certificate '" + cert_path + "'");
        cert = certificate_from_json(json::parse(in));
    } else {
        cert.seq = SequenceRule::parse(c.seq);
    }
    ConvergenceRule rule;
    rule.tol = c.tol;
    const auto r = at_guard_band(c.d, [&](std::size_t d) { return check_certificate(t, cert, c.K, rule, d); });
    if (!f.json_stdout) {
        std::cout << "operator " << c.op << "  d=" << r.d_used << "  K=" << c.K << '\n';
        auto show = [](const std::vector<ResidualSeries>& ss) {
            for (const auto& s : ss) {
                std::cout << "  " << std::left << std::setw(28) << s.label << std::setw(16) << s.mode
                          << "last=" << fmt(s.values.empty() ? 0.0 : s.values.back()) << '\n';
            }
        };
        show(r.y_residuals);
        show(r.s_residuals);
        show(r.inverse_residuals);
        std::cout << "verdict: " << (r.pass ? "pass" : "fail") << "  (" << r.scope << ")\n";
    }
    json report = to_json(r);
    report["operator"] = c.op;
    emit(report, f);
    return r.pass ? kPass : kFail;
}

int cmd_oracle(const RunConfig& c, const std::string& condition, const std::string& u_text,
               const std::string& v_text, const std::string& w_text, const Flags& f) {
    const auto t = make_operator(c.op);
    const Ball u = parse_ball(u_text);
    OracleResult r;
    if (condition == "hit") {
        if (v_text.empty()) throw InvalidArgument("--V is required for --condition hit");
        const Ball v = parse_ball(v_text);
        r = at_guard_band(c.d, [&](std::size_t d) { return first_hit(t, u, v, c.n_max, d); });
    } else if (condition == "criterion") {
        if (v_text.empty() || w_text.empty()) throw InvalidArgument("--V and --W are required for --condition criterion");
        const Ball v = parse_ball(v_text);
        const Ball w = parse_ball(w_text);
        r = at_guard_band(c.d, [&](std::size_t d) { return criterion_condition(t, u, v, w, c.n_max, d); });
    } else {
        if (w_text.empty()) throw InvalidArgument("--W is required for --condition prop27");
        const Ball w = parse_ball(w_text);
        r = at_guard_band(c.d, [&](std::size_t d) { return prop27_condition(t, u, w, c.n_max, d); });
    }
    if (!f.json_stdout) {
        if (r.feasible) {
            std::cout << "feasible n=" << r.n << " dist=" << fmt(r.dist);
            if (r.dist_second >= 0) std::cout << " dist_second=" << fmt(r.dist_second);
            std::cout << " d=" << r.d_used << '\n';
        } else {
            std::cout << "infeasible for n <= " << c.n_max << " d=" << r.d_used << '\n';
        }
    }
    json report = to_json(r);
    report["operator"] = c.op;
    emit(report, f);
    if (!f.csv.empty()) {
        std::ofstream out(f.csv);
        if (!out) throw InvalidArgument("cannot write '" + f.csv + "'");
        out << scan_to_csv(r);
    }
    return r.feasible ? kPass : kFail;
}

int cmd_witness(const RunConfig& c, const std::string& a_text, const std::string& b_text,
                const std::string& mode, const Flags& f) {
    const auto t = make_operator(c.op);
    WitnessOptions opts;
    opts.n_max = c.n_max;
    opts.mode = mode == "constructive" ? WitnessOptions::Mode::Constructive
              : mode == "oracle"       ? WitnessOptions::Mode::Oracle
                                       : WitnessOptions::Mode::Auto;
    const CMatrix a = parse_matrix(a_text);
    const CMatrix b = parse_matrix(b_text);
    const auto n = std::max(a.rows(), b.rows());
    auto square = [n](const CMatrix& m) {
        CMatrix out = CMatrix::Zero(n, n);
        out.topLeftCorner(m.rows(), m.cols()) = m;
        return HSMatrix(out);
    };
    const auto r = at_guard_band(c.d, [&](std::size_t d) {
        return construct_witness(t, square(a), square(b), c.eps, d, opts);
    });
    if (!f.json_stdout) {
        if (r.success) {
            std::cout << "witness found (" << r.mode << ") N=" << r.N << " n=" << r.n << " delta=" << fmt(r.delta)
                      << " d=" << r.d_used << '\n'
                      << "  ||S-A||_2=" << fmt(r.residual_a) << "  ||T^n S-B||_2=" << fmt(r.residual_b)
                      << "  chains " << (r.chains_verified ? "verified" : "NOT verified") << '\n';
        } else {
            std::cout << "no witness: " << r.failure << '\n';
        }
    }
    json report = to_json(r);
    report["operator"] = c.op;
    emit(report, f);
    return r.success ? kPass : kFail;
}

void print_outcome(const ConditionOutcome& o) {
    std::cout << "  " << std::left << std::setw(15) << to_string(o.verdict) << std::setw(8)
              << (std::to_string(o.hits) + "/" + std::to_string(o.samples)) << "d=" << std::setw(6) << o.d_used
              << o.name;
    if (!o.note.empty()) std::cout << "  [" << o.note << "]";
    std::cout << '\n';
}

int cmd_battery(const RunConfig& c, const Flags& f) {
    const auto t = make_operator(c.op);
    const auto r = run_battery(t, c.battery, c.op);
    bool all_pass = true;
    for (const auto& o : r.conditions) all_pass = all_pass && o.verdict != Verdict::Fail;
    if (!f.json_stdout) {
        std::cout << "operator " << c.op << "  seed=" << c.battery.rng_seed << '\n';
        for (const auto& o : r.conditions) print_outcome(o);
        std::cout << "consistent: " << (r.consistent ? "yes" : "NO") << '\n';
    }
    emit(to_json(r), f);
    return (all_pass && r.consistent) ? kPass : kFail;
}

int cmd_prop212(const RunConfig& c, const std::string& u_text, const std::string& v_text, std::size_t window,
                const Flags& f) {
    const auto t = make_operator(c.op);
    const auto seq = SequenceRule::parse(c.seq);
    if (!u_text.empty() || !v_text.empty()) {
        if (u_text.empty() || v_text.empty()) throw InvalidArgument("a single query needs both --U and --V");
        const Ball u = parse_ball(u_text);
        const Ball v = parse_ball(v_text);
        const auto r = at_guard_band(c.d, [&](std::size_t d) { return prop212_condition(t, seq, u, v, window, d); });
        if (!f.json_stdout) {
            if (r.n_found) {
                std::cout << "N=" << *r.n_found << " (n_N=" << r.exponents[*r.n_found - 1] << ") d=" << r.d_used << '\n';
            } else {
                std::cout << "no N within " << window << " terms, d=" << r.d_used << '\n';
            }
        }
        json report = to_json(r);
        report["operator"] = c.op;
        report["sequence"] = seq.to_string();
        emit(report, f);
        return r.n_found ? kPass : kFail;
    }
    const auto r = prop212_battery(t, seq, c.battery);
    if (!f.json_stdout) {
        std::cout << "operator " << c.op << "  seq=" << r.sequence << '\n';
        print_outcome(r.certificate);
        print_outcome(r.cond_ii);
        print_outcome(r.cond_iii);
        std::cout << "agree: " << (r.agree ? "yes" : "NO") << '\n';
    }
    json report = to_json(r);
    report["operator"] = c.op;
    emit(report, f);
    const bool pass = r.cond_ii.verdict == Verdict::Pass && r.cond_iii.verdict == Verdict::Pass;
    return (pass && r.agree) ? kPass : kFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hclab: numerical checks of the Hypercyclicity Criterion on truncated operators"};
    app.footer(kLiteralHelp);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    Flags flags;
    RunConfig cli;  // raw flag values; layered below
    app.add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out", flags.out, "Write the JSON report here");
    app.add_flag("--json", flags.json_stdout, "Print the JSON report instead of the summary");
    app.add_option("--threads", flags.threads, "Worker cap (results do not depend on it)")->check(CLI::PositiveNumber);

    auto* zoo = app.add_subcommand("zoo", "List registered operators");
    auto* certify = app.add_subcommand("certify", "Check a criterion certificate");
    auto* oracle = app.add_subcommand("oracle", "Ball-intersection queries");
    auto* witness = app.add_subcommand("witness", "Build a Hilbert-Schmidt witness S for A, B");
    auto* battery = app.add_subcommand("battery", "Run the five-condition equivalence battery");
    auto* prop212 = app.add_subcommand("prop212", "Sequence conditions along {n_k}");

    struct Common {
        CLI::Option *op = nullptr, *d = nullptr, *nmax = nullptr, *tol = nullptr, *K = nullptr, *seed = nullptr,
                    *seq = nullptr, *eps = nullptr, *samples = nullptr;
    };
    std::map<CLI::App*, Common> common;
    std::size_t samples = 0;
    auto add_common = [&](CLI::App* sub, bool with_seq) {
        Common o;
        o.op = sub->add_option("--op", cli.op, "Operator id (see `zoo`)");
        o.d = sub->add_option("--d", cli.d, "Truncation floor (default 32)")->check(CLI::PositiveNumber);
        o.nmax = sub->add_option("--nmax", cli.n_max, "Largest exponent scanned (default 64)")->check(CLI::PositiveNumber);
        o.seed = sub->add_option("--seed", cli.seed, "RNG seed (fallback $HCLAB_SEED)");
        if (with_seq) o.seq = sub->add_option("--seq", cli.seq, "Exponent sequence rule (default k)");
        common[sub] = o;
    };
    add_common(certify, true);
    add_common(oracle, false);
    add_common(witness, false);
    add_common(battery, true);
    add_common(prop212, true);
    common[certify].tol = certify->add_option("--tol", cli.tol, "Residual tolerance (default 1e-8)")->check(CLI::PositiveNumber);
    common[certify].K = certify->add_option("--K", cli.K, "Number of sequence terms (default 10)")->check(CLI::PositiveNumber);
    common[battery].tol = battery->add_option("--tol", cli.tol, "Residual tolerance (default 1e-8)")->check(CLI::PositiveNumber);
    common[battery].K = battery->add_option("--K", cli.K, "Certificate terms")->check(CLI::PositiveNumber);
    common[battery].samples = battery->add_option("--samples", samples, "Ball pairs per condition")->check(CLI::PositiveNumber);
    common[prop212].K = prop212->add_option("--K", cli.K, "Terms of {n_k} searched (default 10)")->check(CLI::PositiveNumber);
    common[prop212].samples = prop212->add_option("--samples", samples, "Ball pairs per condition")->check(CLI::PositiveNumber);
    common[witness].eps = witness->add_option("--eps", cli.eps, "Target accuracy epsilon (default 0.5)")->check(CLI::PositiveNumber);

    std::string cert_path;
    std::size_t generators = 3;
    certify->add_option("--cert", cert_path, "Certificate JSON (default: Y = Z = {e_1..e_g})")->check(CLI::ExistingFile);
    certify->add_option("--generators", generators, "g for the default certificate")->check(CLI::PositiveNumber);

    std::string condition = "hit", u_text, v_text, w_text;
    oracle->add_option("--condition", condition, "hit | criterion | prop27")
        ->check(CLI::IsMember({"hit", "criterion", "prop27"}));
    oracle->add_option("--U", u_text, "Ball U")->required();
    oracle->add_option("--V", v_text, "Ball V");
    oracle->add_option("--W", w_text, "Ball W (centered at 0 for criterion)");
    oracle->add_option("--csv", flags.csv, "Write the scanned-distance table here");

    std::string a_text, b_text, mode = "auto";
    witness->add_option("--A", a_text, "Matrix A")->required();
    witness->add_option("--B", b_text, "Matrix B")->required();
    witness->add_option("--mode", mode, "auto | constructive | oracle")
        ->check(CLI::IsMember({"auto", "constructive", "oracle"}));

    std::string pu_text, pv_text;
    prop212->add_option("--U", pu_text, "Ball U (single query)");
    prop212->add_option("--V", pv_text, "Ball V (single query)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << "\n" << app.help();
        return kUsage;
    }

    try {
        if (zoo->parsed()) return cmd_zoo(flags);

        CLI::App* sub = app.get_subcommands().front();
        const Common& o = common[sub];
        const json file = load_config(flags.config);

        RunConfig c;
        c.seed = env_seed();
        layer(c.op, o.op, cli.op, file, "op");
        layer(c.d, o.d, cli.d, file, "d");
        layer(c.n_max, o.nmax, cli.n_max, file, "n_max");
        layer(c.tol, o.tol, cli.tol, file, "tol");
        layer(c.K, o.K, cli.K, file, "K");
        layer(c.seed, o.seed, cli.seed, file, "seed");
        layer(c.seq, o.seq, cli.seq, file, "seq");
        layer(c.eps, o.eps, cli.eps, file, "eps");
        if (c.op.empty()) throw InvalidArgument("--op is required (see `hclab zoo`)");

        // Battery knobs: its own defaults, then the file's "battery" block,
        // then the shared keys, then flags.
        if (file.contains("battery")) c.battery = battery_config_from_json(file.at("battery"), c.battery);
        auto given = [&](CLI::Option* opt, const char* key) {
            return (opt != nullptr && opt->count() > 0) || file.contains(key);
        };
        if (given(o.d, "d")) c.battery.d = c.d;
        if (given(o.nmax, "n_max")) c.battery.n_max = c.n_max;
        if (given(o.tol, "tol")) c.battery.rule.tol = c.tol;
        if (given(o.K, "K")) c.battery.certificate_k = c.K;
        if (o.samples != nullptr && o.samples->count() > 0) c.battery.ball_samples = samples;
        c.battery.rng_seed = c.seed;
        c.battery.validate();

        if (certify->parsed()) return cmd_certify(c, cert_path, generators, flags);
        if (oracle->parsed()) return cmd_oracle(c, condition, u_text, v_text, w_text, flags);
        if (witness->parsed()) return cmd_witness(c, a_text, b_text, mode, flags);
        if (battery->parsed()) return cmd_battery(c, flags);
        if (prop212->parsed()) return cmd_prop212(c, pu_text, pv_text, c.K, flags);
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const GuardBandError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: bad JSON input: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}
