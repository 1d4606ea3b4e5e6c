#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "wiretap/cli.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/montecarlo.hpp"

#ifndef WIRETAP_VERSION
#define WIRETAP_VERSION "unknown"
#endif

namespace wiretap::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// f(i) for i in [0, n) on a small pool; f must not throw
template <class F>
void parallel_for(int n, unsigned threads, F&& f) {
    if (n <= 0) return;
    threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(n));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) f(i);
    };
    if (threads == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> model_cells(const ModelFlags& f) {
    return {format_real(f.m1), format_real(f.k1),       format_real(f.m2),       format_real(f.k2),
            format_real(f.rho), format_real(f.snr_b_db), format_real(f.snr_e_db)};
}

const std::vector<std::string> kModelHeader = {"m1", "k1", "m2", "k2", "rho", "snr_b_db", "snr_e_db"};

std::vector<std::string> with_model_header(std::vector<std::string> tail) {
    std::vector<std::string> h = kModelHeader;
    h.insert(h.end(), tail.begin(), tail.end());
    return h;
}

std::string point_label(const ModelFlags& f, double rate) {
    std::ostringstream os;
    os << "m1=" << format_real(f.m1) << " k1=" << format_real(f.k1) << " m2=" << format_real(f.m2)
       << " k2=" << format_real(f.k2) << " rho=" << format_real(f.rho) << " snr_b_db=" << format_real(f.snr_b_db)
       << " snr_e_db=" << format_real(f.snr_e_db) << " r=" << format_real(rate);
    return os.str();
}

json model_json(const ModelFlags& f) {
    return json{{"m1", f.m1},   {"k1", f.k1},           {"m2", f.m2},          {"k2", f.k2},
                {"rho", f.rho}, {"snr_b_db", f.snr_b_db}, {"snr_e_db", f.snr_e_db}};
}

json result_json(const SecrecyResult& r) {
    return json{{"value", r.value},
                {"terms_used", r.terms_used},
                {"tail_estimate", std::isfinite(r.tail_estimate) ? json(r.tail_estimate) : json(nullptr)},
                {"method", std::string(method_name(r.method))},
                {"swapped", r.swapped}};
}

void warn_rho(const ModelFlags& f) {
    if (f.rho > 0.99) {
        std::cerr << "warning: rho = " << format_real(f.rho)
                  << " > 0.99; the mixture index variance is large and series truncation grows quickly\n";
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw UsageError("write to '" + path + "' failed");
}

}  // namespace

SecrecyResult eval_sop(const WiretapModel& model, double rate, const EvalSettings& s) {
    switch (s.method) {
        case EvalMethod::series: {
            SopOptions o;
            o.formula = s.as_printed ? SopFormula::as_printed : SopFormula::corrected;
            o.quad_tol = s.quad_tol;
            return sop(model, rate, s.ctrl, o);
        }
        case EvalMethod::oracle: return sop_oracle(model, rate, s.quad_tol);
        case EvalMethod::asymptotic:
            if (rate != 0.0) throw UsageError("--method asymptotic exists only at rate 0 (see the pnzsc command)");
            return eval_pzero(model, s);
    }
    throw UsageError("unknown method");
}

SecrecyResult eval_pzero(const WiretapModel& model, const EvalSettings& s) {
    switch (s.method) {
        case EvalMethod::series: return pzero(model, s.ctrl);
        case EvalMethod::oracle: return sop_oracle(model, 0.0, s.quad_tol);
        case EvalMethod::asymptotic: {
            SecrecyResult r;
            r.value = pzero_asymptotic(model);
            r.terms_used = 0;
            r.tail_estimate = kNaN;
            r.method = Method::asymptotic;
            return r;
        }
    }
    throw UsageError("unknown method");
}

std::vector<SweepPoint> run_sweep(const SweepSpec& spec, SweepQuantity q, const EvalSettings& s, unsigned threads) {
    spec.validate();
    std::vector<SweepPoint> pts(static_cast<std::size_t>(spec.points));
    for (int i = 0; i < spec.points; ++i) {
        SweepPoint& p = pts[static_cast<std::size_t>(i)];
        p.index = i;
        p.x = spec.value_at(i);
        p.flags = spec.flags_at(i);
        p.rate = spec.rate_at(i);
    }
    parallel_for(spec.points, resolve_threads(threads), [&](int i) {
        SweepPoint& p = pts[static_cast<std::size_t>(i)];
        try {
            const WiretapModel m = p.flags.model();
            p.result = (q == SweepQuantity::sop) ? eval_sop(m, p.rate, s) : eval_pzero(m, s);
        } catch (const std::exception& e) {
            p.error = e.what();
        }
    });
    return pts;
}

// ---------------------------------------------------------------------------
// validation matrix

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
}

CsvTable ValidationReport::table() const {
    CsvTable t({"point", "check", "lhs", "rhs", "abs_diff", "tol", "status", "note"});
    for (const auto& c : checks) {
        t.add_row({c.point, c.check, format_real(c.lhs), format_real(c.rhs), format_real(std::abs(c.lhs - c.rhs)),
                   format_real(c.tol), c.pass ? "pass" : "FAIL", c.note});
    }
    return t;
}

namespace {

enum class CheckKind { symmetric_half, series_vs_pzero, series_vs_oracle, series_vs_mc };

struct Task {
    CheckKind kind;
    ModelFlags f;
    double rate = 0.0;
};

ModelFlags make_flags(double m1, double k1, double m2, double k2, double rho, double b_db, double e_db) {
    ModelFlags f;
    f.m1 = m1;
    f.k1 = k1;
    f.m2 = m2;
    f.k2 = k2;
    f.rho = rho;
    f.snr_b_db = b_db;
    f.snr_e_db = e_db;
    return f;
}

std::vector<Task> validation_grid(bool quick) {
    std::vector<Task> t;
    const std::vector<double> rhos = {0.0, 0.5, 0.9};
    if (quick) {
        for (double m : {1.0, 4.0})
            for (double rho : {0.0, 0.9}) t.push_back({CheckKind::symmetric_half, make_flags(m, 1, m, 1, rho, 4, 4)});
        t.push_back({CheckKind::series_vs_pzero, make_flags(1, 1, 1, 2, 0.5, 4, 0)});
        t.push_back({CheckKind::series_vs_pzero, make_flags(2, 2, 2, 4, 0.9, 4, 0)});
        t.push_back({CheckKind::series_vs_pzero, make_flags(3.5, 1, 3.5, 1, 0.0, 4, 0)});
        t.push_back({CheckKind::series_vs_oracle, make_flags(1, 1, 1, 1, 0.0, 4, 0), 0.5});
        t.push_back({CheckKind::series_vs_oracle, make_flags(2, 1, 2, 2, 0.5, 4, 0), 1.0});
        t.push_back({CheckKind::series_vs_oracle, make_flags(3.5, 2, 3.5, 4, 0.9, 4, 0), 2.0});
        t.push_back({CheckKind::series_vs_oracle, make_flags(1, 1, 1, 4, 0.9, 4, 0), 1.0});
        t.push_back({CheckKind::series_vs_mc, make_flags(1, 1, 1, 1, 0.2, 4, 4), 1.0});
        t.push_back({CheckKind::series_vs_mc, make_flags(4, 1, 4, 1, 0.9, 4, 4), 1.0});
        return t;
    }
    for (double m : {1.0, 4.0})
        for (double k : {1.0, 2.0})
            for (double rho : rhos) t.push_back({CheckKind::symmetric_half, make_flags(m, k, m, k, rho, 4, 4)});
    const std::vector<std::pair<double, double>> kpairs3 = {{1, 1}, {1, 2}, {2, 4}};
    for (double rho : rhos)
        for (double m : {1.0, 2.0, 3.5})
            for (auto [k1, k2] : kpairs3) t.push_back({CheckKind::series_vs_pzero, make_flags(m, k1, m, k2, rho, 4, 0)});
    const std::vector<std::pair<double, double>> kpairs = {{1, 1}, {1, 2}, {1, 4}, {2, 2}, {2, 4}, {4, 4}};
    for (double rho : rhos)
        for (double m : {1.0, 2.0, 3.5})
            for (auto [k1, k2] : kpairs)
                for (double r : {0.5, 1.0, 2.0})
                    t.push_back({CheckKind::series_vs_oracle, make_flags(m, k1, m, k2, rho, 4, 0), r});
    for (double m : {1.0, 4.0})
        for (auto [k1, k2] : std::vector<std::pair<double, double>>{{1, 1}, {1, 2}})
            for (double rho : {0.2, 0.5, 0.9})
                t.push_back({CheckKind::series_vs_mc, make_flags(m, k1, m, k2, rho, 4, 4), 1.0});
    return t;
}

}  // namespace

ValidationReport run_validation(bool quick, const ValidationTolerances& tol, std::uint64_t samples,
                                std::uint64_t seed, unsigned threads, const EvalSettings& s) {
    const std::vector<Task> tasks = validation_grid(quick);
    std::vector<ValidationCheck> out(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), resolve_threads(threads), [&](int idx) {
        const Task& t = tasks[static_cast<std::size_t>(idx)];
        ValidationCheck& c = out[static_cast<std::size_t>(idx)];
        c.point = point_label(t.f, t.rate);
        try {
            const WiretapModel model = t.f.model();
            switch (t.kind) {
                case CheckKind::symmetric_half:
                    c.check = "pzero_symmetric";
                    c.lhs = eval_pzero(model, s).value;
                    c.rhs = 0.5;
                    c.tol = tol.pzero;
                    break;
                case CheckKind::series_vs_pzero:
                    c.check = "sop0_vs_pzero";
                    c.lhs = sop(model, 0.0, s.ctrl).value;
                    c.rhs = pzero(model, s.ctrl).value;
                    c.tol = tol.pzero;
                    break;
                case CheckKind::series_vs_oracle: {
                    c.check = "sop_vs_oracle";
                    const SecrecyResult a = eval_sop(model, t.rate, s);
                    c.lhs = a.value;
                    c.rhs = sop_oracle(model, t.rate, s.quad_tol).value;
                    c.tol = tol.oracle;
                    c.note = std::string(method_name(a.method));
                    break;
                }
                case CheckKind::series_vs_mc: {
                    c.check = "sop_vs_mc";
                    c.lhs = eval_sop(model, t.rate, s).value;
                    // each point draws from its own substream
                    const mc::McEstimate e =
                        mc::estimate_sop(model, t.rate, samples, mc::RngSpec{seed, static_cast<std::uint64_t>(idx)});
                    c.rhs = e.mean;
                    const double se = std::max(e.std_err, 1.0 / static_cast<double>(samples));
                    c.tol = tol.mc_sigmas * se;
                    c.note = "std_err=" + format_real(e.std_err);
                    break;
                }
            }
            c.pass = std::abs(c.lhs - c.rhs) <= c.tol;
        } catch (const std::exception& e) {
            c.pass = false;
            c.lhs = c.rhs = kNaN;
            c.note = std::string("error: ") + e.what();
        }
    });
    ValidationReport rep;
    rep.checks = std::move(out);
    return rep;
}

// ---------------------------------------------------------------------------
// command line

namespace {

struct Options {
    ModelFlags model;
    double rate = 0.0;
    double tail_tol = 1e-10;
    int max_terms = 2000;
    double quad_tol = 1e-6;
    std::string method = "series";
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 1;
    std::uint64_t streams = 1;
    unsigned threads = 0;
    std::string out, manifest, plot_script;

    // sop
    std::string formula = "corrected";
    // pnzsc
    bool asymptotic = false;
    // sweep
    std::string var = "rate", quantity = "sop";
    double start = 0.0, stop = 4.0;
    int points = 17;
    // validate
    bool quick = false;
    ValidationTolerances vtol;

    EvalSettings settings() const {
        EvalSettings s;
        s.method = parse_method(method);
        s.ctrl.tail_tol = tail_tol;
        s.ctrl.max_terms = max_terms;
        s.ctrl.validate();
        s.quad_tol = quad_tol;
        if (formula != "corrected" && formula != "as-printed") {
            throw UsageError("unknown formula '" + formula + "' (corrected, as-printed)");
        }
        s.as_printed = formula == "as-printed";
        return s;
    }

    json to_json() const {
        json j = model_json(model);
        j["rate"] = rate;
        j["tail_tol"] = tail_tol;
        j["max_terms"] = max_terms;
        j["quad_tol"] = quad_tol;
        j["method"] = method;
        j["formula"] = formula;
        j["samples"] = samples;
        j["seed"] = seed;
        j["streams"] = streams;
        j["threads"] = threads;
        return j;
    }
};

class Session {
public:
    Session(const Options& o, std::string command, const std::string& config_file, std::vector<std::string> argv)
        : o_(o), command_(std::move(command)), started_(utc_now()) {
        manifest_["tool"] = "wiretap";
        manifest_["version"] = WIRETAP_VERSION;
        manifest_["command"] = command_;
        manifest_["argv"] = std::move(argv);
        manifest_["config_file"] = config_file.empty() ? json(nullptr) : json(config_file);
        manifest_["parameters"] = o.to_json();
        manifest_["seed"] = o.seed;
    }

    json& manifest() { return manifest_; }

    // CSV to --out (plus the manifest next to it) or to stdout
    void emit(const CsvTable& t) {
        const std::string text = t.str();
        if (o_.out.empty()) {
            std::cout << text << std::flush;
            if (!o_.manifest.empty()) write_manifest(o_.manifest);
            return;
        }
        write_text(o_.out, text);
        manifest_["csv"] = o_.out;
        write_manifest(o_.manifest.empty() ? o_.out + ".manifest.json" : o_.manifest);
    }

private:
    void write_manifest(const std::string& path) {
        manifest_["started_utc"] = started_;
        manifest_["finished_utc"] = utc_now();
        write_text(path, manifest_.dump(2) + "\n");
    }

    const Options& o_;
    std::string command_;
    std::string started_;
    json manifest_;
};

int cmd_sop(const Options& o, Session& ses) {
    warn_rho(o.model);
    const SecrecyResult r = eval_sop(o.model.model(), o.rate, o.settings());
    CsvTable t(with_model_header({"rate", "value", "terms_used", "tail_estimate", "method"}));
    auto row = model_cells(o.model);
    row.insert(row.end(), {format_real(o.rate), format_real(r.value), std::to_string(r.terms_used),
                           format_real(r.tail_estimate), std::string(method_name(r.method))});
    t.add_row(row);
    ses.manifest()["points"] = json::array({result_json(r)});
    ses.emit(t);
    return kOk;
}

int cmd_pnzsc(Options o, Session& ses) {
    warn_rho(o.model);
    if (o.asymptotic) o.method = "asymptotic";
    const SecrecyResult r = eval_pzero(o.model.model(), o.settings());
    CsvTable t(with_model_header({"p_zero", "pnzsc", "terms_used", "tail_estimate", "method"}));
    auto row = model_cells(o.model);
    row.insert(row.end(), {format_real(r.value), format_real(1.0 - r.value), std::to_string(r.terms_used),
                           format_real(r.tail_estimate), std::string(method_name(r.method))});
    t.add_row(row);
    ses.manifest()["points"] = json::array({result_json(r)});
    ses.emit(t);
    return kOk;
}

int cmd_mc(const Options& o, Session& ses) {
    warn_rho(o.model);
    if (o.samples < 1) throw UsageError("--samples must be >= 1");
    if (o.streams < 1) throw UsageError("--streams must be >= 1");
    const mc::McEstimate e = mc::estimate_sop_sharded(o.model.model(), o.rate, o.samples, o.seed, o.streams,
                                                      resolve_threads(o.threads));
    CsvTable t(with_model_header({"rate", "mean", "std_err", "samples", "seed", "streams"}));
    auto row = model_cells(o.model);
    row.insert(row.end(), {format_real(o.rate), format_real(e.mean), format_real(e.std_err), std::to_string(e.n),
                           std::to_string(o.seed), std::to_string(e.streams)});
    t.add_row(row);
    ses.manifest()["points"] = json::array({json{{"mean", e.mean}, {"std_err", e.std_err}, {"n", e.n}}});
    ses.emit(t);
    return kOk;
}

std::string plot_script(const Options& o, const SweepSpec& spec, SweepQuantity q, int value_col) {
    std::string stem = o.out;
    if (const auto dot = stem.rfind('.'); dot != std::string::npos && stem.find('/', dot) == std::string::npos) {
        stem.resize(dot);
    }
    std::ostringstream os;
    os << "# gnuplot script for " << o.out << "\n";
    os << "set datafile separator ','\n";
    os << "set terminal pngcairo size 800,600\n";
    os << "set output '" << stem << ".png'\n";
    os << "set xlabel '" << sweep_variable_name(spec.variable) << "'\n";
    if (q == SweepQuantity::sop) {
        os << "set ylabel 'secrecy outage probability'\n";
    } else {
        os << "set ylabel 'P_o(0)'\n";
        os << "set logscale y\n";
    }
    os << "set grid\n";
    os << "plot '" << o.out << "' using 2:" << value_col << " skip 1 with linespoints title '"
       << (q == SweepQuantity::sop ? "SOP" : "P_o(0)") << "'\n";
    return os.str();
}

int cmd_sweep(const Options& o, Session& ses) {
    SweepSpec spec;
    spec.variable = parse_sweep_variable(o.var);
    spec.start = o.start;
    spec.stop = o.stop;
    spec.points = o.points;
    spec.fixed = o.model;
    spec.rate = o.rate;
    spec.validate();
    SweepQuantity q;
    if (o.quantity == "sop") {
        q = SweepQuantity::sop;
    } else if (o.quantity == "pzero" || o.quantity == "pnzsc") {
        q = SweepQuantity::pzero;
    } else {
        throw UsageError("unknown quantity '" + o.quantity + "' (sop, pzero)");
    }
    if (!o.plot_script.empty() && o.out.empty()) throw UsageError("--plot-script needs --out");
    const EvalSettings s = o.settings();
    for (int i = 0; i < spec.points; ++i) warn_rho(spec.flags_at(i));

    const std::vector<SweepPoint> pts = run_sweep(spec, q, s, o.threads);

    std::vector<std::string> tail = {"rate"};
    if (q == SweepQuantity::sop) {
        tail.push_back("sop");
    } else {
        tail.insert(tail.end(), {"p_zero", "pnzsc"});
    }
    tail.insert(tail.end(), {"terms_used", "tail_estimate", "method"});
    std::vector<std::string> header = {"index", sweep_variable_name(spec.variable)};
    for (const auto& h : with_model_header(tail)) header.push_back(h);
    CsvTable t(header);

    json diag = json::array();
    bool failed = false;
    for (const SweepPoint& p : pts) {
        std::vector<std::string> row = {std::to_string(p.index), format_real(p.x)};
        for (auto& c : model_cells(p.flags)) row.push_back(c);
        row.push_back(format_real(p.rate));
        json d = {{"index", p.index}, {"x", p.x}, {"rate", p.rate}, {"model", model_json(p.flags)}};
        if (p.result) {
            row.push_back(format_real(p.result->value));
            if (q == SweepQuantity::pzero) row.push_back(format_real(1.0 - p.result->value));
            row.insert(row.end(), {std::to_string(p.result->terms_used), format_real(p.result->tail_estimate),
                                   std::string(method_name(p.result->method))});
            d.update(result_json(*p.result));
        } else {
            failed = true;
            row.push_back("nan");
            if (q == SweepQuantity::pzero) row.push_back("nan");
            row.insert(row.end(), {"0", "nan", "failed"});
            d["error"] = p.error;
            std::cerr << "error: sweep point " << p.index << ": " << p.error << "\n";
        }
        t.add_row(row);
        diag.push_back(d);
    }
    ses.manifest()["sweep"] = json{{"variable", sweep_variable_name(spec.variable)},
                                   {"start", spec.start},
                                   {"stop", spec.stop},
                                   {"points", spec.points},
                                   {"quantity", q == SweepQuantity::sop ? "sop" : "pzero"}};
    ses.manifest()["points"] = diag;
    ses.emit(t);
    if (!o.plot_script.empty()) {
        const int value_col = static_cast<int>(kModelHeader.size()) + 4;  // index, x, model..., rate, value
        write_text(o.plot_script, plot_script(o, spec, q, value_col));
    }
    return failed ? kNumericFailure : kOk;
}

int cmd_validate(const Options& o, Session& ses) {
    const auto t0 = std::chrono::steady_clock::now();
    const ValidationReport rep = run_validation(o.quick, o.vtol, o.samples, o.seed, o.threads, o.settings());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    int fails = 0;
    for (const auto& c : rep.checks) fails += c.pass ? 0 : 1;
    ses.manifest()["validation"] = json{{"quick", o.quick},
                                        {"oracle_tol", o.vtol.oracle},
                                        {"pzero_tol", o.vtol.pzero},
                                        {"mc_sigmas", o.vtol.mc_sigmas},
                                        {"checks", rep.checks.size()},
                                        {"failures", fails},
                                        {"seconds", secs}};
    ses.emit(rep.table());
    std::cerr << (fails ? "validation FAILED: " : "validation passed: ") << rep.checks.size() - fails << "/"
              << rep.checks.size() << " checks in " << format_real(std::round(secs * 10) / 10) << " s\n";
    return fails ? kValidationFailure : kOk;
}

void add_common_options(CLI::App& app, Options& o) {
    app.add_option("--m1", o.model.m1, "Nakagami m of the legitimate link")->capture_default_str();
    app.add_option("--k1", o.model.k1, "shadowing k of the legitimate link")->capture_default_str();
    app.add_option("--m2", o.model.m2, "Nakagami m of the eavesdropper link")->capture_default_str();
    app.add_option("--k2", o.model.k2, "shadowing k of the eavesdropper link")->capture_default_str();
    app.add_option("--rho", o.model.rho, "shadow correlation in [0, 1)")->capture_default_str();
    app.add_option("--snr-b-db", o.model.snr_b_db, "average SNR of the legitimate link, dB")->capture_default_str();
    app.add_option("--snr-e-db", o.model.snr_e_db, "average SNR of the eavesdropper link, dB")->capture_default_str();
    app.add_option("--rate", o.rate, "target secrecy rate r, bits/s/Hz")->capture_default_str();
    app.add_option("--tail-tol", o.tail_tol, "mixture mass left out by truncation")->capture_default_str();
    app.add_option("--max-terms", o.max_terms, "cap on the truncation order per index")->capture_default_str();
    app.add_option("--quad-tol", o.quad_tol, "absolute tolerance of the 2D oracle")->capture_default_str();
    app.add_option("--method", o.method, "series, oracle or asymptotic")
        ->check(CLI::IsMember({"series", "oracle", "asymptotic"}))
        ->capture_default_str();
    app.add_option("--samples", o.samples, "Monte Carlo sample count")->capture_default_str();
    app.add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--streams", o.streams, "Monte Carlo substreams to pool")->capture_default_str();
    app.add_option("--threads", o.threads, "worker threads, 0 = all cores")->capture_default_str();
    app.add_option("--out", o.out, "write CSV here (manifest goes to FILE.manifest.json)");
    app.add_option("--manifest", o.manifest, "manifest path override");
    app.add_option("--plot-script", o.plot_script, "write a gnuplot script for the sweep CSV");
}

}  // namespace

int run(int argc, char** argv) {
    Options o;
    CLI::App app{"Secrecy outage over correlated composite Nakagami-m/Gamma fading", "wiretap"};
    app.set_version_flag("--version", WIRETAP_VERSION);
    app.set_config("--config", "", "read 'key = value' defaults from this file; flags override it");
    app.require_subcommand(1);
    app.fallthrough();
    add_common_options(app, o);

    auto* sop_cmd = app.add_subcommand("sop", "secrecy outage probability at one point");
    sop_cmd->add_option("--formula", o.formula, "corrected or as-printed")
        ->check(CLI::IsMember({"corrected", "as-printed"}))
        ->capture_default_str();
    auto* pnzsc_cmd = app.add_subcommand("pnzsc", "P_o(0) and the probability of non-zero secrecy capacity");
    pnzsc_cmd->add_flag("--asymptotic", o.asymptotic, "high-SNR closed form");
    app.add_subcommand("mc", "Monte Carlo estimate of the secrecy outage probability");
    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate over a range of one parameter");
    sweep_cmd->add_option("--var", o.var, "rate, snr_b_db, rho, k or m")->capture_default_str();
    sweep_cmd->add_option("--start", o.start)->capture_default_str();
    sweep_cmd->add_option("--stop", o.stop)->capture_default_str();
    sweep_cmd->add_option("--points", o.points)->capture_default_str();
    sweep_cmd->add_option("--quantity", o.quantity, "sop or pzero")->capture_default_str();
    auto* val_cmd = app.add_subcommand("validate", "series vs oracle vs Monte Carlo cross-checks");
    val_cmd->add_flag("--quick", o.quick, "small grid");
    val_cmd->add_option("--oracle-tol", o.vtol.oracle)->capture_default_str();
    val_cmd->add_option("--pzero-tol", o.vtol.pzero)->capture_default_str();
    val_cmd->add_option("--mc-sigmas", o.vtol.mc_sigmas)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    std::vector<std::string> args(argv, argv + argc);
    std::string config_file;
    if (auto* c = app.get_config_ptr(); c && c->count() > 0) config_file = c->as<std::string>();

    std::string name = app.get_subcommands().front()->get_name();
    try {
        Session ses(o, name, config_file, args);
        if (name == "sop") return cmd_sop(o, ses);
        if (name == "pnzsc") return cmd_pnzsc(o, ses);
        if (name == "mc") return cmd_mc(o, ses);
        if (name == "sweep") return cmd_sweep(o, ses);
        if (name == "validate") return cmd_validate(o, ses);
        throw UsageError("unknown command " + name);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const DomainError& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kUsageError;
    } catch (const UnsupportedParameters& e) {
        std::cerr << "unsupported parameters: " << e.what() << "\n";
        return kUsageError;
    } catch (const PrecisionError& e) {
        std::cerr << "numeric failure: " << e.what() << " (partial value " << format_real(e.partial_value())
                  << ", error estimate " << format_real(e.error_estimate()) << ")\n";
        return kNumericFailure;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumericFailure;
    }
}

}  // namespace wiretap::cli
