#include <charconv>
#include <cmath>
#include <system_error>

#include "wiretap/cli.hpp"

namespace wiretap::cli {

std::string format_real(double x) {
    char buf[64];
    // same as %.12g but never touches the C locale
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
    return std::string(buf, r.ptr);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::logic_error("CsvTable: row width differs from header");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) out += ',';
            out += cells[c];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

WiretapModel ModelFlags::model() const {
    WiretapModel w;
    w.link_b = LinkParams{m1, k1, db_to_linear(snr_b_db)};
    w.link_e = LinkParams{m2, k2, db_to_linear(snr_e_db)};
    w.rho = rho;
    return w;
}

EvalMethod parse_method(const std::string& s) {
    if (s == "series") return EvalMethod::series;
    if (s == "oracle") return EvalMethod::oracle;
    if (s == "asymptotic") return EvalMethod::asymptotic;
    throw UsageError("unknown method '" + s + "' (series, oracle, asymptotic)");
}

std::string method_flag(EvalMethod m) {
    switch (m) {
        case EvalMethod::series: return "series";
        case EvalMethod::oracle: return "oracle";
        case EvalMethod::asymptotic: return "asymptotic";
    }
    return "?";
}

SweepVariable parse_sweep_variable(const std::string& s) {
    if (s == "rate") return SweepVariable::rate;
    if (s == "snr_b_db" || s == "snr-b-db") return SweepVariable::snr_b_db;
    if (s == "rho") return SweepVariable::rho;
    if (s == "k") return SweepVariable::k;
    if (s == "m") return SweepVariable::m;
    throw UsageError("unknown sweep variable '" + s + "' (rate, snr_b_db, rho, k, m)");
}

std::string sweep_variable_name(SweepVariable v) {
    switch (v) {
        case SweepVariable::rate: return "rate";
        case SweepVariable::snr_b_db: return "snr_b_db";
        case SweepVariable::rho: return "rho";
        case SweepVariable::k: return "k";
        case SweepVariable::m: return "m";
    }
    return "?";
}

void SweepSpec::validate() const {
    if (!(start < stop)) throw UsageError("sweep: need start < stop");
    if (points < 2) throw UsageError("sweep: need at least 2 points");
}

double SweepSpec::value_at(int index) const {
    // last point exactly at stop, no accumulated drift
    if (index == points - 1) return stop;
    return start + (stop - start) * static_cast<double>(index) / static_cast<double>(points - 1);
}

ModelFlags SweepSpec::flags_at(int index) const {
    ModelFlags f = fixed;
    const double x = value_at(index);
    switch (variable) {
        case SweepVariable::rate: break;
        case SweepVariable::snr_b_db: f.snr_b_db = x; break;
        case SweepVariable::rho: f.rho = x; break;
        case SweepVariable::k: f.k1 = f.k2 = x; break;
        case SweepVariable::m: f.m1 = f.m2 = x; break;
    }
    return f;
}

double SweepSpec::rate_at(int index) const { return variable == SweepVariable::rate ? value_at(index) : rate; }

}  // namespace wiretap::cli
