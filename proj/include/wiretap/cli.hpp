#pragma once

// Command-line front end: argument model, CSV/manifest formatting, sweeps and
// the cross-validation matrix. The executable in tools/ only calls run().

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/secrecy.hpp"

namespace wiretap::cli {

enum ExitCode : int { kOk = 0, kNumericFailure = 1, kUsageError = 2, kValidationFailure = 3 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest-free, locale-independent rendering with 12 significant digits.
std::string format_real(double x);
double db_to_linear(double db);
double linear_to_db(double lin);

/// Comma-separated, '\n' line endings, one header row.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<std::string> cells);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Model as entered on the command line: SNRs in dB.
struct ModelFlags {
    double m1 = 1.0, k1 = 1.0, m2 = 1.0, k2 = 1.0;
    double rho = 0.0;
    double snr_b_db = 0.0, snr_e_db = 0.0;

    WiretapModel model() const;
};

enum class EvalMethod { series, oracle, asymptotic };
EvalMethod parse_method(const std::string& s);
std::string method_flag(EvalMethod m);

struct EvalSettings {
    EvalMethod method = EvalMethod::series;
    SeriesControl ctrl;
    double quad_tol = 1e-6;
    bool as_printed = false;  // sop only: the link-exchanged closed form
};

/// P_o(r) by the requested route.
SecrecyResult eval_sop(const WiretapModel& model, double rate, const EvalSettings& s);
/// P_o(0) by the requested route.
SecrecyResult eval_pzero(const WiretapModel& model, const EvalSettings& s);

enum class SweepVariable { rate, snr_b_db, rho, k, m };
SweepVariable parse_sweep_variable(const std::string& s);
std::string sweep_variable_name(SweepVariable v);

enum class SweepQuantity { sop, pzero };

struct SweepSpec {
    SweepVariable variable = SweepVariable::rate;
    double start = 0.0, stop = 1.0;
    int points = 2;
    ModelFlags fixed;   // the swept field is ignored
    double rate = 0.0;  // ignored when variable == rate

    void validate() const;
    double value_at(int index) const;
    /// Fixed parameters with the swept one set; k and m set both links.
    ModelFlags flags_at(int index) const;
    double rate_at(int index) const;
};

struct SweepPoint {
    int index = 0;
    double x = 0.0;
    ModelFlags flags;
    double rate = 0.0;
    std::optional<SecrecyResult> result;
    std::string error;  // set when the point failed
};

/// Points run concurrently on up to `threads` workers; the returned vector is
/// in sweep order regardless of completion order.
std::vector<SweepPoint> run_sweep(const SweepSpec& spec, SweepQuantity q, const EvalSettings& s, unsigned threads);

struct ValidationTolerances {
    double oracle = 1e-3;    // |sop - sop_oracle|
    double pzero = 1e-4;     // |sop(r=0) - pzero| and |pzero - 1/2| on symmetric points
    double mc_sigmas = 3.0;  // |sop - mc| in units of the MC standard error
};

struct ValidationCheck {
    std::string point;
    std::string check;
    double lhs = 0.0, rhs = 0.0, tol = 0.0;
    bool pass = false;
    std::string note;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool passed() const;
    CsvTable table() const;
};

/// Series vs oracle vs Monte Carlo over a fixed grid; `quick` runs a subset
/// sized for well under a minute on one core.
ValidationReport run_validation(bool quick, const ValidationTolerances& tol, std::uint64_t samples,
                                std::uint64_t seed, unsigned threads, const EvalSettings& s);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv);

}  // namespace wiretap::cli
