#include "critprog/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "critprog/error.hpp"
#include "critprog/experiment.hpp"
#include "critprog/forecast.hpp"
#include "critprog/matrix.hpp"
#include "critprog/recognizer.hpp"
#include "critprog/report.hpp"
#include "critprog/synthgen.hpp"

namespace critprog::cli {

namespace {

// Bad flag value; reported with the flag name and exit code 1.
struct UsageError {
    std::string flag;
    std::string message;
};

struct EvalOptions {
    std::string input;
    double threshold = 0.0;
    CLI::Option* threshold_opt = nullptr;
    bool select_threshold = false;
    std::size_t min_critical = 2;
    std::string quorum = "0.75";
    std::string factors;
    int lag = 0;
    double widen_eps = 0.0;
    std::string format = "text";
    std::string output;
};

struct FitOptions : EvalOptions {
    std::string profile_out;
};

struct BacktestOptions : EvalOptions {
    std::string mode = "rolling";
    std::size_t min_train_years = 5;
};

struct SweepOptions : BacktestOptions {
    std::string axis;
    std::string grid;
};

struct ClassifyOptions {
    std::string profile;
    std::string input;
    std::string format = "text";
    std::string output;
};

struct SynthOptions {
    std::uint64_t seed = 1;
    std::size_t years = 30;
    std::size_t factors = 8;
    std::size_t decoys = 0;
    double noise = 0.0;
    std::string preset;
    CLI::Option* noise_opt = nullptr;
    double critical_fraction = 0.3;
    int lag_shift = 0;
    int regime_change = 0;
    CLI::Option* regime_opt = nullptr;
    double threshold = 100.0;
    int first_year = 1990;
    std::string output;
    std::string truth;
};

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        auto piece = text.substr(start, pos == std::string_view::npos ? text.size() - start : pos - start);
        while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
        while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
        out.emplace_back(piece);
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& bytes, std::ostream& out) {
    if (path.empty()) {
        out << bytes;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    f << bytes;
    if (!f) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
}

template <class F>
auto as_usage(std::string flag, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw UsageError{std::move(flag), e.what()};
    }
}

ReportFormat format_flag(const std::string& v) {
    return as_usage("--format", [&] { return parse_report_format(v); });
}

QuorumRule quorum_flag(const std::string& v) {
    return as_usage("--quorum", [&] { return parse_quorum(v); });
}

template <class T>
T number_flag(const std::string& flag, std::string_view text) {
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw UsageError{flag, "cannot read '" + std::string(text) + "'"};
    return v;
}

void add_eval_options(CLI::App* sub, EvalOptions& o, bool threshold_required) {
    sub->add_option("--input", o.input, "matrix CSV (year,incidence,<factor>...)")->required();
    o.threshold_opt = sub->add_option("--threshold", o.threshold, "critical incidence threshold");
    auto* sel = sub->add_flag("--select-threshold", o.select_threshold,
                              "largest observed incidence leaving >= --min-critical critical years");
    o.threshold_opt->excludes(sel);
    if (threshold_required) {
        auto* group = sub->add_option_group("threshold");
        group->add_option(o.threshold_opt);
        group->add_option(sel);
        group->require_option(1);
    }
    sub->add_option("--min-critical", o.min_critical, "minimum critical years (>= 2)")
        ->capture_default_str();
    sub->add_option("--quorum", o.quorum, "fraction in (0,1] or percent, e.g. 75%")
        ->capture_default_str();
    sub->add_option("--factors", o.factors, "comma-separated factor names (default all)");
    sub->add_option("--lag", o.lag, "lag applied to every selected factor")->capture_default_str();
    sub->add_option("--widen-eps", o.widen_eps, "absolute interval widening")->capture_default_str();
    sub->add_option("--format", o.format, "text|json|plot_csv")->capture_default_str();
    sub->add_option("--output", o.output, "write the report here instead of stdout");
}

void add_backtest_options(CLI::App* sub, BacktestOptions& o) {
    sub->add_option("--mode", o.mode, "rolling|leave_one_out|in_sample")->capture_default_str();
    sub->add_option("--min-train-years", o.min_train_years, "first rolling origin")
        ->capture_default_str();
}

// Matrix after factor selection and lag, its labels, and the config echo.
struct Prepared {
    std::string digest;
    TemporalMatrix matrix;
    FactorSelection selection;
    CriticalThreshold threshold;
    CriticalLabels labels;
    std::vector<std::pair<std::string, std::string>> echo;
};

Prepared prepare(const EvalOptions& o, bool need_threshold) {
    if (o.lag < 0) throw UsageError{"--lag", "must be >= 0"};
    if (o.min_critical < 2) throw UsageError{"--min-critical", "must be >= 2"};
    if (!(o.widen_eps >= 0.0)) throw UsageError{"--widen-eps", "must be >= 0"};

    const auto text = read_file(o.input);
    auto m = parse_matrix(text);
    auto selection = o.factors.empty() ? FactorSelection::all(m) : FactorSelection(split(o.factors, ','));
    selection.resolve(m);
    if (o.lag > 0) {
        std::vector<FactorLag> lags;
        for (const auto& n : selection.names()) lags.push_back({n, o.lag});
        m = apply_lags(m, lags);
    }

    CriticalThreshold threshold;
    if (o.select_threshold)
        threshold = select_threshold(m, o.min_critical);
    else if (o.threshold_opt->count() > 0)
        threshold = as_usage("--threshold", [&] { return CriticalThreshold::expert(o.threshold); });
    else if (need_threshold)
        throw UsageError{"--threshold", "one of --threshold or --select-threshold is required"};
    auto labels = label_critical(m, threshold);

    std::string factor_list;
    for (const auto& n : selection.names()) factor_list += (factor_list.empty() ? "" : ",") + n;
    std::vector<std::pair<std::string, std::string>> echo;
    if (o.select_threshold || o.threshold_opt->count() > 0) {
        echo.emplace_back("threshold", format_real(threshold.value));
        echo.emplace_back("threshold_source",
                          threshold.source == ThresholdSource::expert ? "expert" : "selected");
    }
    echo.emplace_back("min_critical", std::to_string(o.min_critical));
    echo.emplace_back("quorum", format_real(quorum_flag(o.quorum).q()));
    echo.emplace_back("factors", factor_list);
    echo.emplace_back("lag", std::to_string(o.lag));
    echo.emplace_back("widen_eps", format_real(o.widen_eps));

    return {digest_bytes(text), std::move(m), std::move(selection), threshold, std::move(labels),
            std::move(echo)};
}

BacktestConfig backtest_config(const BacktestOptions& o, const Prepared& p) {
    BacktestConfig cfg;
    cfg.rule = quorum_flag(o.quorum);
    cfg.threshold = p.threshold;
    cfg.min_train_critical = o.min_critical;
    cfg.min_train_years = o.min_train_years;
    cfg.mode = as_usage("--mode", [&] { return parse_eval_mode(o.mode); });
    cfg.widen_eps = o.widen_eps;
    if (cfg.min_train_years < 3) throw UsageError{"--min-train-years", "must be >= 3"};
    return cfg;
}

int do_fit(const FitOptions& o, std::ostream& out) {
    const auto format = format_flag(o.format);
    const auto rule = quorum_flag(o.quorum);
    auto p = prepare(o, true);
    if (p.labels.n_critical() < o.min_critical)
        throw Error(ErrorCode::InsufficientCriticalYears,
                    "threshold " + format_real(p.threshold.value) + " marks " +
                        std::to_string(p.labels.n_critical()) + " critical years, need at least " +
                        std::to_string(o.min_critical));

    FitReport report;
    report.model.profile = build_profile(p.matrix, p.labels, p.selection, o.widen_eps);
    report.model.rule = rule;
    report.model.threshold = p.threshold;
    report.model.first_train_year = p.matrix.years().front();
    report.model.last_train_year = p.matrix.years().back();
    report.n_critical = p.labels.n_critical();
    report.result = evaluate_insample(p.matrix, p.labels, report.model.profile, rule);

    if (!o.profile_out.empty()) write_output(o.profile_out, profile_to_json(report.model), out);
    const ReportDocument doc{{"fit", p.digest, p.echo}, std::move(report)};
    write_output(o.output, emit_report(doc, format), out);
    return kOk;
}

int do_backtest(const BacktestOptions& o, std::ostream& out) {
    const auto format = format_flag(o.format);
    auto p = prepare(o, true);
    const auto cfg = backtest_config(o, p);
    p.echo.emplace_back("mode", std::string(to_string(cfg.mode)));
    p.echo.emplace_back("min_train_years", std::to_string(cfg.min_train_years));
    auto result = rolling_backtest(p.matrix, p.labels, p.selection, cfg);
    const ReportDocument doc{{"backtest", p.digest, p.echo}, std::move(result)};
    write_output(o.output, emit_report(doc, format), out);
    return kOk;
}

SweepGrid parse_grid(SweepAxis axis, const std::string& text) {
    switch (axis) {
        case SweepAxis::factor_subset: {
            if (text.empty() || text == "all") return SubsetGrid{AllSubsets{}};
            std::vector<FactorSelection> grid;
            for (const auto& piece : split(text, ';'))
                grid.push_back(as_usage("--grid", [&] { return FactorSelection(split(piece, '+')); }));
            return SubsetGrid{std::move(grid)};
        }
        case SweepAxis::quorum: {
            if (text.empty()) throw UsageError{"--grid", "quorum sweep needs a grid"};
            std::vector<double> grid;
            for (const auto& piece : split(text, ','))
                grid.push_back(as_usage("--grid", [&] { return parse_quorum(piece).q(); }));
            return grid;
        }
        case SweepAxis::threshold: {
            if (text.empty()) throw UsageError{"--grid", "threshold sweep needs a grid"};
            std::vector<double> grid;
            for (const auto& piece : split(text, ',')) grid.push_back(number_flag<double>("--grid", piece));
            return grid;
        }
        case SweepAxis::lag:
        case SweepAxis::row_length: {
            if (text.empty()) throw UsageError{"--grid", "sweep needs a grid"};
            std::vector<int> grid;
            for (const auto& piece : split(text, ',')) grid.push_back(number_flag<int>("--grid", piece));
            return grid;
        }
    }
    throw UsageError{"--axis", "unknown axis"};
}

int do_sweep(const SweepOptions& o, std::ostream& out) {
    const auto format = format_flag(o.format);
    const auto axis = as_usage("--axis", [&] { return parse_sweep_axis(o.axis); });
    auto grid = parse_grid(axis, o.grid);
    auto p = prepare(o, axis != SweepAxis::threshold);
    const auto cfg = backtest_config(o, p);
    p.echo.emplace_back("mode", std::string(to_string(cfg.mode)));
    p.echo.emplace_back("min_train_years", std::to_string(cfg.min_train_years));
    p.echo.emplace_back("axis", std::string(to_string(axis)));
    p.echo.emplace_back("grid", o.grid.empty() ? "all" : o.grid);
    const SweepSpec spec{axis, std::move(grid), SweepBase{cfg, p.selection}};
    auto report = run_sweep(p.matrix, p.labels, spec);
    const ReportDocument doc{{"sweep", p.digest, p.echo}, std::move(report)};
    write_output(o.output, emit_report(doc, format), out);
    return kOk;
}

int do_classify(const ClassifyOptions& o, std::ostream& out) {
    const auto format = format_flag(o.format);
    const auto profile_text = read_file(o.profile);
    const auto model = profile_from_json(profile_text);
    const auto rows_text = read_file(o.input);
    const auto rows = parse_factor_rows(rows_text);
    ClassifyReport report{model, classify_rows(model.profile, model.rule, model.threshold, rows)};
    std::vector<std::pair<std::string, std::string>> echo{
        {"profile_digest", digest_bytes(profile_text)},
        {"quorum", format_real(model.rule.q())},
        {"threshold", format_real(model.threshold.value)},
    };
    const ReportDocument doc{{"classify", digest_bytes(rows_text), std::move(echo)}, std::move(report)};
    write_output(o.output, emit_report(doc, format), out);
    return kOk;
}

int do_synth(const SynthOptions& o, std::ostream& out) {
    PlantSpec spec;
    if (!o.preset.empty()) {
        if (o.preset == "south")
            spec = PlantSpec::region(RegionPreset::south, o.seed);
        else if (o.preset == "middle")
            spec = PlantSpec::region(RegionPreset::middle, o.seed);
        else if (o.preset == "north")
            spec = PlantSpec::region(RegionPreset::north, o.seed);
        else
            throw UsageError{"--preset", "expected south|middle|north"};
    }
    spec.seed = o.seed;
    spec.n_years = o.years;
    spec.n_factors = o.factors;
    spec.n_decoy_factors = o.decoys;
    if (o.noise_opt->count() > 0 || o.preset.empty()) spec.noise_prob = o.noise;
    spec.critical_fraction = o.critical_fraction;
    spec.lag_shift = o.lag_shift;
    if (o.regime_opt->count() > 0) spec.regime_change_year = o.regime_change;
    spec.threshold = o.threshold;
    spec.first_year = o.first_year;
    try {
        spec.validate();
    } catch (const Error& e) {
        static constexpr std::pair<std::string_view, std::string_view> fields[] = {
            {"n_years", "--years"},         {"n_factors", "--factors"},
            {"too many", "--decoys"},       {"critical_fraction", "--critical-fraction"},
            {"noise_prob", "--noise"},      {"lag_shift", "--lag-shift"},
            {"threshold", "--threshold"},
        };
        std::string_view what = e.what();
        what.remove_prefix(std::min(what.size(), to_string(e.code()).size() + 2));
        std::string flag = "synth";
        for (const auto& [field, name] : fields)
            if (what.starts_with(field)) {
                flag = name;
                break;
            }
        throw UsageError{flag, e.what()};
    }

    const auto data = generate(spec);
    write_output(o.output, serialize_matrix(data.matrix), out);
    if (!o.truth.empty()) write_output(o.truth, serialize_truth(data.truth), out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Forecast critical years from per-factor value intervals", "critprog"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "build intervals and evaluate in-sample");
    add_eval_options(fit_cmd, fit, true);
    fit_cmd->add_option("--profile-out", fit.profile_out, "save the trained profile as JSON");

    ClassifyOptions cls;
    auto* cls_cmd = app.add_subcommand("classify", "apply a saved profile to new factor rows");
    cls_cmd->add_option("--profile", cls.profile, "profile JSON written by fit")->required();
    cls_cmd->add_option("--input", cls.input, "CSV year[,incidence],<factor>...")->required();
    cls_cmd->add_option("--format", cls.format, "text|json|plot_csv")->capture_default_str();
    cls_cmd->add_option("--output", cls.output, "write the report here instead of stdout");

    BacktestOptions bt;
    auto* bt_cmd = app.add_subcommand("backtest", "rolling-origin forecast of each next year");
    add_eval_options(bt_cmd, bt, true);
    add_backtest_options(bt_cmd, bt);

    SweepOptions sw;
    auto* sw_cmd = app.add_subcommand("sweep", "evaluate a grid along one axis");
    add_eval_options(sw_cmd, sw, false);
    add_backtest_options(sw_cmd, sw);
    sw_cmd->add_option("--axis", sw.axis, "factor_subset|quorum|threshold|lag|row_length")->required();
    sw_cmd->add_option("--grid", sw.grid,
                       "comma list; factor_subset takes 'all' or 'a+b;c'");

    SynthOptions syn;
    auto* syn_cmd = app.add_subcommand("synth", "write a synthetic dataset with planted intervals");
    syn_cmd->add_option("--seed", syn.seed)->capture_default_str();
    syn_cmd->add_option("--years", syn.years)->capture_default_str();
    syn_cmd->add_option("--factors", syn.factors, "informative factor count")->capture_default_str();
    syn_cmd->add_option("--decoys", syn.decoys, "uninformative factor count")->capture_default_str();
    syn.noise_opt = syn_cmd->add_option("--noise", syn.noise, "per-cell escape/entry probability");
    syn_cmd->add_option("--preset", syn.preset, "south|middle|north noise preset");
    syn_cmd->add_option("--critical-fraction", syn.critical_fraction)->capture_default_str();
    syn_cmd->add_option("--lag-shift", syn.lag_shift, "factors lead incidence by this many years")
        ->capture_default_str();
    syn.regime_opt = syn_cmd->add_option("--regime-change", syn.regime_change,
                                         "first year of the planted rule");
    syn_cmd->add_option("--threshold", syn.threshold, "planted critical threshold")
        ->capture_default_str();
    syn_cmd->add_option("--first-year", syn.first_year)->capture_default_str();
    syn_cmd->add_option("--output", syn.output, "matrix CSV path (stdout when absent)");
    syn_cmd->add_option("--truth", syn.truth, "ground-truth CSV path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (fit_cmd->parsed()) return do_fit(fit, out);
        if (cls_cmd->parsed()) return do_classify(cls, out);
        if (bt_cmd->parsed()) return do_backtest(bt, out);
        if (sw_cmd->parsed()) return do_sweep(sw, out);
        if (syn_cmd->parsed()) return do_synth(syn, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.flag << ": " << e.message << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}

}  // namespace critprog::cli
