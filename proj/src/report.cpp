#include "critprog/report.hpp"

#include <algorithm>
#include <cstdio>

#include "critprog/error.hpp"
#include "json.hpp"

namespace critprog {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kProfileKind = "critprog.profile";
constexpr int kProfileVersion = 1;

std::string_view source_name(ThresholdSource s) {
    return s == ThresholdSource::expert ? "expert" : "selected";
}

ojson optional_real(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::string text_real(const std::optional<double>& v) { return v ? format_real(*v) : "undefined"; }

ojson years_json(const std::vector<int>& years) {
    ojson a = ojson::array();
    for (int y : years) a.push_back(y);
    return a;
}

ojson profile_json(const SavedProfile& s) {
    ojson j;
    j["kind"] = kProfileKind;
    j["version"] = kProfileVersion;
    j["quorum"] = s.rule.q();
    j["threshold"] = s.threshold.value;
    j["threshold_source"] = source_name(s.threshold.source);
    j["n_critical_train"] = s.profile.n_critical_train;
    j["train_years"] = ojson::array({s.first_train_year, s.last_train_year});
    ojson ivs = ojson::array();
    for (const auto& iv : s.profile.intervals) {
        ojson e;
        e["factor"] = iv.factor;
        e["lo"] = iv.lo;
        e["hi"] = iv.hi;
        e["widen_eps"] = iv.widen_eps;
        ivs.push_back(std::move(e));
    }
    j["intervals"] = std::move(ivs);
    return j;
}

ojson verdicts_json(const BacktestResult& r) {
    ojson j;
    j["x"] = r.x;
    j["y"] = r.y;
    j["p"] = optional_real(r.p);
    j["n_no_forecast"] = r.n_no_forecast;
    ojson vs = ojson::array();
    for (const auto& v : r.verdicts) {
        ojson e;
        e["year"] = v.year;
        e["prediction"] = to_string(v.prediction);
        e["membership"] = v.membership ? ojson(*v.membership) : ojson(nullptr);
        e["truth"] = v.truth ? ojson(*v.truth) : ojson(nullptr);
        vs.push_back(std::move(e));
    }
    j["verdicts"] = std::move(vs);
    return j;
}

ojson body_json(const FitReport& r) {
    ojson j;
    j["profile"] = profile_json(r.model);
    ojson rec;
    rec["n_critical"] = r.n_critical;
    rec["x"] = r.result.x;
    rec["y"] = r.result.y;
    rec["p"] = optional_real(r.result.p);
    rec["flagged_years"] = years_json(r.result.flagged_years);
    ojson mem = ojson::array();
    for (const auto& m : r.result.membership) mem.push_back(ojson::array({m.year, m.count}));
    rec["membership"] = std::move(mem);
    j["recognition"] = std::move(rec);
    return j;
}

ojson body_json(const ClassifyReport& r) {
    ojson j;
    j["profile"] = profile_json(r.model);
    j["classification"] = verdicts_json(r.result);
    return j;
}

ojson body_json(const BacktestResult& r) {
    ojson j;
    j["backtest"] = verdicts_json(r);
    return j;
}

ojson body_json(const SweepReport& r) {
    ojson rows = ojson::array();
    for (const auto& row : r.rows) {
        ojson e;
        const bool ok = row.status == RowStatus::ok;
        e["configuration"] = row.configuration;
        e["status"] = ok ? "ok" : "skipped";
        e["skip_reason"] = ok ? ojson(nullptr) : ojson(row.skip_reason);
        e["x"] = ok ? ojson(row.x) : ojson(nullptr);
        e["y"] = ok ? ojson(row.y) : ojson(nullptr);
        e["p"] = optional_real(row.p);
        e["n_no_forecast"] = ok ? ojson(row.n_no_forecast) : ojson(nullptr);
        e["flagged_years"] = years_json(row.flagged_years);
        rows.push_back(std::move(e));
    }
    ojson sweep;
    sweep["axis"] = to_string(r.axis);
    sweep["rows"] = std::move(rows);
    ojson j;
    j["sweep"] = std::move(sweep);
    return j;
}

// Fixed-width table: first column left-aligned, the rest right-aligned.
class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void render(std::string& out, std::string_view indent = "  ") const {
        std::vector<std::size_t> width;
        for (const auto& r : rows_) {
            width.resize(std::max(width.size(), r.size()), 0);
            for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
        }
        for (const auto& r : rows_) {
            std::string line{indent};
            for (std::size_t c = 0; c < r.size(); ++c) {
                const std::string pad(width[c] - r[c].size(), ' ');
                if (c > 0) line += "  ";
                line += c == 0 ? r[c] + pad : pad + r[c];
            }
            while (!line.empty() && line.back() == ' ') line.pop_back();
            out += line;
            out += '\n';
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

void text_profile(std::string& out, const SavedProfile& s) {
    out += "profile\n";
    out += "  quorum " + format_real(s.rule.q()) + "  threshold " + format_real(s.threshold.value) +
           " (" + std::string(source_name(s.threshold.source)) + ")  critical training years " +
           std::to_string(s.profile.n_critical_train) + "  train years " +
           std::to_string(s.first_train_year) + "-" + std::to_string(s.last_train_year) + "\n";
    Table t({"factor", "lo", "hi", "widen_eps"});
    for (const auto& iv : s.profile.intervals)
        t.add({iv.factor, format_real(iv.lo), format_real(iv.hi), format_real(iv.widen_eps)});
    t.render(out);
}

void text_verdicts(std::string& out, const BacktestResult& r) {
    out += "  x " + std::to_string(r.x) + "  y " + std::to_string(r.y) + "  p " + text_real(r.p) +
           "  no_forecast " + std::to_string(r.n_no_forecast) + "\n";
    Table t({"year", "prediction", "membership", "truth"});
    for (const auto& v : r.verdicts)
        t.add({std::to_string(v.year), std::string(to_string(v.prediction)),
               v.membership ? std::to_string(*v.membership) : "-",
               v.truth ? (*v.truth ? "critical" : "non_critical") : "-"});
    t.render(out);
}

void body_text(std::string& out, const FitReport& r) {
    text_profile(out, r.model);
    out += "recognition\n";
    out += "  critical years " + std::to_string(r.n_critical) + "  x " + std::to_string(r.result.x) +
           "  y " + std::to_string(r.result.y) + "  p " + text_real(r.result.p) + "\n";
    const std::size_t need = r.model.rule.required(r.model.profile.n_factors());
    Table t({"year", "membership", "flagged"});
    for (const auto& m : r.result.membership)
        t.add({std::to_string(m.year), std::to_string(m.count), m.count >= need ? "yes" : "no"});
    t.render(out);
}

void body_text(std::string& out, const ClassifyReport& r) {
    text_profile(out, r.model);
    out += "classification\n";
    text_verdicts(out, r.result);
}

void body_text(std::string& out, const BacktestResult& r) {
    out += "backtest\n";
    text_verdicts(out, r);
}

void body_text(std::string& out, const SweepReport& r) {
    out += "sweep " + std::string(to_string(r.axis)) + "\n";
    Table t({"configuration", "status", "x", "y", "p", "no_forecast"});
    for (const auto& row : r.rows) {
        if (row.status == RowStatus::skipped) {
            t.add({row.configuration, "skipped", "-", "-", "undefined", "-"});
            continue;
        }
        t.add({row.configuration, "ok", std::to_string(row.x), std::to_string(row.y),
               text_real(row.p), std::to_string(row.n_no_forecast)});
    }
    t.render(out);
    for (const auto& row : r.rows)
        if (row.status == RowStatus::skipped)
            out += "  skipped " + row.configuration + ": " + row.skip_reason + "\n";
}

std::string plot_label(const SavedProfile& s) {
    return "q=" + format_real(s.rule.q()) + " c=" + format_real(s.threshold.value);
}

std::string config_value(const RunMetadata& meta, std::string_view key) {
    for (const auto& [k, v] : meta.config)
        if (k == key) return v;
    return {};
}

std::string plot_cell(const std::optional<double>& p) { return p ? format_real(*p) : ""; }

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
    if (text == "text") return ReportFormat::text;
    if (text == "json") return ReportFormat::json;
    if (text == "plot_csv") return ReportFormat::plot_csv;
    throw Error(ErrorCode::InvalidConfig, "unknown format '" + std::string(text) + "'");
}

std::string profile_to_json(const SavedProfile& saved) { return profile_json(saved).dump(2) + "\n"; }

SavedProfile profile_from_json(std::string_view text) {
    try {
        const auto j = ojson::parse(text);
        if (j.at("kind").get<std::string>() != kProfileKind)
            throw Error(ErrorCode::InvalidProfile, "not a critprog profile");
        if (j.at("version").get<int>() != kProfileVersion)
            throw Error(ErrorCode::InvalidProfile, "unsupported profile version");
        SavedProfile s;
        s.rule = QuorumRule(j.at("quorum").get<double>());
        const auto src = j.at("threshold_source").get<std::string>();
        const double c = j.at("threshold").get<double>();
        if (src == "expert")
            s.threshold = CriticalThreshold::expert(c);
        else if (src == "selected")
            s.threshold = CriticalThreshold::selected(c);
        else
            throw Error(ErrorCode::InvalidProfile, "unknown threshold_source '" + src + "'");
        s.profile.n_critical_train = j.at("n_critical_train").get<std::size_t>();
        const auto& span = j.at("train_years");
        s.first_train_year = span.at(0).get<int>();
        s.last_train_year = span.at(1).get<int>();
        for (const auto& e : j.at("intervals")) {
            FactorInterval iv{e.at("factor").get<std::string>(), e.at("lo").get<double>(),
                              e.at("hi").get<double>(), e.at("widen_eps").get<double>()};
            if (!(iv.lo <= iv.hi) || !(iv.widen_eps >= 0.0))
                throw Error(ErrorCode::InvalidProfile, "bad interval for '" + iv.factor + "'");
            s.profile.intervals.push_back(std::move(iv));
        }
        if (s.profile.intervals.empty())
            throw Error(ErrorCode::InvalidProfile, "profile has no intervals");
        if (s.profile.n_critical_train == 0)
            throw Error(ErrorCode::InvalidProfile, "profile was trained on no critical years");
        return s;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidProfile) throw;
        throw Error(ErrorCode::InvalidProfile, e.what());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidProfile, e.what());
    }
}

std::string digest_bytes(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string emit_report(const ReportDocument& doc, ReportFormat format) {
    const auto& meta = doc.meta;
    switch (format) {
        case ReportFormat::json: {
            ojson j;
            j["tool"] = "critprog";
            j["version"] = kToolVersion;
            j["command"] = meta.command;
            j["input_digest"] = meta.input_digest;
            ojson cfg = ojson::object();
            for (const auto& [k, v] : meta.config) cfg[k] = v;
            j["config"] = std::move(cfg);
            ojson body = std::visit([](const auto& b) { return body_json(b); }, doc.body);
            for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
            return j.dump(2) + "\n";
        }
        case ReportFormat::text: {
            std::string out = "critprog " + std::string(kToolVersion) + " " + meta.command + "\n";
            out += "input " + meta.input_digest + "\n";
            out += "config";
            for (const auto& [k, v] : meta.config) out += " " + k + "=" + v;
            out += "\n";
            std::visit([&](const auto& b) { body_text(out, b); }, doc.body);
            return out;
        }
        case ReportFormat::plot_csv: {
            std::string out = "configuration,status,p\n";
            auto line = [&](const std::string& label, std::string_view status,
                            const std::optional<double>& p) {
                out += label + "," + std::string(status) + "," + plot_cell(p) + "\n";
            };
            std::visit(
                [&](const auto& b) {
                    using T = std::decay_t<decltype(b)>;
                    if constexpr (std::is_same_v<T, FitReport>) {
                        line(plot_label(b.model), "ok", b.result.p);
                    } else if constexpr (std::is_same_v<T, ClassifyReport>) {
                        line(plot_label(b.model), "ok", b.result.p);
                    } else if constexpr (std::is_same_v<T, BacktestResult>) {
                        line("q=" + config_value(meta, "quorum") + " c=" +
                                 config_value(meta, "threshold") + " mode=" +
                                 config_value(meta, "mode"),
                             "ok", b.p);
                    } else {
                        for (const auto& row : b.rows)
                            line(row.configuration,
                                 row.status == RowStatus::skipped ? "skipped" : "ok", row.p);
                    }
                },
                doc.body);
            return out;
        }
    }
    return {};
}

}  // namespace critprog
