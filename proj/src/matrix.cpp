#include "critprog/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "critprog/error.hpp"

namespace critprog {

namespace {

constexpr std::size_t kMinYears = 3;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

template <class T>
bool parse_number(std::string_view field, T& out) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc{} && ptr == field.data() + field.size();
}

}  // namespace

std::string format_real(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

TemporalMatrix::TemporalMatrix(std::vector<int> years, std::vector<double> incidence,
                               std::vector<std::string> factor_names,
                               std::vector<std::vector<double>> factor_columns) {
    const std::size_t n = years.size();
    if (factor_names.empty()) throw Error(ErrorCode::NoFactors, "matrix needs at least one factor");
    if (n < kMinYears)
        throw Error(ErrorCode::TooFewRows,
                    "matrix needs at least 3 years, got " + std::to_string(n));
    if (incidence.size() != n || factor_columns.size() != factor_names.size())
        throw Error(ErrorCode::InvalidConfig, "matrix column sizes disagree");
    for (const auto& col : factor_columns)
        if (col.size() != n) throw Error(ErrorCode::InvalidConfig, "matrix column sizes disagree");

    std::set<std::string_view> seen_names;
    for (const auto& name : factor_names) {
        if (name.empty()) throw Error(ErrorCode::BadHeader, "empty factor name");
        if (!seen_names.insert(name).second)
            throw Error(ErrorCode::DuplicateFactor, "factor '" + name + "' appears twice");
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(incidence[i]) || incidence[i] < 0.0)
            throw Error(ErrorCode::InvalidCell,
                        "incidence must be finite and >= 0 for year " + std::to_string(years[i]));
        for (std::size_t f = 0; f < factor_names.size(); ++f)
            if (!std::isfinite(factor_columns[f][i]))
                throw Error(ErrorCode::InvalidCell, "factor '" + factor_names[f] +
                                                        "' is not finite for year " +
                                                        std::to_string(years[i]));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return years[a] < years[b]; });
    for (std::size_t i = 1; i < n; ++i)
        if (years[order[i]] == years[order[i - 1]])
            throw Error(ErrorCode::DuplicateYear,
                        "year " + std::to_string(years[order[i]]) + " appears twice");

    years_.reserve(n);
    incidence_.reserve(n);
    for (auto i : order) {
        years_.push_back(years[i]);
        incidence_.push_back(incidence[i]);
    }
    columns_.resize(factor_names.size());
    for (std::size_t f = 0; f < factor_names.size(); ++f) {
        columns_[f].reserve(n);
        for (auto i : order) columns_[f].push_back(factor_columns[f][i]);
    }
    names_ = std::move(factor_names);
}

std::optional<std::size_t> TemporalMatrix::find_factor(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

std::size_t TemporalMatrix::factor_index(std::string_view name) const {
    if (auto idx = find_factor(name)) return *idx;
    throw Error(ErrorCode::UnknownFactor, "no factor named '" + std::string(name) + "'");
}

FactorValues TemporalMatrix::row_values(std::size_t row) const {
    FactorValues out;
    for (std::size_t f = 0; f < names_.size(); ++f) out.emplace(names_[f], columns_[f].at(row));
    return out;
}

TemporalMatrix TemporalMatrix::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > n_years())
        throw Error(ErrorCode::InvalidConfig, "slice out of range");
    std::vector<int> years(years_.begin() + begin, years_.begin() + end);
    std::vector<double> incidence(incidence_.begin() + begin, incidence_.begin() + end);
    std::vector<std::vector<double>> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_) cols.emplace_back(c.begin() + begin, c.begin() + end);
    return TemporalMatrix(std::move(years), std::move(incidence), names_, std::move(cols));
}

CriticalThreshold CriticalThreshold::expert(double value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::InvalidConfig, "threshold must be finite");
    return {value, ThresholdSource::expert};
}

CriticalThreshold CriticalThreshold::selected(double value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::InvalidConfig, "threshold must be finite");
    return {value, ThresholdSource::selected};
}

CriticalLabels::CriticalLabels(std::vector<bool> flags, CriticalThreshold threshold)
    : flags_(std::move(flags)), threshold_(threshold),
      n_critical_(static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), true))) {}

CriticalLabels CriticalLabels::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > flags_.size())
        throw Error(ErrorCode::InvalidConfig, "slice out of range");
    return CriticalLabels({flags_.begin() + begin, flags_.begin() + end}, threshold_);
}

FactorSelection::FactorSelection(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw Error(ErrorCode::EmptySelection, "factor selection is empty");
    std::set<std::string_view> seen;
    for (const auto& n : names_)
        if (!seen.insert(n).second)
            throw Error(ErrorCode::DuplicateFactor, "factor '" + n + "' selected twice");
}

FactorSelection FactorSelection::all(const TemporalMatrix& m) {
    return FactorSelection(m.factor_names());
}

std::vector<std::size_t> FactorSelection::resolve(const TemporalMatrix& m) const {
    std::vector<std::size_t> out;
    out.reserve(names_.size());
    for (const auto& n : names_) out.push_back(m.factor_index(n));
    return out;
}

TemporalMatrix parse_matrix(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto nl = text.find('\n', start);
            auto line = text.substr(start, nl == std::string_view::npos ? text.size() - start
                                                                        : nl - start);
            lines.push_back(line);
            if (nl == std::string_view::npos) break;
            start = nl + 1;
        }
    }

    std::size_t header_line = 0;
    while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
    if (header_line == lines.size()) throw Error(ErrorCode::BadHeader, "empty document");

    const auto header = split_fields(lines[header_line]);
    if (header.size() < 2 || header[0] != "year" || header[1] != "incidence")
        throw Error(ErrorCode::BadHeader, "header must start with 'year,incidence'",
                    CellLocation{header_line + 1, ""});
    if (header.size() == 2) throw Error(ErrorCode::NoFactors, "no factor columns in header");

    std::vector<std::string> names;
    for (std::size_t c = 2; c < header.size(); ++c) {
        if (header[c].empty())
            throw Error(ErrorCode::BadHeader, "empty factor name",
                        CellLocation{header_line + 1, ""});
        names.emplace_back(header[c]);
    }
    {
        std::set<std::string_view> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second)
                throw Error(ErrorCode::DuplicateFactor, "factor '" + n + "' appears twice",
                            CellLocation{header_line + 1, n});
    }

    std::vector<int> years;
    std::vector<double> incidence;
    std::vector<std::vector<double>> cols(names.size());
    std::set<int> seen_years;

    for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const std::size_t row = li + 1;
        const auto fields = split_fields(lines[li]);
        if (fields.size() > header.size())
            throw Error(ErrorCode::InvalidCell,
                        "row has " + std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()),
                        CellLocation{row, ""});
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c >= fields.size() || fields[c].empty())
                throw Error(ErrorCode::MissingCell, "missing value",
                            CellLocation{row, std::string(header[c])});
        }

        int year = 0;
        if (!parse_number(fields[0], year))
            throw Error(ErrorCode::NonNumericCell, "'" + std::string(fields[0]) + "' is not a year",
                        CellLocation{row, "year"});
        if (!seen_years.insert(year).second)
            throw Error(ErrorCode::DuplicateYear, "year " + std::to_string(year) + " appears twice",
                        CellLocation{row, "year"});

        auto read_real = [&](std::size_t c) {
            double v = 0.0;
            if (!parse_number(fields[c], v))
                throw Error(ErrorCode::NonNumericCell,
                            "'" + std::string(fields[c]) + "' is not a number",
                            CellLocation{row, std::string(header[c])});
            if (!std::isfinite(v))
                throw Error(ErrorCode::InvalidCell, "value is not finite",
                            CellLocation{row, std::string(header[c])});
            return v;
        };

        const double inc = read_real(1);
        if (inc < 0.0)
            throw Error(ErrorCode::InvalidCell, "incidence must be >= 0",
                        CellLocation{row, "incidence"});
        years.push_back(year);
        incidence.push_back(inc);
        for (std::size_t c = 2; c < header.size(); ++c) cols[c - 2].push_back(read_real(c));
    }

    if (years.size() < kMinYears)
        throw Error(ErrorCode::TooFewRows,
                    "matrix needs at least 3 years, got " + std::to_string(years.size()));

    return TemporalMatrix(std::move(years), std::move(incidence), std::move(names),
                          std::move(cols));
}

FactorRows parse_factor_rows(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    FactorRows out;
    std::vector<std::string> header;
    std::set<int> seen_years;
    std::size_t row = 0;
    std::size_t start = 0;
    bool has_incidence = false;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        const auto line =
            text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);

        if (header.empty()) {
            if (fields.empty() || fields[0] != "year")
                throw Error(ErrorCode::BadHeader, "header must start with 'year'", CellLocation{row, ""});
            for (auto f : fields) header.emplace_back(f);
            has_incidence = header.size() > 1 && header[1] == "incidence";
            const std::size_t first = has_incidence ? 2 : 1;
            if (header.size() <= first) throw Error(ErrorCode::NoFactors, "no factor columns in header");
            std::set<std::string_view> seen;
            for (std::size_t c = first; c < header.size(); ++c) {
                if (header[c].empty())
                    throw Error(ErrorCode::BadHeader, "empty factor name", CellLocation{row, ""});
                if (!seen.insert(header[c]).second)
                    throw Error(ErrorCode::DuplicateFactor, "factor '" + header[c] + "' appears twice",
                                CellLocation{row, header[c]});
                out.factor_names.push_back(header[c]);
            }
            if (has_incidence) out.incidence.emplace();
            continue;
        }

        if (fields.size() > header.size())
            throw Error(ErrorCode::InvalidCell, "row has more fields than the header",
                        CellLocation{row, ""});
        for (std::size_t c = 0; c < header.size(); ++c)
            if (c >= fields.size() || fields[c].empty())
                throw Error(ErrorCode::MissingCell, "missing value", CellLocation{row, header[c]});

        int year = 0;
        if (!parse_number(fields[0], year))
            throw Error(ErrorCode::NonNumericCell, "'" + std::string(fields[0]) + "' is not a year",
                        CellLocation{row, "year"});
        if (!seen_years.insert(year).second)
            throw Error(ErrorCode::DuplicateYear, "year " + std::to_string(year) + " appears twice",
                        CellLocation{row, "year"});
        auto read_real = [&](std::size_t c) {
            double v = 0.0;
            if (!parse_number(fields[c], v))
                throw Error(ErrorCode::NonNumericCell, "'" + std::string(fields[c]) + "' is not a number",
                            CellLocation{row, header[c]});
            if (!std::isfinite(v))
                throw Error(ErrorCode::InvalidCell, "value is not finite", CellLocation{row, header[c]});
            return v;
        };
        out.years.push_back(year);
        if (has_incidence) {
            const double inc = read_real(1);
            if (inc < 0.0)
                throw Error(ErrorCode::InvalidCell, "incidence must be >= 0",
                            CellLocation{row, "incidence"});
            out.incidence->push_back(inc);
        }
        FactorValues values;
        for (std::size_t c = has_incidence ? 2 : 1; c < header.size(); ++c)
            values.emplace(header[c], read_real(c));
        out.values.push_back(std::move(values));
    }
    if (header.empty()) throw Error(ErrorCode::BadHeader, "empty document");
    if (out.years.empty()) throw Error(ErrorCode::TooFewRows, "no rows to classify");
    return out;
}

TemporalMatrix read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_matrix(ss.str());
}

std::string serialize_matrix(const TemporalMatrix& m) {
    std::string out = "year,incidence";
    for (const auto& n : m.factor_names()) {
        out += ',';
        out += n;
    }
    out += '\n';
    for (std::size_t r = 0; r < m.n_years(); ++r) {
        out += std::to_string(m.years()[r]);
        out += ',';
        out += format_real(m.incidence()[r]);
        for (std::size_t f = 0; f < m.n_factors(); ++f) {
            out += ',';
            out += format_real(m.value(r, f));
        }
        out += '\n';
    }
    return out;
}

CriticalLabels label_critical(const TemporalMatrix& m, const CriticalThreshold& c) {
    std::vector<bool> flags;
    flags.reserve(m.n_years());
    for (double v : m.incidence()) flags.push_back(v >= c.value);
    return CriticalLabels(std::move(flags), c);
}

TemporalMatrix apply_lags(const TemporalMatrix& m, std::span<const FactorLag> lags) {
    std::vector<int> per_factor(m.n_factors(), 0);
    int max_lag = 0;
    for (const auto& fl : lags) {
        const auto idx = m.factor_index(fl.factor);
        if (fl.lag < 0) throw Error(ErrorCode::InvalidConfig, "lag must be >= 0");
        per_factor[idx] = fl.lag;
        max_lag = std::max(max_lag, fl.lag);
    }
    const auto drop = static_cast<std::size_t>(max_lag);
    if (drop >= m.n_years() || m.n_years() - drop < kMinYears)
        throw Error(ErrorCode::LagTooLarge,
                    "lag " + std::to_string(max_lag) + " leaves fewer than 3 of " +
                        std::to_string(m.n_years()) + " years");
    if (drop == 0) return m;

    std::vector<int> years(m.years().begin() + drop, m.years().end());
    std::vector<double> incidence(m.incidence().begin() + drop, m.incidence().end());
    std::vector<std::vector<double>> cols(m.n_factors());
    for (std::size_t f = 0; f < m.n_factors(); ++f) {
        const auto lag = static_cast<std::size_t>(per_factor[f]);
        const auto src = m.column(f);
        cols[f].assign(src.begin() + (drop - lag), src.end() - lag);
    }
    return TemporalMatrix(std::move(years), std::move(incidence), m.factor_names(),
                          std::move(cols));
}

TemporalMatrix apply_lag(const TemporalMatrix& m, std::string_view factor, int lag) {
    const FactorLag fl{std::string(factor), lag};
    return apply_lags(m, std::span<const FactorLag>(&fl, 1));
}

TemporalMatrix select_factors(const TemporalMatrix& m, const FactorSelection& s) {
    const auto idx = s.resolve(m);
    std::vector<std::vector<double>> cols;
    cols.reserve(idx.size());
    for (auto i : idx) cols.emplace_back(m.column(i).begin(), m.column(i).end());
    return TemporalMatrix({m.years().begin(), m.years().end()},
                          {m.incidence().begin(), m.incidence().end()}, s.names(),
                          std::move(cols));
}

}  // namespace critprog
