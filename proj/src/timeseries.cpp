#include "garchvi/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "garchvi/errors.hpp"

namespace garchvi {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int d[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return d[m - 1];
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace and CR
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

Date Date::parse(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream ss(iso);
    ss >> y >> dash1 >> m >> dash2 >> d;
    if (ss.fail() || dash1 != '-' || dash2 != '-' || m < 1 || m > 12 || d < 1 ||
        d > days_in_month(y, m)) {
        throw ParseError(0, "invalid ISO-8601 date '" + iso + "'");
    }
    return Date{y, m, d};
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::plus_days(int n) const {
    Date r = *this;
    while (n-- > 0) {
        if (++r.day > days_in_month(r.year, r.month)) {
            r.day = 1;
            if (++r.month > 12) {
                r.month = 1;
                ++r.year;
            }
        }
    }
    return r;
}

ReturnSeries::ReturnSeries(std::vector<Date> dates, std::vector<double> returns)
    : dates_(std::move(dates)), returns_(std::move(returns)) {
    if (returns_.empty()) throw EmptySeries();
    if (dates_.size() != returns_.size())
        throw DimensionMismatch("dates and returns differ in length");
    for (std::size_t i = 0; i < returns_.size(); ++i) {
        if (!std::isfinite(returns_[i]))
            throw ParseError(i + 1, "non-finite return value");
        if (i > 0 && !(dates_[i - 1] < dates_[i])) {
            if (dates_[i - 1] == dates_[i]) throw DuplicateDate(dates_[i].to_string());
            throw ParseError(i + 1, "dates not strictly increasing");
        }
    }
}

ReturnSeries load_returns(const std::string& path, const CsvColumns& columns) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);

    std::string line;
    if (!std::getline(in, line)) throw EmptySeries();
    const auto header = split_csv_line(line);
    std::ptrdiff_t date_idx = -1, val_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == columns.date) date_idx = static_cast<std::ptrdiff_t>(i);
        if (header[i] == columns.value) val_idx = static_cast<std::ptrdiff_t>(i);
    }
    if (date_idx < 0) throw ParseError(1, "missing column '" + columns.date + "'");
    if (val_idx < 0) throw ParseError(1, "missing column '" + columns.value + "'");

    std::vector<std::pair<Date, double>> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        const auto need = static_cast<std::size_t>(std::max(date_idx, val_idx)) + 1;
        if (cells.size() < need) throw ParseError(row_no, "too few columns");
        Date date;
        try {
            date = Date::parse(cells[static_cast<std::size_t>(date_idx)]);
        } catch (const ParseError& e) {
            throw ParseError(row_no, e.what());
        }
        const std::string& cell = cells[static_cast<std::size_t>(val_idx)];
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
            throw ParseError(row_no, "non-numeric value '" + cell + "'");
        rows.emplace_back(date, v);
    }
    if (rows.empty()) throw EmptySeries();

    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Date> dates;
    std::vector<double> values;
    dates.reserve(rows.size());
    values.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].first == rows[i - 1].first)
            throw DuplicateDate(rows[i].first.to_string());
        dates.push_back(rows[i].first);
        values.push_back(rows[i].second);
    }
    return ReturnSeries(std::move(dates), std::move(values));
}

void write_returns(const std::string& path, const ReturnSeries& series,
                   const CsvColumns& columns) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << columns.date << ',' << columns.value << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < series.size(); ++i)
        out << series.dates()[i].to_string() << ',' << series.returns()[i] << '\n';
}

std::pair<ReturnSeries, ReturnSeries> split_train_test(const ReturnSeries& series,
                                                       double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw DegenerateSplit("train fraction must be in (0,1)");
    const auto total = series.size();
    const auto n_train =
        static_cast<std::size_t>(std::floor(static_cast<double>(total) * train_fraction));
    if (n_train == 0 || n_train == total)
        throw DegenerateSplit("split of length " + std::to_string(total) + " at fraction " +
                              std::to_string(train_fraction) + " leaves an empty part");
    std::vector<Date> d1(series.dates().begin(), series.dates().begin() + n_train);
    std::vector<double> r1(series.returns().begin(), series.returns().begin() + n_train);
    std::vector<Date> d2(series.dates().begin() + n_train, series.dates().end());
    std::vector<double> r2(series.returns().begin() + n_train, series.returns().end());
    return {ReturnSeries(std::move(d1), std::move(r1)), ReturnSeries(std::move(d2), std::move(r2))};
}

double backcast_variance(const std::vector<double>& returns, int n_lags) {
    if (returns.empty()) throw EmptySeries();
    if (n_lags < 1) throw Error("n_lags must be positive");
    double sum = 0.0;
    for (double r : returns) sum += r * r;
    const double v = sum / static_cast<double>(returns.size());
    return std::max(v, 1e-8);
}

double backcast_variance(const ReturnSeries& series, int n_lags) {
    return backcast_variance(series.returns(), n_lags);
}

ReturnSeries prices_to_returns(const ReturnSeries& prices) {
    if (prices.size() < 2) throw DegenerateSplit("need at least two prices");
    std::vector<Date> dates(prices.dates().begin() + 1, prices.dates().end());
    std::vector<double> rets(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        const double p0 = prices.returns()[i - 1];
        const double p1 = prices.returns()[i];
        if (!(p0 > 0.0) || !(p1 > 0.0))
            throw ParseError(i + 1, "prices must be positive for log returns");
        rets[i - 1] = 100.0 * std::log(p1 / p0);
    }
    return ReturnSeries(std::move(dates), std::move(rets));
}

}  // namespace garchvi
