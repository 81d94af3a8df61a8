#pragma once

#include <string>
#include <vector>

namespace garchvi {

/// Calendar date, ISO-8601 "YYYY-MM-DD". Gaps (weekends, holidays) are fine;
/// only strict ordering is enforced where a series is built.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    static Date parse(const std::string& iso);
    std::string to_string() const;
    Date plus_days(int n) const;

    friend bool operator==(const Date& a, const Date& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day;
    }
    friend bool operator<(const Date& a, const Date& b) {
        if (a.year != b.year) return a.year < b.year;
        if (a.month != b.month) return a.month < b.month;
        return a.day < b.day;
    }
};

/// A dated sequence of log returns (percent units by convention of the data
/// files; the library itself is unit-agnostic). Immutable after construction.
class ReturnSeries {
public:
    /// Validates: equal lengths, non-empty, strictly increasing dates, all
    /// returns finite. Throws EmptySeries / ParseError / DuplicateDate.
    ReturnSeries(std::vector<Date> dates, std::vector<double> returns);

    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<double>& returns() const { return returns_; }
    std::size_t size() const { return returns_.size(); }

private:
    std::vector<Date> dates_;
    std::vector<double> returns_;
};

struct CsvColumns {
    std::string date = "date";
    std::string value = "return";
};

/// Reads a header CSV with a date column (ISO-8601) and a numeric column,
/// sorts by date, rejects duplicates. Throws FileNotFound, ParseError,
/// DuplicateDate, EmptySeries.
ReturnSeries load_returns(const std::string& path, const CsvColumns& columns = {});

/// Writes the identical CSV format; load_returns(write_returns(s)) == s.
void write_returns(const std::string& path, const ReturnSeries& series,
                   const CsvColumns& columns = {});

/// Chronological split: first floor(T * train_fraction) observations train,
/// the rest test. Throws DegenerateSplit if either part would be empty.
std::pair<ReturnSeries, ReturnSeries> split_train_test(const ReturnSeries& series,
                                                       double train_fraction);

/// Mean of squared returns over the whole series; used to back-cast the
/// pre-sample values of the variance recursions. Floored at 1e-8 so an
/// all-zero series never yields h = 0. `n_lags` is the number of pre-sample
/// slots the caller will fill; it does not change the value.
double backcast_variance(const ReturnSeries& series, int n_lags = 1);
double backcast_variance(const std::vector<double>& returns, int n_lags = 1);

/// Percent log returns from a price series: r_t = 100 * log(P_t / P_{t-1}).
ReturnSeries prices_to_returns(const ReturnSeries& prices);

}  // namespace garchvi
