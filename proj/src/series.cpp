#include "scalespec/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace scalespec {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            quoted = !quoted;
        } else if (line[i] == ',' && !quoted) {
            fields.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    fields.push_back(trim(line.substr(start)));
    return fields;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = end + 1;
    }
    // Drop trailing empty lines.
    while (!lines.empty() && trim(lines.back()).empty()) {
        lines.pop_back();
    }
    return lines;
}

bool is_missing(std::string_view field) { return field.empty() || field == "NA"; }

std::optional<double> parse_double(std::string_view field) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        return std::nullopt;
    }
    return value;
}

struct Table {
    std::vector<std::string_view> header;
    std::vector<std::vector<std::string_view>> rows;
};

Table parse_table(std::string_view raw_text) {
    auto lines = split_lines(raw_text);
    if (lines.empty()) {
        throw DataError("CSV input is empty");
    }
    Table table;
    auto header_line = lines.front();
    if (header_line.substr(0, 3) == "\xEF\xBB\xBF") {
        header_line.remove_prefix(3);
    }
    table.header = split_fields(header_line);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        table.rows.push_back(split_fields(lines[i]));
    }
    return table;
}

std::size_t column_index(const Table& table, const std::string& name) {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
        throw DataError("CSV column '" + name + "' not found in header");
    }
    return static_cast<std::size_t>(it - table.header.begin());
}

std::string format_number(double value) {
    char buffer[32];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

}  // namespace

std::string_view to_string(SeriesKind kind) {
    switch (kind) {
        case SeriesKind::price: return "price";
        case SeriesKind::log_price: return "log_price";
        case SeriesKind::return_value: return "return";
        case SeriesKind::parameter: return "parameter";
    }
    return "unknown";
}

SampledSeries::SampledSeries(VectorXd values, SeriesKind kind, Index start_index,
                             std::optional<std::vector<Date>> dates)
    : values_(std::move(values)), kind_(kind), start_index_(start_index), dates_(std::move(dates)) {
    for (Index i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DataError("non-finite value at position " + std::to_string(i + 1));
        }
        if (kind_ == SeriesKind::price && values_[i] <= 0.0) {
            throw DataError("non-positive price at position " + std::to_string(i + 1));
        }
    }
    if (dates_) {
        if (static_cast<Index>(dates_->size()) != values_.size()) {
            throw DataError("dates and values differ in length");
        }
        for (std::size_t i = 1; i < dates_->size(); ++i) {
            if ((*dates_)[i] <= (*dates_)[i - 1]) {
                throw DataError("dates not strictly increasing at position " + std::to_string(i + 1));
            }
        }
    }
}

std::optional<Date> parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    auto parse = [](std::string_view s, auto& out) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    };
    if (!parse(text.substr(0, 4), y) || !parse(text.substr(5, 2), m) || !parse(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return Date{ymd};
}

std::string format_iso_date(Date date) {
    std::chrono::year_month_day ymd{date};
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

IngestResult ingest_csv(std::string_view raw_text, const ColumnConfig& config) {
    const auto table = parse_table(raw_text);
    const auto value_col = column_index(table, config.value_column);
    const bool with_dates = !config.date_column.empty();
    const auto date_col = with_dates ? column_index(table, config.date_column) : 0;

    std::vector<double> values;
    std::vector<Date> dates;
    Index skipped = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto row_no = std::to_string(r + 1);
        if (row.size() == 1 && row[0].empty()) {
            ++skipped;
            continue;
        }
        const auto field = value_col < row.size() ? row[value_col] : std::string_view{};
        if (is_missing(field)) {
            ++skipped;
            continue;
        }
        const auto value = parse_double(field);
        if (!value || !std::isfinite(*value)) {
            throw DataError("unparseable value '" + std::string(field) + "' at row " + row_no);
        }
        if (config.kind == SeriesKind::price && *value <= 0.0) {
            throw DataError("non-positive price at row " + row_no);
        }
        if (with_dates) {
            const auto date_field = date_col < row.size() ? row[date_col] : std::string_view{};
            const auto date = parse_iso_date(date_field);
            if (!date) {
                throw DataError("invalid date '" + std::string(date_field) + "' at row " + row_no);
            }
            if (!dates.empty() && *date <= dates.back()) {
                throw DataError("dates not strictly increasing at row " + row_no);
            }
            dates.push_back(*date);
        }
        values.push_back(*value);
    }
    if (values.empty()) {
        throw DataError("no usable rows in CSV input");
    }
    VectorXd v = Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
    std::optional<std::vector<Date>> d;
    if (with_dates) {
        d = std::move(dates);
    }
    return {SampledSeries(std::move(v), config.kind, 0, std::move(d)), skipped};
}

std::vector<double> read_csv_column(std::string_view raw_text, const std::string& column) {
    const auto table = parse_table(raw_text);
    const auto col = column_index(table, column);
    std::vector<double> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto field = col < row.size() ? row[col] : std::string_view{};
        if (is_missing(field)) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const auto value = parse_double(field);
        if (!value) {
            throw DataError("unparseable value '" + std::string(field) + "' at row " + std::to_string(r + 1));
        }
        out.push_back(*value);
    }
    return out;
}

std::string serialize_csv(const SampledSeries& series, const std::string& value_column) {
    std::string out;
    const auto& dates = series.dates();
    out += dates ? "date," : "index,";
    out += value_column;
    out += '\n';
    for (Index i = 0; i < series.size(); ++i) {
        out += dates ? format_iso_date((*dates)[static_cast<std::size_t>(i)])
                     : std::to_string(series.start_index() + i);
        out += ',';
        out += format_number(series.values()[i]);
        out += '\n';
    }
    return out;
}

SampledSeries log_transform(const SampledSeries& prices) {
    require(prices.kind() == SeriesKind::price, "log_transform expects a price series");
    require(prices.size() >= 2, "log_transform needs at least 2 observations");
    return SampledSeries(prices.values().array().log().matrix(), SeriesKind::log_price,
                         prices.start_index(), prices.dates());
}

SampledSeries returns(const SampledSeries& prices) {
    require(prices.kind() == SeriesKind::price, "returns expects a price series");
    require(prices.size() >= 2, "returns needs at least 2 observations");
    const Index n = prices.size() - 1;
    const auto& p = prices.values();
    VectorXd r = (p.tail(n).array() - p.head(n).array()) / p.head(n).array();
    std::optional<std::vector<Date>> dates;
    if (prices.dates()) {
        dates.emplace(prices.dates()->begin(), prices.dates()->end() - 1);
    }
    return SampledSeries(std::move(r), SeriesKind::return_value, prices.start_index(), std::move(dates));
}

AnalysisWindow window_slice(const VectorXd& values, Index n0, Index M) {
    const Index N = values.size();
    require(M >= 4, "window length M must be at least 4");
    require(M <= N, "window length M exceeds series length");
    require(n0 >= 1 && n0 <= N, "center index out of range");

    const Index half = M / 2;
    Index first = 0;  // 1-based
    Index length = 0;
    if (n0 < half) {
        first = 1;
        length = n0 - half + M;
    } else if (n0 <= N - M + half) {
        first = n0 - half + 1;
        length = M;
    } else {
        first = n0 - half + 1;
        length = N - first + 1;
    }
    AnalysisWindow w;
    w.q = values.segment(first - 1, length);
    w.center = n0;
    w.nominal = M;
    w.first = first;
    return w;
}

AnalysisWindow window_slice(const SampledSeries& log_prices, Index n0, Index M) {
    require(log_prices.kind() == SeriesKind::log_price, "window_slice expects a log-price series");
    return window_slice(log_prices.values(), n0, M);
}

}  // namespace scalespec
