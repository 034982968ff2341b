#pragma once

#include "scalespec/core.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scalespec {

using Date = std::chrono::sys_days;

enum class SeriesKind { price, log_price, return_value, parameter };

std::string_view to_string(SeriesKind kind);

/// Uniformly indexed observations on a trading-day grid.
///
/// Construction validates the invariants: finite values, strictly positive
/// prices, and (when present) strictly increasing dates of matching length.
class SampledSeries {
public:
    SampledSeries(VectorXd values, SeriesKind kind, Index start_index = 0,
                  std::optional<std::vector<Date>> dates = std::nullopt);

    const VectorXd& values() const noexcept { return values_; }
    SeriesKind kind() const noexcept { return kind_; }
    Index start_index() const noexcept { return start_index_; }
    const std::optional<std::vector<Date>>& dates() const noexcept { return dates_; }
    Index size() const noexcept { return values_.size(); }

private:
    VectorXd values_;
    SeriesKind kind_;
    Index start_index_;
    std::optional<std::vector<Date>> dates_;
};

/// Log prices centred on a 1-based center index.
struct AnalysisWindow {
    VectorXd q;
    Index center = 0;     // n0, 1-based
    Index nominal = 0;    // M
    Index first = 0;      // 1-based series index of q(0)
    Index effective() const noexcept { return q.size(); }
    bool interior() const noexcept { return q.size() == nominal; }
};

struct ColumnConfig {
    std::string date_column = "date";  // empty: no date column
    std::string value_column = "price";
    SeriesKind kind = SeriesKind::price;
};

struct IngestResult {
    SampledSeries series;
    Index skipped = 0;
};

std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(Date date);

IngestResult ingest_csv(std::string_view raw_text, const ColumnConfig& config = {});

/// Reads one column keeping positional alignment; blank and "NA" fields
/// become NaN.
std::vector<double> read_csv_column(std::string_view raw_text, const std::string& column);

/// Writes `date,<value_column>` when dates are present, else `index,<value_column>`.
std::string serialize_csv(const SampledSeries& series, const std::string& value_column = "price");

SampledSeries log_transform(const SampledSeries& prices);

/// R_n = (P_{n+1} - P_n) / P_n; output is one element shorter than the input.
SampledSeries returns(const SampledSeries& prices);

/// Extracts the analysis window of nominal length M around the 1-based
/// center index n0. Near the ends the window is narrowed so that it stays
/// inside the series while keeping its far edge where the interior rule
/// puts it.
AnalysisWindow window_slice(const SampledSeries& log_prices, Index n0, Index M);
AnalysisWindow window_slice(const VectorXd& values, Index n0, Index M);

}  // namespace scalespec
