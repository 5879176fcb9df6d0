#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chronicle/series.hpp"

namespace chronicle::io {

using Date = std::chrono::sys_days;

// Strict ISO-8601 calendar date (YYYY-MM-DD). Throws FormatError otherwise.
Date parse_date(std::string_view text);
std::string format_date(Date d);

bool is_business_day(Date d);
// Number of Mon-Fri dates strictly between a and b (a < b).
int business_days_between(Date a, Date b);

// Shortest round-trip decimal representation (std::to_chars); "" for missing.
std::string format_sample(const Sample& v);
double parse_number(std::string_view text, const std::string& context);

struct LoadOptions {
    std::string value_column;  // empty: first column other than the date column
    int max_gap = 10;          // widest fillable run of missing business days
};

struct LoadResult {
    Chronicle series;
    std::vector<Date> dates;  // one calendar date per grid row
    std::size_t filled = 0;   // forward-filled rows inserted for business-day gaps
};

/// Loads a date,value CSV onto a uniform trading-day grid. Consecutive rows are
/// consecutive grid steps; weekends and holidays absent from the file are simply
/// absent. Business days missing between two rows are forward-filled when the
/// run is <= max_gap, otherwise a DataQualityError names the gap. The abstract
/// start time is the first date's day count since 1970-01-01.
LoadResult load_csv(const std::filesystem::path& path, const LoadOptions& options = {});

struct PanelLoadResult {
    std::vector<Chronicle> series;  // one per non-date column, shared grid
    std::vector<Date> dates;
    std::size_t filled = 0;
};

// Multi-asset CSV: a date column plus one numeric column per asset label.
PanelLoadResult load_panel_csv(const std::filesystem::path& path, int max_gap = 10);

// date,<name> rows; missing samples serialize as empty fields. When dates is
// null the abstract time is written instead.
void save_csv(const std::filesystem::path& path, const Chronicle& series,
              const std::vector<Date>* dates = nullptr, const std::string& value_name = "value");

// Generic plot-ready table: a time column followed by named sample columns, all
// on the same grid. Used by the CLI commands.
struct Table {
    std::vector<std::string> time;                 // preformatted time labels
    std::vector<std::string> headers;              // per data column
    std::vector<std::vector<Sample>> columns;      // headers.size() columns
};

void write_table_csv(const std::filesystem::path& path, const Table& table);
void write_table_json(const std::filesystem::path& path, const Table& table);

// Time labels for a table: calendar dates when available, abstract times otherwise.
std::vector<std::string> time_labels(const Chronicle& grid, const std::vector<Date>* dates);

}  // namespace chronicle::io
