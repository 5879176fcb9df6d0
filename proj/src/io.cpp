#include "chronicle/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "chronicle/errors.hpp"

namespace chronicle::io {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    for (auto& f : fields) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
        while (!f.empty() && f.front() == ' ') f.erase(f.begin());
    }
    return fields;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

struct RawRow {
    Date date;
    std::vector<Sample> values;
};

struct RawFile {
    std::vector<std::string> value_headers;
    std::vector<RawRow> rows;  // sorted by date
};

RawFile read_rows(const std::filesystem::path& path, const std::vector<std::string>& wanted) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("'" + path.string() + "': empty file, expected a header row");
    }
    const auto headers = split_fields(line);
    std::size_t date_col = headers.size();
    for (std::size_t i = 0; i < headers.size(); ++i) {
        if (iequals(headers[i], "date")) {
            date_col = i;
            break;
        }
    }
    if (date_col == headers.size()) {
        throw FormatError("'" + path.string() + "': no 'date' column in header");
    }

    // Resolve which value columns to keep.
    std::vector<std::size_t> value_cols;
    RawFile out;
    if (wanted.empty()) {
        for (std::size_t i = 0; i < headers.size(); ++i) {
            if (i == date_col) continue;
            value_cols.push_back(i);
            out.value_headers.push_back(headers[i]);
        }
        if (value_cols.empty()) {
            throw FormatError("'" + path.string() + "': no value column besides 'date'");
        }
    } else {
        for (const auto& name : wanted) {
            auto it = std::find_if(headers.begin(), headers.end(),
                                   [&](const std::string& h) { return h == name; });
            if (it == headers.end()) {
                throw FormatError("'" + path.string() + "': no column named '" + name + "'");
            }
            value_cols.push_back(static_cast<std::size_t>(it - headers.begin()));
            out.value_headers.push_back(name);
        }
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (fields.size() != headers.size()) {
            throw FormatError("'" + path.string() + "' line " + std::to_string(line_no) +
                              ": expected " + std::to_string(headers.size()) + " fields, got " +
                              std::to_string(fields.size()));
        }
        RawRow row;
        row.date = parse_date(fields[date_col]);
        for (std::size_t c : value_cols) {
            if (fields[c].empty()) {
                row.values.emplace_back();  // missing
            } else {
                row.values.emplace_back(parse_number(
                    fields[c], path.string() + " line " + std::to_string(line_no)));
            }
        }
        out.rows.push_back(std::move(row));
    }
    if (out.rows.empty()) {
        throw FormatError("'" + path.string() + "': no data rows");
    }

    std::stable_sort(out.rows.begin(), out.rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        if (out.rows[i].date == out.rows[i - 1].date) {
            throw FormatError("'" + path.string() + "': duplicate date " +
                              format_date(out.rows[i].date));
        }
    }
    return out;
}

// Expands date gaps onto the trading-day grid, forward-filling every column.
// Returns the per-row dates and the number of inserted rows.
std::pair<std::vector<Date>, std::size_t> expand_gaps(const RawFile& raw, int max_gap,
                                                      std::vector<std::vector<Sample>>& columns) {
    const std::size_t ncols = raw.value_headers.size();
    columns.assign(ncols, {});
    std::vector<Date> dates;
    std::size_t filled = 0;

    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        if (r > 0) {
            const Date prev = raw.rows[r - 1].date;
            const Date cur = raw.rows[r].date;
            const int gap = business_days_between(prev, cur);
            if (gap > max_gap) {
                throw DataQualityError("gap of " + std::to_string(gap) +
                                       " business days between " + format_date(prev) + " and " +
                                       format_date(cur) + " exceeds max_gap=" +
                                       std::to_string(max_gap));
            }
            for (Date d = prev + std::chrono::days{1}; d < cur; d += std::chrono::days{1}) {
                if (!is_business_day(d)) continue;
                dates.push_back(d);
                for (std::size_t c = 0; c < ncols; ++c) {
                    columns[c].push_back(columns[c].back());  // forward fill
                }
                ++filled;
            }
        }
        dates.push_back(raw.rows[r].date);
        for (std::size_t c = 0; c < ncols; ++c) {
            columns[c].push_back(raw.rows[r].values[c]);
        }
    }
    return {std::move(dates), filled};
}

}  // namespace

Date parse_date(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        std::from_chars(text.data(), text.data() + 4, y).ec != std::errc{} ||
        std::from_chars(text.data() + 5, text.data() + 7, m).ec != std::errc{} ||
        std::from_chars(text.data() + 8, text.data() + 10, d).ec != std::errc{}) {
        throw FormatError("unparseable ISO-8601 date '" + std::string(text) + "'");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) {
        throw FormatError("invalid calendar date '" + std::string(text) + "'");
    }
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

bool is_business_day(Date d) {
    const std::chrono::weekday wd{d};
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

int business_days_between(Date a, Date b) {
    int n = 0;
    for (Date d = a + std::chrono::days{1}; d < b; d += std::chrono::days{1}) {
        if (is_business_day(d)) ++n;
    }
    return n;
}

std::string format_sample(const Sample& v) {
    if (!v.has_value()) return {};
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), *v);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, const std::string& context) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw FormatError(context + ": unparseable number '" + std::string(text) + "'");
    }
    return value;
}

LoadResult load_csv(const std::filesystem::path& path, const LoadOptions& options) {
    std::vector<std::string> wanted;
    if (!options.value_column.empty()) wanted.push_back(options.value_column);
    RawFile raw = read_rows(path, wanted);
    if (raw.value_headers.size() > 1) {
        raw.value_headers.resize(1);  // single-series load: first value column only
        for (auto& row : raw.rows) row.values.resize(1);
    }

    std::vector<std::vector<Sample>> columns;
    auto [dates, filled] = expand_gaps(raw, options.max_gap, columns);

    LoadResult out;
    out.series = Chronicle(raw.value_headers[0],
                           static_cast<double>(dates.front().time_since_epoch().count()), 1.0,
                           std::move(columns[0]));
    out.dates = std::move(dates);
    out.filled = filled;
    return out;
}

PanelLoadResult load_panel_csv(const std::filesystem::path& path, int max_gap) {
    RawFile raw = read_rows(path, {});
    std::vector<std::vector<Sample>> columns;
    auto [dates, filled] = expand_gaps(raw, max_gap, columns);

    PanelLoadResult out;
    const double start = static_cast<double>(dates.front().time_since_epoch().count());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out.series.emplace_back(raw.value_headers[c], start, 1.0, std::move(columns[c]));
    }
    out.dates = std::move(dates);
    out.filled = filled;
    return out;
}

void save_csv(const std::filesystem::path& path, const Chronicle& series,
              const std::vector<Date>* dates, const std::string& value_name) {
    Table table;
    table.time = time_labels(series, dates);
    table.headers = {value_name};
    table.columns = {series.values()};
    write_table_csv(path, table);
}

void write_table_csv(const std::filesystem::path& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-identical across runs
    if (!out) {
        throw FormatError("cannot write '" + path.string() + "'");
    }
    out << "date";
    for (const auto& h : table.headers) out << ',' << h;
    out << '\n';
    for (std::size_t i = 0; i < table.time.size(); ++i) {
        out << table.time[i];
        for (const auto& col : table.columns) {
            out << ',' << format_sample(col[i]);
        }
        out << '\n';
    }
}

void write_table_json(const std::filesystem::path& path, const Table& table) {
    nlohmann::ordered_json j;
    j["date"] = table.time;
    for (std::size_t c = 0; c < table.headers.size(); ++c) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& v : table.columns[c]) {
            if (v.has_value()) {
                arr.push_back(*v);
            } else {
                arr.push_back(nullptr);
            }
        }
        j[table.headers[c]] = std::move(arr);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

std::vector<std::string> time_labels(const Chronicle& grid, const std::vector<Date>* dates) {
    std::vector<std::string> labels;
    labels.reserve(grid.size());
    if (dates != nullptr && dates->size() == grid.size()) {
        for (const auto& d : *dates) labels.push_back(format_date(d));
    } else {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            labels.push_back(format_sample(Sample{grid.time_at(i)}));
        }
    }
    return labels;
}

}  // namespace chronicle::io
