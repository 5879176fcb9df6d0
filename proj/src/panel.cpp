#include "chronicle/panel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "chronicle/errors.hpp"

namespace chronicle {

namespace {

// Index of the sample of s at absolute time t; the offset must sit on the grid.
std::size_t index_at(const Chronicle& s, double t) {
    const double offset = (t - s.start()) / s.step();
    const double rounded = std::round(offset);
    if (std::abs(offset - rounded) > 1e-6 || rounded < 0.0 ||
        rounded >= static_cast<double>(s.size())) {
        throw GridError("align: series '" + s.label() + "' has no sample at time " +
                        std::to_string(t) + " (grid offsets are incompatible)");
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace

Chronicle AlignedPanel::column_series(std::size_t c) const {
    std::vector<Sample> values(length);
    for (std::size_t i = 0; i < length; ++i) values[i] = columns[c][i];
    return Chronicle(labels[c], start, step, std::move(values));
}

AlignedPanel align(const std::vector<Chronicle>& series) {
    if (series.empty()) {
        throw SizeError("align: no input series");
    }
    const double step = series.front().step();
    for (const auto& s : series) {
        if (s.empty()) {
            throw SizeError("align: series '" + s.label() + "' is empty");
        }
        if (std::abs(s.step() - step) > 1e-9) {
            throw GridError("align: series '" + s.label() + "' has step " +
                            std::to_string(s.step()) + ", expected " + std::to_string(step));
        }
    }

    double span_start = series.front().start();
    double span_end = series.front().end_time();
    for (const auto& s : series) {
        span_start = std::max(span_start, s.start());
        span_end = std::min(span_end, s.end_time());
        // A column is usable from its first present sample onward.
        std::size_t first = 0;
        while (first < s.size() && !s[first].has_value()) ++first;
        if (first == s.size()) {
            throw SizeError("align: series '" + s.label() + "' has no present samples");
        }
        span_start = std::max(span_start, s.time_at(first));
    }
    if (span_end < span_start - 1e-9) {
        throw SizeError("align: empty common span");
    }

    AlignedPanel panel;
    panel.step = step;
    panel.start = span_start;
    panel.length = static_cast<std::size_t>(std::round((span_end - span_start) / step)) + 1;

    for (const auto& s : series) {
        const std::size_t base = index_at(s, span_start);
        std::vector<double> col;
        col.reserve(panel.length);
        // Seed the fill with the last present value at or before the span start.
        Sample last;
        for (std::size_t i = 0; i <= base; ++i) {
            if (s[i].has_value()) last = s[i];
        }
        for (std::size_t i = 0; i < panel.length; ++i) {
            const Sample& v = s[base + i];
            if (v.has_value()) last = v;
            col.push_back(*last);  // non-empty: span starts at a present sample
        }
        panel.labels.push_back(s.label());
        panel.columns.push_back(std::move(col));
    }
    return panel;
}

}  // namespace chronicle
