#include "chronicle/series.hpp"

#include <cmath>
#include <utility>

#include "chronicle/errors.hpp"

namespace chronicle {

Chronicle::Chronicle(std::string label, double start, double step, std::vector<Sample> values)
    : label_(std::move(label)), start_(start), step_(step), values_(std::move(values)) {
    if (!(step_ > 0.0)) {
        throw ConfigError("chronicle '" + label_ + "': step must be > 0, got " +
                          std::to_string(step_));
    }
}

std::size_t Chronicle::count_present() const {
    std::size_t n = 0;
    for (const auto& v : values_) {
        if (v.has_value()) ++n;
    }
    return n;
}

bool Chronicle::same_grid(const Chronicle& other, double tol) const {
    return size() == other.size() && std::abs(start_ - other.start_) <= tol &&
           std::abs(step_ - other.step_) <= tol;
}

Chronicle Chronicle::with_label(std::string label) const {
    return Chronicle(std::move(label), start_, step_, values_);
}

Chronicle Chronicle::with_values(std::vector<Sample> values) const {
    return Chronicle(label_, start_, step_, std::move(values));
}

Chronicle log_transform(const Chronicle& x) {
    std::vector<Sample> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x[i].has_value()) continue;
        if (*x[i] <= 0.0) {
            throw DomainError("log_transform: nonpositive value " + std::to_string(*x[i]) +
                                  " at index " + std::to_string(i),
                              i);
        }
        out[i] = std::log(*x[i]);
    }
    return x.with_values(std::move(out));
}

Chronicle exp_transform(const Chronicle& x) {
    return map_samples(x, [](double v) { return std::exp(v); }, x.label());
}

Chronicle lag(const Chronicle& x, std::size_t k) {
    std::vector<Sample> out(x.size());
    for (std::size_t i = k; i < x.size(); ++i) {
        out[i] = x[i - k];
    }
    return x.with_values(std::move(out));
}

Chronicle map_samples(const Chronicle& x, const std::function<double(double)>& f,
                      std::string label) {
    std::vector<Sample> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].has_value()) out[i] = f(*x[i]);
    }
    return Chronicle(label.empty() ? x.label() : std::move(label), x.start(), x.step(),
                     std::move(out));
}

Chronicle zip_samples(const Chronicle& x, const Chronicle& y,
                      const std::function<double(double, double)>& f, std::string label) {
    if (!x.same_grid(y)) {
        throw GridError("zip_samples: '" + x.label() + "' and '" + y.label() +
                        "' are not on the same grid");
    }
    std::vector<Sample> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].has_value() && y[i].has_value()) out[i] = f(*x[i], *y[i]);
    }
    return Chronicle(label.empty() ? x.label() : std::move(label), x.start(), x.step(),
                     std::move(out));
}

}  // namespace chronicle
