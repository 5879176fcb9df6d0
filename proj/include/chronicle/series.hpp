#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace chronicle {

// A sample is either a real value or missing (estimator warm-up, data gap).
using Sample = std::optional<double>;

/// A uniformly sampled time series ("chronicle"): a label, a start time, a
/// strictly positive step, and an ordered run of samples. Times are abstract
/// day units; the timestamp of sample i is start + i * step. Calendar dates,
/// when the data has them, are carried separately by the I/O layer.
class Chronicle {
public:
    Chronicle() = default;
    Chronicle(std::string label, double start, double step, std::vector<Sample> values);

    const std::string& label() const { return label_; }
    double start() const { return start_; }
    double step() const { return step_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double time_at(std::size_t i) const { return start_ + static_cast<double>(i) * step_; }
    double end_time() const { return empty() ? start_ : time_at(size() - 1); }

    const Sample& operator[](std::size_t i) const { return values_[i]; }
    const std::vector<Sample>& values() const { return values_; }

    std::size_t count_present() const;

    // True when the other series lives on the same grid (start, step, length).
    bool same_grid(const Chronicle& other, double tol = 1e-9) const;

    Chronicle with_label(std::string label) const;
    Chronicle with_values(std::vector<Sample> values) const;

private:
    std::string label_;
    double start_ = 0.0;
    double step_ = 1.0;
    std::vector<Sample> values_;
};

// Pointwise natural logarithm; missing preserved. Nonpositive value -> DomainError.
Chronicle log_transform(const Chronicle& x);

// Pointwise exponential; missing preserved.
Chronicle exp_transform(const Chronicle& x);

// y[i] = x[i - k]; the first k samples are missing. Grid unchanged.
Chronicle lag(const Chronicle& x, std::size_t k);

// Pointwise map over present samples; missing preserved.
Chronicle map_samples(const Chronicle& x, const std::function<double(double)>& f,
                      std::string label = {});

// Pointwise combination of two grid-compatible series; missing if either side is.
Chronicle zip_samples(const Chronicle& x, const Chronicle& y,
                      const std::function<double(double, double)>& f,
                      std::string label = {});

}  // namespace chronicle
