#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fixedb {

enum class EstimatorKind { MEAN, TRIMMED_MEAN, MEDIAN };

struct EstimatorComponent {
    EstimatorKind kind = EstimatorKind::MEAN;
    double gamma = 0.0; // trimming proportion per tail, TRIMMED_MEAN only
};

// A (possibly vector-valued) statistic: one value per component.
struct Estimator {
    std::vector<EstimatorComponent> components;

    std::size_t dim() const { return components.size(); }

    static Estimator mean();
    static Estimator median();
    static Estimator trimmed_mean(double gamma);
    static Estimator mean_and_median();
};

void validate(const Estimator& est);

// Estimates over the window [start, start + len) of ts.
// MEDIAN of an even-length window averages the two middle order statistics.
// TRIMMED_MEAN drops floor(gamma*len) observations from EACH tail.
std::vector<double> point_estimate(std::span<const double> ts, std::size_t start,
                                   std::size_t len, const Estimator& est);

// Right-continuous step function: value[i] holds on [grid[i], grid[i+1]).
// Evaluation below grid.front() yields 0.
struct StepFunction {
    std::vector<double> grid;  // strictly increasing
    std::vector<double> value;

    double operator()(double x) const;
};

// Empirical CDF of the window evaluated on an explicit grid.
StepFunction ecdf(std::span<const double> ts, std::size_t start, std::size_t len,
                  std::vector<double> grid);

// Mean-corrected periodogram of the window on its own Fourier grid
// {2*pi*s/len : s = 1..floor(len/2)}, by direct summation.
StepFunction periodogram(std::span<const double> ts, std::size_t start, std::size_t len);

// Cumulative spectral distribution F(lambda) = (2*pi/len) * sum of the
// periodogram over Fourier frequencies <= lambda. For odd len the grid gets
// pi appended (F is constant past the last Fourier frequency), so the last
// grid point is always pi. normalized divides by F(pi), which must be > 0.
StepFunction spectral_distribution(std::span<const double> ts, std::size_t start,
                                   std::size_t len, bool normalized);

// max over the grid of |f(x) - g(x)|, with step evaluation on both sides.
double sup_distance(const StepFunction& f, const StepFunction& g,
                    std::span<const double> grid);

// Exact sup over the whole line of |ECDF_a - ECDF_b| for two sorted samples;
// equals sup_distance evaluated on the union of their values.
double ecdf_sup_distance(std::span<const double> sorted_a, std::span<const double> sorted_b);

// Sorted copy of distinct values in the window; the evaluation grid for
// CDF sup-norm comparisons.
std::vector<double> sorted_distinct(std::span<const double> ts, std::size_t start,
                                    std::size_t len);

// f evaluated pointwise on an explicit grid.
std::vector<double> eval_on_grid(const StepFunction& f, std::span<const double> grid);

} // namespace fixedb
