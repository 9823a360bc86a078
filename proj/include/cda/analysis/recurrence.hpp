#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cda/rng.hpp"
#include "cda/types.hpp"

namespace cda::analysis {

/// Multivariate time series sampled every `interval` time units.
class StateSeries {
public:
    StateSeries() = default;
    StateSeries(std::size_t dimension, Time interval);

    /// Throws std::invalid_argument on a dimension mismatch or a timestamp
    /// that does not strictly increase.
    void push(Time t, std::vector<double> state);

    std::size_t size() const noexcept { return samples_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    Time interval() const noexcept { return interval_; }
    const std::vector<Time>& times() const noexcept { return times_; }
    const std::vector<std::vector<double>>& samples() const noexcept { return samples_; }
    std::span<const double> operator[](std::size_t i) const { return samples_.at(i); }

    friend bool operator==(const StateSeries&, const StateSeries&) = default;

private:
    std::size_t dimension_ = 0;
    Time interval_ = 1;
    std::vector<Time> times_;
    std::vector<std::vector<double>> samples_;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Square binary recurrence matrix with its construction parameters.
class RecurrenceMatrix {
public:
    RecurrenceMatrix(std::size_t n, double threshold, std::size_t theiler);

    std::size_t size() const noexcept { return n_; }
    double threshold() const noexcept { return threshold_; }
    std::size_t theiler() const noexcept { return theiler_; }

    bool operator()(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool v) { bits_[i * n_ + j] = v ? 1 : 0; }
    /// Cells outside the Theiler band |i - j| < theiler.
    bool admissible(std::size_t i, std::size_t j) const noexcept
    {
        return (i > j ? i - j : j - i) >= theiler_;
    }
    std::size_t count() const noexcept;

    friend bool operator==(const RecurrenceMatrix&, const RecurrenceMatrix&) = default;

private:
    std::size_t n_;
    double threshold_;
    std::size_t theiler_;
    std::vector<std::uint8_t> bits_;
};

/// bits(i, j) = 1 iff |s_i - s_j| < eps and |i - j| >= theiler.
/// A theiler width of 1 blanks the line of identity; 0 keeps it.
RecurrenceMatrix recurrence_matrix(const StateSeries& series, double eps, std::size_t theiler = 1);

/// Builds a matrix directly from bits (row-major), applying the Theiler band.
RecurrenceMatrix matrix_from_bits(std::size_t n, std::span<const std::uint8_t> bits, std::size_t theiler);

struct RqaMetrics {
    double rr = 0.0;
    double det = 0.0;
    double lam = 0.0;
    double l_mean = 0.0;
    double l_max = 0.0;
    double ent = 0.0;

    friend bool operator==(const RqaMetrics&, const RqaMetrics&) = default;
};

/// Standard recurrence quantification over the admissible cells.
///
/// Diagonal lines are scanned on every admissible diagonal of both triangles;
/// DET counts only recurrent points that sit on diagonals long enough to host
/// a line of `l_min`, so the length-1 border corners never count against it.
/// LAM uses vertical runs of at least `v_min`. ENT is the Shannon entropy
/// (natural log) of the diagonal line-length histogram. All metrics are zero
/// when the matrix has no recurrent admissible point.
RqaMetrics rqa_metrics(const RecurrenceMatrix& m, std::size_t l_min = 2, std::size_t v_min = 2);

/// Time-permuted copy: same samples, same timestamps, uniformly shuffled order.
StateSeries surrogate_shuffle(const StateSeries& series, Rng& rng);

/// `fraction` of the largest pairwise distance in the series.
double default_threshold(const StateSeries& series, double fraction = 0.1);

/// NetPBM P1 bitmap, 1 = recurrent.
void write_pbm(std::ostream& out, const RecurrenceMatrix& m);
/// Header `RR,DET,LAM,L_mean,L_max,ENT` and one row.
void write_rqa_csv(std::ostream& out, const RqaMetrics& metrics);

}  // namespace cda::analysis
