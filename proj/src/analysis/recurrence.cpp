#include "cda/analysis/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace cda::analysis {

StateSeries::StateSeries(std::size_t dimension, Time interval) : dimension_(dimension), interval_(interval)
{
    if (interval < 1) throw std::invalid_argument("sampling interval must be >= 1");
}

void StateSeries::push(Time t, std::vector<double> state)
{
    if (state.size() != dimension_) throw std::invalid_argument("state vector has the wrong dimension");
    if (!times_.empty() && t <= times_.back()) throw std::invalid_argument("timestamps must strictly increase");
    times_.push_back(t);
    samples_.push_back(std::move(state));
}

double euclidean_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw std::invalid_argument("vectors have different dimensions");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

RecurrenceMatrix::RecurrenceMatrix(std::size_t n, double threshold, std::size_t theiler)
    : n_(n), threshold_(threshold), theiler_(theiler), bits_(n * n, 0)
{
}

std::size_t RecurrenceMatrix::count() const noexcept
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

RecurrenceMatrix recurrence_matrix(const StateSeries& series, double eps, std::size_t theiler)
{
    if (!(eps >= 0.0)) throw std::invalid_argument("recurrence threshold must be >= 0");
    const std::size_t n = series.size();
    if (n < 2) throw std::invalid_argument("recurrence matrix needs at least two samples");
    for (const auto& s : series.samples()) {
        if (s.size() != series.dimension()) throw std::invalid_argument("inconsistent state dimensions");
    }

    RecurrenceMatrix m(n, eps, theiler);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (!m.admissible(i, j)) continue;
            const bool hit = euclidean_distance(series[i], series[j]) < eps;
            m.set(i, j, hit);
            m.set(j, i, hit);
        }
    }
    return m;
}

RecurrenceMatrix matrix_from_bits(std::size_t n, std::span<const std::uint8_t> bits, std::size_t theiler)
{
    if (bits.size() != n * n) throw std::invalid_argument("bit count does not match matrix size");
    RecurrenceMatrix m(n, 0.0, theiler);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m.set(i, j, m.admissible(i, j) && bits[i * n + j] != 0);
    }
    return m;
}

namespace {

// Appends the lengths of maximal runs of set cells along a line of cells.
template <class CellAt>
void collect_runs(std::size_t length, CellAt cell, std::vector<std::size_t>& runs)
{
    std::size_t run = 0;
    for (std::size_t t = 0; t < length; ++t) {
        if (cell(t)) {
            ++run;
        } else if (run > 0) {
            runs.push_back(run);
            run = 0;
        }
    }
    if (run > 0) runs.push_back(run);
}

}  // namespace

RqaMetrics rqa_metrics(const RecurrenceMatrix& m, std::size_t l_min, std::size_t v_min)
{
    if (l_min < 2 || v_min < 2) throw std::invalid_argument("minimum line lengths must be >= 2");
    const std::size_t n = m.size();
    RqaMetrics out;
    if (n == 0) return out;

    std::size_t admissible = 0;
    std::size_t recurrent = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!m.admissible(i, j)) continue;
            ++admissible;
            if (m(i, j)) ++recurrent;
        }
    }
    if (admissible == 0 || recurrent == 0) return out;
    out.rr = static_cast<double>(recurrent) / static_cast<double>(admissible);

    // Diagonals: offset k = j - i, both triangles.
    std::size_t det_eligible = 0;
    std::size_t det_points = 0;
    std::map<std::size_t, std::size_t> histogram;
    const auto signed_n = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t k = -(signed_n - 1); k < signed_n; ++k) {
        const auto offset = static_cast<std::size_t>(k < 0 ? -k : k);
        if (offset < m.theiler()) continue;
        const std::size_t length = n - offset;
        const std::size_t i0 = k < 0 ? offset : 0;
        const std::size_t j0 = k < 0 ? 0 : offset;

        std::vector<std::size_t> runs;
        collect_runs(length, [&](std::size_t t) { return m(i0 + t, j0 + t); }, runs);
        if (length < l_min) continue;
        for (std::size_t r : runs) {
            det_eligible += r;
            if (r >= l_min) {
                det_points += r;
                ++histogram[r];
            }
        }
    }
    if (det_eligible > 0) out.det = static_cast<double>(det_points) / static_cast<double>(det_eligible);

    std::size_t lines = 0;
    std::size_t longest = 0;
    for (const auto& [len, count] : histogram) {
        lines += count;
        longest = std::max(longest, len);
    }
    if (lines > 0) {
        out.l_mean = static_cast<double>(det_points) / static_cast<double>(lines);
        out.l_max = static_cast<double>(longest);
        for (const auto& [len, count] : histogram) {
            const double p = static_cast<double>(count) / static_cast<double>(lines);
            out.ent -= p * std::log(p);
        }
    }

    std::size_t lam_points = 0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::size_t> runs;
        collect_runs(n, [&](std::size_t i) { return m(i, j); }, runs);
        for (std::size_t r : runs) {
            if (r >= v_min) lam_points += r;
        }
    }
    out.lam = static_cast<double>(lam_points) / static_cast<double>(recurrent);
    return out;
}

StateSeries surrogate_shuffle(const StateSeries& series, Rng& rng)
{
    std::vector<std::size_t> order(series.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Fisher-Yates with explicit draws keeps the permutation independent of
    // the standard library's shuffle implementation.
    for (std::size_t i = order.size(); i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng)]);
    }
    StateSeries out(series.dimension(), series.interval());
    for (std::size_t i = 0; i < order.size(); ++i) out.push(series.times()[i], series.samples()[order[i]]);
    return out;
}

double default_threshold(const StateSeries& series, double fraction)
{
    double widest = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t j = i + 1; j < series.size(); ++j) widest = std::max(widest, euclidean_distance(series[i], series[j]));
    }
    return fraction * widest;
}

void write_pbm(std::ostream& out, const RecurrenceMatrix& m)
{
    const std::size_t n = m.size();
    out << "P1\n" << n << ' ' << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        // Row 0 at the bottom so time runs up the vertical axis.
        const std::size_t row = n - 1 - i;
        // P1 lines stay within 70 characters.
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0 && j % 70 == 0) out << '\n';
            out << (m(row, j) ? '1' : '0');
        }
        out << '\n';
    }
}

void write_rqa_csv(std::ostream& out, const RqaMetrics& r)
{
    out << "RR,DET,LAM,L_mean,L_max,ENT\n";
    const auto old_precision = out.precision(17);
    out << r.rr << ',' << r.det << ',' << r.lam << ',' << r.l_mean << ',' << r.l_max << ',' << r.ent << '\n';
    out.precision(old_precision);
}

}  // namespace cda::analysis
