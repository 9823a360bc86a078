#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cda/harness/session.hpp"

namespace cda::coevo {

struct QuiverPoint {
    double s_b = 0.0;
    double s_s = 0.0;
    /// Mean net drift (final minus initial prod strategy) over the repetitions.
    double d_sb = 0.0;
    double d_ss = 0.0;
    double magnitude = 0.0;
    int reps = 0;

    friend bool operator==(const QuiverPoint&, const QuiverPoint&) = default;
};

/// Drift field over the buyer/seller strategy plane [-1, +1]^2.
/// Points are stored row-major: index = is * resolution + ib, where ib walks
/// s_b and is walks s_s.
struct QuiverField {
    int resolution = 0;
    std::vector<QuiverPoint> points;

    const QuiverPoint& at(int ib, int is) const { return points.at(static_cast<std::size_t>(is * resolution + ib)); }
    double max_magnitude() const noexcept;

    friend bool operator==(const QuiverField&, const QuiverField&) = default;
};

/// Grid coordinate i of `resolution` evenly spaced values over [-1, +1].
double grid_value(int i, int resolution) noexcept;

/// Samples the drift field.
///
/// The template must contain exactly one adaptive buyer and one adaptive
/// seller; every other trader keeps its strategy. Each grid point runs `reps`
/// sessions of `horizon` time units starting the adaptive pair at (s_b, s_s).
/// Seeds derive from (seed, grid index, rep), so the field does not depend on
/// how grid points are spread across `threads` (0 = hardware concurrency).
QuiverField quiver_sample(const harness::SessionConfig& session_template, int grid_res, Time horizon, int reps,
                          std::uint64_t seed, unsigned threads = 0);

/// CSV `s_b,s_s,d_sb,d_ss,magnitude,reps`. Direction columns are scaled to
/// unit length for plotting; `magnitude` keeps the raw drift length.
void write_quiver_csv(std::ostream& out, const QuiverField& field);

/// A connected group of grid cells into which the surrounding flow converges.
struct Attractor {
    std::vector<std::size_t> cells;
    double s_b = 0.0;  // centroid
    double s_s = 0.0;
    double inflow = 0.0;  // mean inward alignment of the ring around the core
};

struct AttractorOptions {
    /// A cell is a candidate sink when its drift is below this fraction of the
    /// field maximum.
    double slow_fraction = 0.25;
    /// Minimum mean cosine between neighbour drifts and the direction back to
    /// the cell.
    double min_inflow = 0.5;
    /// Minimum mean neighbour drift, as a fraction of the field maximum, for a
    /// sink to count; filters regions where nothing moves.
    double min_ring_strength = 0.1;
    /// Chebyshev radius of the neighbourhood ring, in grid cells.
    int radius = 2;
};

/// Finds point attractors: slow cells whose surrounding ring flows inward
/// strongly, merged into 8-connected groups.
std::vector<Attractor> detect_attractors(const QuiverField& field, const AttractorOptions& options = {});

/// 4-connected region of cells around grid cell (ib, is) whose drift is below
/// `fraction` of the field maximum; empty when the start cell itself is not.
std::vector<std::size_t> low_drift_region(const QuiverField& field, int ib, int is, double fraction = 0.25);

}  // namespace cda::coevo
