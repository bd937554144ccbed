#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <stdexcept>

namespace tbd {

struct CellIndex {
    int range = 0;
    int doppler = 0;
    int bearing = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Range / radial velocity / bearing of a kinematic state as seen from the
/// sensor at the origin.
struct PolarCoords {
    double range = 0.0;
    double doppler = 0.0;
    double bearing = 0.0;
};

/// Converts [x, vx, y, vy] to (r, d, b). Returns nullopt at the origin where
/// Doppler and bearing are undefined.
std::optional<PolarCoords> to_polar(const Eigen::Vector4d& kinematics);

/// Range-Doppler-bearing sensor grid. Cell i spans
/// [r_min + i R, r_min + (i + 1) R) with center r_min + (i + 0.5) R, and
/// likewise for Doppler and bearing.
class GridSpec {
public:
    GridSpec(double r_min, double r_max, int n_r,
             double d_min, double d_max, int n_d,
             double b_min, double b_max, int n_b);

    [[nodiscard]] double r_min() const { return r_min_; }
    [[nodiscard]] double r_max() const { return r_max_; }
    [[nodiscard]] double d_min() const { return d_min_; }
    [[nodiscard]] double d_max() const { return d_max_; }
    [[nodiscard]] double b_min() const { return b_min_; }
    [[nodiscard]] double b_max() const { return b_max_; }
    [[nodiscard]] int n_range() const { return n_r_; }
    [[nodiscard]] int n_doppler() const { return n_d_; }
    [[nodiscard]] int n_bearing() const { return n_b_; }

    [[nodiscard]] double range_cell() const { return (r_max_ - r_min_) / n_r_; }
    [[nodiscard]] double doppler_cell() const { return (d_max_ - d_min_) / n_d_; }
    [[nodiscard]] double bearing_cell() const { return (b_max_ - b_min_) / n_b_; }

    [[nodiscard]] std::size_t size() const {
        return static_cast<std::size_t>(n_r_) * static_cast<std::size_t>(n_d_) *
               static_cast<std::size_t>(n_b_);
    }

    [[nodiscard]] double range_center(int i) const { return r_min_ + (i + 0.5) * range_cell(); }
    [[nodiscard]] double doppler_center(int j) const { return d_min_ + (j + 0.5) * doppler_cell(); }
    [[nodiscard]] double bearing_center(int l) const { return b_min_ + (l + 0.5) * bearing_cell(); }

    /// Bins polar coordinates into a cell using half-open intervals.
    [[nodiscard]] std::optional<CellIndex> locate(const PolarCoords& p) const;

    /// Row-major (i, j, l) flat index.
    [[nodiscard]] std::size_t flat(const CellIndex& c) const {
        return (static_cast<std::size_t>(c.range) * n_d_ + c.doppler) * n_b_ + c.bearing;
    }
    [[nodiscard]] CellIndex unflatten(std::size_t k) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    double r_min_, r_max_;
    double d_min_, d_max_;
    double b_min_, b_max_;
    int n_r_, n_d_, n_b_;
};

/// Maps a kinematic state onto the grid; nullopt when outside the
/// surveillance window or at the origin.
std::optional<CellIndex> state_to_cell(const Eigen::Vector4d& kinematics, const GridSpec& grid);

}  // namespace tbd
