#include "tbd/grid.hpp"

#include <cmath>

namespace tbd {

std::optional<PolarCoords> to_polar(const Eigen::Vector4d& s) {
    const double x = s(0), vx = s(1), y = s(2), vy = s(3);
    const double r = std::hypot(x, y);
    if (r == 0.0) return std::nullopt;
    return PolarCoords{r, (x * vx + y * vy) / r, std::atan2(y, x)};
}

GridSpec::GridSpec(double r_min, double r_max, int n_r,
                   double d_min, double d_max, int n_d,
                   double b_min, double b_max, int n_b)
    : r_min_(r_min), r_max_(r_max), d_min_(d_min), d_max_(d_max),
      b_min_(b_min), b_max_(b_max), n_r_(n_r), n_d_(n_d), n_b_(n_b) {
    if (n_r < 1 || n_d < 1 || n_b < 1)
        throw std::invalid_argument("GridSpec: cell counts must be positive");
    if (!(r_max > r_min) || !(d_max > d_min) || !(b_max > b_min))
        throw std::invalid_argument("GridSpec: each axis needs max > min");
}

namespace {

int bin(double value, double lo, double width, int count) {
    const double u = (value - lo) / width;
    if (!(u >= 0.0)) return -1;
    const auto k = static_cast<long long>(std::floor(u));
    return k < count ? static_cast<int>(k) : -1;
}

}  // namespace

std::optional<CellIndex> GridSpec::locate(const PolarCoords& p) const {
    const int i = bin(p.range, r_min_, range_cell(), n_r_);
    const int j = bin(p.doppler, d_min_, doppler_cell(), n_d_);
    const int l = bin(p.bearing, b_min_, bearing_cell(), n_b_);
    if (i < 0 || j < 0 || l < 0) return std::nullopt;
    return CellIndex{i, j, l};
}

CellIndex GridSpec::unflatten(std::size_t k) const {
    const int l = static_cast<int>(k % n_b_);
    k /= n_b_;
    const int j = static_cast<int>(k % n_d_);
    const int i = static_cast<int>(k / n_d_);
    return {i, j, l};
}

std::optional<CellIndex> state_to_cell(const Eigen::Vector4d& kinematics, const GridSpec& grid) {
    const auto polar = to_polar(kinematics);
    if (!polar) return std::nullopt;
    return grid.locate(*polar);
}

}  // namespace tbd
