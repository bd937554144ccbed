#pragma once

#include "tbd/grid.hpp"
#include "tbd/rng.hpp"
#include "tbd/target_state.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace tbd {

/// Raised when a truth configuration breaks the one-target-per-cell model.
class ScenarioModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One scan of nonnegative cell powers, row-major over (range, doppler, bearing).
struct PowerFrame {
    GridSpec grid;
    Eigen::VectorXd values;
    int time_step = 0;

    [[nodiscard]] double at(const CellIndex& c) const { return values(static_cast<Eigen::Index>(grid.flat(c))); }
};

/// A thresholded cell: its center coordinates and power.
struct Measurement {
    double range = 0.0;
    double doppler = 0.0;
    double bearing = 0.0;
    double power = 0.0;
    CellIndex cell;
};

struct MeasurementSet {
    double threshold = 0.0;
    int time_step = 0;
    std::vector<Measurement> elements;

    [[nodiscard]] std::size_t size() const { return elements.size(); }
};

/// Simulates z = |h + n|^2 in every cell, with h equal to the target amplitude
/// in the cell of each in-grid target and n complex Gaussian (per-component
/// std sigma0). Every target must carry an intensity.
PowerFrame render_frame(std::span<const TargetState> truth, const GridSpec& grid, double sigma0,
                        int time_step, Rng& rng);

/// Keeps every cell whose power reaches theta.
MeasurementSet extract_measurement_set(const PowerFrame& frame, double theta);

/// Order-independent checksum of the frame contents (FNV-1a over the bytes).
std::uint64_t frame_checksum(const PowerFrame& frame);

/// Binary frame codec: "TBDF" magic, u32 version, grid, i32 step, u64 count,
/// then little-endian float64 powers.
inline constexpr std::uint32_t kFrameFormatVersion = 1;
void write_frame(std::ostream& out, const PowerFrame& frame);
PowerFrame read_frame(std::istream& in);
/// Reads frames until end of stream.
std::vector<PowerFrame> read_frames(std::istream& in);

}  // namespace tbd
