#include "tbd/frame.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <string>

namespace tbd {

PowerFrame render_frame(std::span<const TargetState> truth, const GridSpec& grid, double sigma0,
                        int time_step, Rng& rng) {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("render_frame: sigma0 must be positive");
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::VectorXd amplitude = Eigen::VectorXd::Zero(n);
    std::vector<bool> occupied(grid.size(), false);
    for (const auto& target : truth) {
        if (!target.intensity) throw std::invalid_argument("render_frame: truth target without intensity");
        const auto cell = state_to_cell(target.kinematics, grid);
        if (!cell) continue;
        const auto k = grid.flat(*cell);
        if (occupied[k])
            throw ScenarioModelError("render_frame: two targets share cell (" + std::to_string(cell->range) + ", " +
                                     std::to_string(cell->doppler) + ", " + std::to_string(cell->bearing) +
                                     ") at step " + std::to_string(time_step));
        occupied[k] = true;
        amplitude(static_cast<Eigen::Index>(k)) = *target.intensity;
    }
    std::normal_distribution<double> noise(0.0, sigma0);
    PowerFrame frame{grid, Eigen::VectorXd(n), time_step};
    for (Eigen::Index k = 0; k < n; ++k) {
        const double re = amplitude(k) + noise(rng);
        const double im = noise(rng);
        frame.values(k) = re * re + im * im;
    }
    return frame;
}

MeasurementSet extract_measurement_set(const PowerFrame& frame, double theta) {
    if (theta < 0.0) throw std::invalid_argument("extract_measurement_set: theta must be >= 0");
    MeasurementSet set{theta, frame.time_step, {}};
    const auto& grid = frame.grid;
    for (Eigen::Index k = 0; k < frame.values.size(); ++k) {
        const double z = frame.values(k);
        if (z < theta) continue;
        const auto c = grid.unflatten(static_cast<std::size_t>(k));
        set.elements.push_back({grid.range_center(c.range), grid.doppler_center(c.doppler),
                                grid.bearing_center(c.bearing), z, c});
    }
    return set;
}

std::uint64_t frame_checksum(const PowerFrame& frame) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    mix(&frame.time_step, sizeof frame.time_step);
    mix(frame.values.data(), sizeof(double) * static_cast<std::size_t>(frame.values.size()));
    return h;
}

namespace {

static_assert(std::endian::native == std::endian::little, "frame codec assumes a little-endian host");

constexpr char kMagic[4] = {'T', 'B', 'D', 'F'};

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("read_frame: truncated stream");
    return v;
}

}  // namespace

void write_frame(std::ostream& out, const PowerFrame& frame) {
    const auto& g = frame.grid;
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kFrameFormatVersion);
    for (double v : {g.r_min(), g.r_max(), g.d_min(), g.d_max(), g.b_min(), g.b_max()}) put<double>(out, v);
    for (int v : {g.n_range(), g.n_doppler(), g.n_bearing()}) put<std::int32_t>(out, v);
    put<std::int32_t>(out, frame.time_step);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(frame.values.size()));
    out.write(reinterpret_cast<const char*>(frame.values.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(frame.values.size())));
    if (!out) throw std::runtime_error("write_frame: stream error");
}

PowerFrame read_frame(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("read_frame: bad magic");
    const auto version = get<std::uint32_t>(in);
    if (version != kFrameFormatVersion)
        throw std::runtime_error("read_frame: unsupported version " + std::to_string(version));
    double b[6];
    for (double& v : b) v = get<double>(in);
    std::int32_t n[3];
    for (auto& v : n) v = get<std::int32_t>(in);
    GridSpec grid(b[0], b[1], n[0], b[2], b[3], n[1], b[4], b[5], n[2]);
    const auto step = get<std::int32_t>(in);
    const auto count = get<std::uint64_t>(in);
    if (count != grid.size()) throw std::runtime_error("read_frame: value count does not match grid");
    PowerFrame frame{grid, Eigen::VectorXd(static_cast<Eigen::Index>(count)), step};
    in.read(reinterpret_cast<char*>(frame.values.data()), static_cast<std::streamsize>(sizeof(double) * count));
    if (!in) throw std::runtime_error("read_frame: truncated payload");
    if ((frame.values.array() < 0.0).any()) throw std::runtime_error("read_frame: negative power");
    return frame;
}

std::vector<PowerFrame> read_frames(std::istream& in) {
    std::vector<PowerFrame> frames;
    while (in.peek() != std::char_traits<char>::eof()) frames.push_back(read_frame(in));
    return frames;
}

}  // namespace tbd
