#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "sscat/binio.hpp"
#include "sscat/errors.hpp"
#include "sscat/rng.hpp"

namespace sscat {

// One timestamped LiDAR return. Timestamps are non-decreasing within a
// stream; all fields are finite.
struct StreamPoint {
    double t = 0.0;  // seconds
    float x = 0.0f, y = 0.0f, z = 0.0f;  // meters
    float intensity = 0.0f;              // reflectivity in [0, 255]
};

// A fixed-duration slice of a stream: every point satisfies
// t_start < t <= t_end.
struct Packet {
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<StreamPoint> points;
};

struct ScannerConfig {
    double pulse_rate = 240000.0;  // points per second
    double fov_h_deg = 70.4;
    double fov_v_deg = 77.2;
    // Rosette (Lissajous) sweep frequencies. Near-coprime values keep the
    // pattern from repeating over any test-length window.
    double f1_hz = 1394.0;
    double f2_hz = 1441.0;
    double amplitude_scale = 1.0;  // fraction of the half-FoV swept
    double drop_probability = 0.0;
};

// ---------------------------------------------------------------------------
// Scene: axis-aligned surfaces plus small constant-velocity targets, enough
// geometry to exercise the grid with static structure and moving objects.

struct Surface {
    // Rectangle on a plane {axis = d}. axis: 0=x, 1=y, 2=z. u/v are the two
    // remaining axes in (x,y,z) order.
    int axis = 0;
    double d = 0.0;
    double u_min = 0.0, u_max = 0.0;
    double v_min = 0.0, v_max = 0.0;
    float reflectivity = 128.0f;
};

struct MovingBox {
    std::array<double, 3> center{0, 0, 0};  // at t = 0
    std::array<double, 3> velocity{0, 0, 0};
    std::array<double, 3> half_extent{0.35, 0.35, 0.2};
    float reflectivity = 200.0f;
};

struct Scene {
    std::vector<Surface> surfaces;
    std::vector<MovingBox> targets;
    // Optional water patch: a z-plane whose return probability varies with
    // time, mimicking wind-driven surface clutter.
    bool has_water = false;
    Surface water;
    double water_density_base = 0.3;
    double water_density_swing = 0.3;
    double water_density_hz = 0.5;
};

namespace detail {

inline bool ray_hits_surface(const Surface& s, const std::array<double, 3>& dir, double& dist,
                             std::array<double, 3>& hit) {
    const double dn = dir[static_cast<std::size_t>(s.axis)];
    if (std::abs(dn) < 1e-12) return false;
    const double t = s.d / dn;
    if (t <= 0.05) return false;
    const int u_axis = (s.axis == 0) ? 1 : 0;
    const int v_axis = (s.axis == 2) ? 1 : 2;
    const double u = dir[static_cast<std::size_t>(u_axis)] * t;
    const double v = dir[static_cast<std::size_t>(v_axis)] * t;
    if (u < s.u_min || u > s.u_max || v < s.v_min || v > s.v_max) return false;
    dist = t;
    hit = {dir[0] * t, dir[1] * t, dir[2] * t};
    return true;
}

inline bool ray_hits_box(const MovingBox& b, double time, const std::array<double, 3>& dir, double& dist,
                         std::array<double, 3>& hit) {
    // slab test against the box at its position at `time`
    double t_near = 0.05, t_far = 1e30;
    for (int a = 0; a < 3; ++a) {
        const double c = b.center[static_cast<std::size_t>(a)] + b.velocity[static_cast<std::size_t>(a)] * time;
        const double lo = c - b.half_extent[static_cast<std::size_t>(a)];
        const double hi = c + b.half_extent[static_cast<std::size_t>(a)];
        const double d = dir[static_cast<std::size_t>(a)];
        if (std::abs(d) < 1e-12) {
            if (lo > 0.0 || hi < 0.0) return false;
            continue;
        }
        double t0 = lo / d, t1 = hi / d;
        if (t0 > t1) std::swap(t0, t1);
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
        if (t_near > t_far) return false;
    }
    dist = t_near;
    hit = {dir[0] * t_near, dir[1] * t_near, dir[2] * t_near};
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Synthetic scanner. Pulses are emitted at 1/pulse_rate intervals along a
// rosette direction pattern and ray-cast against the scene from the origin,
// looking down +x. Deterministic for a fixed seed.

inline std::vector<StreamPoint> generate(const Scene& scene, const ScannerConfig& cfg, double duration,
                                         std::uint64_t seed) {
    if (duration <= 0.0) throw ConfigError("generate: duration must be > 0");
    if (cfg.pulse_rate <= 0.0) throw ConfigError("generate: pulse_rate must be > 0");
    if (cfg.drop_probability < 0.0 || cfg.drop_probability >= 1.0)
        throw ConfigError("generate: drop_probability must be in [0, 1)");

    Rng rng(seed);
    std::vector<StreamPoint> out;
    const auto pulses = static_cast<std::uint64_t>(std::floor(duration * cfg.pulse_rate + 0.5));
    out.reserve(pulses / 2);

    const double deg = std::numbers::pi / 180.0;
    const double amp_h = 0.5 * cfg.fov_h_deg * deg * cfg.amplitude_scale;
    const double amp_v = 0.5 * cfg.fov_v_deg * deg * cfg.amplitude_scale;

    for (std::uint64_t i = 0; i < pulses; ++i) {
        // first pulse strictly after t=0 so packet intervals (0, stride] catch it
        const double t = static_cast<double>(i + 1) / cfg.pulse_rate;
        const double drop_draw = rng.uniform();   // drawn every pulse to keep the
        const double water_draw = rng.uniform();  // sequence independent of hits
        if (t > duration) break;
        if (cfg.drop_probability > 0.0 && drop_draw < cfg.drop_probability) continue;

        const double th = amp_h * std::sin(2.0 * std::numbers::pi * cfg.f1_hz * t);
        const double tv = amp_v * std::sin(2.0 * std::numbers::pi * cfg.f2_hz * t);
        const std::array<double, 3> dir = {std::cos(tv) * std::cos(th), std::cos(tv) * std::sin(th),
                                           std::sin(tv)};

        double best = 1e30;
        std::array<double, 3> best_hit{};
        float best_refl = 0.0f;
        bool hit_any = false;
        for (const auto& s : scene.surfaces) {
            double d;
            std::array<double, 3> h;
            if (detail::ray_hits_surface(s, dir, d, h) && d < best) {
                best = d;
                best_hit = h;
                best_refl = s.reflectivity;
                hit_any = true;
            }
        }
        for (const auto& b : scene.targets) {
            double d;
            std::array<double, 3> h;
            if (detail::ray_hits_box(b, t, dir, d, h) && d < best) {
                best = d;
                best_hit = h;
                best_refl = b.reflectivity;
                hit_any = true;
            }
        }
        if (scene.has_water) {
            double d;
            std::array<double, 3> h;
            if (detail::ray_hits_surface(scene.water, dir, d, h) && d < best) {
                const double density =
                    scene.water_density_base +
                    scene.water_density_swing * std::sin(2.0 * std::numbers::pi * scene.water_density_hz * t);
                if (water_draw < density) {
                    best = d;
                    best_hit = h;
                    best_refl = scene.water.reflectivity;
                    hit_any = true;
                }
            }
        }
        if (!hit_any) continue;

        out.push_back(StreamPoint{t, static_cast<float>(best_hit[0]), static_cast<float>(best_hit[1]),
                                  static_cast<float>(best_hit[2]), best_refl});
    }
    return out;
}

// Scene presets, scaled by `extent` (the rough target distance in meters).
inline Scene scene_preset(const std::string& name, double extent = 40.0) {
    Scene s;
    const double far_bound = 4.0 * extent;
    if (name == "wall") {
        s.surfaces.push_back(Surface{0, 0.75 * extent, -far_bound, far_bound, -far_bound, far_bound, 200.0f});
    } else if (name == "bridge") {
        // back wall + deck + a lattice of thin verticals
        s.surfaces.push_back(Surface{0, 0.9 * extent, -far_bound, far_bound, -far_bound, far_bound, 160.0f});
        s.surfaces.push_back(Surface{2, -0.12 * extent, 0.0, far_bound, -far_bound, far_bound, 90.0f});
        for (int i = -3; i <= 3; ++i) {
            MovingBox post;
            post.center = {0.6 * extent, 0.12 * extent * i, 0.0};
            post.velocity = {0, 0, 0};
            post.half_extent = {0.01 * extent, 0.01 * extent, 0.3 * extent};
            post.reflectivity = 140.0f;
            s.targets.push_back(post);
        }
    } else if (name == "drone") {
        s.surfaces.push_back(Surface{2, -0.12 * extent, 0.0, far_bound, -far_bound, far_bound, 90.0f});
        MovingBox drone;
        drone.center = {0.5 * extent, -0.2 * extent, 0.05 * extent};
        drone.velocity = {0.0, 0.05 * extent, 0.0};
        drone.half_extent = {0.009 * extent, 0.009 * extent, 0.005 * extent};
        drone.reflectivity = 220.0f;
        s.targets.push_back(drone);
    } else if (name == "windy-water") {
        s.surfaces.push_back(Surface{0, 0.85 * extent, -far_bound, far_bound, -far_bound, far_bound, 150.0f});
        s.has_water = true;
        s.water = Surface{2, -0.1 * extent, 0.0, far_bound, -far_bound, far_bound, 60.0f};
    } else {
        throw ConfigError("unknown scene preset: " + name);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Packetizer: slices a time-ordered stream into consecutive half-open
// intervals (t0 + k*stride, t0 + (k+1)*stride], emitting empty packets for
// gaps so downstream strides line up with wall time.

inline std::vector<Packet> packetize(std::span<const StreamPoint> stream, double stride, double t0 = 0.0,
                                     std::optional<double> duration = std::nullopt) {
    if (stride <= 0.0) throw ConfigError("packetize: stride must be > 0");

    std::int64_t n_packets = 0;
    if (duration) n_packets = static_cast<std::int64_t>(std::ceil(*duration / stride - 1e-9));
    double prev_t = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::int64_t, const StreamPoint*>> slots;
    slots.reserve(stream.size());
    for (const auto& p : stream) {
        if (p.t < prev_t) throw OrderError("packetize: stream is not time-ordered");
        prev_t = p.t;
        if (p.t <= t0) continue;
        auto k = static_cast<std::int64_t>(std::ceil((p.t - t0) / stride)) - 1;
        // robust interval assignment: fix up any floating-point slop
        while (p.t > t0 + static_cast<double>(k + 1) * stride) ++k;
        while (k > 0 && p.t <= t0 + static_cast<double>(k) * stride) --k;
        if (duration && k >= n_packets) continue;
        slots.emplace_back(k, &p);
        n_packets = std::max(n_packets, k + 1);
    }

    std::vector<Packet> packets(static_cast<std::size_t>(n_packets));
    for (std::int64_t k = 0; k < n_packets; ++k) {
        packets[static_cast<std::size_t>(k)].t_start = t0 + static_cast<double>(k) * stride;
        packets[static_cast<std::size_t>(k)].t_end = t0 + static_cast<double>(k + 1) * stride;
    }
    for (const auto& [k, p] : slots) packets[static_cast<std::size_t>(k)].points.push_back(*p);
    return packets;
}

// ---------------------------------------------------------------------------
// Stream file formats.
//   CSV : "t,x,y,z,intensity" header then one record per line.
//   SSCR: magic "SSCR", u16 version, packed little-endian records of
//         f64 t + f32 x,y,z,intensity.
// A ".gz" suffix on either selects gzip compression.

enum class StreamFormat { kCsv, kSscr };

inline StreamFormat format_from_path(const std::string& path) {
    std::string p = path;
    if (p.size() > 3 && p.ends_with(".gz")) p = p.substr(0, p.size() - 3);
    if (p.ends_with(".csv")) return StreamFormat::kCsv;
    if (p.ends_with(".sscr")) return StreamFormat::kSscr;
    throw ConfigError("cannot infer stream format from path: " + path);
}

namespace detail {

inline bool is_gz(const std::string& path) { return path.ends_with(".gz"); }

inline std::string slurp(const std::string& path) {
    if (is_gz(path)) {
        gzFile f = gzopen(path.c_str(), "rb");
        if (!f) throw IoError("cannot open " + path);
        std::string data;
        char buf[1 << 16];
        int n;
        while ((n = gzread(f, buf, sizeof(buf))) > 0) data.append(buf, static_cast<std::size_t>(n));
        const bool bad = n < 0;
        gzclose(f);
        if (bad) throw IoError("gzip read failed on " + path);
        return data;
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void spew(const std::string& path, const std::string& data) {
    if (is_gz(path)) {
        gzFile f = gzopen(path.c_str(), "wb");
        if (!f) throw IoError("cannot open " + path + " for writing");
        const int n = gzwrite(f, data.data(), static_cast<unsigned>(data.size()));
        gzclose(f);
        if (n != static_cast<int>(data.size())) throw IoError("gzip write failed on " + path);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw IoError("write failed on " + path);
}

}  // namespace detail

inline void write_stream(const std::string& path, std::span<const StreamPoint> points) {
    const StreamFormat fmt = format_from_path(path);
    std::ostringstream os(std::ios::binary);
    if (fmt == StreamFormat::kCsv) {
        os << "t,x,y,z,intensity\n";
        char line[160];
        for (const auto& p : points) {
            std::snprintf(line, sizeof(line), "%.9f,%.6f,%.6f,%.6f,%.3f\n", p.t, p.x, p.y, p.z, p.intensity);
            os << line;
        }
    } else {
        binio::write_magic(os, "SSCR");
        binio::write_uint<std::uint16_t>(os, 1);
        for (const auto& p : points) {
            binio::write_f64(os, p.t);
            binio::write_f32(os, p.x);
            binio::write_f32(os, p.y);
            binio::write_f32(os, p.z);
            binio::write_f32(os, p.intensity);
        }
    }
    detail::spew(path, os.str());
}

inline std::vector<StreamPoint> read_stream(const std::string& path) {
    const StreamFormat fmt = format_from_path(path);
    const std::string data = detail::slurp(path);
    std::vector<StreamPoint> out;
    double prev_t = -std::numeric_limits<double>::infinity();
    auto check_order = [&](const StreamPoint& p) {
        if (!std::isfinite(p.t) || !std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
            !std::isfinite(p.intensity))
            throw ParseError(path + ": non-finite field in record " + std::to_string(out.size()));
        if (p.t < prev_t)
            throw OrderError(path + ": timestamp regression at record " + std::to_string(out.size()));
        prev_t = p.t;
    };

    if (fmt == StreamFormat::kCsv) {
        std::istringstream is(data);
        std::string line;
        if (!std::getline(is, line)) throw ParseError(path + ": empty CSV");
        std::size_t lineno = 1;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty()) continue;
            StreamPoint p;
            char trailing = 0;
            const int n = std::sscanf(line.c_str(), "%lf,%f,%f,%f,%f %c", &p.t, &p.x, &p.y, &p.z,
                                      &p.intensity, &trailing);
            if (n != 5) throw ParseError(path + ": malformed CSV record at line " + std::to_string(lineno));
            check_order(p);
            out.push_back(p);
        }
    } else {
        std::istringstream is(data, std::ios::binary);
        binio::expect_magic(is, "SSCR", "SSCR stream");
        const auto version = binio::read_uint<std::uint16_t>(is);
        if (version != 1) throw ParseError(path + ": unsupported SSCR version");
        const std::size_t header = 6, rec = 24;
        if ((data.size() - header) % rec != 0) throw ParseError(path + ": truncated SSCR record");
        const std::size_t n_records = (data.size() - header) / rec;
        out.reserve(n_records);
        for (std::size_t i = 0; i < n_records; ++i) {
            StreamPoint p;
            p.t = binio::read_f64(is);
            p.x = binio::read_f32(is);
            p.y = binio::read_f32(is);
            p.z = binio::read_f32(is);
            p.intensity = binio::read_f32(is);
            check_order(p);
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace sscat
