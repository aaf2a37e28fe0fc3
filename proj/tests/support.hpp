#pragma once

// Shared helpers for the test binaries: deterministic synthetic shapes,
// random rigid motions, and a tiny process runner for exercising the CLI.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>
#include <sstream>
#include <string>
#include <vector>

#include "ticp/core.hpp"
#include "ticp/rng.hpp"

namespace ticp::testsupport {

// Lumpy star-convex closed surface sampled on a Fibonacci sphere. The
// radial field mixes incommensurate waves so the shape has no rotational
// symmetry about any axis; scale picks the bounding-box size (diagonal is
// roughly 2.6 * scale).
inline PointCloud make_blob(int n, double scale, double amplitude) {
    PointCloud cloud;
    cloud.label = "blob";
    cloud.points.reserve(static_cast<size_t>(n));
    const double golden = 3.14159265358979323846 * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        double y = 1.0 - 2.0 * (i + 0.5) / n;
        double r = std::sqrt(std::max(0.0, 1.0 - y * y));
        double th = golden * i;
        Vec3 u{r * std::cos(th), y, r * std::sin(th)};
        double f = 1.0 + amplitude * (0.5 * std::sin(4.0 * u.x + 1.0) * u.y +
                                      0.4 * std::cos(3.0 * u.z + 0.5) * u.x +
                                      0.3 * std::sin(5.0 * u.y + 2.0) * u.z);
        cloud.points.push_back(u * (scale * f));
    }
    return cloud;
}

// Smooth open height-field patch over a square; bumpy enough that local
// frames are non-degenerate everywhere.
inline PointCloud make_patch(int per_side, double extent) {
    PointCloud cloud;
    cloud.label = "patch";
    for (int i = 0; i < per_side; ++i) {
        for (int j = 0; j < per_side; ++j) {
            double x = extent * (static_cast<double>(i) / (per_side - 1) - 0.5);
            double y = extent * (static_cast<double>(j) / (per_side - 1) - 0.5);
            double z = 0.25 * extent *
                       (std::sin(7.0 * x / extent + 0.3) * std::cos(5.0 * y / extent + 1.1) +
                        0.6 * std::sin(11.0 * (x + y) / extent));
            cloud.points.push_back({x, y, z});
        }
    }
    return cloud;
}

inline PointCloud random_cloud(SplitMix64& gen, int n, double extent) {
    PointCloud cloud;
    cloud.label = "random";
    cloud.points.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        cloud.points.push_back({extent * (gen.next_double() - 0.5),
                                extent * (gen.next_double() - 0.5),
                                extent * (gen.next_double() - 0.5)});
    return cloud;
}

inline Mat3 random_rotation(SplitMix64& gen) {
    GaussianGen g(gen.next());
    Vec3 axis = g.next_unit_vector();
    double angle = 2.0 * 3.14159265358979323846 * gen.next_double();
    return rotation_about_axis(axis, angle);
}

inline Vec3 random_vec(SplitMix64& gen, double extent) {
    return {extent * (gen.next_double() - 0.5), extent * (gen.next_double() - 0.5),
            extent * (gen.next_double() - 0.5)};
}

// Runs a command line, returns its exit code; stdout/stderr go to the
// given file (or /dev/null when empty).
inline int run_command(const std::string& cmd, const std::string& output_file = "") {
    std::string full = cmd;
    if (output_file.empty())
        full += " > /dev/null 2>&1";
    else
        full += " > " + output_file + " 2>&1";
    int rc = std::system(full.c_str());
    if (rc == -1) return -1;
    return WEXITSTATUS(rc);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ticp::testsupport
