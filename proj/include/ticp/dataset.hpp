#pragma once

// Cloud file I/O (ascii PLY and XYZ) and synthetic benchmark scenarios: a
// rotated copy with exact ground truth, the same with a ball of target
// points removed, and the same with seeded noise on both clouds. Scenarios
// round-trip through a JSON manifest next to the cloud files; everything
// written is byte-deterministic.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ticp/core.hpp"

namespace ticp {

enum class CloudFormat { PlyAscii, Xyz };

// Format from extension: .ply / .xyz (case-insensitive); throws otherwise.
CloudFormat format_from_path(const std::string& path);

// Vertex positions in file order; other attributes ignored. Parse errors
// carry the line number.
PointCloud load_cloud(const std::string& path, CloudFormat format);
PointCloud load_cloud(const std::string& path);

// 17-significant-digit decimal output so a load after save is exact.
void save_cloud(const std::string& path, const PointCloud& cloud, CloudFormat format);
void save_cloud(const std::string& path, const PointCloud& cloud);

// Keep indices 0, step, 2*step, ...; step >= 1.
PointCloud subsample_step(const PointCloud& cloud, int step);

struct Scenario {
    PointCloud source;
    PointCloud target;
    RigidTransform ground_truth;  // maps source onto target
    // correspondence[i] = target index of source point i, or -1 when the
    // partner was removed; absent when no point-by-point truth exists
    std::optional<std::vector<int>> correspondence;
    std::string tag = "original";  // original | hole | noise
};

// target = cloud; source = the cloud rotated by angle_deg about the axis
// (right-hand rule); ground truth inverts that rotation. Identity
// correspondence.
Scenario make_rotated_scenario(const PointCloud& cloud, double angle_deg, const Vec3& axis);

// The target point closest to the target centroid: a deterministic default
// for hole placement.
Point3 default_hole_center(const PointCloud& target);

// Remove every target point within radius of center (closed ball); the
// correspondence is reindexed and loses the removed partners; the source is
// untouched. Throws when nothing survives.
Scenario punch_hole(const Scenario& scn, const Point3& center, double radius);

struct NoiseSpec {
    double nu = 0.0;     // displacement scale, model units
    uint64_t seed = 0;
};

// Displace every point of both clouds by nu * g * u with g standard normal
// and u a uniform unit vector, from per-cloud streams derived from the
// seed (target stream 0, source stream 1). Correspondence and ground truth
// are retained.
Scenario add_noise(const Scenario& scn, const NoiseSpec& spec);

// Longest diagonal of the axis-aligned bounding box.
double bbox_diagonal(const PointCloud& cloud);

// Writes dir/source.ply, dir/target.ply and dir/manifest.json.
void save_scenario(const std::string& dir, const Scenario& scn);
// Reads a manifest and the clouds it names (paths relative to it).
Scenario load_scenario(const std::string& manifest_path);

// Mean squared error of ground_truth(source) against the corresponding
// target points, over pairs whose partner survives; used for truth-based
// reporting. Throws when no correspondence is present or none survives.
double correspondence_mse(const Scenario& scn, const RigidTransform& transform);

}  // namespace ticp
