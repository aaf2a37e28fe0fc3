#include "ticp/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "ticp/rng.hpp"

namespace fs = std::filesystem;

namespace ticp {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

PointCloud load_ply(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    struct Element {
        std::string name;
        long count = 0;
        std::vector<std::string> properties;  // scalar property names, in order
        bool has_list = false;
    };

    std::string token;
    int line_no = 0;
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };

    if (!next_line() || line != "ply") parse_fail(path, line_no, "missing ply magic");

    std::vector<Element> elements;
    bool ascii = false;
    bool header_done = false;
    while (!header_done) {
        if (!next_line()) parse_fail(path, line_no, "unterminated header");
        std::istringstream ss(line);
        std::string kw;
        ss >> kw;
        if (kw == "comment" || kw == "obj_info") continue;
        if (kw == "format") {
            std::string fmt;
            ss >> fmt;
            ascii = fmt == "ascii";
            if (!ascii) parse_fail(path, line_no, "only ascii format supported");
        } else if (kw == "element") {
            Element e;
            ss >> e.name >> e.count;
            if (!ss || e.count < 0) parse_fail(path, line_no, "bad element line");
            elements.push_back(e);
        } else if (kw == "property") {
            if (elements.empty()) parse_fail(path, line_no, "property before element");
            std::string type;
            ss >> type;
            if (type == "list") {
                elements.back().has_list = true;
            } else {
                std::string name;
                ss >> name;
                if (!ss) parse_fail(path, line_no, "bad property line");
                elements.back().properties.push_back(name);
            }
        } else if (kw == "end_header") {
            header_done = true;
        } else {
            parse_fail(path, line_no, "unknown header keyword: " + kw);
        }
    }

    PointCloud cloud;
    for (const Element& e : elements) {
        if (e.name != "vertex") {
            // skip this element's data rows
            for (long i = 0; i < e.count; ++i)
                if (!next_line()) parse_fail(path, line_no, "unexpected end of file");
            continue;
        }
        if (e.has_list) parse_fail(path, line_no, "list properties on vertex unsupported");
        int xi = -1, yi = -1, zi = -1;
        for (size_t p = 0; p < e.properties.size(); ++p) {
            if (e.properties[p] == "x") xi = static_cast<int>(p);
            if (e.properties[p] == "y") yi = static_cast<int>(p);
            if (e.properties[p] == "z") zi = static_cast<int>(p);
        }
        if (xi < 0 || yi < 0 || zi < 0)
            parse_fail(path, line_no, "vertex element lacks x/y/z properties");
        cloud.points.reserve(static_cast<size_t>(e.count));
        for (long i = 0; i < e.count; ++i) {
            if (!next_line()) parse_fail(path, line_no, "unexpected end of file");
            std::istringstream row(line);
            std::vector<double> vals(e.properties.size());
            for (size_t p = 0; p < vals.size(); ++p) {
                if (!(row >> vals[p])) parse_fail(path, line_no, "bad vertex row");
            }
            cloud.points.push_back({vals[static_cast<size_t>(xi)], vals[static_cast<size_t>(yi)],
                                    vals[static_cast<size_t>(zi)]});
        }
    }
    if (cloud.points.empty() &&
        std::none_of(elements.begin(), elements.end(),
                     [](const Element& e) { return e.name == "vertex"; }))
        parse_fail(path, line_no, "no vertex element");
    cloud.label = fs::path(path).stem().string();
    return cloud;
}

PointCloud load_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    PointCloud cloud;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream ss(line);
        double x, y, z;
        if (!(ss >> x >> y >> z)) parse_fail(path, line_no, "expected three coordinates");
        cloud.points.push_back({x, y, z});
    }
    cloud.label = fs::path(path).stem().string();
    return cloud;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

CloudFormat format_from_path(const std::string& path) {
    std::string ext = lower(fs::path(path).extension().string());
    if (ext == ".ply") return CloudFormat::PlyAscii;
    if (ext == ".xyz") return CloudFormat::Xyz;
    throw std::invalid_argument("unrecognized cloud extension: " + path);
}

PointCloud load_cloud(const std::string& path, CloudFormat format) {
    return format == CloudFormat::PlyAscii ? load_ply(path) : load_xyz(path);
}

PointCloud load_cloud(const std::string& path) {
    return load_cloud(path, format_from_path(path));
}

void save_cloud(const std::string& path, const PointCloud& cloud, CloudFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    if (format == CloudFormat::PlyAscii) {
        out << "ply\nformat ascii 1.0\nelement vertex " << cloud.points.size()
            << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
        for (const Point3& p : cloud.points)
            out << fmt17(p.x) << ' ' << fmt17(p.y) << ' ' << fmt17(p.z) << '\n';
    } else {
        for (const Point3& p : cloud.points)
            out << fmt17(p.x) << ' ' << fmt17(p.y) << ' ' << fmt17(p.z) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void save_cloud(const std::string& path, const PointCloud& cloud) {
    save_cloud(path, cloud, format_from_path(path));
}

PointCloud subsample_step(const PointCloud& cloud, int step) {
    if (step < 1) throw std::invalid_argument("subsample_step: step must be >= 1");
    PointCloud out;
    out.label = cloud.label;
    for (size_t i = 0; i < cloud.points.size(); i += static_cast<size_t>(step))
        out.points.push_back(cloud.points[i]);
    return out;
}

Scenario make_rotated_scenario(const PointCloud& cloud, double angle_deg, const Vec3& axis) {
    if (cloud.points.empty()) throw std::invalid_argument("make_rotated_scenario: empty cloud");
    double n = axis.norm();
    if (!(n > 0.0)) throw std::invalid_argument("make_rotated_scenario: zero axis");
    Mat3 R = rotation_about_axis(axis / n, deg_to_rad(angle_deg));

    Scenario scn;
    scn.target = cloud;
    scn.target.label = "target";
    scn.source = apply_transform(cloud, make_rigid(R, {0, 0, 0}));
    scn.source.label = "source";
    scn.ground_truth = invert(make_rigid(R, {0, 0, 0}));
    std::vector<int> corr(cloud.points.size());
    for (size_t i = 0; i < corr.size(); ++i) corr[i] = static_cast<int>(i);
    scn.correspondence = std::move(corr);
    scn.tag = "original";
    return scn;
}

Point3 default_hole_center(const PointCloud& target) {
    if (target.points.empty()) throw std::invalid_argument("default_hole_center: empty cloud");
    Point3 c = centroid(target.points);
    size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < target.points.size(); ++i) {
        double d = (target.points[i] - c).squared_norm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return target.points[best];
}

Scenario punch_hole(const Scenario& scn, const Point3& center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("punch_hole: radius must be positive");
    Scenario out = scn;
    out.target.points.clear();
    std::vector<int> remap(scn.target.points.size(), -1);
    for (size_t j = 0; j < scn.target.points.size(); ++j) {
        if ((scn.target.points[j] - center).norm() <= radius) continue;
        remap[j] = static_cast<int>(out.target.points.size());
        out.target.points.push_back(scn.target.points[j]);
    }
    if (out.target.points.empty()) throw std::runtime_error("punch_hole: hole removed every point");
    if (out.correspondence) {
        for (int& t : *out.correspondence)
            t = t >= 0 ? remap[static_cast<size_t>(t)] : -1;
    }
    out.tag = "hole";
    return out;
}

Scenario add_noise(const Scenario& scn, const NoiseSpec& spec) {
    if (!(spec.nu >= 0.0)) throw std::invalid_argument("add_noise: nu must be non-negative");
    Scenario out = scn;
    auto displace = [&](PointCloud& cloud, uint64_t stream) {
        GaussianGen gen(derive_stream(spec.seed, stream));
        for (Point3& p : cloud.points) {
            double g = gen.next();
            Vec3 u = gen.next_unit_vector();
            p += spec.nu * g * u;
        }
    };
    displace(out.target, 0);
    displace(out.source, 1);
    out.tag = "noise";
    return out;
}

double bbox_diagonal(const PointCloud& cloud) {
    if (cloud.points.empty()) return 0.0;
    Point3 lo = cloud.points[0], hi = cloud.points[0];
    for (const Point3& p : cloud.points) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
        hi.z = std::max(hi.z, p.z);
    }
    return (hi - lo).norm();
}

void save_scenario(const std::string& dir, const Scenario& scn) {
    fs::create_directories(dir);
    fs::path base(dir);
    save_cloud((base / "source.ply").string(), scn.source, CloudFormat::PlyAscii);
    save_cloud((base / "target.ply").string(), scn.target, CloudFormat::PlyAscii);

    nlohmann::ordered_json j;
    j["source_file"] = "source.ply";
    j["target_file"] = "target.ply";
    nlohmann::ordered_json gt;
    gt["R"] = nlohmann::ordered_json::array();
    for (double v : scn.ground_truth.R.m) gt["R"].push_back(v);
    gt["t"] = {scn.ground_truth.t.x, scn.ground_truth.t.y, scn.ground_truth.t.z};
    j["ground_truth"] = gt;
    if (scn.correspondence) j["correspondence"] = *scn.correspondence;
    j["tag"] = scn.tag;

    std::ofstream out(base / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("manifest write failed in " + dir);
}

Scenario load_scenario(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open " + manifest_path);
    nlohmann::json j;
    in >> j;

    fs::path base = fs::path(manifest_path).parent_path();
    Scenario scn;
    scn.source = load_cloud((base / j.at("source_file").get<std::string>()).string());
    scn.source.label = "source";
    scn.target = load_cloud((base / j.at("target_file").get<std::string>()).string());
    scn.target.label = "target";

    const auto& gt = j.at("ground_truth");
    Mat3 R;
    for (int i = 0; i < 9; ++i) R.m[static_cast<size_t>(i)] = gt.at("R").at(i).get<double>();
    Vec3 t{gt.at("t").at(0).get<double>(), gt.at("t").at(1).get<double>(),
           gt.at("t").at(2).get<double>()};
    scn.ground_truth = make_rigid(R, t);

    if (j.contains("correspondence"))
        scn.correspondence = j.at("correspondence").get<std::vector<int>>();
    scn.tag = j.value("tag", "original");
    return scn;
}

double correspondence_mse(const Scenario& scn, const RigidTransform& transform) {
    if (!scn.correspondence) throw std::invalid_argument("correspondence_mse: no correspondence");
    double acc = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < scn.correspondence->size(); ++i) {
        int t = (*scn.correspondence)[i];
        if (t < 0) continue;
        acc += (scn.target.points[static_cast<size_t>(t)] -
                apply_point(transform, scn.source.points[i]))
                   .squared_norm();
        ++n;
    }
    if (n == 0) throw std::invalid_argument("correspondence_mse: no surviving pairs");
    return acc / static_cast<double>(n);
}

}  // namespace ticp
