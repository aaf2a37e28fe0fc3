// Command-line harness over the registration library: synthesize benchmark
// scenarios, run a single registration, sweep a parameter grid, or dump
// per-point tensor data. Exit codes: 0 success, 1 runtime failure, 2 usage
// error. All emitted files are byte-deterministic for identical inputs.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ticp/dataset.hpp"
#include "ticp/pipeline.hpp"
#include "ticp/similarity.hpp"
#include "ticp/sweep.hpp"
#include "ticp/voting.hpp"

namespace {

std::string fmt15(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

ticp::Vec3 parse_axis(const std::string& text) {
    if (text == "x") return {1, 0, 0};
    if (text == "y") return {0, 1, 0};
    if (text == "z") return {0, 0, 1};
    ticp::Vec3 v;
    char c1 = 0, c2 = 0;
    std::istringstream ss(text);
    if (!(ss >> v.x >> c1 >> v.y >> c2 >> v.z) || c1 != ',' || c2 != ',')
        throw std::invalid_argument("axis must be x, y, z or ax,ay,az");
    return v;
}

std::optional<ticp::Point3> parse_point(const std::string& text) {
    if (text.empty()) return std::nullopt;
    ticp::Point3 p;
    char c1 = 0, c2 = 0;
    std::istringstream ss(text);
    if (!(ss >> p.x >> c1 >> p.y >> c2 >> p.z) || c1 != ',' || c2 != ',')
        throw std::invalid_argument("point must be given as x,y,z");
    return p;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

struct CommonFlags {
    double k_percent = 5.0;
    std::optional<double> tau;
    std::optional<double> w0;
    double b = 0.5;
    int max_iterations = 200;
    double phi_max_deg = 45.0;
    double eps_rel = 1e-6;
    double zero_cutoff = 1e-8;
    bool reverse_votes = false;
    bool trace_normalize = false;
    bool tensor_prescale = false;
    bool refresh_field = false;
    bool no_lie_shape_relation = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool with_k) {
    if (with_k) cmd->add_option("--k", f.k_percent, "neighborhood size, percent of cloud");
    cmd->add_option("--w0", f.w0, "start weight of the shape term (default: calibrated)");
    cmd->add_option("--b", f.b, "weight decay factor in (0,1)");
    cmd->add_option("--max-iterations", f.max_iterations, "iteration cap");
    cmd->add_option("--phi-max-deg", f.phi_max_deg, "max vote elevation angle, degrees");
    cmd->add_option("--eps-rel", f.eps_rel, "tensor regularization, relative");
    cmd->add_option("--zero-cutoff", f.zero_cutoff, "weight treated as zero below this");
    cmd->add_flag("--reverse-votes", f.reverse_votes, "deposit votes at list members");
    cmd->add_flag("--trace-normalize", f.trace_normalize, "normalize tensors by trace");
    cmd->add_flag("--tensor-prescale", f.tensor_prescale, "prescale tensors before embedding");
    cmd->add_flag("--refresh-field", f.refresh_field, "recompute shape data per iteration");
    cmd->add_flag("--no-lie-shape-relation", f.no_lie_shape_relation,
                  "keep the eigenvalue score in the shape relation of swc-lie");
}

ticp::RegistrationConfig config_from_flags(const CommonFlags& f, double default_tau) {
    ticp::RegistrationConfig cfg;
    cfg.k_percent = f.k_percent;
    cfg.tau = f.tau ? *f.tau : default_tau;
    cfg.w0 = f.w0;
    cfg.b = f.b;
    cfg.max_iterations = f.max_iterations;
    cfg.phi_max_rad = ticp::deg_to_rad(f.phi_max_deg);
    cfg.eps_rel = f.eps_rel;
    cfg.zero_cutoff = f.zero_cutoff;
    cfg.reverse_votes = f.reverse_votes;
    cfg.trace_normalize = f.trace_normalize;
    cfg.tensor_prescale = f.tensor_prescale;
    cfg.refresh_field = f.refresh_field;
    cfg.lie_shape_relation = !f.no_lie_shape_relation;
    return cfg;
}

int cmd_scenario(const std::string& in_path, int step, double angle_deg, const std::string& axis,
                 const std::string& hole_center, double hole_radius, double noise_percent,
                 double noise_absolute, uint64_t seed, const std::string& out_dir) {
    ticp::PointCloud cloud = ticp::load_cloud(in_path);
    cloud = ticp::subsample_step(cloud, step);
    ticp::Scenario scn = ticp::make_rotated_scenario(cloud, angle_deg, parse_axis(axis));

    if (hole_radius > 0.0) {
        auto center = parse_point(hole_center);
        scn = ticp::punch_hole(scn, center ? *center : ticp::default_hole_center(scn.target),
                               hole_radius);
    } else if (noise_percent > 0.0 || noise_absolute > 0.0) {
        double nu = noise_absolute > 0.0
                        ? noise_absolute
                        : noise_percent * ticp::bbox_diagonal(scn.target) / 100.0;
        scn = ticp::add_noise(scn, {nu, seed});
    }

    ticp::save_scenario(out_dir, scn);
    std::cout << "wrote " << out_dir << " (" << scn.tag << ", " << scn.source.points.size()
              << " source / " << scn.target.points.size() << " target points)\n";
    return 0;
}

int cmd_register(const std::string& manifest, const std::string& algorithm, const CommonFlags& f,
                 const std::string& csv_path, const std::string& json_path) {
    ticp::Scenario scn = ticp::load_scenario(manifest);
    ticp::AlgorithmSpec alg = ticp::parse_algorithm(algorithm);
    ticp::RegistrationConfig cfg = config_from_flags(f, 0.0);
    cfg.algorithm = alg.algorithm;
    cfg.strategy = alg.strategy;

    ticp::RunReport rep = ticp::run(scn.source, scn.target, cfg);

    std::string csv = "iteration,mrms,w_m,matches\n";
    for (const ticp::IterationRecord& it : rep.per_iteration) {
        csv += std::to_string(it.iteration);
        csv += ',';
        csv += fmt15(it.mrms);
        csv += ',';
        csv += fmt15(it.w_m);
        csv += ',';
        csv += std::to_string(it.match_count);
        csv += '\n';
    }
    if (!csv_path.empty()) write_text(csv_path, csv);

    double best_match_mrms = std::numeric_limits<double>::infinity();
    for (const ticp::IterationRecord& it : rep.per_iteration)
        best_match_mrms = std::min(best_match_mrms, it.mrms);
    double final_mrms = scn.correspondence
                            ? std::sqrt(ticp::correspondence_mse(scn, rep.final_transform))
                            : best_match_mrms;

    nlohmann::ordered_json j;
    j["algorithm"] = ticp::algorithm_name(alg.algorithm, alg.strategy);
    j["final_mrms"] = final_mrms;
    j["final_mrms_matches"] = best_match_mrms;
    j["rotation_error_deg"] = ticp::rad_to_deg(
        ticp::rotation_geodesic_error(rep.final_transform.R, scn.ground_truth.R));
    j["translation_error"] = (rep.final_transform.t - scn.ground_truth.t).norm();
    j["iterations"] = rep.iterations_used;
    j["converged"] = rep.converged;
    j["degenerate"] = rep.degenerate;
    nlohmann::ordered_json cfg_echo;
    cfg_echo["algorithm"] = ticp::algorithm_name(cfg.algorithm, cfg.strategy);
    cfg_echo["tau"] = cfg.tau;
    cfg_echo["k_percent"] = cfg.k_percent;
    cfg_echo["w0_requested"] = cfg.w0 ? nlohmann::ordered_json(*cfg.w0)
                                      : nlohmann::ordered_json(nullptr);
    cfg_echo["w0_used"] = rep.final_w0;
    cfg_echo["b"] = cfg.b;
    cfg_echo["max_iterations"] = cfg.max_iterations;
    cfg_echo["phi_max_deg"] = ticp::rad_to_deg(cfg.phi_max_rad);
    cfg_echo["eps_rel"] = cfg.eps_rel;
    cfg_echo["zero_cutoff"] = cfg.zero_cutoff;
    cfg_echo["reverse_votes"] = cfg.reverse_votes;
    cfg_echo["trace_normalize"] = cfg.trace_normalize;
    cfg_echo["tensor_prescale"] = cfg.tensor_prescale;
    cfg_echo["refresh_field"] = cfg.refresh_field;
    cfg_echo["lie_shape_relation"] = cfg.lie_shape_relation;
    j["config"] = cfg_echo;

    std::string summary = j.dump(2) + "\n";
    if (!json_path.empty()) write_text(json_path, summary);
    std::cout << summary;
    return 0;
}

int cmd_sweep(const std::vector<std::string>& scenarios, const std::vector<std::string>& algorithms,
              const std::vector<double>& ks, const CommonFlags& f, int jobs,
              const std::string& out_path) {
    ticp::SweepSpec spec;
    for (const std::string& a : algorithms) spec.algorithms.push_back(ticp::parse_algorithm(a));
    spec.k_percents = ks;
    spec.scenario_paths = scenarios;
    spec.base = config_from_flags(f, 0.0);
    spec.tau = f.tau;
    spec.jobs = jobs;

    std::string csv = ticp::sweep_csv(ticp::sweep_grid(spec));
    if (out_path.empty())
        std::cout << csv;
    else
        write_text(out_path, csv);
    return 0;
}

int cmd_inspect(const std::string& in_path, const CommonFlags& f, const std::string& out_path) {
    ticp::PointCloud cloud = ticp::load_cloud(in_path);
    ticp::TensorFieldOptions fopts;
    fopts.phi_max_rad = ticp::deg_to_rad(f.phi_max_deg);
    fopts.reverse_votes = f.reverse_votes;
    fopts.trace_normalize = f.trace_normalize;
    ticp::TensorField field = ticp::tensor_field(cloud, f.k_percent, fopts);
    ticp::DescriptorOptions dopts;
    dopts.eps_rel = f.eps_rel;
    dopts.tensor_prescale = f.tensor_prescale;
    std::vector<ticp::ShapeDescriptor> desc =
        ticp::build_descriptors(cloud, field.anisotropic, dopts);

    std::string csv =
        "index,x,y,z,lambda1,lambda2,lambda3,"
        "t11_00,t11_01,t11_02,t11_11,t11_12,t11_22,t12_x,t12_y,t12_z\n";
    for (size_t i = 0; i < desc.size(); ++i) {
        const ticp::ShapeDescriptor& d = desc[i];
        const ticp::UpperTri3& T = d.embedding.T11;
        double cols[15] = {d.point.x,       d.point.y,       d.point.z,
                           d.eigenvalues[0], d.eigenvalues[1], d.eigenvalues[2],
                           T.a00,           T.a01,           T.a02,
                           T.a11,           T.a12,           T.a22,
                           d.embedding.T12.x, d.embedding.T12.y, d.embedding.T12.z};
        csv += std::to_string(i);
        for (double v : cols) {
            csv += ',';
            csv += fmt15(v);
        }
        csv += '\n';
    }
    if (out_path.empty())
        std::cout << csv;
    else
        write_text(out_path, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigid point-cloud registration with tensor-shape and log-embedding matching"};
    app.require_subcommand(1);

    // scenario
    auto* scen = app.add_subcommand("scenario", "synthesize a benchmark scenario");
    std::string scen_in, scen_axis = "y", scen_hole_center, scen_out;
    int scen_step = 1;
    double scen_angle = 45.0, scen_hole_radius = 0.0, scen_noise_percent = 0.0,
           scen_noise_absolute = 0.0;
    uint64_t scen_seed = 0;
    scen->add_option("--in", scen_in, "input cloud (.ply ascii or .xyz)")->required();
    scen->add_option("--step", scen_step, "keep every step-th point");
    scen->add_option("--angle", scen_angle, "rotation angle, degrees");
    scen->add_option("--axis", scen_axis, "rotation axis: x, y, z or ax,ay,az");
    scen->add_option("--hole-center", scen_hole_center,
                     "hole center x,y,z (default: target point nearest the centroid)");
    auto* hole_opt = scen->add_option("--hole-radius", scen_hole_radius, "hole radius");
    auto* noisep_opt =
        scen->add_option("--noise-percent", scen_noise_percent, "noise scale, % of bbox diagonal");
    auto* noisea_opt =
        scen->add_option("--noise-absolute", scen_noise_absolute, "noise scale, model units");
    scen->add_option("--seed", scen_seed, "noise seed");
    scen->add_option("--out", scen_out, "output directory")->required();
    hole_opt->excludes(noisep_opt)->excludes(noisea_opt);
    noisep_opt->excludes(noisea_opt);

    // register
    auto* reg = app.add_subcommand("register", "run one registration against a scenario");
    std::string reg_manifest, reg_algorithm, reg_csv, reg_json;
    CommonFlags reg_flags;
    reg->add_option("--manifest", reg_manifest, "scenario manifest.json")->required();
    reg->add_option("--algorithm", reg_algorithm,
                    "icp | icp-ctsf | swc-icp | icp-lie-0 | icp-lie-1 | swc-lie-0 | swc-lie-1")
        ->required();
    reg->add_option("--tau", reg_flags.tau, "trim fraction in [0,1)");
    add_common_flags(reg, reg_flags, true);
    reg->add_option("--csv", reg_csv, "write per-iteration CSV here");
    reg->add_option("--json", reg_json, "write the JSON summary here");

    // sweep
    auto* swp = app.add_subcommand("sweep", "run an algorithm/parameter grid");
    std::vector<std::string> swp_scenarios, swp_algorithms = {"icp-ctsf",  "swc-icp",
                                                              "icp-lie-0", "icp-lie-1",
                                                              "swc-lie-0", "swc-lie-1"};
    std::vector<double> swp_ks = {5, 10, 25, 50, 75};
    CommonFlags swp_flags;
    int swp_jobs = 1;
    std::string swp_out;
    swp->add_option("--scenario", swp_scenarios, "scenario manifest(s)")
        ->required()
        ->delimiter(',');
    swp->add_option("--algorithms", swp_algorithms, "algorithms to sweep")->delimiter(',');
    swp->add_option("--k-list", swp_ks, "neighborhood sizes, percent")->delimiter(',');
    swp->add_option("--tau", swp_flags.tau,
                    "trim fraction for every run (default: 0.1 for hole scenarios, else 0)");
    add_common_flags(swp, swp_flags, false);
    swp->add_option("--jobs", swp_jobs, "worker threads");
    swp->add_option("--out", swp_out, "write the CSV here (default: stdout)");

    // inspect-tensors
    auto* insp = app.add_subcommand("inspect-tensors", "dump per-point shape data as CSV");
    std::string insp_in, insp_out;
    CommonFlags insp_flags;
    insp->add_option("--in", insp_in, "input cloud")->required();
    add_common_flags(insp, insp_flags, true);
    insp->add_option("--out", insp_out, "write the CSV here (default: stdout)");

    try {
        app.parse(argc, argv);
        if (*scen)
            return cmd_scenario(scen_in, scen_step, scen_angle, scen_axis, scen_hole_center,
                                scen_hole_radius, scen_noise_percent, scen_noise_absolute,
                                scen_seed, scen_out);
        if (*reg) return cmd_register(reg_manifest, reg_algorithm, reg_flags, reg_csv, reg_json);
        if (*swp)
            return cmd_sweep(swp_scenarios, swp_algorithms, swp_ks, swp_flags, swp_jobs, swp_out);
        if (*insp) return cmd_inspect(insp_in, insp_flags, insp_out);
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
