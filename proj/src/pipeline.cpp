#include "ticp/pipeline.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ticp/solver.hpp"
#include "ticp/spatial.hpp"
#include "ticp/voting.hpp"

namespace ticp {

AlgorithmSpec parse_algorithm(const std::string& name) {
    if (name == "icp") return {Algorithm::ICP, 0};
    if (name == "icp-ctsf") return {Algorithm::ICP_CTSF, 0};
    if (name == "swc-icp") return {Algorithm::SWC_ICP, 0};
    if (name == "icp-lie-0") return {Algorithm::ICP_LIE, 0};
    if (name == "icp-lie-1") return {Algorithm::ICP_LIE, 1};
    if (name == "swc-lie-0") return {Algorithm::SWC_LIE, 0};
    if (name == "swc-lie-1") return {Algorithm::SWC_LIE, 1};
    throw std::invalid_argument("unknown algorithm: " + name);
}

std::string algorithm_name(Algorithm a, int strategy) {
    switch (a) {
        case Algorithm::ICP: return "icp";
        case Algorithm::ICP_CTSF: return "icp-ctsf";
        case Algorithm::SWC_ICP: return "swc-icp";
        case Algorithm::ICP_LIE: return strategy == 0 ? "icp-lie-0" : "icp-lie-1";
        case Algorithm::SWC_LIE: return strategy == 0 ? "swc-lie-0" : "swc-lie-1";
    }
    throw std::invalid_argument("algorithm_name: bad tag");
}

void validate(const RegistrationConfig& cfg) {
    if (!(cfg.tau >= 0.0 && cfg.tau < 1.0))
        throw std::invalid_argument("config: tau must be in [0, 1)");
    if (!(cfg.k_percent > 0.0 && cfg.k_percent <= 100.0))
        throw std::invalid_argument("config: k_percent must be in (0, 100]");
    if (!(cfg.b > 0.0 && cfg.b < 1.0))
        throw std::invalid_argument("config: b must be in (0, 1)");
    if (cfg.max_iterations < 1)
        throw std::invalid_argument("config: max_iterations must be >= 1");
    if (cfg.strategy != 0 && cfg.strategy != 1)
        throw std::invalid_argument("config: strategy must be 0 or 1");
    if (cfg.w0 && !(*cfg.w0 >= 0.0))
        throw std::invalid_argument("config: w0 must be non-negative");
    if (!(cfg.eps_rel > 0.0))
        throw std::invalid_argument("config: eps_rel must be positive");
    if (!(cfg.zero_cutoff >= 0.0))
        throw std::invalid_argument("config: zero_cutoff must be non-negative");
    if (!(cfg.phi_max_rad > 0.0 && cfg.phi_max_rad <= deg_to_rad(90.0)))
        throw std::invalid_argument("config: phi_max must be in (0, 90] degrees");
}

namespace {

struct StepEval {
    RigidTransform step;
    double eps = 0.0;  // mean squared error of the proposed step over the pairs
    bool degenerate = false;
    int pair_count = 0;
};

// Plain pairs: x from the moved source, y from the target.
StepEval solve_step(const PointCloud& moved, const PointCloud& target, const MatchSet& ms) {
    std::vector<Point3> X, Y;
    X.reserve(ms.pairs.size());
    Y.reserve(ms.pairs.size());
    for (const Correspondence& c : ms.pairs) {
        X.push_back(moved.points[static_cast<size_t>(c.source_index)]);
        Y.push_back(target.points[static_cast<size_t>(c.target_index)]);
    }
    StepEval ev;
    ev.pair_count = static_cast<int>(X.size());
    ev.step = horn_solve(X, Y, nullptr, 0.0, &ev.degenerate);
    double acc = 0.0;
    for (size_t i = 0; i < X.size(); ++i)
        acc += (Y[i] - apply_point(ev.step, X[i])).squared_norm();
    ev.eps = acc / static_cast<double>(X.size());
    return ev;
}

// Mixed-covariance pairs: each (x, y) pair picks up the shape partner of
// its target, taken at the partner's current moved position. The error is
// still evaluated over the real (x, y) pairs.
StepEval solve_step_swc(const PointCloud& moved, const PointCloud& target, const MatchSet& ms,
                        const std::vector<int>& partner, double omega) {
    std::vector<Point3> X, Y, S;
    X.reserve(ms.pairs.size());
    Y.reserve(ms.pairs.size());
    S.reserve(ms.pairs.size());
    for (const Correspondence& c : ms.pairs) {
        int s = partner[static_cast<size_t>(c.target_index)];
        if (s < 0) continue;  // no shape partner: pair dropped
        X.push_back(moved.points[static_cast<size_t>(c.source_index)]);
        Y.push_back(target.points[static_cast<size_t>(c.target_index)]);
        S.push_back(moved.points[static_cast<size_t>(s)]);
    }
    StepEval ev;
    ev.pair_count = static_cast<int>(X.size());
    ev.step = horn_solve(X, Y, &S, omega, &ev.degenerate);
    double acc = 0.0;
    for (size_t i = 0; i < X.size(); ++i)
        acc += (Y[i] - apply_point(ev.step, X[i])).squared_norm();
    ev.eps = acc / static_cast<double>(X.size());
    return ev;
}

RunReport run_common(const PointCloud& source, const PointCloud& target,
                     const RegistrationConfig& cfg) {
    validate(cfg);
    if (source.points.empty() || target.points.empty())
        throw std::invalid_argument("run: empty cloud");

    const bool needs_shape = cfg.algorithm != Algorithm::ICP;
    const bool is_swc = cfg.algorithm == Algorithm::SWC_ICP || cfg.algorithm == Algorithm::SWC_LIE;

    TensorFieldOptions fopts;
    fopts.phi_max_rad = cfg.phi_max_rad;
    fopts.reverse_votes = cfg.reverse_votes;
    fopts.trace_normalize = cfg.trace_normalize;
    DescriptorOptions dopts;
    dopts.eps_rel = cfg.eps_rel;
    dopts.tensor_prescale = cfg.tensor_prescale;

    std::vector<ShapeDescriptor> sdesc, tdesc;
    if (needs_shape) {
        sdesc = build_descriptors(source, tensor_field(source, cfg.k_percent, fopts).anisotropic,
                                  dopts);
        tdesc = build_descriptors(target, tensor_field(target, cfg.k_percent, fopts).anisotropic,
                                  dopts);
    }

    WeightSchedule w;
    w.b = cfg.b;
    w.m = 0;
    w.zero_cutoff = cfg.zero_cutoff;
    if (needs_shape) w.w0 = cfg.w0 ? *cfg.w0 : calibrate_w0(target, sdesc, tdesc);

    // The shape relation of the mixed-covariance variants is a property of
    // the clouds' intrinsic geometry; it is computed once, before the loop.
    std::vector<int> partner;
    if (is_swc) {
        MatchSet rel;
        if (cfg.algorithm == Algorithm::SWC_LIE && cfg.lie_shape_relation)
            rel = lie_shape_matching(sdesc, tdesc, cfg.strategy, w);
        else
            rel = shape_matching(sdesc, tdesc);
        partner.assign(target.points.size(), -1);
        for (const Correspondence& c : rel.pairs)
            partner[static_cast<size_t>(c.target_index)] = c.source_index;
    }

    PointCloud moved = source;
    std::vector<ShapeDescriptor> sdesc_cur = sdesc;
    RigidTransform accumulated;
    double best_eps = std::numeric_limits<double>::infinity();

    RunReport rep;
    rep.final_w0 = needs_shape ? w.w0 : 0.0;

    bool moved_dirty = true;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        if (moved_dirty) {
            if (cfg.refresh_field && needs_shape) {
                sdesc = build_descriptors(
                    moved, tensor_field(moved, cfg.k_percent, fopts).anisotropic, dopts);
                sdesc_cur = sdesc;
            } else if (cfg.algorithm == Algorithm::ICP_LIE) {
                for (size_t i = 0; i < sdesc.size(); ++i)
                    sdesc_cur[i] = moved_descriptor(sdesc[i], moved.points[i]);
            }
            moved_dirty = false;
        }

        MatchSet ms;
        switch (cfg.algorithm) {
            case Algorithm::ICP:
            case Algorithm::SWC_ICP:
            case Algorithm::SWC_LIE: {
                SpatialIndex idx(moved);
                ms = trim(closest_point(idx, target), cfg.tau);
                break;
            }
            case Algorithm::ICP_CTSF:
                ms = ctsf_trimmed(moved, target, sdesc, tdesc, w, cfg.tau);
                break;
            case Algorithm::ICP_LIE:
                ms = trim(lie_matching(sdesc_cur, tdesc, cfg.strategy, w), cfg.tau);
                break;
        }

        StepEval ev = is_swc ? solve_step_swc(moved, target, ms, partner, w.current())
                             : solve_step(moved, target, ms);

        rep.per_iteration.push_back({it, std::sqrt(ev.eps), w.current(), ev.pair_count});
        rep.degenerate = rep.degenerate || ev.degenerate;
        rep.iterations_used = it;

        if (ev.eps < best_eps) {
            best_eps = ev.eps;
            moved = apply_transform(moved, ev.step);
            accumulated = compose(ev.step, accumulated);
            moved_dirty = true;
        } else if (needs_shape && w.current() > 0.0) {
            // error went up with weight still active: decay the weight and
            // retry from the best transform so far (never applied the step)
            w.m += 1;
        } else {
            rep.converged = true;
            break;
        }
    }

    rep.final_transform = accumulated;
    return rep;
}

RunReport checked_run(const PointCloud& source, const PointCloud& target,
                      const RegistrationConfig& cfg, Algorithm expected) {
    if (cfg.algorithm != expected)
        throw std::invalid_argument("run_*: config algorithm tag does not match entry point");
    return run_common(source, target, cfg);
}

}  // namespace

RunReport run_icp(const PointCloud& source, const PointCloud& target,
                  const RegistrationConfig& cfg) {
    return checked_run(source, target, cfg, Algorithm::ICP);
}

RunReport run_icp_ctsf(const PointCloud& source, const PointCloud& target,
                       const RegistrationConfig& cfg) {
    return checked_run(source, target, cfg, Algorithm::ICP_CTSF);
}

RunReport run_swc_icp(const PointCloud& source, const PointCloud& target,
                      const RegistrationConfig& cfg) {
    return checked_run(source, target, cfg, Algorithm::SWC_ICP);
}

RunReport run_lie(const PointCloud& source, const PointCloud& target,
                  const RegistrationConfig& cfg) {
    if (cfg.algorithm != Algorithm::ICP_LIE && cfg.algorithm != Algorithm::SWC_LIE)
        throw std::invalid_argument("run_lie: config must name a lie variant");
    return run_common(source, target, cfg);
}

RunReport run(const PointCloud& source, const PointCloud& target,
              const RegistrationConfig& cfg) {
    return run_common(source, target, cfg);
}

}  // namespace ticp
