#pragma once

// The iterative registration drivers. All variants share one loop shape:
// match on the moved source, solve the closed form, evaluate the mean
// squared error of the proposed step, and either accept it or react to the
// increase (step the weight schedule, or stop when no schedule remains).
// Shape data is computed once on the original clouds; only positions are
// refreshed across iterations.

#include <optional>
#include <string>
#include <vector>

#include "ticp/core.hpp"
#include "ticp/matching.hpp"
#include "ticp/similarity.hpp"

namespace ticp {

enum class Algorithm { ICP, ICP_CTSF, SWC_ICP, ICP_LIE, SWC_LIE };

struct AlgorithmSpec {
    Algorithm algorithm = Algorithm::ICP;
    int strategy = 0;
};

// Accepts icp, icp-ctsf, swc-icp, icp-lie-0, icp-lie-1, swc-lie-0,
// swc-lie-1; throws std::invalid_argument on anything else.
AlgorithmSpec parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm a, int strategy);

struct RegistrationConfig {
    Algorithm algorithm = Algorithm::ICP;
    int strategy = 0;             // 0 | 1, Lie variants only
    double tau = 0.0;             // trim fraction in [0, 1)
    double k_percent = 5.0;       // neighborhood size
    std::optional<double> w0;     // start weight; unset = calibrated default
    double b = 0.5;               // schedule decay, in (0, 1)
    int max_iterations = 200;
    double phi_max_rad = deg_to_rad(45.0);
    double eps_rel = 1e-6;        // tensor regularization
    double zero_cutoff = 1e-8;    // schedule floor
    bool reverse_votes = false;
    bool trace_normalize = false;
    bool tensor_prescale = false;
    bool refresh_field = false;       // recompute shape data on the moved source
    bool lie_shape_relation = true;   // SWC-LIE: shape relation scored in log space
};

struct IterationRecord {
    int iteration = 0;
    double mrms = 0.0;
    double w_m = 0.0;
    int match_count = 0;
};

struct RunReport {
    std::vector<IterationRecord> per_iteration;
    RigidTransform final_transform;
    bool converged = false;
    bool degenerate = false;
    int iterations_used = 0;
    double final_w0 = 0.0;  // the schedule start actually used
};

void validate(const RegistrationConfig& cfg);  // throws std::invalid_argument

RunReport run_icp(const PointCloud& source, const PointCloud& target,
                  const RegistrationConfig& cfg);
RunReport run_icp_ctsf(const PointCloud& source, const PointCloud& target,
                       const RegistrationConfig& cfg);
RunReport run_swc_icp(const PointCloud& source, const PointCloud& target,
                      const RegistrationConfig& cfg);
RunReport run_lie(const PointCloud& source, const PointCloud& target,
                  const RegistrationConfig& cfg);

// Dispatch on cfg.algorithm.
RunReport run(const PointCloud& source, const PointCloud& target,
              const RegistrationConfig& cfg);

}  // namespace ticp
