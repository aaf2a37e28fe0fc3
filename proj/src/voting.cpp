#include "ticp/voting.hpp"

#include <cmath>
#include <stdexcept>

#include "ticp/jacobi.hpp"

namespace ticp {

SymTensor3 isotropic_tensor(const Point3& p, const std::vector<Point3>& neighbors,
                            double sigma) {
    if (neighbors.empty())
        throw std::invalid_argument("isotropic_tensor: empty neighbor set");
    if (!(sigma > 0.0))
        throw std::invalid_argument("isotropic_tensor: sigma must be positive");
    SymTensor3 T;
    double inv_s2 = 1.0 / (sigma * sigma);
    for (const auto& s : neighbors) {
        Vec3 v = s - p;
        double d2 = v.squared_norm();
        if (d2 <= 0.0)
            throw std::invalid_argument("isotropic_tensor: neighbor coincides with center");
        Vec3 vhat = v / std::sqrt(d2);
        T.add_outer(vhat, std::exp(-d2 * inv_s2));
    }
    return T;
}

EigenFrame eigen_frame(const SymTensor3& T) {
    std::array<std::array<double, 3>, 3> A = {{{T.xx, T.xy, T.xz},
                                               {T.xy, T.yy, T.yz},
                                               {T.xz, T.yz, T.zz}}};
    JacobiResult<3> jr = jacobi_symmetric<3>(A);

    EigenFrame f;
    f.lambda1 = jr.eigenvalues[0];
    f.lambda2 = jr.eigenvalues[1];
    f.lambda3 = jr.eigenvalues[2];
    Vec3 e[3];
    for (int k = 0; k < 3; ++k) {
        Vec3 v{jr.eigenvectors[k][0], jr.eigenvectors[k][1], jr.eigenvectors[k][2]};
        // largest-magnitude component made non-negative
        double ax = std::fabs(v.x), ay = std::fabs(v.y), az = std::fabs(v.z);
        double lead = (ax >= ay && ax >= az) ? v.x : (ay >= az ? v.y : v.z);
        e[k] = lead < 0.0 ? -v : v;
    }
    if (e[0].cross(e[1]).dot(e[2]) < 0.0) e[2] = -e[2];
    f.e1 = e[0];
    f.e2 = e[1];
    f.e3 = e[2];
    return f;
}

ArcGeometry arc_geometry(const Point3& p, const Point3& s, const EigenFrame& frame) {
    Vec3 v = s - p;
    double vn = v.norm();
    if (vn <= 0.0) throw std::invalid_argument("arc_geometry: s coincides with p");

    const Vec3& zhat = frame.e3;
    double h = v.dot(zhat);
    Vec3 in_plane = v - zhat * h;
    double ell = in_plane.norm();

    ArcGeometry arc;
    arc.phi_s = std::atan2(std::fabs(h), ell);
    if (ell <= 0.0) {
        // s directly above/below p: straight up; capped to zero weight later
        arc.d_e = arc.phi_s * vn / std::sin(arc.phi_s);
        arc.xi_s = zhat;
        return arc;
    }
    Vec3 uhat = in_plane / ell;
    if (arc.phi_s > 0.0) {
        arc.d_e = arc.phi_s * vn / std::sin(arc.phi_s);
    } else {
        arc.d_e = vn;
    }
    double sgn = h > 0.0 ? 1.0 : (h < 0.0 ? -1.0 : 0.0);
    arc.xi_s = uhat * std::cos(2.0 * arc.phi_s) + zhat * (sgn * std::sin(2.0 * arc.phi_s));
    if (arc.phi_s == 0.0) arc.xi_s = uhat;  // sgn term vanishes; keep exact unit vector
    return arc;
}

double anisotropic_weight(const ArcGeometry& arc, double sigma, double phi_max_rad) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("anisotropic_weight: sigma must be positive");
    // tan is monotone on [0, pi/2], so comparing angles equals comparing tangents
    if (arc.phi_s > phi_max_rad) return 0.0;
    return std::exp(-arc.d_e / (sigma * sigma));
}

SymTensor3 anisotropic_tensor(int p_index, const PointCloud& cloud,
                              const std::vector<NeighborList>& lists,
                              const std::vector<EigenFrame>& frames,
                              double phi_max_rad) {
    const auto& list = lists[static_cast<size_t>(p_index)];
    const auto& frame = frames[static_cast<size_t>(p_index)];
    const Point3& p = cloud.points[static_cast<size_t>(p_index)];
    SymTensor3 S;
    for (int sj : list.neighbor_indices) {
        ArcGeometry arc = arc_geometry(p, cloud.points[static_cast<size_t>(sj)], frame);
        double g = anisotropic_weight(arc, list.sigma, phi_max_rad);
        if (g > 0.0) S.add_outer(arc.xi_s, g);
    }
    return S;
}

TensorField tensor_field(const PointCloud& cloud, double k_percent,
                         const TensorFieldOptions& opts) {
    if (cloud.size() < 3)
        throw std::invalid_argument("tensor_field: need at least 3 points");

    TensorField field;
    field.lists = neighborhoods(cloud, k_percent);
    const size_t n = cloud.size();

    field.isotropic.reserve(n);
    field.frames.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<Point3> nbr;
        nbr.reserve(field.lists[i].neighbor_indices.size());
        for (int j : field.lists[i].neighbor_indices)
            nbr.push_back(cloud.points[static_cast<size_t>(j)]);
        field.isotropic.push_back(isotropic_tensor(cloud.points[i], nbr, field.lists[i].sigma));
        field.frames.push_back(eigen_frame(field.isotropic.back()));
    }

    field.anisotropic.assign(n, SymTensor3{});
    if (!opts.reverse_votes) {
        for (size_t i = 0; i < n; ++i)
            field.anisotropic[i] = anisotropic_tensor(static_cast<int>(i), cloud, field.lists,
                                                      field.frames, opts.phi_max_rad);
    } else {
        // each voter deposits arc votes onto the members of its own list,
        // using the voter's frame and scale
        for (size_t v = 0; v < n; ++v) {
            const Point3& pv = cloud.points[v];
            for (int r : field.lists[v].neighbor_indices) {
                ArcGeometry arc =
                    arc_geometry(pv, cloud.points[static_cast<size_t>(r)], field.frames[v]);
                double g = anisotropic_weight(arc, field.lists[v].sigma, opts.phi_max_rad);
                if (g > 0.0) field.anisotropic[static_cast<size_t>(r)].add_outer(arc.xi_s, g);
            }
        }
    }

    if (opts.trace_normalize) {
        for (auto& S : field.anisotropic) {
            double d = std::max(S.trace(), 1.0);
            S = S * (1.0 / d);
        }
    }
    return field;
}

}  // namespace ticp
