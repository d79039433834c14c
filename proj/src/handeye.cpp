#include "carmtrack/handeye.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace carmtrack {

namespace {

constexpr double kIdentityAngle = 1e-12;
constexpr double kRankTolerance = 1e-10;

using MatX3 = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// Pseudo-inverse solve keeping the `rank` largest singular values.
Vec3 truncated_solve(const Eigen::JacobiSVD<MatX3>& svd, const Eigen::VectorXd& rhs, int rank) {
    const Eigen::VectorXd utb = svd.matrixU().leftCols(rank).transpose() * rhs;
    Vec3 x = Vec3::Zero();
    for (int k = 0; k < rank; ++k) {
        x += svd.matrixV().col(k) * (utb[k] / svd.singularValues()[k]);
    }
    return x;
}

int numerical_rank(const Eigen::Vector3d& singular_values) {
    const double smax = singular_values[0];
    if (!(smax > 0.0)) {
        return 0;
    }
    int rank = 0;
    for (int k = 0; k < 3; ++k) {
        if (singular_values[k] > kRankTolerance * smax) ++rank;
    }
    return rank;
}

Vec3 canonical_sign(Vec3 v) {
    Eigen::Index k;
    v.cwiseAbs().maxCoeff(&k);
    return v[k] < 0.0 ? Vec3(-v) : v;
}

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

RotationEstimate solve_rotation_with(std::span<const RelativePosePair> pairs, const DegeneracyReport& report,
                                     bool require_identifiable) {
    std::size_t usable = 0;
    for (const auto& p : pairs) {
        if (p.a.rotation.angle() > kIdentityAngle && p.b.rotation.angle() > kIdentityAngle) ++usable;
    }
    if (usable < 2) {
        throw HandEyeError(HandEyeError::Kind::InsufficientPairs,
                           "rotation needs at least 2 pairs with non-identity rotations, got " + std::to_string(usable));
    }
    if (!report.rotation_identifiable && require_identifiable) {
        throw HandEyeError(HandEyeError::Kind::SingleAxisRotation,
                           "all relative rotations share one axis; rotation about it is not identifiable");
    }

    MatX3 m(3 * pairs.size(), 3);
    Eigen::VectorXd rhs(3 * pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        // 2 sin(theta/2) n is twice the vector part of a w >= 0 quaternion
        const Vec3 pa = 2.0 * pairs[k].a.rotation.quaternion().vec();
        const Vec3 pb = 2.0 * pairs[k].b.rotation.quaternion().vec();
        m.middleRows<3>(3 * static_cast<Eigen::Index>(k)) = skew(pa + pb);
        rhs.segment<3>(3 * static_cast<Eigen::Index>(k)) = pb - pa;
    }
    Eigen::JacobiSVD<MatX3> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int rank = report.rotation_identifiable ? std::min(3, numerical_rank(svd.singularValues())) : 2;
    const Vec3 k = truncated_solve(svd, rhs, std::max(rank, 1));

    // k = tan(theta/2) n  <=>  q = (1, k) / sqrt(1 + |k|^2)
    return {Rotation::from_quaternion(1.0, k.x(), k.y(), k.z()), report.rotation_identifiable};
}

}  // namespace

DegeneracyReport diagnose_degeneracy(std::span<const RelativePosePair> pairs, const DegeneracyOptions& options) {
    std::vector<Vec3> axes;
    const double min_angle = deg2rad(options.min_rotation_angle_deg);
    for (const auto& p : pairs) {
        if (p.a.rotation.angle() >= min_angle) axes.push_back(p.a.rotation.log().normalized());
    }
    if (axes.empty()) {
        for (const auto& p : pairs) {
            if (p.a.rotation.angle() > kIdentityAngle) axes.push_back(p.a.rotation.log().normalized());
        }
    }
    if (axes.empty()) {
        throw HandEyeError(HandEyeError::Kind::AllIdentity, "all relative rotations are identity");
    }

    Mat3 scatter = Mat3::Zero();
    for (const auto& n : axes) scatter += n * n.transpose();
    Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
    const Vec3 dominant = canonical_sign(eig.eigenvectors().col(2).normalized());

    double spread = 0.0;
    for (const auto& n : axes) {
        // axes are lines: n and -n are the same axis
        spread = std::max(spread, std::atan2(n.cross(dominant).norm(), std::abs(n.dot(dominant))));
    }

    DegeneracyReport report;
    report.axis_spread_deg = rad2deg(spread);
    report.axes_used = static_cast<int>(axes.size());
    if (report.axis_spread_deg < options.axis_tolerance_deg) {
        report.observable_rank = 2;
        report.unobservable_direction = dominant;
        report.rotation_identifiable = false;
    }
    return report;
}

RotationEstimate solve_rotation(std::span<const RelativePosePair> pairs, const DegeneracyOptions& options,
                                bool require_identifiable) {
    return solve_rotation_with(pairs, diagnose_degeneracy(pairs, options), require_identifiable);
}

TranslationEstimate solve_translation(std::span<const RelativePosePair> pairs, const Rotation& rotation,
                                      const std::optional<Vec3>& unobservable_direction) {
    if (pairs.empty()) {
        throw HandEyeError(HandEyeError::Kind::InsufficientPairs, "translation needs at least one pair");
    }
    Mat3 projector = Mat3::Identity();
    if (unobservable_direction) {
        const Vec3 d = unobservable_direction->normalized();
        projector -= d * d.transpose();
    }
    MatX3 c(3 * pairs.size(), 3);
    Eigen::VectorXd rhs(3 * pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto row = 3 * static_cast<Eigen::Index>(k);
        c.middleRows<3>(row) = (pairs[k].a.rotation.matrix() - Mat3::Identity()) * projector;
        rhs.segment<3>(row) = rotation * pairs[k].b.translation - pairs[k].a.translation;
    }
    Eigen::JacobiSVD<MatX3> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int rank = numerical_rank(svd.singularValues());
    if (rank < 2) {
        throw HandEyeError(HandEyeError::Kind::RankDeficient,
                           "translation system has rank " + std::to_string(rank) + " (< 2)");
    }

    TranslationEstimate est;
    est.rank = rank;
    est.translation = truncated_solve(svd, rhs, rank);
    est.residuals = translation_residuals(pairs, RigidTransform(rotation, est.translation));
    return est;
}

std::vector<Vec3> translation_residuals(std::span<const RelativePosePair> pairs, const RigidTransform& x) {
    std::vector<Vec3> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        const Vec3 ax = p.a.rotation * x.translation + p.a.translation;
        const Vec3 xb = x.rotation * p.b.translation + x.translation;
        out.push_back(ax - xb);
    }
    return out;
}

HandEyeSolution solve(std::span<const RelativePosePair> pairs, const DegeneracyOptions& options) {
    if (pairs.size() < 2) {
        throw HandEyeError(HandEyeError::Kind::InsufficientPairs,
                           "hand-eye calibration needs at least 2 relative pose pairs, got " +
                               std::to_string(pairs.size()));
    }
    DegeneracyReport report = diagnose_degeneracy(pairs, options);
    const RotationEstimate rot = solve_rotation_with(pairs, report, false);
    TranslationEstimate trans = solve_translation(pairs, rot.rotation, report.unobservable_direction);
    if (trans.rank == 2 && !report.unobservable_direction) {
        // axes looked spread out but the stacked system still lost a direction
        MatX3 c(3 * pairs.size(), 3);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            c.middleRows<3>(3 * static_cast<Eigen::Index>(k)) = pairs[k].a.rotation.matrix() - Mat3::Identity();
        }
        Eigen::JacobiSVD<MatX3> svd(c, Eigen::ComputeThinV);
        report.observable_rank = 2;
        report.unobservable_direction = canonical_sign(svd.matrixV().col(2));
    }

    HandEyeSolution sol;
    sol.tracker_T_carm = RigidTransform(rot.rotation, trans.translation);
    sol.degeneracy = report;
    sol.pair_count = pairs.size();

    const Rotation& rx = rot.rotation;
    Vec3 rot_sum = Vec3::Zero();
    for (const auto& p : pairs) {
        const Rotation mismatch = p.a.rotation * rx * (rx * p.b.rotation).inverse();
        rot_sum += rotation_angle_about_axes(mismatch).cwiseAbs();
    }
    sol.rot_residual_per_axis_deg = rot_sum / static_cast<double>(pairs.size());

    double sq_sum = 0.0;
    std::vector<double> comp[3];
    for (auto& c : comp) c.reserve(pairs.size());
    for (const auto& r : trans.residuals) {
        sq_sum += r.squaredNorm();
        for (int k = 0; k < 3; ++k) comp[k].push_back(std::abs(r[k]));
    }
    sol.trans_residual_rms_mm = std::sqrt(sq_sum / static_cast<double>(pairs.size()));
    for (int k = 0; k < 3; ++k) sol.trans_residual_median_per_axis_mm[k] = median_of(std::move(comp[k]));
    return sol;
}

}  // namespace carmtrack
