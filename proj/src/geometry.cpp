#include "carmtrack/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace carmtrack {

namespace {

// Leaves already-unit quaternions bit-identical so that a value read back from
// disk re-serializes to the same digits.
Eigen::Quaterniond normalized_if_needed(Eigen::Quaterniond q) {
    const double n2 = q.squaredNorm();
    if (std::abs(n2 - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
        q.coeffs() /= std::sqrt(n2);
    }
    return q;
}

}  // namespace

Eigen::Quaterniond Rotation::canonical(Eigen::Quaterniond q) {
    if (q.w() < 0.0) {
        q.coeffs() = -q.coeffs();
    }
    return q;
}

Rotation Rotation::from_quaternion(double w, double x, double y, double z) {
    return from_quaternion(Eigen::Quaterniond(w, x, y, z));
}

Rotation Rotation::from_quaternion(const Eigen::Quaterniond& q) {
    const double n2 = q.squaredNorm();
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw std::invalid_argument("quaternion must be finite and non-zero");
    }
    return Rotation(canonical(normalized_if_needed(q)));
}

Rotation Rotation::from_matrix(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    const Mat3 r = svd.matrixU() * d * svd.matrixV().transpose();
    Eigen::Quaterniond q(r);
    q.normalize();
    return Rotation(canonical(q));
}

Rotation Rotation::from_axis_angle(const Vec3& axis, double angle_rad) {
    const double n = axis.norm();
    if (n == 0.0) {
        return Rotation();
    }
    Eigen::Quaterniond q(Eigen::AngleAxisd(angle_rad, axis / n));
    q.normalize();
    return Rotation(canonical(q));
}

Rotation Rotation::from_rotation_vector(const Vec3& rotvec) {
    return from_axis_angle(rotvec, rotvec.norm());
}

Vec3 Rotation::log() const {
    const Vec3 v = q_.vec();
    const double n = v.norm();
    if (n == 0.0) {
        return Vec3::Zero();
    }
    // w >= 0 keeps the angle in [0, pi]
    return v * (2.0 * std::atan2(n, q_.w()) / n);
}

double Rotation::angle() const {
    return 2.0 * std::atan2(q_.vec().norm(), q_.w());
}

Rotation Rotation::inverse() const {
    return Rotation(q_.conjugate());
}

Rotation operator*(const Rotation& a, const Rotation& b) {
    Eigen::Quaterniond q = a.q_ * b.q_;
    q.normalize();
    return Rotation(Rotation::canonical(q));
}

double angular_distance(const Rotation& a, const Rotation& b) {
    return (a.inverse() * b).angle();
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
    return {Rotation::from_matrix(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>()};
}

Mat4 RigidTransform::matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation.matrix();
    m.topRightCorner<3, 1>() = translation;
    return m;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

RigidTransform inverse(const RigidTransform& t) {
    const Rotation r_inv = t.rotation.inverse();
    return {r_inv, -(r_inv * t.translation)};
}

TransformDelta transform_delta(const RigidTransform& a, const RigidTransform& b) {
    return {angular_distance(a.rotation, b.rotation), (a.translation - b.translation).norm()};
}

Line3::Line3(const Vec3& origin, const Vec3& direction) : origin_(origin) {
    const double n = direction.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("line direction must be finite and non-zero");
    }
    const double n2 = n * n;
    direction_ = std::abs(n2 - 1.0) > 4.0 * std::numeric_limits<double>::epsilon() ? Vec3(direction / n) : direction;
}

Line3 Line3::transformed(const RigidTransform& new_T_old) const {
    return Line3(new_T_old.apply(origin_), new_T_old.apply_direction(direction_));
}

double point_to_line_distance(const Vec3& p, const Line3& line) {
    return (p - line.origin()).cross(line.direction()).norm();
}

Vec3 rotation_angle_about_axes(const Rotation& r) {
    return r.log() * (180.0 / kPi);
}

Mat3 skew(const Vec3& v) {
    Mat3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return s;
}

}  // namespace carmtrack
