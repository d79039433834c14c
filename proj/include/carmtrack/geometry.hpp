#ifndef CARMTRACK_GEOMETRY_HPP
#define CARMTRACK_GEOMETRY_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace carmtrack {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/**
 * @brief SO(3) element stored as a unit quaternion.
 *
 * The quaternion is kept in the w >= 0 hemisphere so that every rotation has
 * exactly one stored representation. Matrices are produced on demand only.
 */
class Rotation {
public:
    Rotation() = default;

    /// Normalizes the input; throws std::invalid_argument on a zero quaternion.
    static Rotation from_quaternion(double w, double x, double y, double z);
    static Rotation from_quaternion(const Eigen::Quaterniond& q);
    /// Projects onto SO(3) first, so slightly non-orthonormal input is accepted.
    static Rotation from_matrix(const Mat3& m);
    /// @p axis need not be unit length; a zero axis yields identity.
    static Rotation from_axis_angle(const Vec3& axis, double angle_rad);
    static Rotation from_rotation_vector(const Vec3& rotvec);

    static Rotation about_x(double angle_deg) { return from_axis_angle(Vec3::UnitX(), deg2rad(angle_deg)); }
    static Rotation about_y(double angle_deg) { return from_axis_angle(Vec3::UnitY(), deg2rad(angle_deg)); }
    static Rotation about_z(double angle_deg) { return from_axis_angle(Vec3::UnitZ(), deg2rad(angle_deg)); }

    const Eigen::Quaterniond& quaternion() const { return q_; }
    Mat3 matrix() const { return q_.toRotationMatrix(); }

    /// Rotation vector (axis * angle), angle in [0, pi].
    Vec3 log() const;
    /// Rotation angle in radians, in [0, pi].
    double angle() const;

    Rotation inverse() const;
    Vec3 operator*(const Vec3& v) const { return q_ * v; }
    friend Rotation operator*(const Rotation& a, const Rotation& b);

private:
    explicit Rotation(const Eigen::Quaterniond& q) : q_(q) {}
    static Eigen::Quaterniond canonical(Eigen::Quaterniond q);

    Eigen::Quaterniond q_ = Eigen::Quaterniond::Identity();
};

/// Angle between two rotations, radians.
double angular_distance(const Rotation& a, const Rotation& b);

/**
 * @brief Rigid transform A_T_B: maps point coordinates expressed in frame B
 * into frame A. Translation is in millimeters.
 *
 * Chains read left to right: A_T_C = A_T_B * B_T_C.
 */
struct RigidTransform {
    Rotation rotation;
    Vec3 translation = Vec3::Zero();

    RigidTransform() = default;
    RigidTransform(const Rotation& r, const Vec3& t) : rotation(r), translation(t) {}

    static RigidTransform identity() { return {}; }
    static RigidTransform pure_translation(const Vec3& t) { return {Rotation(), t}; }
    static RigidTransform pure_rotation(const Rotation& r) { return {r, Vec3::Zero()}; }
    /// Rotation block is projected onto SO(3); the bottom row is ignored.
    static RigidTransform from_matrix(const Mat4& m);

    Mat4 matrix() const;
    Vec3 apply(const Vec3& point) const { return rotation * point + translation; }
    Vec3 apply_direction(const Vec3& dir) const { return rotation * dir; }
};

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& t);

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) { return compose(a, b); }

/// Rotation angle (rad) and translation distance (mm) between two transforms.
struct TransformDelta {
    double angle_rad;
    double translation_mm;
};
TransformDelta transform_delta(const RigidTransform& a, const RigidTransform& b);

/// Infinite 3D line with a unit direction.
class Line3 {
public:
    /// Normalizes @p direction; throws std::invalid_argument if it is zero.
    Line3(const Vec3& origin, const Vec3& direction);

    const Vec3& origin() const { return origin_; }
    const Vec3& direction() const { return direction_; }
    Vec3 point_at(double s) const { return origin_ + s * direction_; }

    /// The same line expressed in another frame: new_T_old applied to it.
    Line3 transformed(const RigidTransform& new_T_old) const;

private:
    Vec3 origin_;
    Vec3 direction_;
};

/// ||(p - origin) x direction||
double point_to_line_distance(const Vec3& p, const Line3& line);

/**
 * @brief Per-axis components of a rotation in degrees.
 *
 * Returns the axis-angle (logarithm) vector converted to degrees. For small
 * rotations each entry is the rotation "around" the respective axis; the
 * decomposition is order-free, unlike Euler angles.
 */
Vec3 rotation_angle_about_axes(const Rotation& r);

Mat3 skew(const Vec3& v);

}  // namespace carmtrack

#endif  // CARMTRACK_GEOMETRY_HPP
