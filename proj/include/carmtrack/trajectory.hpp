#ifndef CARMTRACK_TRAJECTORY_HPP
#define CARMTRACK_TRAJECTORY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "carmtrack/geometry.hpp"

namespace carmtrack {

/**
 * @brief Circular source trajectory of a CBCT-capable C-arm.
 *
 * Defaults (98 poses, 190 deg, 600 mm) are plausible values for a mobile
 * isocentric C-arm; only the pose count is taken from the prototype.
 */
struct OrbitSpec {
    int num_poses = 98;
    double sweep_angle_deg = 190.0;
    double source_to_isocenter_mm = 600.0;
    Vec3 orbit_axis = Vec3::UnitZ();  ///< volume frame, normalized on use

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/**
 * @brief Tracker noise model standing in for inside-out SLAM error.
 *
 * Rotation noise is a body-frame axis-angle perturbation with per-component
 * sigma; translation noise is additive in the world frame. Drift is a
 * world-frame offset growing linearly with the sample position.
 */
struct NoiseSpec {
    double rotation_sigma_deg = 0.0;
    double translation_sigma_mm = 0.0;
    double drift_rate_mm = 0.0;  ///< per pose index
    Vec3 drift_direction = Vec3::UnitZ();
    std::uint64_t seed = 0;

    void validate() const;
    bool is_zero() const { return rotation_sigma_deg == 0.0 && translation_sigma_mm == 0.0 && drift_rate_mm == 0.0; }
};

struct PoseSample {
    int index = 0;
    RigidTransform world_T_tracker;
    RigidTransform volume_T_carm;
};

/// Paired absolute poses. Indices must be strictly increasing.
struct PoseStream {
    std::vector<PoseSample> samples;

    /// Throws std::invalid_argument if indices are not strictly increasing.
    void validate() const;
    std::size_t size() const { return samples.size(); }
};

enum class PairMode { AllPairs, Consecutive };

/// Relative motion between samples i and j: a for the tracker, b for the C-arm.
struct RelativePosePair {
    RigidTransform a;
    RigidTransform b;
    int i = 0;
    int j = 0;
};

/**
 * Poses of the C-arm along the orbit, in the volume frame.
 *
 * The C-arm frame has its origin at the X-ray source, +z along the principal
 * ray (towards the isocenter at the volume origin) and +y along the orbit
 * axis. The first pose places the source on the side of -Y (projected into
 * the orbit plane), i.e. the neutral ray points along +Y for the default axis.
 */
std::vector<RigidTransform> generate_orbit(const OrbitSpec& spec);

/// In-plane reference direction used for the first orbit pose (unit, orthogonal to @p axis).
Vec3 orbit_reference_direction(const Vec3& axis);

/**
 * Tracker poses for the given C-arm poses:
 * world_T_tracker = world_T_volume * volume_T_carm * inverse(tracker_T_carm),
 * then perturbed by @p noise. Deterministic for a fixed seed.
 */
PoseStream simulate_tracker(std::span<const RigidTransform> orbit,
                            const RigidTransform& tracker_T_carm,
                            const RigidTransform& world_T_volume,
                            const NoiseSpec& noise);

/// a = inv(W_T_i) * W_T_j, b = inv(V_T_Ci) * V_T_Cj. Throws for fewer than 2 samples.
std::vector<RelativePosePair> relative_pairs(const PoseStream& stream, PairMode mode);

/// Ground truth needed to synthesize extra samples consistent with a stream.
struct OutOfPlaneSpec {
    RigidTransform tracker_T_carm;
    RigidTransform world_T_volume;
    NoiseSpec noise;
    Vec3 isocenter = Vec3::Zero();  ///< volume frame
};

/**
 * Appends one C-arm pose per tilt angle. Each is an existing sample's C-arm
 * pose angulated about its own x axis through the isocenter, so its rotation
 * axis leaves the orbit plane. Base samples are spread evenly over the
 * stream. Tracker poses follow the same model as simulate_tracker, using a
 * noise stream derived from noise.seed so the original samples are untouched.
 */
PoseStream add_out_of_plane_poses(const PoseStream& stream,
                                  std::span<const double> tilt_angles_deg,
                                  const OutOfPlaneSpec& spec);

}  // namespace carmtrack

#endif  // CARMTRACK_TRAJECTORY_HPP
