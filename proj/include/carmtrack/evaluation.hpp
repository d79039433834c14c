#ifndef CARMTRACK_EVALUATION_HPP
#define CARMTRACK_EVALUATION_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "carmtrack/chain.hpp"
#include "carmtrack/geometry.hpp"

namespace carmtrack {

struct Tube {
    Vec3 axis_start = Vec3::Zero();
    Vec3 axis_end = Vec3::Zero();
    double radius_mm = 5.0;
};

/// Target spheres and an embedded tube, volume frame.
struct Phantom {
    std::vector<Vec3> spheres;
    Tube tube;

    /// Throws std::invalid_argument on a non-positive radius or a zero-length tube.
    void validate() const;
};

struct GazeObservation {
    int user_id = 0;
    int target_index = 0;
    Line3 line;  ///< world frame
};

struct TREResult {
    double overall_mm = 0.0;
    std::vector<double> per_target_mm;
    std::vector<double> per_user_mm;
    std::vector<int> user_ids;  ///< ascending; per_user_mm follows this order
    int users = 0;    ///< M
    int targets = 0;  ///< N
};

/// Observation set does not form a complete users x targets grid.
class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Mean point-to-line distance over an M x N grid of gaze lines, with the
 * targets mapped to the world by the calibration under test.
 *
 * Every user must aim exactly once at every sphere. @p expected_users > 0
 * additionally pins M.
 */
TREResult compute_tre(const Phantom& phantom, const CalibrationState& state,
                      std::span<const GazeObservation> observations, int expected_users = 0);

/**
 * Synthetic air-tap gaze lines. Each line runs from a user position (world
 * frame) towards the sphere's world position under @p truth, then is shifted
 * perpendicular to itself by a 2D Gaussian with per-axis sigma @p aim_error_sigma_mm.
 * Users are numbered 0..M-1 in the order of @p user_positions.
 */
std::vector<GazeObservation> simulate_gaze(const Phantom& phantom, const CalibrationState& truth,
                                           std::span<const Vec3> user_positions, double aim_error_sigma_mm,
                                           std::uint64_t seed);

struct BullseyeCheck {
    bool hit = false;
    /// radius minus the largest ray-to-axis distance over the tube's axial span;
    /// -infinity when the ray cannot traverse the span (perpendicular to the axis)
    double min_clearance_mm = 0.0;
    double angular_misalignment_deg = 0.0;  ///< between ray and tube axis as lines, [0, 90]
};

/**
 * A half-line ray achieves the bull's-eye view when it passes through both end
 * discs of the tube and stays inside the cylinder in between. The tube is
 * symmetric: entering through either disc counts.
 */
BullseyeCheck check_bullseye(const Tube& tube, const Line3& ray_volume);
inline BullseyeCheck check_bullseye(const Phantom& phantom, const Line3& ray_volume) {
    return check_bullseye(phantom.tube, ray_volume);
}

struct GantryPose {
    double orbital_deg = 0.0;     ///< rotation about the orbit axis
    double angulation_deg = 0.0;  ///< tilt of the principal ray towards the orbit axis
    Vec3 isocenter_offset_mm = Vec3::Zero();  ///< table / base translation, volume frame
};

/**
 * Isocentric C-arm with two rotational degrees of freedom and a translatable
 * isocenter. At the neutral pose it coincides with the first pose of
 * generate_orbit() for the same axis and distance.
 */
struct GantryModel {
    Vec3 orbit_axis = Vec3::UnitZ();
    double source_to_isocenter_mm = 600.0;
    Vec3 isocenter = Vec3::Zero();
    double orbital_min_deg = -95.0;
    double orbital_max_deg = 95.0;
    double angulation_min_deg = -45.0;
    double angulation_max_deg = 45.0;

    void validate() const;
    RigidTransform volume_T_carm(const GantryPose& pose) const;
    Vec3 ray_direction(double orbital_deg, double angulation_deg) const;
};

struct BullseyeAlignment {
    GantryPose pose;
    Line3 ray_volume;
    BullseyeCheck check;
};

class BullseyeUnreachable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Scripted stand-in for the user steering the gantry: a 5 degree grid over the
 * angular range, golden-section refinement of the angles (misalignment first),
 * then the isocenter offset that centres the ray on the tube. The ray is read
 * back through the calibration chain. Throws BullseyeUnreachable when the best
 * reachable pose does not hit.
 */
BullseyeAlignment align_to_bullseye(const Phantom& phantom, const CalibrationState& state, const GantryModel& gantry);

/// Principal ray (volume frame) that the calibration chain shows for a gantry pose.
Line3 displayed_ray(const CalibrationState& state, const GantryModel& gantry, const GantryPose& pose);

}  // namespace carmtrack

#endif  // CARMTRACK_EVALUATION_HPP
