#ifndef CARMTRACK_CHAIN_HPP
#define CARMTRACK_CHAIN_HPP

#include <string_view>

#include "carmtrack/geometry.hpp"

namespace carmtrack {

/**
 * @brief Registration of the image volume to the world (room) frame.
 *
 * world_T_volume = world_T_tracker(t0) * tracker_T_carm * inverse(volume_T_carm(t0)).
 * The tracker mount is rigid, so tracker_T_carm carries no time argument.
 * Immutable once built.
 */
class CalibrationState {
public:
    CalibrationState(const RigidTransform& world_T_tracker_t0,
                     const RigidTransform& tracker_T_carm,
                     const RigidTransform& volume_T_carm_t0);

    /// Rebuilds a stored state. Throws std::invalid_argument if @p world_T_volume
    /// disagrees with the recomputed chain by more than 1e-12 (rad / relative mm).
    static CalibrationState restore(const RigidTransform& world_T_tracker_t0,
                                    const RigidTransform& tracker_T_carm,
                                    const RigidTransform& volume_T_carm_t0,
                                    const RigidTransform& world_T_volume);

    const RigidTransform& world_T_tracker_t0() const { return world_T_tracker_t0_; }
    const RigidTransform& tracker_T_carm() const { return tracker_T_carm_; }
    const RigidTransform& volume_T_carm_t0() const { return volume_T_carm_t0_; }
    const RigidTransform& world_T_volume() const { return world_T_volume_; }

private:
    RigidTransform world_T_tracker_t0_;
    RigidTransform tracker_T_carm_;
    RigidTransform volume_T_carm_t0_;
    RigidTransform world_T_volume_;
};

CalibrationState calibrate(const RigidTransform& world_T_tracker_t0,
                           const RigidTransform& tracker_T_carm,
                           const RigidTransform& volume_T_carm_t0);

/// Poses reported by the two inside-out trackers at time t.
struct FramePoses {
    RigidTransform world_T_surgeon;
    RigidTransform world_T_tracker;
};

enum class Frame { World, Volume, Surgeon };

/// Parses "world", "volume" or "surgeon"; throws std::invalid_argument otherwise.
Frame parse_frame(std::string_view name);

RigidTransform surgeon_T_volume(const CalibrationState& state, const FramePoses& poses);
RigidTransform surgeon_T_carm(const CalibrationState& state, const FramePoses& poses);
RigidTransform world_T_carm(const CalibrationState& state, const FramePoses& poses);

/// C-arm principal ray: origin at the source, along +z of the C-arm frame.
Line3 principal_ray(const CalibrationState& state, const FramePoses& poses, Frame expressed_in);

/// Tracker pose that puts the C-arm at @p volume_T_carm under this calibration.
RigidTransform tracker_pose_for(const CalibrationState& state, const RigidTransform& volume_T_carm);

}  // namespace carmtrack

#endif  // CARMTRACK_CHAIN_HPP
