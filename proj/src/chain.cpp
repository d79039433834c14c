#include "carmtrack/chain.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace carmtrack {

namespace {

RigidTransform chain_world_T_volume(const RigidTransform& world_T_tracker_t0, const RigidTransform& tracker_T_carm,
                                    const RigidTransform& volume_T_carm_t0) {
    return world_T_tracker_t0 * tracker_T_carm * inverse(volume_T_carm_t0);
}

}  // namespace

CalibrationState::CalibrationState(const RigidTransform& world_T_tracker_t0, const RigidTransform& tracker_T_carm,
                                   const RigidTransform& volume_T_carm_t0)
    : world_T_tracker_t0_(world_T_tracker_t0),
      tracker_T_carm_(tracker_T_carm),
      volume_T_carm_t0_(volume_T_carm_t0),
      world_T_volume_(chain_world_T_volume(world_T_tracker_t0, tracker_T_carm, volume_T_carm_t0)) {}

CalibrationState CalibrationState::restore(const RigidTransform& world_T_tracker_t0,
                                           const RigidTransform& tracker_T_carm,
                                           const RigidTransform& volume_T_carm_t0,
                                           const RigidTransform& world_T_volume) {
    CalibrationState state(world_T_tracker_t0, tracker_T_carm, volume_T_carm_t0);
    const TransformDelta d = transform_delta(state.world_T_volume_, world_T_volume);
    const double scale = std::max(1.0, world_T_volume.translation.norm());
    if (d.angle_rad > 1e-12 || d.translation_mm > 1e-12 * scale) {
        throw std::invalid_argument("stored world_T_volume is inconsistent with its calibration chain");
    }
    return state;
}

CalibrationState calibrate(const RigidTransform& world_T_tracker_t0, const RigidTransform& tracker_T_carm,
                           const RigidTransform& volume_T_carm_t0) {
    return CalibrationState(world_T_tracker_t0, tracker_T_carm, volume_T_carm_t0);
}

Frame parse_frame(std::string_view name) {
    if (name == "world") return Frame::World;
    if (name == "volume") return Frame::Volume;
    if (name == "surgeon") return Frame::Surgeon;
    throw std::invalid_argument("unknown frame '" + std::string(name) + "' (expected world, volume or surgeon)");
}

RigidTransform surgeon_T_volume(const CalibrationState& state, const FramePoses& poses) {
    return inverse(poses.world_T_surgeon) * state.world_T_volume();
}

RigidTransform world_T_carm(const CalibrationState& state, const FramePoses& poses) {
    return poses.world_T_tracker * state.tracker_T_carm();
}

RigidTransform surgeon_T_carm(const CalibrationState& state, const FramePoses& poses) {
    return inverse(poses.world_T_surgeon) * world_T_carm(state, poses);
}

Line3 principal_ray(const CalibrationState& state, const FramePoses& poses, Frame expressed_in) {
    const Line3 in_carm(Vec3::Zero(), Vec3::UnitZ());
    switch (expressed_in) {
        case Frame::World:
            return in_carm.transformed(world_T_carm(state, poses));
        case Frame::Volume:
            return in_carm.transformed(inverse(state.world_T_volume()) * world_T_carm(state, poses));
        case Frame::Surgeon:
            return in_carm.transformed(surgeon_T_carm(state, poses));
    }
    throw std::invalid_argument("unknown frame");
}

RigidTransform tracker_pose_for(const CalibrationState& state, const RigidTransform& volume_T_carm) {
    return state.world_T_volume() * volume_T_carm * inverse(state.tracker_T_carm());
}

}  // namespace carmtrack
