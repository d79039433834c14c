#include "carmtrack/trajectory.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace carmtrack {

namespace {

class TrackerNoise {
public:
    TrackerNoise(const NoiseSpec& spec, std::uint32_t salt)
        : spec_(spec), drift_dir_(spec.drift_direction.normalized()) {
        std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32), salt};
        rng_.seed(seq);
    }

    // Draws six normals per pose regardless of the sigmas, so a seed maps to
    // the same perturbation sequence at every noise level.
    RigidTransform perturb(const RigidTransform& pose, int position) {
        Vec3 omega, delta;
        for (int k = 0; k < 3; ++k) omega[k] = unit_(rng_);
        for (int k = 0; k < 3; ++k) delta[k] = unit_(rng_);
        if (spec_.is_zero()) {
            return pose;
        }
        omega *= deg2rad(spec_.rotation_sigma_deg);
        delta *= spec_.translation_sigma_mm;
        if (spec_.drift_rate_mm != 0.0) {
            delta += spec_.drift_rate_mm * static_cast<double>(position) * drift_dir_;
        }
        return {pose.rotation * Rotation::from_rotation_vector(omega), pose.translation + delta};
    }

private:
    NoiseSpec spec_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> unit_{0.0, 1.0};
    Vec3 drift_dir_;
};

RigidTransform tracker_pose(const RigidTransform& world_T_volume, const RigidTransform& volume_T_carm,
                            const RigidTransform& carm_T_tracker) {
    return world_T_volume * volume_T_carm * carm_T_tracker;
}

}  // namespace

void OrbitSpec::validate() const {
    if (num_poses < 2) {
        throw std::invalid_argument("orbit needs at least 2 poses, got " + std::to_string(num_poses));
    }
    if (!(sweep_angle_deg > 0.0 && sweep_angle_deg <= 360.0)) {
        throw std::invalid_argument("orbit sweep angle must be in (0, 360] degrees");
    }
    if (!(source_to_isocenter_mm > 0.0)) {
        throw std::invalid_argument("source-to-isocenter distance must be positive");
    }
    if (!(orbit_axis.norm() > 0.0) || !orbit_axis.allFinite()) {
        throw std::invalid_argument("orbit axis must be a non-zero vector");
    }
}

void NoiseSpec::validate() const {
    if (!(rotation_sigma_deg >= 0.0) || !(translation_sigma_mm >= 0.0)) {
        throw std::invalid_argument("noise sigmas must be non-negative");
    }
    if (!std::isfinite(drift_rate_mm)) {
        throw std::invalid_argument("drift rate must be finite");
    }
    if (drift_rate_mm != 0.0 && !(drift_direction.norm() > 0.0)) {
        throw std::invalid_argument("drift direction must be non-zero when drift is enabled");
    }
}

void PoseStream::validate() const {
    for (std::size_t k = 1; k < samples.size(); ++k) {
        if (samples[k].index <= samples[k - 1].index) {
            throw std::invalid_argument("pose stream indices must be strictly increasing (at position " +
                                        std::to_string(k) + ")");
        }
    }
}

Vec3 orbit_reference_direction(const Vec3& axis) {
    const Vec3 a = axis.normalized();
    Vec3 ref = -Vec3::UnitY();
    if (std::abs(a.dot(ref)) > 0.99) {
        ref = -Vec3::UnitZ();
    }
    return (ref - a.dot(ref) * a).normalized();
}

std::vector<RigidTransform> generate_orbit(const OrbitSpec& spec) {
    spec.validate();
    const Vec3 axis = spec.orbit_axis.normalized();
    const Vec3 e1 = orbit_reference_direction(axis);
    const Vec3 e2 = axis.cross(e1);
    // a full circle would otherwise repeat its first pose
    const double step = spec.sweep_angle_deg >= 360.0 ? spec.sweep_angle_deg / spec.num_poses
                                                      : spec.sweep_angle_deg / (spec.num_poses - 1);

    std::vector<RigidTransform> poses;
    poses.reserve(static_cast<std::size_t>(spec.num_poses));
    for (int k = 0; k < spec.num_poses; ++k) {
        const double phi = deg2rad(step * k);
        const Vec3 u = std::cos(phi) * e1 + std::sin(phi) * e2;
        Mat3 r;
        r.col(2) = -u;
        r.col(1) = axis;
        r.col(0) = axis.cross(-u);
        poses.emplace_back(Rotation::from_matrix(r), spec.source_to_isocenter_mm * u);
    }
    return poses;
}

PoseStream simulate_tracker(std::span<const RigidTransform> orbit,
                            const RigidTransform& tracker_T_carm,
                            const RigidTransform& world_T_volume,
                            const NoiseSpec& noise) {
    noise.validate();
    TrackerNoise perturb(noise, 0u);
    const RigidTransform carm_T_tracker = inverse(tracker_T_carm);

    PoseStream stream;
    stream.samples.reserve(orbit.size());
    for (std::size_t k = 0; k < orbit.size(); ++k) {
        const RigidTransform exact = tracker_pose(world_T_volume, orbit[k], carm_T_tracker);
        stream.samples.push_back({static_cast<int>(k), perturb.perturb(exact, static_cast<int>(k)), orbit[k]});
    }
    return stream;
}

std::vector<RelativePosePair> relative_pairs(const PoseStream& stream, PairMode mode) {
    const auto& s = stream.samples;
    if (s.size() < 2) {
        throw std::invalid_argument("relative pairs need at least 2 samples");
    }
    std::vector<RelativePosePair> pairs;
    auto push = [&](std::size_t i, std::size_t j) {
        pairs.push_back({inverse(s[i].world_T_tracker) * s[j].world_T_tracker,
                         inverse(s[i].volume_T_carm) * s[j].volume_T_carm, s[i].index, s[j].index});
    };
    if (mode == PairMode::Consecutive) {
        pairs.reserve(s.size() - 1);
        for (std::size_t i = 0; i + 1 < s.size(); ++i) push(i, i + 1);
    } else {
        pairs.reserve(s.size() * (s.size() - 1) / 2);
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) push(i, j);
    }
    return pairs;
}

PoseStream add_out_of_plane_poses(const PoseStream& stream,
                                  std::span<const double> tilt_angles_deg,
                                  const OutOfPlaneSpec& spec) {
    PoseStream out = stream;
    if (tilt_angles_deg.empty()) {
        return out;
    }
    if (stream.samples.empty()) {
        throw std::invalid_argument("cannot add out-of-plane poses to an empty stream");
    }
    spec.noise.validate();
    TrackerNoise perturb(spec.noise, 1u);
    const RigidTransform carm_T_tracker = inverse(spec.tracker_T_carm);

    const std::size_t n = stream.samples.size();
    const std::size_t m = tilt_angles_deg.size();
    int next_index = stream.samples.back().index + 1;
    for (std::size_t k = 0; k < m; ++k) {
        const RigidTransform& base = stream.samples[((2 * k + 1) * n) / (2 * m)].volume_T_carm;
        const Vec3 tilt_axis = base.rotation * Vec3::UnitX();
        const Rotation tilt = Rotation::from_axis_angle(tilt_axis, deg2rad(tilt_angles_deg[k]));
        const RigidTransform carm(tilt * base.rotation, spec.isocenter + tilt * (base.translation - spec.isocenter));
        const int position = static_cast<int>(n + k);
        const RigidTransform tracker = perturb.perturb(tracker_pose(spec.world_T_volume, carm, carm_T_tracker), position);
        out.samples.push_back({next_index++, tracker, carm});
    }
    return out;
}

}  // namespace carmtrack
