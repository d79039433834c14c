#include "carmtrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>

#include "carmtrack/trajectory.hpp"

namespace carmtrack {

namespace {

constexpr double kGridStepDeg = 5.0;
constexpr double kGolden = 0.6180339887498949;

Vec3 any_perpendicular(const Vec3& d) {
    Eigen::Index k;
    d.cwiseAbs().minCoeff(&k);
    return d.cross(Vec3::Unit(k)).normalized();
}

// Minimizes a unimodal f on [lo, hi].
template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
    double a = lo, b = hi;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

std::vector<double> grid(double lo, double hi) {
    std::vector<double> out;
    for (double v = lo; v < hi; v += kGridStepDeg) out.push_back(v);
    out.push_back(hi);
    return out;
}

}  // namespace

void Phantom::validate() const {
    if (!(tube.radius_mm > 0.0)) {
        throw std::invalid_argument("tube radius must be positive");
    }
    if ((tube.axis_end - tube.axis_start).norm() == 0.0) {
        throw std::invalid_argument("tube axis start and end must differ");
    }
}

TREResult compute_tre(const Phantom& phantom, const CalibrationState& state,
                      std::span<const GazeObservation> observations, int expected_users) {
    const int n = static_cast<int>(phantom.spheres.size());
    if (n < 1) {
        throw std::invalid_argument("TRE needs at least one target sphere");
    }
    std::map<int, std::vector<std::optional<double>>> grid_cells;
    for (const auto& obs : observations) {
        if (obs.target_index < 0 || obs.target_index >= n) {
            throw std::out_of_range("gaze observation references target " + std::to_string(obs.target_index) +
                                    " but the phantom has " + std::to_string(n) + " spheres");
        }
        auto& row = grid_cells[obs.user_id];
        row.resize(static_cast<std::size_t>(n));
        auto& cell = row[static_cast<std::size_t>(obs.target_index)];
        if (cell) {
            throw GridError("duplicate observation for user " + std::to_string(obs.user_id) + ", target " +
                            std::to_string(obs.target_index));
        }
        const Vec3 target_world = state.world_T_volume().apply(phantom.spheres[static_cast<std::size_t>(obs.target_index)]);
        cell = point_to_line_distance(target_world, obs.line);
    }
    const int m = static_cast<int>(grid_cells.size());
    if (m == 0) {
        throw GridError("no gaze observations");
    }
    if (expected_users > 0 && m != expected_users) {
        throw GridError("expected " + std::to_string(expected_users) + " users, got " + std::to_string(m));
    }

    TREResult result;
    result.users = m;
    result.targets = n;
    result.per_target_mm.assign(static_cast<std::size_t>(n), 0.0);
    double total = 0.0;
    for (const auto& [user, row] : grid_cells) {
        double user_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& cell = row[static_cast<std::size_t>(i)];
            if (!cell) {
                throw GridError("user " + std::to_string(user) + " has no observation for target " + std::to_string(i));
            }
            user_sum += *cell;
            result.per_target_mm[static_cast<std::size_t>(i)] += *cell;
        }
        total += user_sum;
        result.user_ids.push_back(user);
        result.per_user_mm.push_back(user_sum / n);
    }
    for (auto& v : result.per_target_mm) v /= m;
    result.overall_mm = total / (static_cast<double>(m) * n);
    return result;
}

std::vector<GazeObservation> simulate_gaze(const Phantom& phantom, const CalibrationState& truth,
                                           std::span<const Vec3> user_positions, double aim_error_sigma_mm,
                                           std::uint64_t seed) {
    if (!(aim_error_sigma_mm >= 0.0)) {
        throw std::invalid_argument("aim error sigma must be non-negative");
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> unit(0.0, 1.0);

    std::vector<GazeObservation> out;
    out.reserve(user_positions.size() * phantom.spheres.size());
    for (std::size_t u = 0; u < user_positions.size(); ++u) {
        for (std::size_t i = 0; i < phantom.spheres.size(); ++i) {
            const Vec3 target = truth.world_T_volume().apply(phantom.spheres[i]);
            const Vec3 dir = (target - user_positions[u]).normalized();
            const Vec3 e1 = any_perpendicular(dir);
            const Vec3 e2 = dir.cross(e1);
            const double n1 = unit(rng);
            const double n2 = unit(rng);
            const Vec3 offset = aim_error_sigma_mm * (n1 * e1 + n2 * e2);
            out.push_back({static_cast<int>(u), static_cast<int>(i), Line3(user_positions[u] + offset, dir)});
        }
    }
    return out;
}

BullseyeCheck check_bullseye(const Tube& tube, const Line3& ray) {
    const Vec3 axis = tube.axis_end - tube.axis_start;
    const double length = axis.norm();
    const Vec3 u = axis / length;
    const Vec3& d = ray.direction();

    BullseyeCheck out;
    const double c = d.dot(u);
    out.angular_misalignment_deg = rad2deg(std::atan2(d.cross(u).norm(), std::abs(c)));
    if (std::abs(c) < 1e-12) {
        out.min_clearance_mm = -std::numeric_limits<double>::infinity();
        return out;
    }

    // the radial offset is affine in the axial coordinate, so its norm peaks at an end disc
    const double h0 = (ray.origin() - tube.axis_start).dot(u);
    double max_radial = 0.0;
    bool in_front = true;
    for (double h : {0.0, length}) {
        const double s = (h - h0) / c;
        const Vec3 radial = ray.point_at(s) - tube.axis_start - h * u;
        max_radial = std::max(max_radial, radial.norm());
        in_front = in_front && s >= 0.0;
    }
    out.min_clearance_mm = tube.radius_mm - max_radial;
    out.hit = out.min_clearance_mm > 0.0 && in_front;
    return out;
}

void GantryModel::validate() const {
    if (!(orbit_axis.norm() > 0.0)) throw std::invalid_argument("gantry orbit axis must be non-zero");
    if (!(source_to_isocenter_mm > 0.0)) throw std::invalid_argument("source-to-isocenter distance must be positive");
    if (!(orbital_min_deg <= orbital_max_deg) || !(angulation_min_deg <= angulation_max_deg)) {
        throw std::invalid_argument("gantry angle ranges must satisfy min <= max");
    }
    if (angulation_min_deg <= -90.0 || angulation_max_deg >= 90.0) {
        throw std::invalid_argument("gantry angulation must stay within (-90, 90) degrees");
    }
}

namespace {

struct GantryFrame {
    Vec3 axis;
    Vec3 source_dir;  // isocenter -> source at the neutral pose
    Vec3 tilt_axis;
    Rotation neutral;
};

GantryFrame gantry_frame(const GantryModel& g) {
    GantryFrame f;
    f.axis = g.orbit_axis.normalized();
    f.source_dir = orbit_reference_direction(f.axis);
    Mat3 r;
    r.col(2) = -f.source_dir;
    r.col(1) = f.axis;
    r.col(0) = f.axis.cross(-f.source_dir);
    f.neutral = Rotation::from_matrix(r);
    f.tilt_axis = (-f.source_dir).cross(f.axis);
    return f;
}

Rotation gantry_rotation(const GantryFrame& f, double orbital_deg, double angulation_deg) {
    return Rotation::from_axis_angle(f.axis, deg2rad(orbital_deg)) *
           Rotation::from_axis_angle(f.tilt_axis, deg2rad(angulation_deg));
}

}  // namespace

RigidTransform GantryModel::volume_T_carm(const GantryPose& pose) const {
    const GantryFrame f = gantry_frame(*this);
    const Rotation g = gantry_rotation(f, pose.orbital_deg, pose.angulation_deg);
    return {g * f.neutral, isocenter + pose.isocenter_offset_mm + g * (source_to_isocenter_mm * f.source_dir)};
}

Vec3 GantryModel::ray_direction(double orbital_deg, double angulation_deg) const {
    const GantryFrame f = gantry_frame(*this);
    return gantry_rotation(f, orbital_deg, angulation_deg) * (-f.source_dir);
}

Line3 displayed_ray(const CalibrationState& state, const GantryModel& gantry, const GantryPose& pose) {
    const FramePoses poses{RigidTransform::identity(), tracker_pose_for(state, gantry.volume_T_carm(pose))};
    return principal_ray(state, poses, Frame::Volume);
}

BullseyeAlignment align_to_bullseye(const Phantom& phantom, const CalibrationState& state, const GantryModel& gantry) {
    phantom.validate();
    gantry.validate();
    const Tube& tube = phantom.tube;
    const Vec3 u = (tube.axis_end - tube.axis_start).normalized();
    const GantryFrame frame = gantry_frame(gantry);
    auto cost = [&](double orbital, double angulation) {
        return 1.0 - std::abs((gantry_rotation(frame, orbital, angulation) * (-frame.source_dir)).dot(u));
    };

    double best_a = 0.0, best_b = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (double a : grid(gantry.orbital_min_deg, gantry.orbital_max_deg)) {
        for (double b : grid(gantry.angulation_min_deg, gantry.angulation_max_deg)) {
            const double c = cost(a, b);
            if (c < best) {
                best = c;
                best_a = a;
                best_b = b;
            }
        }
    }

    // azimuth/elevation decouple near the optimum, so a few alternating sweeps suffice
    for (int round = 0; round < 20; ++round) {
        const double a_lo = std::max(gantry.orbital_min_deg, best_a - kGridStepDeg);
        const double a_hi = std::min(gantry.orbital_max_deg, best_a + kGridStepDeg);
        const double a = golden_section([&](double x) { return cost(x, best_b); }, a_lo, a_hi, 1e-9);
        const double b_lo = std::max(gantry.angulation_min_deg, best_b - kGridStepDeg);
        const double b_hi = std::min(gantry.angulation_max_deg, best_b + kGridStepDeg);
        const double b = golden_section([&](double x) { return cost(a, x); }, b_lo, b_hi, 1e-9);
        const double c = cost(a, b);
        if (c > best) break;
        const bool settled = std::abs(a - best_a) < 1e-9 && std::abs(b - best_b) < 1e-9;
        best_a = a;
        best_b = b;
        best = c;
        if (settled) break;
    }

    GantryPose pose{best_a, best_b, Vec3::Zero()};
    const Vec3 d = gantry.ray_direction(best_a, best_b);
    const Vec3 to_mid = 0.5 * (tube.axis_start + tube.axis_end) - gantry.isocenter;
    pose.isocenter_offset_mm = to_mid - to_mid.dot(d) * d;

    const Line3 ray = displayed_ray(state, gantry, pose);
    const BullseyeCheck check = check_bullseye(tube, ray);
    if (!check.hit) {
        throw BullseyeUnreachable("no reachable gantry pose hits the tube: best misalignment " +
                                  std::to_string(check.angular_misalignment_deg) + " deg, clearance " +
                                  std::to_string(check.min_clearance_mm) + " mm");
    }
    return {pose, ray, check};
}

}  // namespace carmtrack
