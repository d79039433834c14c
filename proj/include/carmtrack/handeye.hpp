#ifndef CARMTRACK_HANDEYE_HPP
#define CARMTRACK_HANDEYE_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "carmtrack/geometry.hpp"
#include "carmtrack/trajectory.hpp"

namespace carmtrack {

class HandEyeError : public std::runtime_error {
public:
    enum class Kind {
        InsufficientPairs,   ///< fewer than two usable pairs
        AllIdentity,         ///< no pair carries a rotation
        SingleAxisRotation,  ///< rotation requested as identifiable but all axes coincide
        RankDeficient,       ///< translation system rank < 2
    };

    HandEyeError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/**
 * @brief Observability of A X = X B given the relative rotation axes.
 *
 * When every relative tracker rotation shares one axis (a circular orbit) the
 * translation of X along that axis is not observable, and neither is the
 * rotation of X about it.
 */
struct DegeneracyReport {
    double axis_spread_deg = 0.0;  ///< max angle between a rotation axis and the dominant axis
    int observable_rank = 3;       ///< 2 or 3
    std::optional<Vec3> unobservable_direction;  ///< tracker frame; present iff rank == 2
    bool rotation_identifiable = true;
    int axes_used = 0;  ///< pairs whose axes entered the statistics
};

struct DegeneracyOptions {
    /// Spread strictly below this flags a single-axis (rank 2) configuration.
    double axis_tolerance_deg = 10.0;
    /// Pairs rotating less than this have noise-dominated axes and are skipped,
    /// unless no pair reaches it.
    double min_rotation_angle_deg = 20.0;
};

struct RotationEstimate {
    Rotation rotation;
    bool identifiable = true;
};

struct TranslationEstimate {
    Vec3 translation = Vec3::Zero();
    std::vector<Vec3> residuals;  ///< per pair, trans(A X) - trans(X B), tracker frame
    int rank = 3;
};

struct HandEyeSolution {
    RigidTransform tracker_T_carm;
    Vec3 rot_residual_per_axis_deg = Vec3::Zero();
    double trans_residual_rms_mm = 0.0;
    Vec3 trans_residual_median_per_axis_mm = Vec3::Zero();
    DegeneracyReport degeneracy;
    std::size_t pair_count = 0;
};

DegeneracyReport diagnose_degeneracy(std::span<const RelativePosePair> pairs,
                                     const DegeneracyOptions& options = {});

/**
 * Rotation of X by the Tsai-Lenz linear scheme. With p = 2 sin(theta/2) n for
 * each relative rotation, solves skew(p_A + p_B) k = p_B - p_A in least
 * squares; k = tan(theta_X/2) n_X. For single-axis data the minimum-norm k is
 * returned and flagged, or HandEyeError(SingleAxisRotation) is thrown when
 * @p require_identifiable is set.
 *
 * X must not rotate by 180 degrees (k diverges there).
 */
RotationEstimate solve_rotation(std::span<const RelativePosePair> pairs,
                                const DegeneracyOptions& options = {},
                                bool require_identifiable = false);

/**
 * Least-squares t_X from (R_A - I) t_X = R_X t_B - t_A stacked over all pairs.
 * If @p unobservable_direction is given, the component along it is fixed to
 * zero (minimum norm). Throws HandEyeError(RankDeficient) when rank < 2.
 */
TranslationEstimate solve_translation(std::span<const RelativePosePair> pairs,
                                      const Rotation& rotation,
                                      const std::optional<Vec3>& unobservable_direction = std::nullopt);

/// Rotation, then translation, then residual statistics and degeneracy report.
HandEyeSolution solve(std::span<const RelativePosePair> pairs, const DegeneracyOptions& options = {});

/// trans(A X) - trans(X B) for each pair.
std::vector<Vec3> translation_residuals(std::span<const RelativePosePair> pairs, const RigidTransform& x);

}  // namespace carmtrack

#endif  // CARMTRACK_HANDEYE_HPP
