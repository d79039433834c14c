#ifndef CARMTRACK_IO_HPP
#define CARMTRACK_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "carmtrack/chain.hpp"
#include "carmtrack/evaluation.hpp"
#include "carmtrack/handeye.hpp"
#include "carmtrack/trajectory.hpp"

namespace carmtrack::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kFrameConvention = "A_T_B maps B to A";

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Content is malformed, of the wrong schema/version, or violates an invariant.
class SchemaError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct EvaluationConfig {
    int users = 4;    ///< M
    int targets = 7;  ///< N
    std::vector<Vec3> user_positions_volume_mm;  ///< converted to world with the ground truth
    double aim_error_sigma_mm = 2.0;
    std::uint64_t seed = 7;
};

/// Everything a synthetic run needs. Missing JSON keys fall back to these defaults.
struct RunConfig {
    OrbitSpec orbit;
    NoiseSpec noise;
    std::vector<double> out_of_plane_tilts_deg;
    PairMode pair_mode = PairMode::AllPairs;
    RigidTransform tracker_T_carm;  ///< ground truth
    RigidTransform world_T_volume;  ///< ground truth
    Phantom phantom;
    EvaluationConfig evaluation;
    GantryModel gantry;
    DegeneracyOptions degeneracy;

    void validate() const;
};

RunConfig default_run_config();
Phantom default_phantom();

struct CalibrationReport {
    HandEyeSolution solution;
    CalibrationState state;
    PairMode pair_mode = PairMode::AllPairs;
};

struct BullseyeReport {
    std::string mode;  ///< "check" or "solve"
    GantryPose pose;
    Line3 ray_volume;
    BullseyeCheck check;
};

std::string to_string(PairMode mode);
PairMode parse_pair_mode(const std::string& name);

// Each type has a to_json / *_from_json pair. *_from_json throws SchemaError.
Json to_json(const RigidTransform& t);
RigidTransform transform_from_json(const Json& j);

Json to_json(const PoseStream& stream);
PoseStream pose_stream_from_json(const Json& j);

Json to_json(const CalibrationReport& report);
CalibrationReport calibration_report_from_json(const Json& j);

Json to_json(const Phantom& phantom);
Phantom phantom_from_json(const Json& j);

Json to_json(std::span<const GazeObservation> observations);
std::vector<GazeObservation> gaze_from_json(const Json& j);

Json to_json(const TREResult& result);
TREResult tre_result_from_json(const Json& j);

Json to_json(const BullseyeReport& report);
BullseyeReport bullseye_report_from_json(const Json& j);

Json to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& j);

/// Canonical text form: two-space indent, trailing newline.
std::string dump(const Json& j);
Json parse(const std::string& text);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// index, world_T_tracker (qw qx qy qz tx ty tz), volume_T_carm (same).
std::string pose_stream_csv(const PoseStream& stream);

}  // namespace carmtrack::io

#endif  // CARMTRACK_IO_HPP
