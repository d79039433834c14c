#include "carmtrack/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace carmtrack::io {

namespace {

constexpr const char* kPoseSchema = "carmtrack/pose_stream";
constexpr const char* kCalibrationSchema = "carmtrack/calibration_report";
constexpr const char* kPhantomSchema = "carmtrack/phantom";
constexpr const char* kGazeSchema = "carmtrack/gaze";
constexpr const char* kTreSchema = "carmtrack/tre_result";
constexpr const char* kBullseyeSchema = "carmtrack/bullseye_report";
constexpr const char* kConfigSchema = "carmtrack/run_config";

constexpr double kQuaternionNormTolerance = 1e-9;

Json header(const char* schema) {
    Json j;
    j["schema"] = schema;
    j["schema_version"] = kSchemaVersion;
    return j;
}

Json units() {
    return Json{{"length", "mm"}, {"angle", "deg"}};
}

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw SchemaError(std::string("missing required field '") + key + "'");
    }
    return j.at(key);
}

void check_header(const Json& j, const char* schema) {
    if (!j.is_object()) {
        throw SchemaError(std::string("expected a JSON object for ") + schema);
    }
    const std::string name = require(j, "schema").get<std::string>();
    if (name != schema) {
        throw SchemaError("expected schema '" + std::string(schema) + "', found '" + name + "'");
    }
    const Json& version = require(j, "schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        throw SchemaError("unsupported schema_version " + version.dump() + " for " + schema);
    }
    if (j.contains("frame_convention") && j.at("frame_convention").get<std::string>() != kFrameConvention) {
        throw SchemaError("unsupported frame convention '" + j.at("frame_convention").get<std::string>() + "'");
    }
}

Json vec_to_json(const Vec3& v) {
    return Json::array({v.x(), v.y(), v.z()});
}

Vec3 vec_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw SchemaError("expected a 3-element array, found " + j.dump());
    }
    for (const auto& e : j) {
        if (!e.is_number()) throw SchemaError("expected numbers in " + j.dump());
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Non-finite values (an untraversable bull's-eye clearance) are stored as null.
Json number_or_null(double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

double number_from_json(const Json& j, double null_value) {
    if (j.is_null()) return null_value;
    if (!j.is_number()) throw SchemaError("expected a number, found " + j.dump());
    return j.get<double>();
}

template <typename T, typename F>
T guarded(F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(e.what());
    }
}

Json line_to_json(const Line3& l) {
    return Json{{"origin", vec_to_json(l.origin())}, {"direction", vec_to_json(l.direction())}};
}

Line3 line_from_json(const Json& j) {
    try {
        return Line3(vec_from_json(require(j, "origin")), vec_from_json(require(j, "direction")));
    } catch (const SchemaError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
}

Json degeneracy_to_json(const DegeneracyReport& d) {
    Json j;
    j["axis_spread_deg"] = d.axis_spread_deg;
    j["observable_rank"] = d.observable_rank;
    j["unobservable_direction"] = d.unobservable_direction ? vec_to_json(*d.unobservable_direction) : Json(nullptr);
    j["rotation_identifiable"] = d.rotation_identifiable;
    j["axes_used"] = d.axes_used;
    return j;
}

DegeneracyReport degeneracy_from_json(const Json& j) {
    DegeneracyReport d;
    d.axis_spread_deg = require(j, "axis_spread_deg").get<double>();
    d.observable_rank = require(j, "observable_rank").get<int>();
    const Json& dir = require(j, "unobservable_direction");
    if (!dir.is_null()) d.unobservable_direction = vec_from_json(dir);
    d.rotation_identifiable = require(j, "rotation_identifiable").get<bool>();
    d.axes_used = j.value("axes_used", 0);
    if (d.observable_rank != 2 && d.observable_rank != 3) {
        throw SchemaError("observable_rank must be 2 or 3");
    }
    if (d.unobservable_direction.has_value() != (d.observable_rank == 2)) {
        throw SchemaError("unobservable_direction must be present exactly when observable_rank is 2");
    }
    return d;
}

Json gantry_pose_to_json(const GantryPose& p) {
    return Json{{"orbital_deg", p.orbital_deg},
                {"angulation_deg", p.angulation_deg},
                {"isocenter_offset_mm", vec_to_json(p.isocenter_offset_mm)}};
}

GantryPose gantry_pose_from_json(const Json& j) {
    GantryPose p;
    p.orbital_deg = j.value("orbital_deg", 0.0);
    p.angulation_deg = j.value("angulation_deg", 0.0);
    if (j.contains("isocenter_offset_mm")) p.isocenter_offset_mm = vec_from_json(j.at("isocenter_offset_mm"));
    return p;
}

std::vector<Vec3> default_user_positions() {
    return {{700.0, 0.0, 400.0}, {-700.0, 0.0, 400.0}, {0.0, 700.0, 400.0}, {350.0, -600.0, 450.0}};
}

}  // namespace

std::string to_string(PairMode mode) {
    return mode == PairMode::AllPairs ? "all_pairs" : "consecutive";
}

PairMode parse_pair_mode(const std::string& name) {
    if (name == "all_pairs") return PairMode::AllPairs;
    if (name == "consecutive") return PairMode::Consecutive;
    throw SchemaError("unknown pair mode '" + name + "' (expected all_pairs or consecutive)");
}

Json to_json(const RigidTransform& t) {
    const auto& q = t.rotation.quaternion();
    return Json{{"q", Json::array({q.w(), q.x(), q.y(), q.z()})}, {"t", vec_to_json(t.translation)}};
}

RigidTransform transform_from_json(const Json& j) {
    return guarded<RigidTransform>([&] {
        const Json& q = require(j, "q");
        if (!q.is_array() || q.size() != 4) throw SchemaError("quaternion must be [w, x, y, z]");
        const Eigen::Quaterniond quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
        const double norm = quat.norm();
        if (!std::isfinite(norm) || std::abs(norm - 1.0) > kQuaternionNormTolerance) {
            throw SchemaError("quaternion is not unit norm (|q| = " + std::to_string(norm) + ")");
        }
        return RigidTransform(Rotation::from_quaternion(quat), vec_from_json(require(j, "t")));
    });
}

Json to_json(const PoseStream& stream) {
    Json j = header(kPoseSchema);
    j["frame_convention"] = kFrameConvention;
    j["units"] = units();
    Json samples = Json::array();
    for (const auto& s : stream.samples) {
        samples.push_back(Json{{"index", s.index},
                               {"world_T_tracker", to_json(s.world_T_tracker)},
                               {"volume_T_carm", to_json(s.volume_T_carm)}});
    }
    j["samples"] = std::move(samples);
    return j;
}

PoseStream pose_stream_from_json(const Json& j) {
    return guarded<PoseStream>([&] {
        check_header(j, kPoseSchema);
        PoseStream stream;
        for (const auto& s : require(j, "samples")) {
            stream.samples.push_back({require(s, "index").get<int>(), transform_from_json(require(s, "world_T_tracker")),
                                      transform_from_json(require(s, "volume_T_carm"))});
        }
        try {
            stream.validate();
        } catch (const std::invalid_argument& e) {
            throw SchemaError(e.what());
        }
        return stream;
    });
}

Json to_json(const CalibrationReport& report) {
    const HandEyeSolution& s = report.solution;
    Json j = header(kCalibrationSchema);
    j["frame_convention"] = kFrameConvention;
    j["units"] = units();
    j["pair_mode"] = to_string(report.pair_mode);
    j["pair_count"] = s.pair_count;
    j["tracker_T_carm"] = to_json(s.tracker_T_carm);
    j["rotation_residual_per_axis_deg"] = vec_to_json(s.rot_residual_per_axis_deg);
    j["translation_residual_rms_mm"] = s.trans_residual_rms_mm;
    j["translation_residual_median_per_axis_mm"] = vec_to_json(s.trans_residual_median_per_axis_mm);
    j["degeneracy"] = degeneracy_to_json(s.degeneracy);
    j["calibration_state"] = Json{{"world_T_tracker_t0", to_json(report.state.world_T_tracker_t0())},
                                  {"tracker_T_carm", to_json(report.state.tracker_T_carm())},
                                  {"volume_T_carm_t0", to_json(report.state.volume_T_carm_t0())},
                                  {"world_T_volume", to_json(report.state.world_T_volume())}};
    return j;
}

CalibrationReport calibration_report_from_json(const Json& j) {
    return guarded<CalibrationReport>([&] {
        check_header(j, kCalibrationSchema);
        HandEyeSolution s;
        s.pair_count = require(j, "pair_count").get<std::size_t>();
        s.tracker_T_carm = transform_from_json(require(j, "tracker_T_carm"));
        s.rot_residual_per_axis_deg = vec_from_json(require(j, "rotation_residual_per_axis_deg"));
        s.trans_residual_rms_mm = require(j, "translation_residual_rms_mm").get<double>();
        s.trans_residual_median_per_axis_mm = vec_from_json(require(j, "translation_residual_median_per_axis_mm"));
        s.degeneracy = degeneracy_from_json(require(j, "degeneracy"));
        const Json& cs = require(j, "calibration_state");
        try {
            CalibrationState state = CalibrationState::restore(
                transform_from_json(require(cs, "world_T_tracker_t0")), transform_from_json(require(cs, "tracker_T_carm")),
                transform_from_json(require(cs, "volume_T_carm_t0")), transform_from_json(require(cs, "world_T_volume")));
            return CalibrationReport{s, state, parse_pair_mode(require(j, "pair_mode").get<std::string>())};
        } catch (const SchemaError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw SchemaError(e.what());
        }
    });
}

Json to_json(const Phantom& phantom) {
    Json j = header(kPhantomSchema);
    j["units"] = units();
    Json spheres = Json::array();
    for (const auto& p : phantom.spheres) spheres.push_back(vec_to_json(p));
    j["spheres"] = std::move(spheres);
    j["tube"] = Json{{"axis_start", vec_to_json(phantom.tube.axis_start)},
                     {"axis_end", vec_to_json(phantom.tube.axis_end)},
                     {"radius_mm", phantom.tube.radius_mm}};
    return j;
}

Phantom phantom_from_json(const Json& j) {
    return guarded<Phantom>([&] {
        check_header(j, kPhantomSchema);
        Phantom p;
        for (const auto& s : require(j, "spheres")) p.spheres.push_back(vec_from_json(s));
        const Json& tube = require(j, "tube");
        p.tube.axis_start = vec_from_json(require(tube, "axis_start"));
        p.tube.axis_end = vec_from_json(require(tube, "axis_end"));
        p.tube.radius_mm = require(tube, "radius_mm").get<double>();
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            throw SchemaError(e.what());
        }
        return p;
    });
}

Json to_json(std::span<const GazeObservation> observations) {
    Json j = header(kGazeSchema);
    j["frame"] = "world";
    j["units"] = units();
    Json obs = Json::array();
    for (const auto& o : observations) {
        Json e{{"user", o.user_id}, {"target", o.target_index}};
        e.update(line_to_json(o.line));
        obs.push_back(std::move(e));
    }
    j["observations"] = std::move(obs);
    return j;
}

std::vector<GazeObservation> gaze_from_json(const Json& j) {
    return guarded<std::vector<GazeObservation>>([&] {
        check_header(j, kGazeSchema);
        std::vector<GazeObservation> out;
        for (const auto& o : require(j, "observations")) {
            out.push_back({require(o, "user").get<int>(), require(o, "target").get<int>(), line_from_json(o)});
        }
        return out;
    });
}

Json to_json(const TREResult& r) {
    Json j = header(kTreSchema);
    j["units"] = units();
    j["overall_mm"] = r.overall_mm;
    j["users"] = r.users;
    j["targets"] = r.targets;
    j["user_ids"] = r.user_ids;
    j["per_user_mm"] = r.per_user_mm;
    j["per_target_mm"] = r.per_target_mm;
    return j;
}

TREResult tre_result_from_json(const Json& j) {
    return guarded<TREResult>([&] {
        check_header(j, kTreSchema);
        TREResult r;
        r.overall_mm = require(j, "overall_mm").get<double>();
        r.users = require(j, "users").get<int>();
        r.targets = require(j, "targets").get<int>();
        r.user_ids = require(j, "user_ids").get<std::vector<int>>();
        r.per_user_mm = require(j, "per_user_mm").get<std::vector<double>>();
        r.per_target_mm = require(j, "per_target_mm").get<std::vector<double>>();
        if (static_cast<int>(r.per_user_mm.size()) != r.users || static_cast<int>(r.user_ids.size()) != r.users ||
            static_cast<int>(r.per_target_mm.size()) != r.targets) {
            throw SchemaError("TRE breakdown sizes do not match users/targets");
        }
        return r;
    });
}

Json to_json(const BullseyeReport& r) {
    Json j = header(kBullseyeSchema);
    j["units"] = units();
    j["mode"] = r.mode;
    j["gantry"] = gantry_pose_to_json(r.pose);
    j["ray_volume"] = line_to_json(r.ray_volume);
    j["hit"] = r.check.hit;
    j["min_clearance_mm"] = number_or_null(r.check.min_clearance_mm);
    j["angular_misalignment_deg"] = r.check.angular_misalignment_deg;
    return j;
}

BullseyeReport bullseye_report_from_json(const Json& j) {
    return guarded<BullseyeReport>([&] {
        check_header(j, kBullseyeSchema);
        BullseyeCheck check;
        check.hit = require(j, "hit").get<bool>();
        check.min_clearance_mm =
            number_from_json(require(j, "min_clearance_mm"), -std::numeric_limits<double>::infinity());
        check.angular_misalignment_deg = require(j, "angular_misalignment_deg").get<double>();
        return BullseyeReport{require(j, "mode").get<std::string>(), gantry_pose_from_json(require(j, "gantry")),
                              line_from_json(require(j, "ray_volume")), check};
    });
}

Phantom default_phantom() {
    Phantom p;
    p.spheres = {{-80.0, -50.0, 60.0}, {80.0, -50.0, 60.0}, {0.0, -70.0, 60.0}, {-60.0, 40.0, 60.0},
                 {60.0, 40.0, 60.0},   {-100.0, 0.0, 20.0}, {100.0, 0.0, 20.0}};
    // along the neutral principal ray through the isocenter
    p.tube = {{0.0, -30.0, 0.0}, {0.0, 30.0, 0.0}, 5.0};
    return p;
}

RunConfig default_run_config() {
    RunConfig c;
    c.noise.rotation_sigma_deg = 0.5;
    c.noise.translation_sigma_mm = 1.0;
    c.noise.seed = 1;
    // tracker on the image intensifier, its z axis along the orbit axis
    c.tracker_T_carm = RigidTransform(Rotation::about_x(90.0), Vec3(-60.0, 1000.0, -150.0));
    c.world_T_volume = RigidTransform(Rotation::about_z(30.0), Vec3(1200.0, -400.0, 850.0));
    c.phantom = default_phantom();
    c.evaluation.user_positions_volume_mm = default_user_positions();
    c.gantry.orbit_axis = c.orbit.orbit_axis;
    c.gantry.source_to_isocenter_mm = c.orbit.source_to_isocenter_mm;
    return c;
}

void RunConfig::validate() const {
    try {
        orbit.validate();
        noise.validate();
        phantom.validate();
        gantry.validate();
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    if (evaluation.users < 1 || evaluation.targets < 1) {
        throw SchemaError("evaluation grid needs at least one user and one target");
    }
    if (static_cast<int>(evaluation.user_positions_volume_mm.size()) != evaluation.users) {
        throw SchemaError("evaluation.user_positions_volume_mm must list one position per user");
    }
    if (!(evaluation.aim_error_sigma_mm >= 0.0)) {
        throw SchemaError("evaluation.aim_error_sigma_mm must be non-negative");
    }
    if (!(degeneracy.axis_tolerance_deg >= 0.0) || !(degeneracy.min_rotation_angle_deg >= 0.0)) {
        throw SchemaError("degeneracy thresholds must be non-negative");
    }
}

Json to_json(const RunConfig& c) {
    Json j = header(kConfigSchema);
    j["frame_convention"] = kFrameConvention;
    j["units"] = units();
    j["orbit"] = Json{{"num_poses", c.orbit.num_poses},
                      {"sweep_angle_deg", c.orbit.sweep_angle_deg},
                      {"source_to_isocenter_mm", c.orbit.source_to_isocenter_mm},
                      {"orbit_axis", vec_to_json(c.orbit.orbit_axis)}};
    j["noise"] = Json{{"rotation_sigma_deg", c.noise.rotation_sigma_deg},
                      {"translation_sigma_mm", c.noise.translation_sigma_mm},
                      {"drift_rate_mm", c.noise.drift_rate_mm},
                      {"drift_direction", vec_to_json(c.noise.drift_direction)},
                      {"seed", c.noise.seed}};
    j["out_of_plane_tilts_deg"] = c.out_of_plane_tilts_deg;
    j["pair_mode"] = to_string(c.pair_mode);
    j["ground_truth"] = Json{{"tracker_T_carm", to_json(c.tracker_T_carm)}, {"world_T_volume", to_json(c.world_T_volume)}};
    Json phantom = to_json(c.phantom);
    phantom.erase("schema");
    phantom.erase("schema_version");
    phantom.erase("units");
    j["phantom"] = std::move(phantom);
    Json users = Json::array();
    for (const auto& p : c.evaluation.user_positions_volume_mm) users.push_back(vec_to_json(p));
    j["evaluation"] = Json{{"users", c.evaluation.users},
                           {"targets", c.evaluation.targets},
                           {"user_positions_volume_mm", std::move(users)},
                           {"aim_error_sigma_mm", c.evaluation.aim_error_sigma_mm},
                           {"seed", c.evaluation.seed}};
    j["gantry"] = Json{{"orbit_axis", vec_to_json(c.gantry.orbit_axis)},
                       {"source_to_isocenter_mm", c.gantry.source_to_isocenter_mm},
                       {"isocenter", vec_to_json(c.gantry.isocenter)},
                       {"orbital_range_deg", Json::array({c.gantry.orbital_min_deg, c.gantry.orbital_max_deg})},
                       {"angulation_range_deg", Json::array({c.gantry.angulation_min_deg, c.gantry.angulation_max_deg})}};
    j["degeneracy"] = Json{{"axis_tolerance_deg", c.degeneracy.axis_tolerance_deg},
                           {"min_rotation_angle_deg", c.degeneracy.min_rotation_angle_deg}};
    return j;
}

RunConfig run_config_from_json(const Json& j) {
    return guarded<RunConfig>([&] {
        check_header(j, kConfigSchema);
        RunConfig c = default_run_config();
        if (j.contains("orbit")) {
            const Json& o = j.at("orbit");
            c.orbit.num_poses = o.value("num_poses", c.orbit.num_poses);
            c.orbit.sweep_angle_deg = o.value("sweep_angle_deg", c.orbit.sweep_angle_deg);
            c.orbit.source_to_isocenter_mm = o.value("source_to_isocenter_mm", c.orbit.source_to_isocenter_mm);
            if (o.contains("orbit_axis")) c.orbit.orbit_axis = vec_from_json(o.at("orbit_axis"));
        }
        if (j.contains("noise")) {
            const Json& n = j.at("noise");
            c.noise.rotation_sigma_deg = n.value("rotation_sigma_deg", c.noise.rotation_sigma_deg);
            c.noise.translation_sigma_mm = n.value("translation_sigma_mm", c.noise.translation_sigma_mm);
            c.noise.drift_rate_mm = n.value("drift_rate_mm", c.noise.drift_rate_mm);
            if (n.contains("drift_direction")) c.noise.drift_direction = vec_from_json(n.at("drift_direction"));
            c.noise.seed = n.value("seed", c.noise.seed);
        }
        c.out_of_plane_tilts_deg = j.value("out_of_plane_tilts_deg", c.out_of_plane_tilts_deg);
        if (j.contains("pair_mode")) c.pair_mode = parse_pair_mode(j.at("pair_mode").get<std::string>());
        if (j.contains("ground_truth")) {
            const Json& g = j.at("ground_truth");
            if (g.contains("tracker_T_carm")) c.tracker_T_carm = transform_from_json(g.at("tracker_T_carm"));
            if (g.contains("world_T_volume")) c.world_T_volume = transform_from_json(g.at("world_T_volume"));
        }
        if (j.contains("phantom")) {
            Json p = j.at("phantom");
            p["schema"] = kPhantomSchema;
            p["schema_version"] = kSchemaVersion;
            c.phantom = phantom_from_json(p);
        }
        if (j.contains("evaluation")) {
            const Json& e = j.at("evaluation");
            c.evaluation.users = e.value("users", c.evaluation.users);
            c.evaluation.targets = e.value("targets", c.evaluation.targets);
            if (e.contains("user_positions_volume_mm")) {
                c.evaluation.user_positions_volume_mm.clear();
                for (const auto& p : e.at("user_positions_volume_mm")) {
                    c.evaluation.user_positions_volume_mm.push_back(vec_from_json(p));
                }
            }
            c.evaluation.aim_error_sigma_mm = e.value("aim_error_sigma_mm", c.evaluation.aim_error_sigma_mm);
            c.evaluation.seed = e.value("seed", c.evaluation.seed);
        }
        if (j.contains("gantry")) {
            const Json& g = j.at("gantry");
            if (g.contains("orbit_axis")) c.gantry.orbit_axis = vec_from_json(g.at("orbit_axis"));
            c.gantry.source_to_isocenter_mm = g.value("source_to_isocenter_mm", c.gantry.source_to_isocenter_mm);
            if (g.contains("isocenter")) c.gantry.isocenter = vec_from_json(g.at("isocenter"));
            if (g.contains("orbital_range_deg")) {
                const auto r = g.at("orbital_range_deg").get<std::vector<double>>();
                if (r.size() != 2) throw SchemaError("gantry.orbital_range_deg must be [min, max]");
                c.gantry.orbital_min_deg = r[0];
                c.gantry.orbital_max_deg = r[1];
            }
            if (g.contains("angulation_range_deg")) {
                const auto r = g.at("angulation_range_deg").get<std::vector<double>>();
                if (r.size() != 2) throw SchemaError("gantry.angulation_range_deg must be [min, max]");
                c.gantry.angulation_min_deg = r[0];
                c.gantry.angulation_max_deg = r[1];
            }
        }
        if (j.contains("degeneracy")) {
            const Json& d = j.at("degeneracy");
            c.degeneracy.axis_tolerance_deg = d.value("axis_tolerance_deg", c.degeneracy.axis_tolerance_deg);
            c.degeneracy.min_rotation_angle_deg = d.value("min_rotation_angle_deg", c.degeneracy.min_rotation_angle_deg);
        }
        c.validate();
        return c;
    });
}

std::string dump(const Json& j) {
    return j.dump(2) + "\n";
}

Json parse(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading '" + path.string() + "'");
    }
    return parse(buf.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

std::string pose_stream_csv(const PoseStream& stream) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "index,wt_qw,wt_qx,wt_qy,wt_qz,wt_tx,wt_ty,wt_tz,vc_qw,vc_qx,vc_qy,vc_qz,vc_tx,vc_ty,vc_tz\n";
    auto put = [&](const RigidTransform& t) {
        const auto& q = t.rotation.quaternion();
        os << ',' << q.w() << ',' << q.x() << ',' << q.y() << ',' << q.z() << ',' << t.translation.x() << ','
           << t.translation.y() << ',' << t.translation.z();
    };
    for (const auto& s : stream.samples) {
        os << s.index;
        put(s.world_T_tracker);
        put(s.volume_T_carm);
        os << '\n';
    }
    return os.str();
}

}  // namespace carmtrack::io
