#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "carmtrack/io.hpp"
#include "support/generators.hpp"

using namespace carmtrack;
namespace fs = std::filesystem;

namespace {

PoseStream noisy_stream(std::uint64_t seed) {
    const io::RunConfig c = io::default_run_config();
    NoiseSpec n = c.noise;
    n.seed = seed;
    return simulate_tracker(generate_orbit(c.orbit), c.tracker_T_carm, c.world_T_volume, n);
}

io::CalibrationReport report_for(const PoseStream& s, PairMode mode) {
    const HandEyeSolution sol = solve(relative_pairs(s, mode));
    return {sol, calibrate(s.samples.front().world_T_tracker, sol.tracker_T_carm, s.samples.front().volume_T_carm),
            mode};
}

void expect_transform_near(const RigidTransform& a, const RigidTransform& b, double tol) {
    const auto d = transform_delta(a, b);
    EXPECT_LE(d.angle_rad, tol);
    EXPECT_LE(d.translation_mm, tol * std::max(1.0, a.translation.norm()));
}

template <typename Load>
void expect_stable_bytes(const io::Json& first, Load load) {
    const std::string a = io::dump(first);
    const std::string b = io::dump(io::to_json(load(io::parse(a))));
    EXPECT_EQ(a, b);
}

io::Json pose_file_with(double qw) {
    io::Json j = io::to_json(noisy_stream(1));
    j["samples"][0]["world_T_tracker"]["q"] = io::Json::array({qw, 0.0, 0.0, 0.0});
    return j;
}

}  // namespace

TEST(TransformJson, RoundTrip) {
    gen::Rng rng(50);
    for (int k = 0; k < 1000; ++k) {
        const RigidTransform t = rng.transform();
        const RigidTransform back = io::transform_from_json(io::parse(io::dump(io::to_json(t))));
        EXPECT_EQ(back.translation, t.translation);
        EXPECT_EQ(back.rotation.quaternion().coeffs(), t.rotation.quaternion().coeffs());
    }
}

TEST(TransformJson, PositiveWOnSave) {
    const io::Json j = io::to_json(RigidTransform::pure_rotation(Rotation::from_quaternion(-0.5, 0.5, 0.5, 0.5)));
    EXPECT_GT(j["q"][0].get<double>(), 0.0);
}

TEST(TransformJson, RejectsNonUnitQuaternion) {
    EXPECT_NO_THROW(io::pose_stream_from_json(pose_file_with(1.0 + 5e-10)));
    EXPECT_THROW(io::pose_stream_from_json(pose_file_with(1.0 + 2e-9)), io::SchemaError);
    EXPECT_THROW(io::pose_stream_from_json(pose_file_with(0.5)), io::SchemaError);
}

TEST(PoseFile, RoundTripWithinTolerance) {
    const PoseStream s = noisy_stream(3);
    const PoseStream back = io::pose_stream_from_json(io::parse(io::dump(io::to_json(s))));
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        EXPECT_EQ(back.samples[k].index, s.samples[k].index);
        expect_transform_near(back.samples[k].world_T_tracker, s.samples[k].world_T_tracker, 1e-12);
        expect_transform_near(back.samples[k].volume_T_carm, s.samples[k].volume_T_carm, 1e-12);
    }
    expect_stable_bytes(io::to_json(s), io::pose_stream_from_json);
}

TEST(PoseFile, HeaderFields) {
    const io::Json j = io::to_json(noisy_stream(3));
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["frame_convention"], "A_T_B maps B to A");
    EXPECT_EQ(j["units"]["length"], "mm");
    EXPECT_EQ(j["samples"].size(), 98u);
}

TEST(PoseFile, RejectsUnknownVersion) {
    io::Json j = io::to_json(noisy_stream(3));
    j["schema_version"] = 2;
    EXPECT_THROW(io::pose_stream_from_json(j), io::SchemaError);
}

TEST(PoseFile, RejectsWrongSchema) {
    io::Json j = io::to_json(io::default_phantom());
    EXPECT_THROW(io::pose_stream_from_json(j), io::SchemaError);
}

TEST(PoseFile, RejectsNonIncreasingIndices) {
    io::Json j = io::to_json(noisy_stream(3));
    j["samples"][5]["index"] = 4;
    EXPECT_THROW(io::pose_stream_from_json(j), io::SchemaError);
}

TEST(PoseFile, RejectsMissingAndMistypedFields) {
    io::Json j = io::to_json(noisy_stream(3));
    j["samples"][0].erase("volume_T_carm");
    EXPECT_THROW(io::pose_stream_from_json(j), io::SchemaError);
    j = io::to_json(noisy_stream(3));
    j["samples"][0]["index"] = "zero";
    EXPECT_THROW(io::pose_stream_from_json(j), io::SchemaError);
    j = io::to_json(noisy_stream(3));
    j["samples"][0]["volume_T_carm"]["t"] = io::Json::array({1.0, 2.0});
    EXPECT_THROW(io::pose_stream_from_json(j), io::SchemaError);
}

TEST(PoseFile, TruncatedTextIsParseError) {
    const std::string text = io::dump(io::to_json(noisy_stream(3)));
    EXPECT_THROW(io::parse(text.substr(0, text.size() / 2)), io::SchemaError);
}

TEST(PoseFile, CsvExport) {
    const PoseStream s = noisy_stream(3);
    const std::string csv = io::pose_stream_csv(s);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 99);
    EXPECT_EQ(csv.rfind("index,wt_qw", 0), 0u);
}

TEST(CalibrationReportJson, RoundTrip) {
    for (PairMode mode : {PairMode::AllPairs, PairMode::Consecutive}) {
        const io::CalibrationReport r = report_for(noisy_stream(4), mode);
        const io::Json j = io::to_json(r);
        const io::CalibrationReport back = io::calibration_report_from_json(io::parse(io::dump(j)));
        EXPECT_EQ(back.pair_mode, mode);
        EXPECT_EQ(back.solution.pair_count, r.solution.pair_count);
        expect_transform_near(back.solution.tracker_T_carm, r.solution.tracker_T_carm, 1e-12);
        expect_transform_near(back.state.world_T_volume(), r.state.world_T_volume(), 1e-12);
        EXPECT_NEAR(back.solution.trans_residual_rms_mm, r.solution.trans_residual_rms_mm, 1e-12);
        EXPECT_EQ(back.solution.degeneracy.observable_rank, r.solution.degeneracy.observable_rank);
        expect_stable_bytes(j, io::calibration_report_from_json);
    }
}

TEST(CalibrationReportJson, DegeneracyBlock) {
    const io::Json j = io::to_json(report_for(noisy_stream(4), PairMode::AllPairs));
    EXPECT_EQ(j["degeneracy"]["observable_rank"], 2);
    EXPECT_TRUE(j["degeneracy"]["unobservable_direction"].is_array());
    EXPECT_EQ(j["degeneracy"]["rotation_identifiable"], false);
}

TEST(CalibrationReportJson, RejectsInconsistentState) {
    io::Json j = io::to_json(report_for(noisy_stream(4), PairMode::AllPairs));
    j["calibration_state"]["world_T_volume"]["t"][0] = j["calibration_state"]["world_T_volume"]["t"][0].get<double>() + 1.0;
    EXPECT_THROW(io::calibration_report_from_json(j), io::SchemaError);
}

TEST(CalibrationReportJson, RejectsRankDirectionMismatch) {
    io::Json j = io::to_json(report_for(noisy_stream(4), PairMode::AllPairs));
    j["degeneracy"]["unobservable_direction"] = nullptr;
    EXPECT_THROW(io::calibration_report_from_json(j), io::SchemaError);
}

TEST(PhantomJson, RoundTripAndValidation) {
    const Phantom p = io::default_phantom();
    expect_stable_bytes(io::to_json(p), io::phantom_from_json);
    io::Json j = io::to_json(p);
    j["tube"]["radius_mm"] = -1.0;
    EXPECT_THROW(io::phantom_from_json(j), io::SchemaError);
    j = io::to_json(p);
    j["tube"].erase("axis_end");
    EXPECT_THROW(io::phantom_from_json(j), io::SchemaError);
}

TEST(GazeJson, RoundTrip) {
    const io::RunConfig c = io::default_run_config();
    const CalibrationState truth = calibrate(c.world_T_volume, RigidTransform::identity(), RigidTransform::identity());
    std::vector<Vec3> users;
    for (const auto& u : c.evaluation.user_positions_volume_mm) users.push_back(c.world_T_volume.apply(u));
    const auto obs = simulate_gaze(c.phantom, truth, users, 2.0, 5);
    const auto back = io::gaze_from_json(io::parse(io::dump(io::to_json(obs))));
    ASSERT_EQ(back.size(), obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) {
        EXPECT_EQ(back[k].user_id, obs[k].user_id);
        EXPECT_EQ(back[k].target_index, obs[k].target_index);
        EXPECT_EQ(back[k].line.origin(), obs[k].line.origin());
        EXPECT_EQ(back[k].line.direction(), obs[k].line.direction());
    }
    const std::string a = io::dump(io::to_json(obs));
    const auto reloaded = io::gaze_from_json(io::parse(a));
    EXPECT_EQ(io::dump(io::to_json(reloaded)), a);
}

TEST(TreJson, RoundTrip) {
    TREResult r;
    r.overall_mm = 3.25;
    r.users = 2;
    r.targets = 3;
    r.user_ids = {0, 4};
    r.per_user_mm = {3.0, 3.5};
    r.per_target_mm = {1.0, 3.0, 5.75};
    expect_stable_bytes(io::to_json(r), io::tre_result_from_json);
    io::Json j = io::to_json(r);
    j["per_user_mm"].push_back(1.0);
    EXPECT_THROW(io::tre_result_from_json(j), io::SchemaError);
}

TEST(BullseyeJson, RoundTripIncludingInfiniteClearance) {
    io::BullseyeReport r{"check", GantryPose{10.0, -5.0, Vec3(1.0, 2.0, 3.0)},
                         Line3(Vec3(0.0, -600.0, 0.0), Vec3(1.0, 0.0, 0.0)), {}};
    r.check.min_clearance_mm = -std::numeric_limits<double>::infinity();
    r.check.angular_misalignment_deg = 90.0;
    const io::Json j = io::to_json(r);
    EXPECT_TRUE(j["min_clearance_mm"].is_null());
    const io::BullseyeReport back = io::bullseye_report_from_json(io::parse(io::dump(j)));
    EXPECT_EQ(back.check.min_clearance_mm, -std::numeric_limits<double>::infinity());
    EXPECT_EQ(back.pose.isocenter_offset_mm, r.pose.isocenter_offset_mm);
    expect_stable_bytes(j, io::bullseye_report_from_json);
}

TEST(RunConfigJson, DefaultsRoundTrip) {
    const io::RunConfig c = io::default_run_config();
    EXPECT_NO_THROW(c.validate());
    expect_stable_bytes(io::to_json(c), io::run_config_from_json);
    EXPECT_EQ(c.orbit.num_poses, 98);
    EXPECT_EQ(c.evaluation.users, 4);
    EXPECT_EQ(c.evaluation.targets, 7);
    EXPECT_EQ(c.phantom.spheres.size(), 7u);
    EXPECT_EQ(c.pair_mode, PairMode::AllPairs);
}

TEST(RunConfigJson, PartialConfigFallsBackToDefaults) {
    io::Json j = io::parse(R"({"schema": "carmtrack/run_config", "schema_version": 1,
                               "orbit": {"num_poses": 12}, "out_of_plane_tilts_deg": [30, -30]})");
    const io::RunConfig c = io::run_config_from_json(j);
    EXPECT_EQ(c.orbit.num_poses, 12);
    EXPECT_EQ(c.orbit.sweep_angle_deg, 190.0);
    EXPECT_EQ(c.out_of_plane_tilts_deg.size(), 2u);
}

TEST(RunConfigJson, RejectsInvalidSubSpecs) {
    const io::Json base = io::to_json(io::default_run_config());
    io::Json j = base;
    j["orbit"]["num_poses"] = 1;
    EXPECT_THROW(io::run_config_from_json(j), io::SchemaError);
    j = base;
    j["noise"]["translation_sigma_mm"] = -1.0;
    EXPECT_THROW(io::run_config_from_json(j), io::SchemaError);
    j = base;
    j["pair_mode"] = "some_pairs";
    EXPECT_THROW(io::run_config_from_json(j), io::SchemaError);
    j = base;
    j["evaluation"]["users"] = 3;
    EXPECT_THROW(io::run_config_from_json(j), io::SchemaError);
    j = base;
    j["ground_truth"]["tracker_T_carm"]["q"] = io::Json::array({2.0, 0.0, 0.0, 0.0});
    EXPECT_THROW(io::run_config_from_json(j), io::SchemaError);
}

TEST(Files, MissingFileIsIoError) {
    EXPECT_THROW(io::read_json_file("/nonexistent/dir/poses.json"), io::IoError);
    EXPECT_THROW(io::write_text_file("/nonexistent/dir/out.json", "{}"), io::IoError);
}

TEST(Files, WriteThenRead) {
    const fs::path p = fs::temp_directory_path() / "carmtrack_io_test.json";
    io::write_text_file(p, io::dump(io::to_json(io::default_phantom())));
    EXPECT_NO_THROW(io::phantom_from_json(io::read_json_file(p)));
    fs::remove(p);
}
