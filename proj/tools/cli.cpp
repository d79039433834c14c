#include "cli.hpp"

#include <algorithm>
#include <optional>

#include <CLI11.hpp>

#include "carmtrack/chain.hpp"
#include "carmtrack/evaluation.hpp"
#include "carmtrack/handeye.hpp"
#include "carmtrack/io.hpp"
#include "carmtrack/trajectory.hpp"

namespace carmtrack::cli {

namespace {

using io::Json;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;

    // simulate
    std::string csv;

    // calibrate
    std::string poses;
    std::string pair_mode;

    // evaluate, bullseye
    std::string report;
    std::string phantom;
    std::string gaze;
    std::string gaze_out;
    std::optional<int> users;
    std::optional<int> targets;

    std::string mode = "check";
    double orbital_deg = 0.0;
    double angulation_deg = 0.0;
    std::vector<double> offset_mm;

    // init
    std::string config_out;
    std::string phantom_out;
};

io::RunConfig load_config(const Options& o) {
    return o.config.empty() ? io::default_run_config() : io::run_config_from_json(io::read_json_file(o.config));
}

void emit(const Options& o, const Json& j, std::ostream& out) {
    const std::string text = io::dump(j);
    if (o.out.empty()) {
        out << text;
    } else {
        io::write_text_file(o.out, text);
    }
}

int cmd_init(const Options& o, std::ostream& out) {
    const io::RunConfig config = io::default_run_config();
    if (o.config_out.empty() && o.phantom_out.empty()) {
        out << io::dump(io::to_json(config));
        return kOk;
    }
    if (!o.config_out.empty()) io::write_text_file(o.config_out, io::dump(io::to_json(config)));
    if (!o.phantom_out.empty()) io::write_text_file(o.phantom_out, io::dump(io::to_json(config.phantom)));
    return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    io::RunConfig config = load_config(o);
    if (o.seed) config.noise.seed = *o.seed;
    config.validate();

    const auto orbit = generate_orbit(config.orbit);
    PoseStream stream = simulate_tracker(orbit, config.tracker_T_carm, config.world_T_volume, config.noise);
    if (!config.out_of_plane_tilts_deg.empty()) {
        const OutOfPlaneSpec spec{config.tracker_T_carm, config.world_T_volume, config.noise, config.gantry.isocenter};
        stream = add_out_of_plane_poses(stream, config.out_of_plane_tilts_deg, spec);
    }
    emit(o, io::to_json(stream), out);
    if (!o.csv.empty()) io::write_text_file(o.csv, io::pose_stream_csv(stream));
    return kOk;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
    const io::RunConfig config = load_config(o);
    const PoseStream stream = io::pose_stream_from_json(io::read_json_file(o.poses));
    const PairMode mode = o.pair_mode.empty() ? config.pair_mode : io::parse_pair_mode(o.pair_mode);

    const auto pairs = relative_pairs(stream, mode);
    const HandEyeSolution solution = solve(pairs, config.degeneracy);
    const PoseSample& t0 = stream.samples.front();
    const CalibrationState state = calibrate(t0.world_T_tracker, solution.tracker_T_carm, t0.volume_T_carm);
    emit(o, io::to_json(io::CalibrationReport{solution, state, mode}), out);
    return kOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    io::RunConfig config = load_config(o);
    if (o.seed) config.evaluation.seed = *o.seed;
    if (o.users) config.evaluation.users = *o.users;
    if (o.targets) config.evaluation.targets = *o.targets;

    const io::CalibrationReport report = io::calibration_report_from_json(io::read_json_file(o.report));
    const Phantom phantom = io::phantom_from_json(io::read_json_file(o.phantom));
    if (static_cast<int>(phantom.spheres.size()) != config.evaluation.targets) {
        throw GridError("phantom has " + std::to_string(phantom.spheres.size()) + " spheres, expected " +
                        std::to_string(config.evaluation.targets));
    }

    std::vector<GazeObservation> gaze;
    if (!o.gaze.empty()) {
        gaze = io::gaze_from_json(io::read_json_file(o.gaze));
    } else {
        const auto& positions = config.evaluation.user_positions_volume_mm;
        if (static_cast<int>(positions.size()) < config.evaluation.users) {
            throw GridError("config lists " + std::to_string(positions.size()) + " user positions, need " +
                            std::to_string(config.evaluation.users));
        }
        // ground truth registration built on the report's reference C-arm pose
        const RigidTransform& v_c0 = report.state.volume_T_carm_t0();
        const CalibrationState truth(config.world_T_volume * v_c0 * inverse(config.tracker_T_carm),
                                     config.tracker_T_carm, v_c0);
        std::vector<Vec3> users_world;
        for (int u = 0; u < config.evaluation.users; ++u) {
            users_world.push_back(truth.world_T_volume().apply(positions[static_cast<std::size_t>(u)]));
        }
        gaze = simulate_gaze(phantom, truth, users_world, config.evaluation.aim_error_sigma_mm, config.evaluation.seed);
        if (!o.gaze_out.empty()) io::write_text_file(o.gaze_out, io::dump(io::to_json(gaze)));
    }

    const TREResult tre = compute_tre(phantom, report.state, gaze, config.evaluation.users);
    emit(o, io::to_json(tre), out);
    return kOk;
}

int cmd_bullseye(const Options& o, std::ostream& out) {
    const io::RunConfig config = load_config(o);
    const io::CalibrationReport report = io::calibration_report_from_json(io::read_json_file(o.report));
    const Phantom phantom = io::phantom_from_json(io::read_json_file(o.phantom));

    if (o.mode == "solve") {
        const BullseyeAlignment a = align_to_bullseye(phantom, report.state, config.gantry);
        emit(o, io::to_json(io::BullseyeReport{o.mode, a.pose, a.ray_volume, a.check}), out);
        return kOk;
    }
    GantryPose pose{o.orbital_deg, o.angulation_deg, Vec3::Zero()};
    if (!o.offset_mm.empty()) {
        if (o.offset_mm.size() != 3) throw io::SchemaError("--offset takes three values (mm)");
        pose.isocenter_offset_mm = Vec3(o.offset_mm[0], o.offset_mm[1], o.offset_mm[2]);
    }
    config.gantry.validate();
    const Line3 ray = displayed_ray(report.state, config.gantry, pose);
    emit(o, io::to_json(io::BullseyeReport{o.mode, pose, ray, check_bullseye(phantom, ray)}), out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"C-arm inside-out tracking calibration and evaluation", "carmtrack"};
    app.require_subcommand(1);

    auto* init = app.add_subcommand("init", "Write the default run config and phantom");
    init->add_option("--config-out", o.config_out, "Run config path");
    init->add_option("--phantom-out", o.phantom_out, "Phantom path");

    auto* sim = app.add_subcommand("simulate", "Synthesize a paired tracker / C-arm pose stream");
    sim->add_option("--config", o.config, "Run config (defaults built in)");
    sim->add_option("--seed", o.seed, "Override the tracker noise seed");
    sim->add_option("--out", o.out, "Pose file (stdout if omitted)");
    sim->add_option("--csv", o.csv, "Also export the stream as CSV");

    auto* cal = app.add_subcommand("calibrate", "Hand-eye calibration of a pose file");
    cal->add_option("poses", o.poses, "Pose file")->required();
    cal->add_option("--pair-mode", o.pair_mode, "all_pairs | consecutive");
    cal->add_option("--config", o.config, "Run config (pair mode, degeneracy thresholds)");
    cal->add_option("--seed", o.seed, "Unused; accepted for a uniform interface");
    cal->add_option("--out", o.out, "Report file (stdout if omitted)");

    auto* eva = app.add_subcommand("evaluate", "Target registration error from gaze lines");
    eva->add_option("report", o.report, "Calibration report")->required();
    eva->add_option("phantom", o.phantom, "Phantom file")->required();
    eva->add_option("--gaze", o.gaze, "Recorded gaze lines (simulated from the config if omitted)");
    eva->add_option("--config", o.config, "Run config (ground truth, users, aim noise)");
    eva->add_option("--users", o.users, "Number of users M")->check(CLI::PositiveNumber);
    eva->add_option("--targets", o.targets, "Number of spheres N")->check(CLI::PositiveNumber);
    eva->add_option("--seed", o.seed, "Override the aim noise seed");
    eva->add_option("--gaze-out", o.gaze_out, "Write the simulated gaze lines");
    eva->add_option("--out", o.out, "TRE file (stdout if omitted)");

    auto* bull = app.add_subcommand("bullseye", "Bull's-eye view check or alignment");
    bull->add_option("report", o.report, "Calibration report")->required();
    bull->add_option("phantom", o.phantom, "Phantom file")->required();
    bull->add_option("--mode", o.mode, "check | solve")->check(CLI::IsMember({"check", "solve"}));
    bull->add_option("--orbital", o.orbital_deg, "Orbital angle (deg), check mode");
    bull->add_option("--angulation", o.angulation_deg, "Angulation (deg), check mode");
    bull->add_option("--offset", o.offset_mm, "Isocenter offset x y z (mm), check mode")->expected(3);
    bull->add_option("--config", o.config, "Run config (gantry model)");
    bull->add_option("--seed", o.seed, "Unused; accepted for a uniform interface");
    bull->add_option("--out", o.out, "Report file (stdout if omitted)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidationError;
    }

    try {
        if (init->parsed()) return cmd_init(o, out);
        if (sim->parsed()) return cmd_simulate(o, out);
        if (cal->parsed()) return cmd_calibrate(o, out);
        if (eva->parsed()) return cmd_evaluate(o, out);
        if (bull->parsed()) return cmd_bullseye(o, out);
    } catch (const io::IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const HandEyeError& e) {
        err << "calibration failed: " << e.what() << '\n';
        return kSolverError;
    } catch (const BullseyeUnreachable& e) {
        err << "bull's-eye unreachable: " << e.what() << '\n';
        return kSolverError;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::out_of_range& e) {
        err << "invalid input: " << e.what() << '\n';
        return kValidationError;
    }
    return kValidationError;
}

}  // namespace carmtrack::cli
