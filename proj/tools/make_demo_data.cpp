// Writes the bundled demo inputs: two synthetic key point traces, the default
// robot model, and ready-to-run pipeline configs for both tasks.
#include <filesystem>
#include <iostream>
#include <string>

#include "gaitmimic/pipeline.hpp"
#include "gaitmimic/synthetic.hpp"

using namespace gaitmimic;

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data";
    std::filesystem::create_directories(dir);

    write_file(dir + "/dog_trot.csv", make_trot_trace_csv(TrotTraceOptions{}));
    write_file(dir + "/backflip.csv", make_backflip_trace_csv(BackflipTraceOptions{}));
    write_file(dir + "/robot_model.json", robot_model_to_json(RobotModel::defaults()));

    PipelineConfig trot;
    trot.trace_csv = dir + "/dog_trot.csv";
    trot.model_json = dir + "/robot_model.json";
    trot.task = TaskMode::kPeriodic;
    trot.build.gamma = 0.2;  // splits this trace's stance band cleanly
    trot.train.task = TaskMode::kPeriodic;
    trot.train.population = 64;
    trot.train.iterations = 64;
    trot.train.episode_steps = 1600;
    trot.train.seeds_per_candidate = 4;
    write_file(dir + "/trot_config.json", trot.to_json());

    PipelineConfig flip;
    flip.trace_csv = dir + "/backflip.csv";
    flip.model_json = dir + "/robot_model.json";
    flip.task = TaskMode::kBackflip;
    flip.build.gamma = 0.6;  // the stamp penalty is one-sided, so flag contact generously
    flip.build.delta_angle = 0.004;
    flip.train.task = TaskMode::kBackflip;
    flip.train.population = 48;
    flip.train.iterations = 24;
    flip.train.episode_steps = 2200;  // covers the plan at the largest interval stretch
    flip.train.seeds_per_candidate = 1;
    flip.train.noise_initial = 0.05;  // the retargeted plan already lands; search near it
    flip.train.noise_final = 0.01;
    flip.train.randomize = false;
    flip.train.master_seed = 11;
    write_file(dir + "/backflip_config.json", flip.to_json());

    std::cout << "wrote demo inputs to " << dir << "\n";
    return 0;
}
