#pragma once

#include <cstdint>
#include <string>

namespace bvarfsv::cli {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
};

struct SimulateOverrides {
    std::string scenario;   // one scenario name, or "all"
    std::string estimators; // comma-separated tags
    int m = 0, T = 0, reps = 0;
};

int cmd_simulate(const CommonArgs& common, const SimulateOverrides& ov);
int cmd_fit(const CommonArgs& common);
int cmd_forecast(const CommonArgs& common);
int cmd_bench(const CommonArgs& common);

} // namespace bvarfsv::cli
