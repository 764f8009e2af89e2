#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "graybatt/config.hpp"

namespace graybatt::cli {

struct GlobalOpts {
    std::optional<std::filesystem::path> config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::filesystem::path out = ".";
};

RunConfig load_config(const GlobalOpts& g);

// Exit codes: 0 success, 1 error, 2 training finished without a feasible best.
int cmd_build_cycle(const GlobalOpts& g);
int cmd_simulate(const GlobalOpts& g, const std::filesystem::path& cycle_path);
int cmd_gen_data(const GlobalOpts& g, const std::vector<std::filesystem::path>& cycle_paths,
                 std::vector<std::filesystem::path> stats_cycle_paths);
int cmd_train(const GlobalOpts& g, const std::vector<std::filesystem::path>& train_paths,
              const std::filesystem::path& valid_path,
              const std::vector<std::filesystem::path>& train_ref_paths,
              const std::optional<std::filesystem::path>& valid_ref_path);
int cmd_evaluate(const GlobalOpts& g, const std::filesystem::path& model_path,
                 const std::vector<std::filesystem::path>& cycle_paths,
                 const std::vector<std::filesystem::path>& ref_paths,
                 std::vector<std::filesystem::path> stats_cycle_paths, bool with_timing,
                 bool teacher_forced);
int cmd_rank(const GlobalOpts& g, const std::filesystem::path& model_path,
             const std::filesystem::path& cycle_path);

}  // namespace graybatt::cli
