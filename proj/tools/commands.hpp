#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace srforge::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct PrepareArgs {
  std::filesystem::path hr_dir;
  std::filesystem::path out;
  std::vector<int> scales{2, 3, 4};
  std::vector<std::string> val_names;
  std::string dataset = "dataset";
};

struct TrainArgs {
  std::filesystem::path manifest;
  std::filesystem::path model_config;
  std::filesystem::path train_config;
  std::filesystem::path out;
  std::filesystem::path resume;
  std::filesystem::path pretrained;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> max_updates;
  std::int64_t log_every = 100;
};

struct SrArgs {
  std::filesystem::path checkpoint;
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out;
  int scale = 0;
  bool self_ensemble = false;
};

struct EvalArgs {
  std::filesystem::path sr_dir;
  std::filesystem::path gt_dir;
  int scale = 2;
  std::string convention = "benchmark";
  std::filesystem::path report;
};

struct InspectArgs {
  std::filesystem::path checkpoint;
};

int run_prepare(const PrepareArgs& args);
int run_train(const TrainArgs& args);
int run_sr(const SrArgs& args);
int run_eval(const EvalArgs& args);
int run_inspect(const InspectArgs& args);

/// "43089923" -> "43,089,923".
std::string group_thousands(std::int64_t v);

}  // namespace srforge::cli
