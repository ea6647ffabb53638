#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "commands.hpp"
#include "srforge/checkpoint.hpp"
#include "srforge/image.hpp"
#include "srforge/trainer.hpp"

using namespace srforge::cli;

int main(int argc, char** argv) {
  CLI::App app{"srforge: EDSR/MDSR super-resolution"};
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "Crop HR images and write bicubic LR copies plus a manifest");
  prepare->add_option("hr_dir", prep.hr_dir, "Directory of HR PNG images")->required()->check(CLI::ExistingDirectory);
  prepare->add_option("--out", prep.out, "Output dataset directory")->required();
  prepare->add_option("--scales", prep.scales, "Downscaling factors")->delimiter(',')->check(CLI::Range(2, 4));
  prepare->add_option("--val-names", prep.val_names, "Image names assigned to the val split")->delimiter(',');
  prepare->add_option("--dataset", prep.dataset, "Dataset name recorded in the manifest");

  TrainArgs tr;
  std::uint64_t seed = 0;
  std::int64_t max_updates = 0;
  auto* train = app.add_subcommand("train", "Train a model from a prepared manifest");
  train->add_option("manifest", tr.manifest, "manifest.json from prepare")->required()->check(CLI::ExistingFile);
  train->add_option("--model", tr.model_config, "Model config JSON")->required()->check(CLI::ExistingFile);
  train->add_option("--train", tr.train_config, "Training config JSON")->required()->check(CLI::ExistingFile);
  train->add_option("--out", tr.out, "Run directory for checkpoints and loss.log")->required();
  auto* resume = train->add_option("--resume", tr.resume, "Continue from a checkpoint")->check(CLI::ExistingFile);
  auto* pretrained =
      train->add_option("--pretrained", tr.pretrained, "Initialize matching parameters from a checkpoint")
          ->check(CLI::ExistingFile);
  resume->excludes(pretrained);
  auto* seed_opt = train->add_option("--seed", seed, "Override the training seed");
  auto* max_opt = train->add_option("--max-updates", max_updates, "Override max_updates");
  train->add_option("--log-every", tr.log_every, "Progress line interval")->check(CLI::PositiveNumber);

  SrArgs sa;
  auto* sr = app.add_subcommand("sr", "Upscale images with a trained checkpoint");
  sr->add_option("checkpoint", sa.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  sr->add_option("inputs", sa.inputs, "LR PNG files or directories")->required();
  sr->add_option("--scale", sa.scale, "Upscaling factor (defaults to the model's only scale)")
      ->check(CLI::Range(2, 4));
  sr->add_option("--out", sa.out, "Output directory")->required();
  sr->add_flag("--self-ensemble", sa.self_ensemble, "Average over the 8 flips and rotations");

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Score SR images against ground truth");
  ev->add_option("sr_dir", ea.sr_dir, "Directory of SR PNG images")->required()->check(CLI::ExistingDirectory);
  ev->add_option("gt_dir", ea.gt_dir, "Directory of ground-truth PNG images")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--scale", ea.scale, "Upscaling factor")->required()->check(CLI::Range(2, 4));
  ev->add_option("--convention", ea.convention, "benchmark (Y, scale px border) or div2k (RGB, 6+scale px border)")
      ->check(CLI::IsMember({"benchmark", "div2k"}));
  ev->add_option("--report", ea.report, "Also write the report to this file");

  InspectArgs ia;
  auto* inspect = app.add_subcommand("inspect", "Print a checkpoint's config and parameters");
  inspect->add_option("checkpoint", ia.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*seed_opt) tr.seed = seed;
  if (*max_opt) tr.max_updates = max_updates;

  try {
    if (*prepare) return run_prepare(prep);
    if (*train) return run_train(tr);
    if (*sr) return run_sr(sa);
    if (*ev) return run_eval(ea);
    if (*inspect) return run_inspect(ia);
  } catch (const srforge::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
