#include <iostream>

#include <CLI11.hpp>

#include "attn/core.hpp"
#include "commands.hpp"

namespace {

void add_feature_flags(CLI::App* cmd, attn::cli::FeatureOptions& f) {
  cmd->add_option("--d-l", f.d_l, "drowsy segment length in minutes, or 'max'")->capture_default_str();
  cmd->add_option("--channels", f.channels, "comma-separated channel subset, or 'all'")->capture_default_str();
  cmd->add_option("--drop-first-trials", f.drop_first_trials, "leading trials dropped per subject")
      ->capture_default_str();
  cmd->add_option("--w-l", f.w_l, "STFT window length in seconds")->capture_default_str();
  cmd->add_option("--w-s", f.w_s, "STFT window shift in samples")->capture_default_str();
  cmd->add_option("--bin-size", f.bin_size, "frequency bin width in Hz")->capture_default_str();
  cmd->add_option("--f-lo", f.f_lo, "lower (exclusive) band edge in Hz")->capture_default_str();
  cmd->add_option("--f-hi", f.f_hi, "upper band edge in Hz")->capture_default_str();
  cmd->add_option("--smoothing", f.smoothing, "running-average span in seconds")->capture_default_str();
}

void add_model_flags(CLI::App* cmd, attn::cli::ModelOptions& m) {
  cmd->add_option("--model", m.model, "rf, svm, dnn4 or dnn6")->capture_default_str();
  cmd->add_option("--trees", m.trees, "random forest size");
  cmd->add_option("--max-depth", m.max_depth, "random forest depth limit (0 = none)");
  cmd->add_option("--min-samples-leaf", m.min_samples_leaf, "random forest leaf size");
  cmd->add_option("--svm-c", m.svm_c, "SVM regularization constant");
  cmd->add_option("--epochs", m.epochs, "SVM / network training epochs");
  cmd->add_option("--batch-size", m.batch_size, "network minibatch size");
  cmd->add_option("--learning-rate", m.learning_rate, "network Adam step size");
  cmd->add_option("--dropout", m.dropout, "dnn6 dropout rate");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace attn::cli;
  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(args);
  } catch (const std::exception& e) {
    std::cerr << "attn: error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"EEG attention-state classification toolchain"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic corpus and manifest");
  c_synth->add_option("--config", config_path, "key = value file; flags win");
  c_synth->add_option("--out", synth.out_dir, "output directory")->required();
  c_synth->add_option("--subjects", synth.subjects)->capture_default_str();
  c_synth->add_option("--trials", synth.trials, "trials per subject")->capture_default_str();
  c_synth->add_option("--minutes", synth.minutes, "trial duration")->capture_default_str();
  c_synth->add_option("--seed", synth.seed)->capture_default_str();
  c_synth->add_option("--variability", synth.variability, "between-subject variability")->capture_default_str();
  c_synth->add_option("--noise-exponent", synth.noise_exponent, "1/f^a background exponent")
      ->capture_default_str();

  FeaturizeOptions feat;
  auto* c_feat = app.add_subcommand("featurize", "manifest -> feature matrix file");
  c_feat->add_option("--config", config_path, "key = value file; flags win");
  c_feat->add_option("--manifest", feat.manifest)->required();
  c_feat->add_option("--out", feat.out, "feature matrix file")->required();
  add_feature_flags(c_feat, feat.features);

  TrainOptions train;
  auto* c_train = app.add_subcommand("train", "split, standardize, train and evaluate");
  c_train->add_option("--config", config_path, "key = value file; flags win");
  c_train->add_option("--features", train.features)->required();
  c_train->add_option("--model-out", train.model_out, "model file")->required();
  c_train->add_option("--report", train.report, "report file (default: <model-out>.report)");
  c_train->add_option("--paradigm", train.paradigm, "subject-specific, common-subject or leave-one-out")
      ->capture_default_str();
  c_train->add_option("--subject", train.subject, "subject for subject-specific / leave-one-out");
  c_train->add_option("--test-fraction", train.test_fraction)->capture_default_str();
  c_train->add_option("--seed", train.seed)->capture_default_str();
  add_model_flags(c_train, train.model);

  EvalOptions eval;
  auto* c_eval = app.add_subcommand("eval", "evaluate a saved model on a feature file");
  c_eval->add_option("--config", config_path, "key = value file; flags win");
  c_eval->add_option("--model", eval.model)->required();
  c_eval->add_option("--features", eval.features)->required();
  c_eval->add_option("--report", eval.report)->required();
  c_eval->add_option("--subject", eval.subject, "restrict to one subject's rows");

  SweepOptions sweep;
  auto* c_sweep = app.add_subcommand("sweep", "run a grid of experiments");
  c_sweep->add_option("--config", config_path, "key = value file; flags win");
  c_sweep->add_option("--grid", sweep.grid)->required();
  c_sweep->add_option("--manifest", sweep.manifest)->required();
  c_sweep->add_option("--out", sweep.out, "results CSV")->required();
  c_sweep->add_option("--workers", sweep.workers)->capture_default_str();
  c_sweep->add_flag("--fail-fast", sweep.fail_fast, "stop at the first failing record");
  c_sweep->add_option("--cache", sweep.cache_dir, "feature cache directory");
  c_sweep->add_flag("--resume", sweep.resume, "reuse finished records from an existing --out");
  c_sweep->add_option("--tables", sweep.tables_dir, "directory for grouped tables");

  ReportOptions report;
  auto* c_report = app.add_subcommand("report", "group sweep results, or print an eval report");
  c_report->add_option("--config", config_path, "key = value file; flags win");
  c_report->add_option("--results", report.results, "sweep results CSV");
  c_report->add_option("--eval-report", report.eval_report, "report written by train/eval");
  c_report->add_option("--group-by", report.group_by, "comma-separated axes")->capture_default_str();
  c_report->add_option("--out", report.out, "table CSV (default: stdout)");
  c_report->add_flag("--no-drowsy", report.no_drowsy, "omit drowsy-recall columns");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (c_synth->parsed()) return run_synth(synth);
    if (c_feat->parsed()) return run_featurize(feat);
    if (c_train->parsed()) return run_train(train);
    if (c_eval->parsed()) return run_eval(eval);
    if (c_sweep->parsed()) return run_sweep(sweep);
    if (c_report->parsed()) return run_report(report);
  } catch (const std::exception& e) {
    std::cerr << "attn " << app.get_subcommands().front()->get_name() << ": error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
