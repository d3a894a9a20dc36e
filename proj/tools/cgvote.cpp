#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cgvote/io.hpp"
#include "cgvote/pipeline.hpp"
#include "cgvote/synth.hpp"

namespace fs = std::filesystem;

namespace {

Eigen::VectorXd parse_comma_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::string field;
  std::istringstream stream(text);
  while (std::getline(stream, field, ',')) {
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw cgvote::ValidationError(flag + ": invalid number '" + field + "'");
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out[static_cast<Eigen::Index>(i)] = values[i];
  return out;
}

void write_or_print(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw cgvote::ValidationError("cannot write file: " + out_path);
  out << text;
}

struct SynthArgs {
  int samples = 1000;
  int classes = 2;
  int classifiers = 2;
  std::string class_probs;
  std::string skills;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int run_synth(const SynthArgs& args) {
  cgvote::SynthSpec spec;
  spec.samples_per_split = args.samples;
  spec.seed = args.seed;
  spec.class_probs = args.class_probs.empty()
                         ? Eigen::VectorXd::Constant(args.classes, 1.0 / args.classes)
                         : parse_comma_list(args.class_probs, "--class-probs");
  spec.skills = args.skills.empty() ? Eigen::VectorXd::Ones(args.classifiers)
                                    : parse_comma_list(args.skills, "--skills");
  if (spec.class_count() != args.classes) {
    throw cgvote::ValidationError("--class-probs must list one probability per class");
  }
  if (spec.classifier_count() != args.classifiers) {
    throw cgvote::ValidationError("--skills must list one boost per classifier");
  }

  const cgvote::PredictionBundle bundle = cgvote::generate(spec);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);

  cgvote::Manifest manifest;
  manifest.dataset = "synthetic_seed" + std::to_string(args.seed);
  manifest.class_count = bundle.class_count;
  const auto dump_split = [&](const cgvote::PredictionSplit& split, int classifier,
                              const std::string& filename) {
    cgvote::PredictionFile file;
    file.sample_ids = split.sample_ids;
    file.true_labels = split.true_labels;
    file.soft = split.soft[classifier];
    cgvote::write_prediction_csv(dir / filename, file);
  };
  for (int i = 0; i < bundle.classifier_count(); ++i) {
    const std::string& name = bundle.classifier_names[i];
    cgvote::ManifestEntry entry;
    entry.name = name;
    entry.model_test = name + "_model_test.csv";
    entry.ensemble_test = name + "_ensemble_test.csv";
    dump_split(bundle.model_test, i, entry.model_test);
    dump_split(bundle.ensemble_test, i, entry.ensemble_test);
    manifest.entries.push_back(std::move(entry));
  }
  cgvote::write_manifest(dir / "manifest.json", manifest);
  std::cerr << "wrote " << manifest.entries.size() << " classifiers x 2 splits to " << dir
            << std::endl;
  return 0;
}

cgvote::PredictionBundle load_from_manifest(const std::string& manifest_path) {
  const fs::path path(manifest_path);
  const cgvote::Manifest manifest = cgvote::read_manifest(path);
  return cgvote::load_bundle(manifest, path.has_parent_path() ? path.parent_path() : ".");
}

cgvote::EnsembleConfig load_config(const std::string& config_path) {
  if (config_path.empty()) return cgvote::EnsembleConfig{};
  return cgvote::read_config(config_path);
}

int run_weights(const std::string& manifest_path, const std::string& config_path,
                const std::string& out_path) {
  const cgvote::PredictionBundle bundle = load_from_manifest(manifest_path);
  const cgvote::EnsembleConfig cfg = load_config(config_path);
  const cgvote::DerivedWeights derived = cgvote::derive_weights(bundle, cfg);
  const cgvote::ValueConcept chosen =
      cgvote::select_value(derived.concept_weights, bundle.model_test, cfg);

  cgvote::WeightsFile file;
  file.classifier_names = bundle.classifier_names;
  file.chosen = cgvote::to_string(chosen);
  for (cgvote::BaselineScheme scheme : cgvote::kAllBaselines) {
    file.entries.emplace_back(cgvote::to_string(scheme),
                              cgvote::baseline_weights(scheme, derived.stats, bundle.class_count));
  }
  for (const auto& [concept_tag, weights] : derived.concept_weights) {
    file.entries.emplace_back(cgvote::to_string(concept_tag), weights);
  }
  file.evaluation = derived.evaluation;
  file.diagnostics = derived.diagnostics;
  cgvote::write_weights_file(out_path, file);
  return 0;
}

int run_vote(const std::string& manifest_path, const std::string& weights_path,
             const std::string& split, const std::string& tag, const std::string& out_path) {
  if (split != "model_test" && split != "ensemble_test") {
    throw cgvote::ValidationError("--split must be model_test or ensemble_test");
  }
  const cgvote::PredictionBundle bundle = load_from_manifest(manifest_path);
  const cgvote::WeightsFile weights = cgvote::read_weights_file(weights_path);
  if (weights.classifier_names != bundle.classifier_names) {
    throw cgvote::ValidationError("weights file classifiers do not match the manifest");
  }

  const std::string wanted = tag.empty() ? weights.chosen : tag;
  const cgvote::WeightVector* entry = nullptr;
  for (const auto& [name, vec] : weights.entries) {
    if (name == wanted) entry = &vec;
  }
  if (entry == nullptr) {
    throw cgvote::ValidationError("weights file has no entry tagged " + wanted);
  }

  const cgvote::PredictionSplit& chosen_split =
      split == "model_test" ? bundle.model_test : bundle.ensemble_test;
  const std::vector<int> predictions =
      cgvote::soft_weighted_vote(chosen_split.soft, entry->weights);

  std::ostringstream out;
  out << "sample_id,prediction\n";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out << chosen_split.sample_ids[i] << "," << predictions[i] << "\n";
  }
  write_or_print(out_path, out.str());
  std::cerr << wanted << " accuracy on " << split << ": "
            << cgvote::accuracy_of(predictions, chosen_split.true_labels) << std::endl;
  return 0;
}

int run_evaluate(const std::string& manifest_path, const std::string& config_path,
                 const std::string& format, const std::string& out_path) {
  const cgvote::PredictionBundle bundle = load_from_manifest(manifest_path);
  const cgvote::EnsembleConfig cfg = load_config(config_path);
  const cgvote::Report report = cgvote::run_pipeline(bundle, cfg);
  write_or_print(out_path, cgvote::emit_report(report, cgvote::report_format_from_string(format)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative-game weighted voting ensembles"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic prediction corpus");
  synth->add_option("--samples", synth_args.samples, "samples per split");
  synth->add_option("--classes", synth_args.classes, "number of classes");
  synth->add_option("--classifiers", synth_args.classifiers, "number of classifiers");
  synth->add_option("--class-probs", synth_args.class_probs, "comma list, one per class");
  synth->add_option("--skills", synth_args.skills, "comma list of truth boosts, one per classifier");
  synth->add_option("--seed", synth_args.seed, "PRNG seed");
  synth->add_option("--out", synth_args.out_dir, "output directory")->required();

  std::string manifest_path, config_path, out_path, weights_path, tag;
  std::string split = "ensemble_test";
  std::string format = "json";

  CLI::App* weights = app.add_subcommand("weights", "derive all weight vectors");
  weights->add_option("--manifest", manifest_path, "manifest JSON")->required();
  weights->add_option("--config", config_path, "config JSON (defaults when omitted)");
  weights->add_option("--out", out_path, "output weights JSON")->required();

  CLI::App* vote = app.add_subcommand("vote", "soft-vote a split with stored weights");
  vote->add_option("--manifest", manifest_path, "manifest JSON")->required();
  vote->add_option("--weights", weights_path, "weights JSON from `weights`")->required();
  vote->add_option("--split", split, "model_test or ensemble_test");
  vote->add_option("--tag", tag, "weight entry to use (default: the chosen concept)");
  vote->add_option("--out", out_path, "prediction CSV (stdout when omitted)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "run the full comparison report");
  evaluate->add_option("--manifest", manifest_path, "manifest JSON")->required();
  evaluate->add_option("--config", config_path, "config JSON (defaults when omitted)");
  evaluate->add_option("--format", format, "json, csv or md")->check(CLI::IsMember({"json", "csv", "md"}));
  evaluate->add_option("--out", out_path, "output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args);
    if (weights->parsed()) return run_weights(manifest_path, config_path, out_path);
    if (vote->parsed()) return run_vote(manifest_path, weights_path, split, tag, out_path);
    if (evaluate->parsed()) return run_evaluate(manifest_path, config_path, format, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 1;
}
