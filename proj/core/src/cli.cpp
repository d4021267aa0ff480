#include "msmsf/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "msmsf/checkpoint.hpp"
#include "msmsf/edge_eval.hpp"
#include "msmsf/errors.hpp"
#include "msmsf/inference.hpp"
#include "msmsf/io.hpp"
#include "msmsf/run_config.hpp"
#include "msmsf/synthetic.hpp"
#include "msmsf/trainer.hpp"

namespace msmsf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path resolve(const fs::path& root, const fs::path& p) { return p.is_absolute() ? p : root / p; }

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// Metadata written next to trained checkpoints.
struct ModelMeta {
  MsmsfNetConfig net;
  std::string modality = "rgb";
  std::vector<float> mean;
};

std::string model_meta_json(const RunConfig& rc, const std::string& modality) {
  json j;
  j["net"] = rc.net_profile;
  j["net_resolved"] = json::parse(net_config_to_json(rc.net));
  j["modality"] = modality;
  j["mean"] = rc.mean;
  j["seed"] = rc.seed;
  return j.dump(2) + "\n";
}

ModelMeta read_model_meta(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("model description not found: " + path.string());
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  ModelMeta m;
  try {
    m.net = parse_net_config(j.at("net_resolved").dump());
    m.modality = j.value("modality", "rgb");
    m.mean = j.value("mean", std::vector<float>{});
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return m;
}

Image load_input(const fs::path& path, const std::vector<float>& mean, std::size_t channels) {
  Image img = read_image(path);
  if (img.c == 1 && channels == 3) {
    Image rgb(3, img.h, img.w);
    for (std::size_t c = 0; c < 3; ++c) std::copy(img.data.begin(), img.data.end(), rgb.data.begin() + static_cast<long>(c * img.h * img.w));
    img = std::move(rgb);
  }
  if (img.c != channels) {
    throw DataError(path.string() + ": " + std::to_string(img.c) + " channels, net expects " + std::to_string(channels));
  }
  subtract_mean(img, mean);
  return img;
}

std::vector<BinaryMap> load_annotations(const ManifestEntry& e) {
  std::vector<BinaryMap> maps;
  for (const auto& a : e.annotations) maps.push_back(read_edge_map(a));
  return maps;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string output;
  std::size_t steps = 0;
};

int cmd_train(const fs::path& root, const TrainArgs& args, std::ostream& out, std::ostream& err) {
  RunConfig rc = load_run_config(args.config, root);
  if (args.steps > 0) rc.train.max_steps = args.steps;
  if (!args.output.empty()) rc.output_dir = args.output;
  if (rc.manifest.empty()) throw ConfigError("run config has no manifest");
  const DatasetManifest manifest = load_manifest(rc.manifest, root);
  if (manifest.entries.empty()) throw DataError("manifest " + rc.manifest.string() + " has no entries");
  const auto modalities = manifest.modalities();
  if (modalities.size() != 1) throw ConfigError("training manifest mixes modalities; train one model per modality");
  if (!rc.augment_explicit) rc.train.augment = AugmentPolicy::from_id(manifest.augmentation);

  std::vector<TrainingSample> raw;
  for (const auto& e : manifest.entries) {
    if (e.annotations.empty()) throw DataError("training entry " + e.image.string() + " has no annotations");
    const auto maps = load_annotations(e);
    TrainingSample s{e.stem(), load_input(e.image, rc.mean, rc.net.in_channels),
                     consensus_gt(maps, std::min<std::size_t>(3, maps.size()))};
    if (s.gt.height() != s.image.h || s.gt.width() != s.image.w) {
      throw DataError(e.image.string() + ": image and annotation sizes differ");
    }
    raw.push_back(std::move(s));
  }
  std::size_t skipped = 0;
  const auto samples = prepare_training_set(raw, rc.train.augment, rc.seed, &skipped);

  const fs::path dir = resolve(root, rc.output_dir);
  fs::create_directories(dir);
  write_text_file(dir / "config.json", run_config_to_json(rc));
  write_text_file(dir / "model.json", model_meta_json(rc, modalities.front()));

  std::ofstream csv(dir / "loss.csv", std::ios::binary | std::ios::trunc);
  if (!csv) throw DataError("cannot write " + (dir / "loss.csv").string());
  csv << "# seed=" << rc.seed << " config=config.json\n" << loss_log_header();

  MsmsfNet net = build_net(rc.net, rc.seed);
  TrainHooks hooks;
  hooks.on_step = [&](const LossRecord& r) { csv << format_loss_record(r); };
  hooks.on_epoch_end = [&](std::size_t epoch, const MsmsfNet& n, const AdamState& st) {
    csv.flush();
    if (epoch % rc.checkpoint_every != 0) return;
    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%03zu.ckpt", epoch);
    write_checkpoint(training_checkpoint(n, st, epoch), dir / name);
  };
  const TrainResult result = train(samples, net, rc.train, hooks);
  write_checkpoint(training_checkpoint(net, result.optimizer, result.epochs_completed), dir / "final.ckpt");
  csv.close();
  if (skipped + result.skipped_samples > 0) {
    err << "warning: skipped " << skipped + result.skipped_samples << " fully ignored samples or crops\n";
  }
  out << "trained " << result.log.size() << " steps over " << result.epochs_completed << " epochs (seed "
      << rc.seed << ")\n";
  if (!result.log.empty()) {
    out << "loss: " << fmt(result.log.front().total, "%.6g") << " -> " << fmt(result.log.back().total, "%.6g")
        << "\n";
  }
  out << "outputs: " << dir.string() << "\n";
  return kExitOk;
}

// --- predict -----------------------------------------------------------------

struct PredictArgs {
  std::vector<std::string> checkpoints;
  std::string model_config;
  std::string manifest;
  std::vector<std::string> images;
  std::string modality = "rgb";
  std::string output;
  bool multiscale = false;
  std::vector<double> scales{0.5, 1.0, 1.5};
  bool modality_average = false;
};

struct LoadedModel {
  MsmsfNet net;
  ModelMeta meta;
};

LoadedModel load_model(const fs::path& root, const std::string& ckpt, const std::string& model_config) {
  const fs::path path = resolve(root, ckpt);
  if (!fs::is_regular_file(path)) throw ConfigError("checkpoint not found: " + path.string());
  const fs::path meta_path = model_config.empty() ? path.parent_path() / "model.json" : resolve(root, model_config);
  ModelMeta meta = read_model_meta(meta_path);
  MsmsfNet net = load_checkpoint(path, meta.net);
  return {std::move(net), std::move(meta)};
}

int cmd_predict(const fs::path& root, const PredictArgs& args, std::ostream& out) {
  if (args.output.empty()) throw ConfigError("predict: --output is required");
  if (args.modality_average && args.checkpoints.size() != 2) {
    throw ConfigError("--modality-average needs two checkpoints (one RGB, one HHA)");
  }
  if (!args.modality_average && args.checkpoints.size() != 1) {
    throw ConfigError("predict takes exactly one checkpoint unless --modality-average is given");
  }
  if (args.modality_average && !args.model_config.empty()) {
    throw ConfigError("--model-config applies to a single checkpoint; paired checkpoints read their model.json");
  }
  if (args.manifest.empty() == args.images.empty()) throw ConfigError("predict: give either --manifest or image paths");

  std::vector<ManifestEntry> inputs;
  if (!args.manifest.empty()) {
    inputs = load_manifest(args.manifest, root).entries;
  } else {
    for (const auto& im : args.images) {
      const fs::path p = resolve(root, im);
      if (!fs::is_regular_file(p)) throw DataError("missing input " + p.string());
      inputs.push_back({p, {}, args.modality});
    }
  }
  if (inputs.empty()) throw DataError("predict: no inputs");

  std::vector<LoadedModel> models;
  for (const auto& c : args.checkpoints) models.push_back(load_model(root, c, args.model_config));
  const fs::path dir = resolve(root, args.output);
  fs::create_directories(dir);

  auto run = [&](const LoadedModel& m, const fs::path& image) {
    const Image img = load_input(image, m.meta.mean, m.net.config().in_channels);
    return args.multiscale ? multiscale_predict(m.net, img, args.scales) : predict(m.net, img);
  };

  std::size_t written = 0;
  if (!args.modality_average) {
    std::set<std::string> seen;
    for (const auto& e : inputs) {
      if (e.modality != models[0].meta.modality) {
        throw ConfigError("modality mismatch: checkpoint is '" + models[0].meta.modality + "', input " +
                          e.image.string() + " is '" + e.modality + "'");
      }
      if (!seen.insert(e.stem()).second) throw DataError("duplicate input stem '" + e.stem() + "'");
      write_prediction(run(models[0], e.image), dir / e.stem());
      ++written;
    }
  } else {
    std::map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < 2; ++i) {
      if (!slot.emplace(models[i].meta.modality, i).second) {
        throw ConfigError("--modality-average needs checkpoints of two different modalities");
      }
    }
    if (!slot.count("rgb") || !slot.count("hha")) throw ConfigError("--modality-average needs an rgb and an hha checkpoint");
    std::vector<std::string> order;
    std::map<std::string, std::map<std::string, fs::path>> by_stem;
    for (const auto& e : inputs) {
      if (!slot.count(e.modality)) throw ConfigError("input " + e.image.string() + " has modality '" + e.modality + "'");
      if (!by_stem.count(e.stem())) order.push_back(e.stem());
      if (!by_stem[e.stem()].emplace(e.modality, e.image).second) {
        throw DataError("duplicate " + e.modality + " input for stem '" + e.stem() + "'");
      }
    }
    for (const auto& stem : order) {
      const auto& pair = by_stem[stem];
      if (pair.size() != 2) throw DataError("stem '" + stem + "' lacks its rgb/hha counterpart");
      const auto rgb = run(models[slot["rgb"]], pair.at("rgb"));
      const auto hha = run(models[slot["hha"]], pair.at("hha"));
      write_prediction(modality_average(rgb, hha), dir / stem);
      ++written;
    }
  }
  out << "wrote " << written << " predictions to " << dir.string() << "\n";
  return kExitOk;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string manifest;
  std::string dataset = "bsds";
  double tol = 0.0;
  std::size_t thresholds = 99;
  bool no_nms = false;
  std::string output;
  std::string name = "msmsf";
};

bool has_prediction(const fs::path& stem) {
  auto a = stem;
  a += ".f32";
  auto b = stem;
  b += ".png";
  return fs::is_regular_file(a) || fs::is_regular_file(b);
}

int cmd_eval(const fs::path& root, const EvalArgs& args, std::ostream& out, std::ostream& err) {
  const DatasetProfile dataset = parse_dataset_profile(args.dataset);
  EvalSettings settings;
  if (args.tol != 0.0) settings.tol_frac = args.tol;
  if (args.thresholds == 0) throw ConfigError("--thresholds must be positive");
  EvalOptions options;
  options.tol_frac = settings.tolerance(dataset);
  if (!(options.tol_frac > 0.0)) throw ConfigError("--tol must be positive");
  options.apply_nms = !args.no_nms;
  for (std::size_t k = 1; k <= args.thresholds; ++k) {
    options.thresholds.push_back(static_cast<double>(k) / static_cast<double>(args.thresholds + 1));
  }

  const fs::path pred_dir = resolve(root, args.pred);
  if (!fs::is_directory(pred_dir)) throw ConfigError("prediction directory not found: " + pred_dir.string());
  const DatasetManifest manifest = load_manifest(args.manifest, root);

  std::vector<std::string> stems;
  std::set<std::string> gt_stems;
  std::vector<EdgeProbabilityMap> preds;
  std::vector<std::vector<BinaryMap>> gts;
  std::size_t missing = 0;
  for (const auto& e : manifest.entries) {
    if (!gt_stems.insert(e.stem()).second) continue;
    if (!has_prediction(pred_dir / e.stem())) {
      err << "warning: no prediction for " << e.stem() << "\n";
      ++missing;
      continue;
    }
    if (e.annotations.empty()) throw DataError("entry " + e.stem() + " has no annotations");
    EdgeProbabilityMap p = read_prediction(pred_dir / e.stem());
    auto maps = load_annotations(e);
    for (const auto& m : maps) {
      if (m.h != p.height() || m.w != p.width()) throw DataError(e.stem() + ": prediction and ground-truth sizes differ");
    }
    stems.push_back(e.stem());
    preds.push_back(std::move(p));
    gts.push_back(std::move(maps));
  }
  std::set<std::string> orphans;
  for (const auto& f : fs::directory_iterator(pred_dir)) {
    const auto ext = f.path().extension();
    if ((ext == ".f32" || ext == ".png") && !gt_stems.count(f.path().stem().string())) orphans.insert(f.path().stem().string());
  }
  for (const auto& o : orphans) err << "warning: prediction without ground truth: " << o << "\n";
  if (preds.empty()) throw DataError("no prediction matches a ground-truth stem");

  const EvalResult r = evaluate_dataset(preds, gts, options);
  std::string report;
  report += "# msmsf boundary evaluation\n";
  report += "tolerance: " + fmt(options.tol_frac, "%.4g") + "\n";
  report += "dataset: " + to_string(dataset) + "\n";
  report += "thresholds: " + std::to_string(options.thresholds.size()) + "\n";
  report += "nms: " + std::string(options.apply_nms ? "on" : "off") + "\n";
  report += "images: " + std::to_string(preds.size()) + " (unmatched: " + std::to_string(missing + orphans.size()) + ")\n";
  report += "ODS: " + fmt(r.ods) + " at threshold " + fmt(r.ods_threshold, "%.4f") + "\n";
  report += "OIS: " + fmt(r.ois) + "\n";
  report += "AP: " + fmt(r.ap) + " (trapezoid over recall, best precision per recall, (0, P0) prepended)\n";
  out << report;

  if (!args.output.empty()) {
    const fs::path dir = resolve(root, args.output);
    fs::create_directories(dir);
    write_text_file(dir / "report.txt", report);
    PRCurve curve = r.curve;
    curve.name = args.name;
    emit_pr_plot({curve}, dir / "pr");
    std::string per_image = "stem,ois_threshold,precision,recall,f1\n";
    for (std::size_t i = 0; i < stems.size(); ++i) {
      const auto& counts = r.per_image[i];
      std::size_t best = 0;
      for (std::size_t t = 1; t < counts.size(); ++t) {
        if (counts[t].f1() > counts[best].f1()) best = t;
      }
      per_image += stems[i] + "," + fmt(counts[best].threshold, "%.4f") + "," + fmt(counts[best].precision()) + "," +
                   fmt(counts[best].recall()) + "," + fmt(counts[best].f1()) + "\n";
    }
    write_text_file(dir / "per_image.csv", per_image);
  }
  return kExitOk;
}

// --- inspect -----------------------------------------------------------------

struct InspectArgs {
  std::string artifact;
  std::string net;
  std::size_t height = 320;
  std::size_t width = 320;
};

MsmsfNetConfig net_from_json_file(const fs::path& path, const fs::path& root) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
  if (j.contains("net_resolved")) return parse_net_config(j["net_resolved"].dump());
  if (j.contains("stages")) return parse_net_config(j.dump());
  if (j.contains("net") && j["net"].is_string()) return resolve_net_profile(j["net"].get<std::string>(), root);
  throw ConfigError(path.string() + ": neither a net description nor a run config");
}

bool is_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[5] = {};
  in.read(magic, 5);
  return in && std::string(magic, 5) == "MSMSF";
}

void describe_net(const MsmsfNetConfig& cfg, const InspectArgs& args, std::ostream& out) {
  out << "profile: " << cfg.profile << "\n";
  out << "weight layers: " << count_weight_layers(cfg) << "\n";
  out << "parameters: " << count_parameters(cfg) << "\n";
  out << "input: " << cfg.in_channels << "x" << args.height << "x" << args.width << "\n";
  const auto rfs = stage_receptive_fields(cfg);
  std::size_t h = args.height;
  std::size_t w = args.width;
  for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
    if (s > 0 && std::find(cfg.pool_after.begin(), cfg.pool_after.end(), s - 1) != cfg.pool_after.end()) {
      h = conv_output_extent(h, 1, 3, 2);
      w = conv_output_extent(w, 1, 3, 2);
    }
    std::size_t layers = 0;
    for (std::size_t b = 0; b < cfg.stages[s].blocks; ++b) layers += count_block_weight_layers(cfg.block_config(s, b));
    out << "stage " << s << ": blocks " << cfg.stages[s].blocks << ", weight layers " << layers << ", output "
        << cfg.stages[s].width << "x" << h << "x" << w << ", stride " << cfg.stage_stride(s) << ", receptive field "
        << rfs[s].h << "x" << rfs[s].w << "\n";
  }
  out << "side outputs: " << cfg.side_stages.size() << " + 1 fused, each 1x" << args.height << "x" << args.width << "\n";
}

int cmd_inspect(const fs::path& root, const InspectArgs& args, std::ostream& out) {
  if (args.height == 0 || args.width == 0) throw ConfigError("--input extents must be positive");
  out << "artifact: " << args.artifact << "\n";
  if (args.artifact == "tiny" || args.artifact == "paper-depth") {
    describe_net(MsmsfNetConfig::from_profile(args.artifact), args, out);
    return kExitOk;
  }
  const fs::path path = resolve(root, args.artifact);
  if (!fs::is_regular_file(path)) throw DataError("cannot read artifact " + path.string());
  if (!is_checkpoint(path)) {
    describe_net(net_from_json_file(path, root), args, out);
    return kExitOk;
  }
  const Checkpoint ckpt = read_checkpoint(path);
  std::size_t weights = 0;
  std::size_t state = 0;
  for (const auto& e : ckpt.entries) {
    if (e.name.rfind(kStatePrefix, 0) == 0) {
      ++state;
    } else if (e.extents.size() == 4) {
      ++weights;
    }
  }
  out << "kind: checkpoint\n";
  out << "weight layers: " << weights << "\n";
  out << "parameters: " << ckpt.parameter_count() << "\n";
  out << "training-state arrays: " << state << "\n";
  fs::path meta = args.net.empty() ? path.parent_path() / "model.json" : fs::path{};
  if (!args.net.empty() || fs::is_regular_file(meta)) {
    const MsmsfNetConfig cfg = !args.net.empty() ? (args.net == "tiny" || args.net == "paper-depth"
                                                        ? MsmsfNetConfig::from_profile(args.net)
                                                        : net_from_json_file(resolve(root, args.net), root))
                                                  : read_model_meta(meta).net;
    load_checkpoint(path, cfg);  // throws on any mismatch
    out << "matches net config: yes\n";
    describe_net(cfg, args, out);
  }
  return kExitOk;
}

// --- synth -------------------------------------------------------------------

struct SynthArgs {
  std::string output;
  std::size_t count = 8;
  std::uint64_t seed = 0;
  std::size_t size = 64;
};

int cmd_synth(const fs::path& root, const SynthArgs& args, std::ostream& out) {
  if (args.count == 0) throw ConfigError("--count must be positive");
  const fs::path dir = resolve(root, args.output);
  write_synthetic_dataset(dir, args.count, args.seed, args.size, args.size);
  out << "wrote " << args.count << " synthetic samples (seed " << args.seed << ") to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"msmsf: multi-stream multi-scale edge detection"};
  app.require_subcommand(1);
  std::string root = ".";
  app.add_option("--root", root, "Base directory for relative paths")->capture_default_str();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a model from a run config");
  train->add_option("--config", train_args.config, "Run config (JSON)")->required();
  train->add_option("--output", train_args.output, "Override the output directory");
  train->add_option("--steps", train_args.steps, "Stop after this many optimizer steps");

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "Write edge probability maps");
  predict->add_option("--checkpoint", predict_args.checkpoints, "Checkpoint (twice with --modality-average)")->required();
  predict->add_option("--model-config", predict_args.model_config, "Model description (default: model.json beside the checkpoint)");
  predict->add_option("--manifest", predict_args.manifest, "Manifest listing the inputs");
  predict->add_option("images", predict_args.images, "Input images");
  predict->add_option("--modality", predict_args.modality, "Modality tag of positional inputs")->capture_default_str();
  predict->add_option("--output", predict_args.output, "Output directory")->required();
  predict->add_flag("--multiscale", predict_args.multiscale, "Average predictions over the scale pyramid");
  predict->add_option("--scales", predict_args.scales, "Scales used by --multiscale")->delimiter(',')->capture_default_str();
  predict->add_flag("--modality-average", predict_args.modality_average, "Average paired RGB and HHA predictions");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Boundary benchmark: ODS, OIS, AP and PR curve");
  eval->add_option("--pred", eval_args.pred, "Prediction directory")->required();
  eval->add_option("--manifest", eval_args.manifest, "Ground-truth manifest")->required();
  eval->add_option("--dataset", eval_args.dataset, "biped, bsds or nyud (nyud selects tolerance 0.011)")->capture_default_str();
  eval->add_option("--tol", eval_args.tol, "Match tolerance as a fraction of the image diagonal");
  eval->add_option("--thresholds", eval_args.thresholds, "Number of evenly spaced thresholds")->capture_default_str();
  eval->add_flag("--no-nms", eval_args.no_nms, "Skip non-maximum suppression");
  eval->add_option("--output", eval_args.output, "Directory for report.txt, pr.csv, pr.svg");
  eval->add_option("--name", eval_args.name, "Curve label")->capture_default_str();

  InspectArgs inspect_args;
  auto* inspect = app.add_subcommand("inspect", "Summarize a profile, config or checkpoint");
  inspect->add_option("artifact", inspect_args.artifact, "tiny, paper-depth, a JSON config or a checkpoint")->required();
  inspect->add_option("--net", inspect_args.net, "Net profile or config to check a checkpoint against");
  inspect->add_option("--height", inspect_args.height, "Input height for shape reporting")->capture_default_str();
  inspect->add_option("--width", inspect_args.width, "Input width for shape reporting")->capture_default_str();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic rectangles-and-lines dataset");
  synth->add_option("--output", synth_args.output, "Output directory")->required();
  synth->add_option("--count", synth_args.count, "Number of images")->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "Seed")->capture_default_str();
  synth->add_option("--size", synth_args.size, "Square image extent")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const fs::path r = root;
    if (*train) return cmd_train(r, train_args, out, err);
    if (*predict) return cmd_predict(r, predict_args, out);
    if (*eval) return cmd_eval(r, eval_args, out, err);
    if (*inspect) return cmd_inspect(r, inspect_args, out);
    if (*synth) return cmd_synth(r, synth_args, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace msmsf
