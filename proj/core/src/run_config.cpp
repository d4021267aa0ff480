#include "msmsf/run_config.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "msmsf/errors.hpp"
#include "msmsf/io.hpp"

namespace msmsf {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& root, const std::filesystem::path& p) {
  return p.is_absolute() ? p : root / p;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": invalid JSON: " + e.what());
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; })) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void get_if(const json& obj, const char* key, T& out, const std::string& where) {
  if (obj.contains(key)) out = get<T>(obj, key, where);
}

Size2 parse_size(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    throw ConfigError(where + ": expected [h, w] with non-negative integers");
  }
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

std::vector<Size2> parse_kernels(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of [kh, kw]");
  std::vector<Size2> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_size(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json kernels_json(const std::vector<Size2>& ks) {
  json out = json::array();
  for (const auto& k : ks) out.push_back({k.h, k.w});
  return out;
}

}  // namespace

Split parse_split(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw ConfigError("unknown split '" + name + "' (expected train, val or test)");
}

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

std::vector<std::string> DatasetManifest::modalities() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (std::find(out.begin(), out.end(), e.modality) == out.end()) out.push_back(e.modality);
  }
  return out;
}

DatasetManifest load_manifest(const std::filesystem::path& path, const std::filesystem::path& root) {
  const auto full = resolve(root, path);
  if (!std::filesystem::is_regular_file(full)) throw ConfigError("manifest not found: " + full.string());
  const json j = parse_json(read_text_file(full), full.string());
  const std::string where = full.string();
  const auto base = full.parent_path();
  reject_unknown(j, {"name", "split", "augmentation", "entries"}, where);
  DatasetManifest m;
  m.name = get<std::string>(j, "name", where);
  m.split = parse_split(get<std::string>(j, "split", where));
  get_if(j, "augmentation", m.augmentation, where);
  AugmentPolicy::from_id(m.augmentation);
  if (!j.contains("entries") || !j["entries"].is_array()) throw ConfigError(where + ": 'entries' must be a list");
  std::set<std::string> stems;
  for (std::size_t i = 0; i < j["entries"].size(); ++i) {
    const json& e = j["entries"][i];
    const std::string at = where + ": entries[" + std::to_string(i) + "]";
    reject_unknown(e, {"image", "annotations", "modality"}, at);
    ManifestEntry entry;
    entry.image = resolve(base, get<std::string>(e, "image", at));
    for (const auto& a : get<std::vector<std::string>>(e, "annotations", at)) entry.annotations.push_back(resolve(base, a));
    get_if(e, "modality", entry.modality, at);
    if (!std::filesystem::is_regular_file(entry.image)) throw DataError(at + ": missing file " + entry.image.string());
    for (const auto& a : entry.annotations) {
      if (!std::filesystem::is_regular_file(a)) throw DataError(at + ": missing file " + a.string());
    }
    if (!stems.insert(entry.stem() + "\x1f" + entry.modality).second) {
      throw DataError(at + ": duplicate image stem '" + entry.stem() + "'");
    }
    m.entries.push_back(std::move(entry));
  }
  return m;
}

std::string manifest_to_json(const DatasetManifest& manifest, const std::filesystem::path& base) {
  json j;
  j["name"] = manifest.name;
  j["split"] = to_string(manifest.split);
  j["augmentation"] = manifest.augmentation;
  j["entries"] = json::array();
  for (const auto& e : manifest.entries) {
    json a = json::array();
    for (const auto& p : e.annotations) a.push_back(p.lexically_relative(base).generic_string());
    j["entries"].push_back({{"image", e.image.lexically_relative(base).generic_string()}, {"annotations", a}, {"modality", e.modality}});
  }
  return j.dump(2) + "\n";
}

double EvalSettings::tolerance(DatasetProfile dataset) const {
  if (tol_frac) return *tol_frac;
  return dataset == DatasetProfile::nyud ? kNyudTolerance : kDefaultTolerance;
}

MsmsfNetConfig parse_net_config(const std::string& json_text) {
  const json j = parse_json(json_text, "net config");
  const std::string where = "net config";
  reject_unknown(j, {"profile", "in_channels", "stages", "block", "pool_after", "side_stages", "side_kernel", "fusion_kernel"},
                 where);
  MsmsfNetConfig cfg;
  cfg.profile = "custom";
  get_if(j, "profile", cfg.profile, where);
  get_if(j, "in_channels", cfg.in_channels, where);
  if (!j.contains("stages") || !j["stages"].is_array()) throw ConfigError(where + ": 'stages' must be a list");
  for (const auto& s : j["stages"]) {
    reject_unknown(s, {"blocks", "width"}, where + ".stages");
    cfg.stages.push_back({get<std::size_t>(s, "blocks", where + ".stages"), get<std::size_t>(s, "width", where + ".stages")});
  }
  if (!j.contains("block")) throw ConfigError(where + ": missing 'block'");
  const json& b = j["block"];
  reject_unknown(b, {"branches", "pairs", "pair_fusion", "output_fusion"}, where + ".block");
  if (!b.contains("branches") || !b["branches"].is_array() || b["branches"].size() != 4) {
    throw ConfigError(where + ".block: 'branches' must list exactly 4 kernel stacks");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    cfg.block.branches[i] = parse_kernels(b["branches"][i], where + ".block.branches[" + std::to_string(i) + "]");
  }
  if (b.contains("pairs")) {
    const auto pairs = get<std::vector<std::vector<std::size_t>>>(b, "pairs", where + ".block");
    if (pairs.size() != 2 || pairs[0].size() != 2 || pairs[1].size() != 2) {
      throw ConfigError(where + ".block.pairs: expected [[a, b], [c, d]]");
    }
    cfg.block.pairs = {{{pairs[0][0], pairs[0][1]}, {pairs[1][0], pairs[1][1]}}};
  }
  cfg.block.pair_fusion = parse_kernels(b.value("pair_fusion", json::array()), where + ".block.pair_fusion");
  cfg.block.output_fusion = parse_kernels(b.value("output_fusion", json::array()), where + ".block.output_fusion");
  get_if(j, "pool_after", cfg.pool_after, where);
  get_if(j, "side_stages", cfg.side_stages, where);
  get_if(j, "side_kernel", cfg.side_kernel, where);
  get_if(j, "fusion_kernel", cfg.fusion_kernel, where);
  cfg.validate();
  return cfg;
}

std::string net_config_to_json(const MsmsfNetConfig& cfg) {
  json j;
  j["profile"] = cfg.profile;
  j["in_channels"] = cfg.in_channels;
  j["stages"] = json::array();
  for (const auto& s : cfg.stages) j["stages"].push_back({{"blocks", s.blocks}, {"width", s.width}});
  json branches = json::array();
  for (const auto& br : cfg.block.branches) branches.push_back(kernels_json(br));
  j["block"] = {{"branches", branches},
                {"pairs", {{cfg.block.pairs[0][0], cfg.block.pairs[0][1]}, {cfg.block.pairs[1][0], cfg.block.pairs[1][1]}}},
                {"pair_fusion", kernels_json(cfg.block.pair_fusion)},
                {"output_fusion", kernels_json(cfg.block.output_fusion)}};
  j["pool_after"] = cfg.pool_after;
  j["side_stages"] = cfg.side_stages;
  j["side_kernel"] = cfg.side_kernel;
  j["fusion_kernel"] = cfg.fusion_kernel;
  return j.dump(2) + "\n";
}

MsmsfNetConfig resolve_net_profile(const std::string& name_or_path, const std::filesystem::path& root) {
  if (name_or_path == "tiny" || name_or_path == "paper-depth") return MsmsfNetConfig::from_profile(name_or_path);
  const auto path = resolve(root, name_or_path);
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("net profile '" + name_or_path + "' is neither tiny, paper-depth nor an existing file");
  }
  return parse_net_config(read_text_file(path));
}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& root) {
  const json j = parse_json(json_text, "run config");
  const std::string where = "run config";
  reject_unknown(j, {"net", "net_resolved", "dataset", "train", "eval", "manifest", "output_dir", "seed", "mean"},
                 where);
  RunConfig rc;
  get_if(j, "net", rc.net_profile, where);
  // A frozen config carries its resolved net and does not need the profile file.
  rc.net = j.contains("net_resolved") ? parse_net_config(j["net_resolved"].dump())
                                      : resolve_net_profile(rc.net_profile, root);
  if (j.contains("dataset")) rc.dataset = parse_dataset_profile(get<std::string>(j, "dataset", where));
  get_if(j, "seed", rc.seed, where);
  if (j.contains("manifest")) rc.manifest = get<std::string>(j, "manifest", where);
  if (j.contains("output_dir")) rc.output_dir = get<std::string>(j, "output_dir", where);
  get_if(j, "mean", rc.mean, where);

  rc.train = TrainConfig::for_profile(rc.dataset);
  if (j.contains("train")) {
    const json& t = j["train"];
    const std::string tw = where + ".train";
    reject_unknown(t, {"batch_size", "initial_lr", "drop_after", "drop_factor", "max_epochs", "weight_decay",
                       "side_weights", "crop", "max_steps", "augment", "checkpoint_every"},
                   tw);
    get_if(t, "batch_size", rc.train.batch_size, tw);
    get_if(t, "initial_lr", rc.train.schedule.initial_lr, tw);
    get_if(t, "drop_after", rc.train.schedule.drop_after, tw);
    get_if(t, "drop_factor", rc.train.schedule.drop_factor, tw);
    get_if(t, "max_epochs", rc.train.schedule.max_epochs, tw);
    get_if(t, "weight_decay", rc.train.weight_decay, tw);
    get_if(t, "side_weights", rc.train.side_weights, tw);
    if (t.contains("crop")) rc.train.crop = parse_size(t["crop"], tw + ".crop");
    get_if(t, "max_steps", rc.train.max_steps, tw);
    get_if(t, "checkpoint_every", rc.checkpoint_every, tw);
    if (t.contains("augment")) {
      rc.train.augment = AugmentPolicy::from_id(get<std::string>(t, "augment", tw));
      rc.augment_explicit = true;
    }
  }
  if (rc.checkpoint_every == 0) throw ConfigError(where + ".train.checkpoint_every must be positive");
  rc.train.seed = rc.seed;
  rc.train.validate();

  if (j.contains("eval")) {
    const json& e = j["eval"];
    const std::string ew = where + ".eval";
    reject_unknown(e, {"tol", "thresholds", "multiscale", "scales", "nms"}, ew);
    if (e.contains("tol")) rc.eval.tol_frac = get<double>(e, "tol", ew);
    get_if(e, "thresholds", rc.eval.thresholds, ew);
    get_if(e, "multiscale", rc.eval.multiscale, ew);
    get_if(e, "scales", rc.eval.scales, ew);
    get_if(e, "nms", rc.eval.nms, ew);
  }
  if (rc.eval.tol_frac && !(*rc.eval.tol_frac > 0.0)) throw ConfigError(where + ".eval.tol must be positive");
  if (rc.eval.scales.empty()) throw ConfigError(where + ".eval.scales must not be empty");
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::filesystem::path& root) {
  const auto full = resolve(root, path);
  if (!std::filesystem::is_regular_file(full)) throw ConfigError("run config not found: " + full.string());
  return parse_run_config(read_text_file(full), root);
}

std::string run_config_to_json(const RunConfig& rc) {
  json j;
  j["net"] = rc.net_profile;
  j["net_resolved"] = json::parse(net_config_to_json(rc.net));
  j["dataset"] = to_string(rc.dataset);
  j["seed"] = rc.seed;
  j["manifest"] = rc.manifest.generic_string();
  j["output_dir"] = rc.output_dir.generic_string();
  j["mean"] = rc.mean;
  j["train"] = {{"batch_size", rc.train.batch_size},
                {"initial_lr", rc.train.schedule.initial_lr},
                {"drop_after", rc.train.schedule.drop_after},
                {"drop_factor", rc.train.schedule.drop_factor},
                {"max_epochs", rc.train.schedule.max_epochs},
                {"weight_decay", rc.train.weight_decay},
                {"side_weights", rc.train.side_weights},
                {"crop", {rc.train.crop.h, rc.train.crop.w}},
                {"max_steps", rc.train.max_steps},
                {"augment", rc.train.augment.id},
                {"checkpoint_every", rc.checkpoint_every}};
  j["eval"] = {{"tol", rc.eval.tolerance(rc.dataset)},
               {"thresholds", rc.eval.thresholds},
               {"multiscale", rc.eval.multiscale},
               {"scales", rc.eval.scales},
               {"nms", rc.eval.nms}};
  return j.dump(2) + "\n";
}

}  // namespace msmsf
