#include "cli.hpp"

#include "vesselaug/augment.hpp"
#include "vesselaug/config.hpp"
#include "vesselaug/errors.hpp"
#include "vesselaug/io.hpp"
#include "vesselaug/jitter.hpp"
#include "vesselaug/manifest.hpp"
#include "vesselaug/metrics.hpp"
#include "vesselaug/morphology.hpp"
#include "vesselaug/parallel.hpp"
#include "vesselaug/sweep.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <thread>

namespace vesselaug::cli {

namespace {

using nlohmann::json;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool entropy_seed = false;
  int threads = 0;
  std::string out;
  std::string manifest;
};

int resolved_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ToolConfig resolve_config(const CommonOptions& o) {
  ToolConfig cfg = o.config.empty() ? ToolConfig{} : load_config(o.config);
  if (o.seed && o.entropy_seed) throw ConfigError("--seed and --entropy-seed are exclusive");
  if (o.seed) cfg.seed = *o.seed;
  if (o.entropy_seed) {
    std::random_device rd;
    cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
}

// The thread count is deliberately not part of the written config: output
// trees must not depend on it.
void log_config(const ToolConfig& cfg, const fs::path& out_dir, int threads, std::ostream& err) {
  const std::string text = to_json(cfg).dump(2) + "\n";
  write_text(out_dir / "resolved_config.json", text);
  fmt::print(err, "vesselaug: seed={} threads={} config={}\n", cfg.seed, threads,
             to_json(cfg).dump());
}

std::string require_out(const CommonOptions& o) {
  if (o.out.empty()) throw ConfigError("--out is required");
  return o.out;
}

// ---------------------------------------------------------------------------
// augment

json params_json(const AppliedParams& p) {
  json j = {{"flip_horizontal", p.flips.horizontal}, {"flip_vertical", p.flips.vertical},
            {"rgn", p.rgn}};
  if (p.svgc_applied) j["svgc"] = {{"s_gamma", p.svgc.s_gamma}, {"v_gamma", p.svgc.v_gamma}};
  if (p.cwrgc_applied) j["cwrgc_gamma"] = p.cwrgc.gamma;
  if (p.cwrva_applied) j["cwrva"] = {{"lambda", p.lambda}, {"disturb", p.disturb}};
  return j;
}

int cmd_augment(const CommonOptions& o, std::optional<int> samples, std::ostream& out,
                std::ostream& err) {
  ToolConfig cfg = resolve_config(o);
  if (samples) cfg.augment.samples_per_image = *samples;
  try {
    cfg.augment.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (o.manifest.empty()) throw ConfigError("--manifest is required");
  const fs::path out_dir = require_out(o);
  const DatasetManifest input = load_manifest(o.manifest);
  const int threads = resolved_threads(o.threads);
  fs::create_directories(out_dir);
  log_config(cfg, out_dir, threads, err);

  const RngStream rng(cfg.seed);
  const int n_samples = cfg.augment.samples_per_image;
  std::vector<std::vector<json>> logs(input.entries.size());

  parallel_for(input.entries.size(), threads, [&](std::size_t i) {
    const ManifestEntry& e = input.entries[i];
    const fs::path image_path = input.resolve(e.image);
    const RgbImage img = load_image(image_path);
    std::vector<BinaryPlane> masks;
    if (e.truth) masks.push_back(load_binary_mask(input.resolve(*e.truth)).mask);
    if (e.fov) masks.push_back(load_binary_mask(input.resolve(*e.fov)).mask);
    for (const auto& m : masks) {
      if (m.rows() != img.height() || m.cols() != img.width()) {
        throw DataError(fmt::format("{}: mask size does not match image", e.id));
      }
    }
    const auto results = apply_pipeline(img, masks, cfg.augment, rng, i);
    for (int k = 0; k < n_samples; ++k) {
      const auto& r = results[k];
      const std::string name = fmt::format("{}_aug{}", e.id, k);
      save_image_or_copy(r.image, img, image_path, out_dir / "images" / (name + ".png"));
      std::size_t m = 0;
      if (e.truth) save_binary_mask(r.masks[m++], out_dir / "truth" / (name + ".png"));
      if (e.fov) save_binary_mask(r.masks[m++], out_dir / "fov" / (name + ".png"));
      logs[i].push_back({{"id", name}, {"source", e.id}, {"sample", k},
                         {"params", params_json(r.params)}});
    }
  });

  DatasetManifest result{out_dir, {}};
  std::string log_text;
  for (std::size_t i = 0; i < input.entries.size(); ++i) {
    const ManifestEntry& e = input.entries[i];
    for (int k = 0; k < n_samples; ++k) {
      const std::string name = fmt::format("{}_aug{}", e.id, k);
      ManifestEntry me;
      me.id = name;
      me.image = fs::path("images") / (name + ".png");
      if (e.truth) me.truth = fs::path("truth") / (name + ".png");
      if (e.fov) me.fov = fs::path("fov") / (name + ".png");
      result.entries.push_back(std::move(me));
      log_text += logs[i][k].dump() + "\n";
    }
  }
  save_manifest(result, out_dir / "manifest.jsonl");
  write_text(out_dir / "augment_log.jsonl", log_text);
  fmt::print(out, "wrote {} samples to {}\n", result.entries.size(), out_dir.string());
  return kOk;
}

// ---------------------------------------------------------------------------
// tophat

struct Input {
  std::string id;
  fs::path path;
};

std::vector<Input> gather_inputs(const CommonOptions& o, const std::vector<std::string>& files) {
  std::vector<Input> inputs;
  if (!o.manifest.empty()) {
    const DatasetManifest m = load_manifest(o.manifest);
    for (const auto& e : m.entries) inputs.push_back({e.id, m.resolve(e.image)});
  }
  for (const auto& f : files) inputs.push_back({fs::path(f).stem().string(), f});
  if (inputs.empty()) throw ConfigError("no input images (use --manifest or list files)");
  std::set<std::string> ids;
  for (const auto& in : inputs) {
    if (!ids.insert(in.id).second) throw DataError(fmt::format("duplicate id '{}'", in.id));
  }
  return inputs;
}

int cmd_tophat(const CommonOptions& o, const std::vector<std::string>& files,
               std::optional<int> angles, std::optional<int> length,
               std::optional<std::string> source, std::ostream& out, std::ostream& err) {
  ToolConfig cfg = resolve_config(o);
  auto& cw = cfg.augment.cwrva;
  if (angles) cw.num_angles = *angles;
  if (length) cw.length = *length;
  if (source) {
    try {
      cw.source = parse_source_plane(*source);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  StructuringElementBank bank;
  try {
    bank = build_se_bank(cw.num_angles, cw.length);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const fs::path out_dir = require_out(o);
  const auto inputs = gather_inputs(o, files);
  const int threads = resolved_threads(o.threads);
  fs::create_directories(out_dir);
  log_config(cfg, out_dir, threads, err);

  parallel_for(inputs.size(), threads, [&](std::size_t i) {
    const FloatRgb img = normalize(load_image(inputs[i].path));
    const FloatPlane map = vessel_map(img, bank, cw.source);
    save_gray(quantize_plane(map), out_dir / (inputs[i].id + "_tophat.png"));
  });
  fmt::print(out, "wrote {} vessel maps to {}\n", inputs.size(), out_dir.string());
  return kOk;
}

// ---------------------------------------------------------------------------
// jitter

int cmd_jitter(const CommonOptions& o, bool sweep, std::optional<std::string> kind,
               std::optional<double> ratio, std::ostream& out, std::ostream& err) {
  ToolConfig cfg = resolve_config(o);
  if (o.manifest.empty()) throw ConfigError("--manifest is required");
  SweepSpec spec;
  if (sweep) {
    if (kind || ratio) throw ConfigError("--sweep cannot be combined with --kind/--ratio");
    spec = cfg.sweep;
  } else {
    if (!kind || !ratio) throw ConfigError("either --sweep or both --kind and --ratio are required");
    try {
      spec.kinds = {parse_jitter_kind(*kind)};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (!(*ratio >= -1.0 && *ratio <= 1.0)) throw ConfigError("--ratio must be in [-1, 1]");
    spec.ratios = {*ratio};
    cfg.sweep = spec;
  }
  const fs::path out_dir = require_out(o);
  const DatasetManifest input = load_manifest(o.manifest);
  const int threads = resolved_threads(o.threads);
  fs::create_directories(out_dir);
  log_config(cfg, out_dir, threads, err);

  const SweepManifest result = generate_sweep(input, spec, out_dir, threads, o.manifest);
  int incomplete = 0;
  for (const auto& e : result.entries) {
    if (!e.complete) {
      ++incomplete;
      for (const auto& msg : e.errors) fmt::print(err, "{}: {}\n", e.name, msg);
    }
  }
  fmt::print(out, "wrote {} datasets to {}\n", result.entries.size(), out_dir.string());
  return incomplete == 0 ? kOk : kIo;
}

// ---------------------------------------------------------------------------
// eval

std::string fmt_metric(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v) : std::string("undefined");
}

std::string metrics_row(const MetricsReport& r) {
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.id, fmt_metric(r.auc),
                     fmt_metric(r.binary.acc), fmt_metric(r.binary.sp), fmt_metric(r.binary.se),
                     fmt_metric(r.binary.f1), r.threshold, r.pixels);
}

constexpr const char* kMetricsHeader = "id\tAUC\tACC\tSP\tSE\tF1\tthreshold\tpixels\n";

std::vector<EvalPair> build_pairs(const DatasetManifest& predictions,
                                  const DatasetManifest& truths) {
  std::vector<std::string> problems;
  for (const auto& p : predictions.entries) {
    const ManifestEntry* t = truths.find(p.id);
    if (t == nullptr) {
      problems.push_back(fmt::format("prediction '{}' has no truth entry", p.id));
    } else if (!t->truth) {
      problems.push_back(fmt::format("truth entry '{}' has no truth path", p.id));
    }
  }
  for (const auto& t : truths.entries) {
    if (predictions.find(t.id) == nullptr) {
      problems.push_back(fmt::format("truth '{}' has no prediction entry", t.id));
    }
  }
  if (!problems.empty()) {
    std::string msg = fmt::format("{} id mismatch(es):", problems.size());
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }
  std::vector<EvalPair> pairs;
  for (const auto& p : predictions.entries) {
    const ManifestEntry& t = *truths.find(p.id);
    EvalPair pair;
    pair.id = p.id;
    pair.prediction = load_probability_map(predictions.resolve(p.image));
    pair.truth = load_binary_mask(truths.resolve(*t.truth)).mask;
    if (t.fov) pair.fov = load_binary_mask(truths.resolve(*t.fov)).mask;
    try {
      validate(pair);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

DatasetReport evaluate_manifests(const DatasetManifest& predictions,
                                 const DatasetManifest& truths, double threshold,
                                 const fs::path& out_dir, std::ostream* out) {
  const auto pairs = build_pairs(predictions, truths);
  const DatasetReport report = evaluate_dataset(pairs, threshold);
  std::string table = kMetricsHeader;
  for (const auto& r : report.per_image) table += metrics_row(r);
  table += metrics_row(report.pooled);
  table += metrics_row(report.mean);
  write_text(out_dir / "metrics.tsv", table);
  std::string roc = "threshold\tfpr\ttpr\n";
  for (const auto& p : report.pooled.roc) {
    roc += fmt::format("{}\t{}\t{}\n", p.threshold, p.fpr, p.tpr);
  }
  write_text(out_dir / "roc.tsv", roc);
  if (out) *out << table;
  return report;
}

int cmd_eval(const CommonOptions& o, const std::string& truth_manifest,
             const std::string& sweep_manifest, std::optional<double> threshold,
             const std::string& aggregation, std::ostream& out, std::ostream& err) {
  ToolConfig cfg = resolve_config(o);
  if (threshold) cfg.threshold = *threshold;
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
    throw ConfigError("--threshold must be in [0,1]");
  }
  if (truth_manifest.empty()) throw ConfigError("--truth is required");
  if (o.manifest.empty() == sweep_manifest.empty()) {
    throw ConfigError("exactly one of --manifest or --sweep is required");
  }
  Aggregation agg = Aggregation::Pooled;
  if (aggregation == "mean") agg = Aggregation::PerImageMean;
  else if (aggregation != "pooled") throw ConfigError("--aggregation must be pooled or mean");

  const fs::path out_dir = require_out(o);
  const DatasetManifest truths = load_manifest(truth_manifest);
  fs::create_directories(out_dir);
  log_config(cfg, out_dir, 1, err);

  if (!o.manifest.empty()) {
    evaluate_manifests(load_manifest(o.manifest), truths, cfg.threshold, out_dir, &out);
    return kOk;
  }

  const SweepManifest sweep = load_sweep_manifest(sweep_manifest);
  std::string curves = "kind\tratio\tdataset\tAUC\tACC\tSP\tSE\tF1\n";
  for (const auto& e : sweep.entries) {
    const DatasetManifest preds = load_manifest(sweep.root / e.manifest);
    const DatasetReport report =
        evaluate_manifests(preds, truths, cfg.threshold, out_dir / e.name, nullptr);
    const MetricsReport& r = report.summary(agg);
    curves += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", to_string(e.kind), e.ratio, e.name,
                          fmt_metric(r.auc), fmt_metric(r.binary.acc), fmt_metric(r.binary.sp),
                          fmt_metric(r.binary.se), fmt_metric(r.binary.f1));
  }
  write_text(out_dir / "curves.tsv", curves);
  out << curves;
  return kOk;
}

// ---------------------------------------------------------------------------
// preview

RgbImage montage(const std::vector<RgbImage>& panels, int columns) {
  const int w = panels.front().width();
  const int h = panels.front().height();
  const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
  RgbImage out(w * columns, h * rows);
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const int ox = static_cast<int>(p % columns) * w;
    const int oy = static_cast<int>(p / columns) * h;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (Channel c : kChannels) out.at(ox + x, oy + y, c) = panels[p].at(x, y, c);
      }
    }
  }
  return out;
}

int cmd_preview(const CommonOptions& o, const std::string& image, int columns, std::ostream& out,
                std::ostream& err) {
  const ToolConfig cfg = resolve_config(o);
  if (columns != 1 && columns != 2 && columns != 4) throw ConfigError("--columns must be 1, 2 or 4");
  const fs::path out_path = require_out(o);
  const RgbImage original = load_image(image);
  fmt::print(err, "vesselaug: seed={} config={}\n", cfg.seed, to_json(cfg).dump());

  // Draws match those of sample 0 of image 0 in `augment`.
  const RngStream rng(cfg.seed);
  const auto& a = cfg.augment;
  RngStream gamma_rng = rng.substream({0, 0, static_cast<std::uint64_t>(Stage::Cwrgc)});
  RngStream vessel_rng = rng.substream({0, 0, static_cast<std::uint64_t>(Stage::Cwrva)});
  const CwrgcParams gamma = sample_cwrgc(gamma_rng, a.cwrgc.range, a.cwrgc.sampling);
  CwrvaParams vessel = sample_cwrva(vessel_rng, a.cwrva.lambda_range, a.cwrva.disturb_range);
  vessel.num_angles = a.cwrva.num_angles;
  vessel.length = a.cwrva.length;
  vessel.source = a.cwrva.source;

  const FloatRgb corrected = cwrgc(normalize(original), gamma);
  const auto bank = build_se_bank(vessel.num_angles, vessel.length);
  const FloatPlane map = vessel_map(corrected, bank, vessel.source);
  const FloatRgb augmented = cwrva(corrected, attention_map(corrected, vessel, bank), vessel.disturb);

  const RgbImage panel = montage({original, to_rgb_image(corrected),
                                  to_rgb_image(replicate(map)), to_rgb_image(augmented)},
                                 columns);
  save_image(panel, out_path);
  fmt::print(out, "wrote {}x{} preview to {}\n", panel.width(), panel.height(), out_path.string());
  return kOk;
}

void add_common(CLI::App* app, CommonOptions& o, bool with_manifest = true) {
  app->add_option("--config", o.config, "JSON config file");
  app->add_option("--seed", o.seed, "Random seed (default 42)");
  app->add_flag("--entropy-seed", o.entropy_seed, "Seed from the system entropy source");
  app->add_option("--threads", o.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--out", o.out, "Output directory or file");
  if (with_manifest) app->add_option("--manifest", o.manifest, "Input dataset manifest");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Retinal fundus augmentation, vessel maps, jitter sweeps and evaluation",
               "vesselaug"};
  app.require_subcommand(1);

  CommonOptions aug_o, top_o, jit_o, eval_o, prev_o;
  std::optional<int> samples, angles, length;
  std::optional<std::string> source, kind;
  std::optional<double> ratio, threshold;
  std::vector<std::string> tophat_files;
  bool sweep_flag = false;
  std::string truth_manifest, eval_sweep, aggregation = "pooled", preview_image;
  int columns = 4;

  auto* augment = app.add_subcommand("augment", "Write augmented samples for a dataset");
  add_common(augment, aug_o);
  augment->add_option("--samples", samples, "Samples per input image")->check(CLI::PositiveNumber);

  auto* tophat = app.add_subcommand("tophat", "Write normalized multi-angle top-hat vessel maps");
  add_common(tophat, top_o);
  tophat->add_option("images", tophat_files, "Input images");
  tophat->add_option("--angles", angles, "Number of structuring element angles");
  tophat->add_option("--length", length, "Structuring element length (odd)");
  tophat->add_option("--source", source, "inverted_green or inverted_gray");

  auto* jitter = app.add_subcommand("jitter", "Brightness/contrast/saturation datasets");
  add_common(jitter, jit_o);
  jitter->add_flag("--sweep", sweep_flag, "Generate every configured (kind, ratio) dataset");
  jitter->add_option("--kind", kind, "brightness, contrast or saturation");
  jitter->add_option("--ratio", ratio, "Jitter ratio in [-1, 1]");

  auto* eval = app.add_subcommand("eval", "Segmentation metrics for probability maps");
  add_common(eval, eval_o);
  eval->add_option("--truth", truth_manifest, "Manifest holding truth/fov paths");
  eval->add_option("--sweep", eval_sweep, "Sweep manifest of prediction datasets");
  eval->add_option("--threshold", threshold, "Binarization threshold (default 0.5)");
  eval->add_option("--aggregation", aggregation, "Curve aggregation: pooled or mean");

  auto* preview = app.add_subcommand("preview", "Side-by-side montage of the augmentation steps");
  add_common(preview, prev_o, false);
  preview->add_option("image", preview_image, "Input image")->required();
  preview->add_option("--columns", columns, "Panels per row: 1, 2 or 4");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (augment->parsed()) return cmd_augment(aug_o, samples, out, err);
    if (tophat->parsed()) {
      return cmd_tophat(top_o, tophat_files, angles, length, source, out, err);
    }
    if (jitter->parsed()) return cmd_jitter(jit_o, sweep_flag, kind, ratio, out, err);
    if (eval->parsed()) {
      return cmd_eval(eval_o, truth_manifest, eval_sweep, threshold, aggregation, out, err);
    }
    if (preview->parsed()) return cmd_preview(prev_o, preview_image, columns, out, err);
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const IoError& e) {
    fmt::print(err, "I/O error: {}\n", e.what());
    return kIo;
  } catch (const fs::filesystem_error& e) {
    fmt::print(err, "I/O error: {}\n", e.what());
    return kIo;
  } catch (const DataError& e) {
    fmt::print(err, "data error: {}\n", e.what());
    return kData;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "data error: {}\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kData;
  }
  return kUsage;
}

}  // namespace vesselaug::cli
