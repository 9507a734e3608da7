#include "vesselaug/sweep.hpp"

#include "vesselaug/errors.hpp"
#include "vesselaug/io.hpp"
#include "vesselaug/parallel.hpp"

#include <fmt/format.h>

#include <mutex>

namespace vesselaug {

namespace {

fs::path with_id(const fs::path& dir, const std::string& id, const fs::path& original) {
  const auto ext = original.extension().empty() ? fs::path(".png") : original.extension();
  return dir / fs::path(id).concat(ext.string());
}

}  // namespace

SweepManifest generate_sweep(const DatasetManifest& source, const SweepSpec& spec,
                             const fs::path& out_root, int threads,
                             const std::string& source_label) {
  check_ids(source);
  for (double r : spec.ratios) {
    if (!(r >= -1.0 && r <= 1.0)) {
      throw std::invalid_argument(fmt::format("sweep ratio {} outside [-1, 1]", r));
    }
  }

  SweepManifest sweep;
  sweep.root = out_root;
  sweep.source = source_label;
  std::vector<DatasetManifest> outputs;
  for (JitterKind kind : spec.kinds) {
    for (double ratio : spec.ratios) {
      SweepEntry e;
      e.kind = kind;
      e.ratio = ratio;
      e.name = sweep_dataset_name(kind, ratio);
      e.manifest = fs::path(e.name) / "manifest.jsonl";
      sweep.entries.push_back(std::move(e));
      outputs.push_back(DatasetManifest{out_root / sweep.entries.back().name, {}});
    }
  }

  // Each input image is loaded once and fanned out to every dataset.
  const std::size_t n_images = source.entries.size();
  std::vector<std::vector<std::string>> errors(sweep.entries.size());
  std::mutex errors_mu;
  parallel_for(n_images, threads, [&](std::size_t i) {
    const ManifestEntry& in = source.entries[i];
    std::optional<RgbImage> img;
    std::string load_error;
    try {
      img = load_image(source.resolve(in.image));
    } catch (const std::exception& ex) {
      load_error = ex.what();
    }
    for (std::size_t d = 0; d < sweep.entries.size(); ++d) {
      const SweepEntry& se = sweep.entries[d];
      const fs::path dir = out_root / se.name;
      try {
        if (!img) throw IoError(load_error);
        const RgbImage out = apply_jitter(*img, JitterParams{se.kind, se.ratio});
        save_image_or_copy(out, *img, source.resolve(in.image),
                           dir / "images" / fs::path(in.id + ".png"));
        if (in.truth) {
          copy_file_atomic(source.resolve(*in.truth), with_id(dir / "truth", in.id, *in.truth));
        }
        if (in.fov) {
          copy_file_atomic(source.resolve(*in.fov), with_id(dir / "fov", in.id, *in.fov));
        }
      } catch (const std::exception& ex) {
        std::lock_guard lock(errors_mu);
        errors[d].push_back(fmt::format("{}: {}", in.id, ex.what()));
      }
    }
  });

  for (std::size_t d = 0; d < sweep.entries.size(); ++d) {
    SweepEntry& se = sweep.entries[d];
    DatasetManifest& m = outputs[d];
    for (const auto& in : source.entries) {
      ManifestEntry e;
      e.id = in.id;
      e.image = fs::path("images") / (in.id + ".png");
      if (in.truth) e.truth = with_id("truth", in.id, *in.truth);
      if (in.fov) e.fov = with_id("fov", in.id, *in.fov);
      m.entries.push_back(std::move(e));
    }
    // Worker completion order is arbitrary; sort for byte-stable manifests.
    std::sort(errors[d].begin(), errors[d].end());
    se.errors = std::move(errors[d]);
    se.complete = se.errors.empty();
    save_manifest(m, out_root / se.manifest);
  }
  save_sweep_manifest(sweep, out_root / "sweep.jsonl");
  return sweep;
}

}  // namespace vesselaug
