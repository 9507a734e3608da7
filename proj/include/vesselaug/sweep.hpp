#pragma once

#include "vesselaug/jitter.hpp"
#include "vesselaug/manifest.hpp"

#include <filesystem>

namespace vesselaug {

/// Writes one jittered copy of `source` per (kind, ratio) under
/// out_root/<kind>_<ratio>/ (images/, truth/, fov/, manifest.jsonl) and a
/// sweep manifest at out_root/sweep.jsonl. Ground truth and FOV files are
/// copied verbatim. Per-image failures are recorded on the entry, which is
/// then marked incomplete; the remaining datasets are still produced.
SweepManifest generate_sweep(const DatasetManifest& source, const SweepSpec& spec,
                             const fs::path& out_root, int threads = 1,
                             const std::string& source_label = {});

}  // namespace vesselaug
