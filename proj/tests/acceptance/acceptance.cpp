// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "cli.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "vesselaug/augment.hpp"
#include "vesselaug/io.hpp"
#include "vesselaug/jitter.hpp"
#include "vesselaug/manifest.hpp"
#include "vesselaug/metrics.hpp"
#include "vesselaug/morphology.hpp"
#include "vesselaug/sweep.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace vesselaug;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool bit_equal(const FloatPlane& a, const FloatPlane& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a == b).all();
}

bool in_unit(const FloatRgb& img) {
  for (const auto& ch : img.channels) {
    if (!ch.allFinite() || (ch < 0.0).any() || (ch > 1.0).any()) return false;
  }
  return true;
}

int cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "vesselaug");
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

// 1 -------------------------------------------------------------------------
Outcome morphology_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(101);
  long mismatches = 0;
  long checks = 0;
  for (int img = 0; img < 100; ++img) {
    const int h = 1 + static_cast<int>(g() % 32);
    const int w = 1 + static_cast<int>(g() % 32);
    const FloatPlane p = fixtures::random_plane(g, h, w, img % 3 == 0 ? 6 : 0);
    for (int length : {3, 5, 7}) {
      for (int n : {1, 2, 4, 12}) {
        const auto bank = build_se_bank(n, length);
        FloatPlane sum = FloatPlane::Zero(h, w);
        for (const auto& se : bank.elements) {
          const FloatPlane th = oracle::naive_top_hat(p, se.offsets);
          sum += th;
          mismatches += !bit_equal(erode(p, se), oracle::naive_erode(p, se.offsets));
          mismatches += !bit_equal(dilate(p, se), oracle::naive_dilate(p, se.offsets));
          mismatches += !bit_equal(open(p, se), oracle::naive_open(p, se.offsets));
          mismatches += !bit_equal(top_hat(p, se), th);
          checks += 4;
        }
        mismatches += !bit_equal(top_hat_sum(p, bank), sum);
        ++checks;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0,
          fmt::format("{} mismatches in {} comparisons, {:.2f} s", mismatches, checks, secs)};
}

// 2 -------------------------------------------------------------------------
Outcome top_hat_contract() {
  std::mt19937_64 g(202);
  long negative = 0;
  long not_idempotent = 0;
  for (int t = 0; t < 1000; ++t) {
    const int h = 1 + static_cast<int>(g() % 40);
    const int w = 1 + static_cast<int>(g() % 40);
    const int length = 3 + 2 * static_cast<int>(g() % 7);
    const auto se = make_line_element(fixtures::unit(g) * std::numbers::pi, length);
    const FloatPlane p = fixtures::random_plane(g, h, w, t % 2 ? 5 : 0);
    const FloatPlane o = open(p, se);
    negative += ((p - o) < 0.0).count();
    not_idempotent += (open(o, se) != o).count();
  }
  return {negative == 0 && not_idempotent == 0,
          fmt::format("{} negative top-hat samples, {} idempotence violations over 1000 planes",
                      negative, not_idempotent)};
}

// 3 -------------------------------------------------------------------------
Outcome auc_exactness() {
  std::mt19937_64 g(303);
  double worst = 0.0;
  double min_tie_fraction = 1.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<ScoredLabel> s(10000);
    const int levels = 20 + static_cast<int>(g() % 200);
    for (auto& x : s) {
      x.score = fixtures::unit(g) < 0.4 ? static_cast<double>(g() % levels) / (levels - 1)
                                        : fixtures::unit(g);
      x.positive = fixtures::unit(g) < 0.3;
    }
    std::map<double, int> counts;
    for (const auto& x : s) ++counts[x.score];
    long tied = 0;
    for (const auto& x : s) tied += counts[x.score] > 1;
    min_tie_fraction = std::min(min_tie_fraction, static_cast<double>(tied) / s.size());
    worst = std::max(worst, std::abs(roc_auc(s).auc - oracle::pairwise_auc(s)));
  }
  std::vector<ScoredLabel> flat(10000);
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = {0.37, i % 3 == 0};
  const double constant = roc_auc(flat).auc;
  return {worst <= 1e-12 && min_tie_fraction >= 0.3 && constant == 0.5,
          fmt::format("max |AUC - oracle| = {:.3g}, min tie fraction {:.2f}, constant AUC {}",
                      worst, min_tie_fraction, constant)};
}

// 4 -------------------------------------------------------------------------
Outcome metric_fixture() {
  EvalPair p;
  p.prediction.resize(1, 4);
  p.prediction << 0.9, 0.4, 0.35, 0.8;
  p.truth.resize(1, 4);
  p.truth << 1, 0, 1, 0;
  const MetricsReport r = evaluate_pair(p, 0.5);
  const bool ok = r.auc && *r.auc == 0.5 && r.binary.acc && *r.binary.acc == 0.5 && r.binary.sp &&
                  *r.binary.sp == 0.5 && r.binary.se && *r.binary.se == 0.5 && r.binary.f1 &&
                  *r.binary.f1 == 0.5;
  return {ok, fmt::format("AUC={} ACC={} SP={} SE={} F1={}", r.auc.value_or(-1),
                          r.binary.acc.value_or(-1), r.binary.sp.value_or(-1),
                          r.binary.se.value_or(-1), r.binary.f1.value_or(-1))};
}

// 5 -------------------------------------------------------------------------
Outcome identity_endpoints() {
  const fixtures::Fundus f = fixtures::synthetic_fundus(7, 565, 584);
  const RgbImage& img = f.image;
  const FloatRgb x = normalize(img);
  std::vector<std::string> failed;
  auto check = [&](const std::string& name, const RgbImage& out) {
    if (!(out == img)) failed.push_back(name);
  };
  check("gamma=(1,1,1)", to_rgb_image(cwrgc(x, CwrgcParams{{1.0, 1.0, 1.0}})));
  CwrvaParams vessel;
  vessel.lambda = {0.0, 0.0, 0.0};
  vessel.disturb = 0.8;
  check("lambda=(0,0,0)", to_rgb_image(cwrva(x, attention_map(x, vessel), vessel.disturb)));
  for (JitterKind k : kJitterKinds) {
    check(fmt::format("{}=0", to_string(k)), apply_jitter(img, JitterParams{k, 0.0}));
  }
  RngStream rng(5);
  check("sigma=0", to_rgb_image(rgn(x, rng, 0.0)));
  const auto disabled =
      apply_pipeline(img, {f.truth, f.fov}, AugmentationConfig::none(), RngStream(42), 0);
  check("disabled pipeline", disabled.front().image);
  const bool masks_ok = (disabled.front().masks[0] == f.truth).all() &&
                        (disabled.front().masks[1] == f.fov).all();
  if (!masks_ok) failed.push_back("disabled pipeline masks");

  std::string detail = "synthetic 565x584 fundus; 8 endpoints";
  for (const auto& s : failed) detail += "; differs: " + s;
  return {failed.empty(), detail};
}

// 6 -------------------------------------------------------------------------
Outcome range_safety() {
  std::mt19937_64 g(606);
  const RngStream root(606);
  long bad_float = 0;
  long bad_mask = 0;
  constexpr int kRuns = 100000;
  for (int t = 0; t < kRuns; ++t) {
    const int w = 2 + static_cast<int>(g() % 9);
    const int h = 2 + static_cast<int>(g() % 9);
    RgbImage img = fixtures::random_image(g, w, h);
    if (t % 4 == 0) img.at(0, 0, Channel::G) = 0;
    if (t % 4 == 1) img.at(w - 1, h - 1, Channel::R) = 255;
    RngStream rng = root.substream({static_cast<std::uint64_t>(t)});

    AugmentationConfig c;
    c.flips.enabled = rng.bernoulli(0.5);
    c.rgn.enabled = rng.bernoulli(0.5);
    c.rgn.sigma = rng.uniform(0.0, 0.5);
    c.svgc.enabled = rng.bernoulli(0.5);
    c.cwrgc.enabled = rng.bernoulli(0.8);
    c.cwrgc.sampling = rng.bernoulli(0.5) ? Sampling::Uniform : Sampling::LogUniform;
    c.cwrva.enabled = rng.bernoulli(0.8);
    c.cwrva.num_angles = 1 + static_cast<int>(rng.next_u64() % 12);
    c.cwrva.length = 3 + 2 * static_cast<int>(rng.next_u64() % 4);
    c.cwrva.source = rng.bernoulli(0.5) ? SourcePlane::InvertedGray : SourcePlane::InvertedGreen;

    // Float path, checked before quantization.
    FloatRgb x = normalize(img);
    if (c.rgn.enabled) x = rgn(x, rng, c.rgn.sigma);
    bad_float += !in_unit(x);
    if (c.svgc.enabled) x = svgc(x, rng);
    bad_float += !in_unit(x);
    if (c.cwrgc.enabled) x = cwrgc(x, sample_cwrgc(rng, c.cwrgc.range, c.cwrgc.sampling));
    bad_float += !in_unit(x);
    if (c.cwrva.enabled) {
      CwrvaParams v = sample_cwrva(rng);
      v.num_angles = c.cwrva.num_angles;
      v.length = c.cwrva.length;
      v.source = c.cwrva.source;
      x = cwrva(x, attention_map(x, v), v.disturb);
    }
    bad_float += !in_unit(x);
    const JitterKind kind = kJitterKinds[rng.next_u64() % 3];
    bad_float += !in_unit(apply_jitter(x, JitterParams{kind, rng.uniform(-1.0, 1.0)}));

    // Full pipeline on a tenth of the runs, including mask handling.
    if (t % 10 == 0) {
      BinaryPlane mask(h, w);
      for (long i = 0; i < mask.size(); ++i) mask.data()[i] = g() & 1;
      const auto out = apply_pipeline(img, {mask}, c, root, static_cast<std::uint64_t>(t));
      const auto& m = out.front().masks.front();
      bad_mask += m.rows() != h || m.cols() != w || (m > 1).any() || m.count() != mask.count();
    }
  }
  return {bad_float == 0 && bad_mask == 0,
          fmt::format("{} runs; {} float stages out of [0,1] or non-finite; {} malformed masks",
                      kRuns, bad_float, bad_mask)};
}

// 7 -------------------------------------------------------------------------
Outcome sweep_construction() {
  fixtures::TempDir dir("accept-sweep");
  const auto manifest = fixtures::write_toy_dataset(dir / "src", 3);
  const DatasetManifest src = load_manifest(manifest);
  std::vector<std::string> problems;

  if (cli_run({"jitter", "--manifest", manifest.string(), "--sweep", "--out",
               (dir / "sweep").string()}) != 0) {
    return {false, "jitter --sweep failed"};
  }
  std::set<std::string> expected;
  for (const char* kind : {"brightness", "contrast", "saturation"}) {
    for (const char* r : {"-0.5", "-0.4", "-0.3", "-0.2", "-0.1", "0.1", "0.2", "0.3", "0.4", "0.5"}) {
      expected.insert(fmt::format("{}_{}", kind, r));
    }
  }
  const SweepManifest sweep = load_sweep_manifest(dir / "sweep" / "sweep.jsonl");
  std::set<std::string> names;
  for (const auto& e : sweep.entries) {
    names.insert(e.name);
    if (!e.complete) problems.push_back(e.name + " incomplete");
    if (!fs::is_directory(dir / "sweep" / e.name / "images")) problems.push_back(e.name + " missing");
    for (const auto& in : src.entries) {
      for (const char* sub : {"truth", "fov"}) {
        const auto rel = fs::path(sub) / (in.id + ".png");
        if (fixtures::read_bytes(dir / "sweep" / e.name / rel) !=
            fixtures::read_bytes(dir / "src" / rel)) {
          problems.push_back(fmt::format("{}/{} differs", e.name, rel.generic_string()));
        }
      }
    }
  }
  if (sweep.entries.size() != 30 || names != expected) problems.push_back("dataset names");

  int copies = 0;
  for (const char* kind : {"brightness", "contrast", "saturation"}) {
    const fs::path out = dir / (std::string("zero_") + kind);
    if (cli_run({"jitter", "--manifest", manifest.string(), "--kind", kind, "--ratio", "0",
                 "--out", out.string()}) != 0) {
      problems.push_back(std::string(kind) + " ratio 0 failed");
      continue;
    }
    const fs::path ds = out / (std::string(kind) + "_0");
    for (const auto& in : src.entries) {
      for (const char* sub : {"images", "truth", "fov"}) {
        const auto rel = fs::path(sub) / (in.id + ".png");
        if (fixtures::read_bytes(ds / rel) == fixtures::read_bytes(dir / "src" / rel)) {
          ++copies;
        } else {
          problems.push_back(fmt::format("{}/{} not a copy", kind, rel.generic_string()));
        }
      }
    }
  }
  std::string detail = fmt::format("{} datasets, {} distinct names, {} ratio-0 byte copies",
                                   sweep.entries.size(), names.size(), copies);
  for (std::size_t i = 0; i < std::min<std::size_t>(problems.size(), 5); ++i) {
    detail += "; " + problems[i];
  }
  return {problems.empty(), detail};
}

// 8 -------------------------------------------------------------------------
Outcome determinism() {
  fixtures::TempDir dir("accept-det");
  const auto manifest = fixtures::write_toy_dataset(dir / "src", 6, 64, 56);
  auto go = [&](const std::string& name, const std::string& threads) {
    return cli_run({"augment", "--manifest", manifest.string(), "--seed", "42", "--samples", "3",
                    "--threads", threads, "--out", (dir / name).string()});
  };
  if (go("a", "1") || go("b", "1") || go("c", "8")) return {false, "augment failed"};
  const auto a = fixtures::snapshot_tree(dir / "a");
  const bool twice = a == fixtures::snapshot_tree(dir / "b");
  const bool threads = a == fixtures::snapshot_tree(dir / "c");
  return {twice && threads && a.size() > 18,
          fmt::format("{} files; repeat run identical: {}; 1 vs 8 threads identical: {}", a.size(),
                      twice, threads)};
}

// 9 -------------------------------------------------------------------------
Outcome mask_correspondence() {
  std::mt19937_64 g(909);
  long geometric_mismatch = 0;
  long photometric_touched = 0;
  long flips_seen = 0;
  for (int t = 0; t < 1000; ++t) {
    const int w = 5 + static_cast<int>(g() % 20);
    const int h = 5 + static_cast<int>(g() % 20);
    const int mx = static_cast<int>(g() % w);
    const int my = static_cast<int>(g() % h);
    RgbImage img = fixtures::uniform_image(w, h, 10, 10, 10);
    for (Channel c : kChannels) img.at(mx, my, c) = 250;
    BinaryPlane mask = BinaryPlane::Zero(h, w);
    mask(my, mx) = 1;
    const RngStream rng(static_cast<std::uint64_t>(t) * 7919 + 1);

    AugmentationConfig full;
    full.rgn.enabled = true;
    full.svgc.enabled = true;
    full.cwrva.num_angles = 4;
    full.cwrva.length = 5;
    AugmentationConfig geometric = AugmentationConfig::none();
    geometric.flips = full.flips;
    AugmentationConfig photometric = full;
    photometric.flips.enabled = false;

    const auto a = apply_pipeline(img, {mask}, full, rng, 0).front();
    const auto b = apply_pipeline(img, {mask}, geometric, rng, 0).front();
    const auto c = apply_pipeline(img, {mask}, photometric, rng, 0).front();

    // Independent prediction of where the mark lands.
    const int ex = a.params.flips.horizontal ? w - 1 - mx : mx;
    const int ey = a.params.flips.vertical ? h - 1 - my : my;
    flips_seen += a.params.flips.horizontal || a.params.flips.vertical;
    const auto& bm = b.masks.front();
    const bool geo_ok = bm(ey, ex) == 1 && bm.count() == 1 &&
                        b.image.at(ex, ey, Channel::G) == 250 &&
                        (a.masks.front() == bm).all();
    geometric_mismatch += !geo_ok;
    photometric_touched += !(c.masks.front() == mask).all();
  }
  return {geometric_mismatch == 0 && photometric_touched == 0 && flips_seen > 0,
          fmt::format("1000 draws ({} flipped); {} image/mask disagreements; {} masks altered by "
                      "photometric stages",
                      flips_seen, geometric_mismatch, photometric_touched)};
}

// 10 ------------------------------------------------------------------------
Outcome performance() {
  const fixtures::Fundus f = fixtures::synthetic_fundus(11, 640, 640);
  AugmentationConfig c;
  c.flips.enabled = false;
  c.cwrva.num_angles = 12;
  c.cwrva.length = 15;
  const auto t0 = Clock::now();
  const auto out = apply_pipeline(f.image, {f.truth}, c, RngStream(42), 0);
  const double secs = seconds_since(t0);
  return {secs < 2.0 && out.size() == 1,
          fmt::format("640x640, 12 angles, length 15: {:.3f} s single-threaded", secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"morphology oracle equivalence", morphology_oracle},
      {"top-hat contract", top_hat_contract},
      {"AUC exactness", auc_exactness},
      {"metric fixture", metric_fixture},
      {"identity endpoints", identity_endpoints},
      {"range safety", range_safety},
      {"sweep construction", sweep_construction},
      {"determinism", determinism},
      {"mask correspondence", mask_correspondence},
      {"performance sanity", performance},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failures += !o.pass;
    fmt::print("{} criterion {}: {} ({})\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
               o.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
