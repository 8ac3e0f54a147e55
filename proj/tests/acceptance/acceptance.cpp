/* Copyright 2026 The fhop Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fhop/agent.hpp"
#include "fhop/detection_metrics.hpp"
#include "fhop/error.hpp"
#include "fhop/eval.hpp"
#include "fhop/oracle.hpp"
#include "fhop/pipeline.hpp"
#include "fhop/rl_core.hpp"
#include "fhop/rng.hpp"
#include "fhop/synth.hpp"
#include "fhop/threshold_select.hpp"
#include "reference.hpp"

namespace fs = std::filesystem;
using namespace fhop;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

Detection box(double x1, double y1, double x2, double y2, const std::string& cls) {
  return Detection{BBox{x1, y1, x2, y2}, cls, 1.0};
}

// Boxes on an integer grid: ties and repeats are common.
DetectionSet grid_set(Rng& rng, std::size_t max_boxes) {
  DetectionSet s;
  const std::size_t n = rng.index(max_boxes + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(rng.index(6)), y = static_cast<double>(rng.index(6));
    const double w = 1.0 + static_cast<double>(rng.index(3)), h = 1.0 + static_cast<double>(rng.index(3));
    s.push_back(box(x, y, x + w, y + h, rng.index(2) ? "car" : "person"));
  }
  return s;
}

// Boxes jittered around three anchors, so most pairs overlap near the threshold.
DetectionSet crowded_set(Rng& rng, std::size_t max_boxes, double jitter) {
  DetectionSet s;
  const std::size_t n = rng.index(max_boxes + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = 20.0 * static_cast<double>(rng.index(3));
    const double x = ax + jitter * rng.uniform(), y = jitter * rng.uniform();
    const double w = 10 + jitter * rng.uniform(), h = 10 + jitter * rng.uniform();
    s.push_back(box(x, y, x + w, y + h, rng.index(4) ? "car" : "person"));
  }
  return s;
}

DetectionLog pooled_log(Rng& rng, std::size_t n, std::size_t pool, std::size_t max_boxes) {
  std::vector<DetectionSet> sets;
  for (std::size_t i = 0; i < pool; ++i) sets.push_back(grid_set(rng, max_boxes));
  std::vector<DetectionSet> frames;
  for (std::size_t t = 0; t < n; ++t) frames.push_back(sets[rng.index(pool)]);
  return DetectionLog(std::move(frames));
}

SkipTrace random_trace(Rng& rng, std::size_t n, std::size_t max_skip) {
  SkipTrace::Builder b(n);
  while (!b.done()) b.process(rng.index(max_skip + 1));
  return std::move(b).build();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------------------

Verdict metric_correctness() {
  Rng rng(101);
  std::size_t sets = 0, logs = 0, bad = 0;
  double worst = 0;
  auto compare = [&](double got, double want) {
    const double d = std::fabs(got - want);
    worst = std::max(worst, d);
    if (d > 1e-12) ++bad;
  };
  for (int it = 0; it < 1000; ++it, ++sets) {
    const DetectionSet a = grid_set(rng, 5), b = grid_set(rng, 5);
    compare(f1_score(a, b, 0.5), reference::f1(a, b, 0.5));
    compare(f1_score(a, b, 0.3), reference::f1(a, b, 0.3));
  }
  for (int it = 0; it < 500; ++it, ++logs) {
    const std::size_t n = 2 + rng.index(20);
    const DetectionLog log = pooled_log(rng, n, 4, 4);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rng.index(n);
      compare(frame_distance(log, i, j), reference::distance(log, i, j, 0.5));
      const std::size_t k = rng.index(n - i);
      compare(skip_error(log, i, k), reference::skip_error(log, i, k, 0.5));
    }
    const SkipTrace t = random_trace(rng, n, 5);
    compare(count_accuracy(log, t), reference::count_accuracy(log, t));
  }
  Verdict o;
  o.pass = bad == 0;
  o.detail = std::to_string(sets) + " set pairs, " + std::to_string(logs) + " logs, " +
             std::to_string(bad) + " mismatches, max |diff| " + fmt("%.1e", worst);
  return o;
}

Verdict matching_soundness() {
  Rng rng(202);
  std::size_t total = 0, agree = 0, distinct = 0, distinct_agree = 0, multi = 0;
  for (int it = 0; it < 2000; ++it) {
    const DetectionSet a = crowded_set(rng, 5, 4.0 + 4.0 * rng.uniform());
    const DetectionSet b = crowded_set(rng, 5, 4.0 + 4.0 * rng.uniform());
    const std::size_t g = match_detections(a, b, 0.5).hits;
    const std::size_t m = reference::max_hits(a, b, 0.5);
    std::set<double> seen;
    bool unique = true;
    for (const Detection& x : a) {
      for (const Detection& y : b) {
        if (x.class_label != y.class_label) continue;
        const double v = reference::iou(x.bbox, y.bbox);
        if (v > 0 && !seen.insert(v).second) unique = false;
      }
    }
    ++total;
    agree += g == m;
    multi += m >= 2;
    if (unique) {
      ++distinct;
      distinct_agree += g == m;
    }
  }
  Verdict o;
  const double rate = static_cast<double>(agree) / static_cast<double>(total);
  o.pass = rate >= 0.98 && distinct_agree == distinct;
  o.detail = std::to_string(agree) + "/" + std::to_string(total) + " agree (" + fmt("%.2f%%", 100 * rate) +
             ", need 98%); distinct-IoU instances " + std::to_string(distinct_agree) + "/" +
             std::to_string(distinct) + " (need all); " + std::to_string(multi) + " with >= 2 matches";
  if (distinct_agree != distinct) {
    o.detail += "; greedy by descending IoU is not a maximum matching, e.g. A~o1 0.9, A~o2 0.6, B~o1 0.7";
  }
  return o;
}

Verdict oracle_exactness() {
  Rng rng(303);
  std::size_t cases = 0, wrong = 0, infeasible = 0;
  for (int it = 0; it < 200; ++it, ++cases) {
    const std::size_t n = 1 + rng.index(12);
    const DetectionLog log = pooled_log(rng, n, 3, 3);
    const int k_max = 1 + static_cast<int>(rng.index(4));
    const double theta = 0.05 + 0.9 * rng.uniform();
    OracleConfig cfg;
    cfg.theta = theta;
    cfg.k_max = k_max;
    const SkipTrace t = oracle_select(log, cfg);
    if (t.processed_count() != reference::exhaustive_min_processed(log, theta, static_cast<std::size_t>(k_max), 0.5)) {
      ++wrong;
    }
    for (const TraceEntry& e : t.entries()) {
      if (e.skip_length > static_cast<std::size_t>(k_max)) ++infeasible;
      for (std::size_t j = 1; j <= e.skip_length; ++j) {
        if (reference::distance(log, e.processed_index, e.processed_index + j, 0.5) > theta) ++infeasible;
      }
    }
  }
  Verdict o;
  o.pass = wrong == 0 && infeasible == 0;
  o.detail = std::to_string(cases) + " logs (N <= 12, k_max <= 4): " + std::to_string(wrong) +
             " size mismatches, " + std::to_string(infeasible) + " infeasible skips";
  return o;
}

// Two states; action a moves to state a.
class TwoState : public Environment {
 public:
  std::size_t reset() override { return s_ = 0; }
  std::size_t state() const override { return s_; }
  bool feasible(std::size_t) const override { return true; }
  fhop::Outcome peek(std::size_t a) override { return {kReward[s_][a], a}; }
  void advance(std::size_t a) override { s_ = a; }
  static constexpr double kReward[2][2] = {{2.0, -1.0}, {4.0, 0.5}};

 private:
  std::size_t s_ = 0;
};

Verdict sarsa_correctness() {
  Rng rng(404);
  double worst_update = 0;
  for (int it = 0; it < 1000; ++it) {
    QTable q(5, 6);
    for (std::size_t s = 0; s < 5; ++s)
      for (std::size_t a = 0; a < 6; ++a) q.at(s, a) = 20 * rng.uniform() - 10;
    const std::size_t s = rng.index(5), a = rng.index(6), s2 = rng.index(5), a2 = rng.index(6);
    const double r = 20 * rng.uniform() - 10, alpha = rng.uniform(), gamma = rng.uniform();
    const double want = q.at(s, a) + alpha * (r + gamma * q.at(s2, a2) - q.at(s, a));
    sarsa_update(q, s, a, r, s2, a2, alpha, gamma);
    worst_update = std::max(worst_update, std::fabs(q.at(s, a) - want));
  }

  // Fixed policy pi(0) = 1, pi(1) = 0. Fixed point with g = gamma:
  //   Q01 = r01 + g Q10, Q10 = r10 + g Q01  => Q01 = (r01 + g r10) / (1 - g^2)
  //   Q00 = r00 + g Q01 (lands in 0), Q11 = r11 + g Q10 (lands in 1)
  const double g = 0.9;
  const auto& R = TwoState::kReward;
  const double q01 = (R[0][1] + g * R[1][0]) / (1 - g * g);
  const double q10 = R[1][0] + g * q01;
  const double want[2][2] = {{R[0][0] + g * q01, q01}, {q10, R[1][1] + g * q10}};
  SarsaOptions opt;
  opt.alpha = 0.5;
  opt.gamma = g;
  opt.exploration = Exploration::kSweep;
  opt.max_steps = 5000;
  SarsaLearner learner(QTable(2, 2), opt);
  TwoState env;
  const Policy pi = [](const QTable&, std::size_t s, Rng&) -> std::size_t { return s == 0 ? 1 : 0; };
  const std::size_t updates = learner.run_episode(env, pi, rng);
  double worst_fixed = 0;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t a = 0; a < 2; ++a) worst_fixed = std::max(worst_fixed, std::fabs(learner.q().at(s, a) - want[s][a]));

  Verdict o;
  o.pass = worst_update <= 1e-12 && worst_fixed <= 1e-6 && updates <= 10000;
  o.detail = "(a) 1000 updates, max |err| " + fmt("%.1e", worst_update) + "; (b) " +
             std::to_string(updates) + " updates, max |Q - Q*| " + fmt("%.1e", worst_fixed);
  return o;
}

struct PresetRun {
  SkipTrace trace;
  EvalReport report;
  SkipTrace oracle;
};

// Train on the first half, run and evaluate on the second.
PresetRun run_preset(const Scene& scene, double theta, std::uint64_t seed) {
  const Split sp = split(scene.frames.size(), 0.5, 30);
  const std::span<const Frame> all(scene.frames);
  const DetectionLog train_log = scene.log.slice(sp.train.begin, sp.train.end);
  const DetectionLog test_log = scene.log.slice(sp.test.begin, sp.test.end);
  StateConfig sc;
  RLConfig rc;
  rc.theta = theta;
  rc.k_max = 30;
  rc.epochs = 20;
  const AgentArtifact agent =
      train_agent(all.subspan(sp.train.begin, sp.train.size()), train_log, sc, rc, seed);
  std::vector<Frame> test_frames;
  for (std::size_t t = sp.test.begin; t < sp.test.end; ++t) test_frames.push_back(scene.frames[t].with_index(t - sp.test.begin));
  PresetRun r{run_agent(test_frames, agent), {}, {}};
  r.report = evaluate(r.trace, test_log, kDefaultIouThreshold, theta);
  r.oracle = oracle_select(test_log, OracleConfig{theta, 30, kDefaultIouThreshold});
  return r;
}

Verdict policy_sanity() {
  const std::uint64_t seed = 7;
  const PresetRun st = run_preset(generate_scene(preset("static", 1200, seed)), 0.2, seed);
  const PresetRun fa = run_preset(generate_scene(preset("drift-fast", 1200, seed)), 0.2, seed);
  const PresetRun sb = run_preset(generate_scene(preset("strobe", 1200, seed)), 0.2, seed);
  const std::size_t n = st.trace.total_frames();
  const std::size_t static_cap = (n + 30) / 31 + 2;
  const bool ok_static = st.trace.processed_count() <= static_cap && st.report.achieved_f1 == 1.0;
  const bool ok_fast = static_cast<double>(fa.trace.processed_count()) >= 0.95 * static_cast<double>(fa.trace.total_frames());
  const bool ok_strobe = sb.trace.processed_count() == sb.trace.total_frames();
  Verdict o;
  o.pass = ok_static && ok_fast && ok_strobe;
  o.detail = "static " + std::to_string(st.trace.processed_count()) + "/" + std::to_string(n) +
             " (cap " + std::to_string(static_cap) + ", achieved_f1 " + fmt("%.4f", st.report.achieved_f1) +
             "); drift-fast " + std::to_string(fa.trace.processed_count()) + "/" +
             std::to_string(fa.trace.total_frames()) + "; strobe " + std::to_string(sb.trace.processed_count()) +
             "/" + std::to_string(sb.trace.total_frames());
  return o;
}

Verdict target_tracking() {
  const Scene scene = generate_scene(preset("burst", 1200, 11));
  const std::vector<double> targets{0.7, 0.8, 0.9};
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  Verdict o;
  double prev_fraction = -1;
  for (const double target : targets) {
    std::vector<double> f1s, fractions;
    for (const std::uint64_t s : seeds) {
      const PresetRun r = run_preset(scene, 1.0 - target, s);
      f1s.push_back(r.report.achieved_f1);
      fractions.push_back(r.report.fraction_processed);
    }
    const double mf1 = median(f1s), mfr = median(fractions);
    if (mf1 < target - 0.05) o.pass = false;
    if (mfr < prev_fraction) o.pass = false;
    prev_fraction = mfr;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%starget %.1f: f1 %.4f, processed %.4f", o.detail.empty() ? "" : "; ",
                  target, mf1, mfr);
    o.detail += buf;
  }
  o.detail += " (medians over 5 seeds)";
  return o;
}

Verdict oracle_dominance() {
  Verdict o;
  std::size_t runs = 0, feasible = 0, violations = 0;
  for (const std::string& name : preset_names()) {
    const Scene scene = generate_scene(preset(name, 1200, 3));
    for (const double target : {0.7, 0.8, 0.9}) {
      const PresetRun r = run_preset(scene, 1.0 - target, 3);
      ++runs;
      if (!*r.report.feasible) continue;
      ++feasible;
      if (r.oracle.processed_count() > r.trace.processed_count()) {
        ++violations;
        o.detail += " [" + name + " " + fmt("%.1f", target) + "]";
      }
    }
  }
  o.pass = violations == 0;
  o.detail = std::to_string(runs) + " preset/target runs, " + std::to_string(feasible) +
             " feasible agent traces, " + std::to_string(violations) + " where the oracle processed more" +
             o.detail;
  return o;
}

Verdict threshold_sweep() {
  Rng rng(505);
  const std::vector<double> grid = default_theta_grid();
  bool grid_ok = grid.size() == 9;
  for (std::size_t i = 0; i < grid.size(); ++i) grid_ok = grid_ok && std::fabs(grid[i] - (0.10 + 0.05 * static_cast<double>(i))) < 1e-12;
  std::size_t wrong = 0, logs = 0;
  for (int it = 0; it < 100; ++it, ++logs) {
    const DetectionLog log = pooled_log(rng, 40 + rng.index(60), 4, 4);
    const SweepResult r = sweep_theta_oracle(log, grid, 8);
    // Recompute every point independently and take the first minimum.
    std::size_t best = 0;
    double best_obj = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      OracleConfig oc;
      oc.theta = grid[i];
      oc.k_max = 8;
      const SkipTrace t = oracle_select(log, oc);
      double err = 0;
      for (const TraceEntry& e : t.entries()) err += reference::skip_error(log, e.processed_index, e.skip_length, 0.5);
      const double skipped = static_cast<double>(log.size() - t.processed_count());
      const double e_theta = skipped == 0 ? 0.0 : err / skipped;
      const double p = static_cast<double>(t.processed_count()) / static_cast<double>(log.size());
      const double obj = e_theta * e_theta + p * p;
      if (std::fabs(r.points[i].objective - obj) > 1e-12) ++wrong;
      if (i == 0 || obj < best_obj) {
        best = i;
        best_obj = obj;
      }
    }
    if (r.best_theta != grid[best]) ++wrong;
  }
  const Scene still = generate_scene(preset("static", 600, 1));
  const SweepResult sr = sweep_theta_oracle(still.log, grid, 30);
  Verdict o;
  o.pass = grid_ok && wrong == 0 && sr.best_theta == grid.front();
  o.detail = std::to_string(logs) + " random logs, " + std::to_string(wrong) + " disagreements; static preset best " +
             fmt("%.2f", sr.best_theta);
  return o;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = buf.str();
  }
  return files;
}

void session(const fs::path& dir) {
  RunConfig cfg = parse_run_config(R"({"synth": {"preset": "burst", "n_frames": 600}, "seed": 21})");
  run_pipeline("synth", cfg, dir / "scene");
  cfg.frames = (dir / "scene" / "frames").string();
  cfg.log = (dir / "scene" / "detections.jsonl").string();
  run_pipeline("train", cfg, dir / "out");
  cfg.agent = (dir / "out" / "agent.fhop").string();
  run_pipeline("run", cfg, dir / "out");
  cfg.trace = (dir / "out" / "trace_agent.csv").string();
  run_pipeline("eval", cfg, dir / "out");
  run_pipeline("report", cfg, dir / "out");
}

Verdict determinism() {
  const fs::path base = fs::temp_directory_path() / ("fhop_accept_" + std::to_string(getpid()));
  fs::remove_all(base);
  session(base / "a");
  session(base / "b");
  const auto a = read_tree(base / "a"), b = read_tree(base / "b");
  std::size_t differing = 0;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != bytes) ++differing;
  }
  fs::remove_all(base);
  Verdict o;
  o.pass = a.size() == b.size() && differing == 0 && a.count("out/report.csv") && a.count("out/agent.fhop");
  o.detail = std::to_string(a.size()) + " files per run, " + std::to_string(differing) + " differ";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no limit
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "metric correctness", 10, metric_correctness},
      {2, "matching soundness", 30, matching_soundness},
      {3, "oracle exactness", 60, oracle_exactness},
      {4, "sarsa correctness", 0, sarsa_correctness},
      {5, "policy sanity on presets", 120, policy_sanity},
      {6, "target tracking", 300, target_tracking},
      {7, "oracle dominance", 0, oracle_dominance},
      {8, "threshold sweep", 60, threshold_sweep},
      {9, "determinism", 0, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.limit_s) + " s limit";
    }
    failures += !o.pass;
    std::printf("%s  %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
