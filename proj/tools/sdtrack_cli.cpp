/* Copyright 2026 The sdtrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <fmt/format.h>
#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sdtrack/config.hpp"
#include "sdtrack/metrics.hpp"
#include "sdtrack/pipeline.hpp"
#include "sdtrack/store.hpp"
#include "sdtrack/synth.hpp"
#include "sdtrack/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sdtrack;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string dropout;
  std::string combiner;
  int jobs = 0;

  Config resolve() const {
    Config c = config_path.empty() ? Config{} : load_config(config_path);
    if (seed) c.seed = *seed;
    if (!dropout.empty()) c.dropout.kind = parse_mask_kind(dropout);
    if (!combiner.empty()) c.combiner = parse_combiner(combiner);
    return c;
  }
};

std::vector<std::string> provenance(const Config& c) {
  return {"config: " + config_echo(c), fmt::format("seed: {}", c.seed)};
}

Model load_or_throw(const Config& c, const std::string& path) {
  Model m(c.resolved_backbone());
  load_model(path, m);
  return m;
}

bool is_sequence_dir(const fs::path& p) { return fs::exists(p / "groundtruth_rect.txt"); }

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string profile = "easy";
  std::size_t count = 20;
  std::string out;
};

int run_synth(const Common& common, const SynthArgs& a) {
  const Config c = common.resolve();
  const Profile profile = parse_profile(a.profile);
  const auto suite = make_benchmark(profile, a.count, c.seed, common.jobs);
  json meta = {{"format", "sdtrack-suite-1"},
               {"profile", std::string(to_string(profile))},
               {"count", a.count},
               {"seed", c.seed},
               {"config", to_json(c)}};
  save_suite(a.out, suite, meta.dump());
  std::size_t heavy = 0, frames = 0;
  for (const auto& s : suite) {
    frames += s.size();
    for (double f : s.occ_fraction) heavy += f > kHeavyThreshold;
  }
  fmt::print("wrote {} sequences ({} frames, {:.1f}% with occlusion > {}) to {}\n", suite.size(), frames,
             100.0 * static_cast<double>(heavy) / static_cast<double>(frames), kHeavyThreshold, a.out);
  return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string out;
  bool resume = false;
};

json records_json(const std::vector<LossRecord>& records) {
  json out = json::array();
  for (const auto& r : records) {
    json j = {{"stage", std::string(to_string(r.stage))}, {"epoch", r.epoch}, {"mean_loss", r.mean_loss}};
    j["val_auc"] = r.val_auc ? json(*r.val_auc) : json(nullptr);
    out.push_back(j);
  }
  return out;
}

std::vector<LossRecord> records_from_json(const json& j) {
  std::vector<LossRecord> out;
  for (const auto& r : j) {
    LossRecord rec;
    rec.stage = parse_stage(r.at("stage").get<std::string>());
    rec.epoch = r.at("epoch").get<std::size_t>();
    rec.mean_loss = r.at("mean_loss").get<double>();
    if (!r.at("val_auc").is_null()) rec.val_auc = r.at("val_auc").get<double>();
    out.push_back(rec);
  }
  return out;
}

void save_checkpoint(const fs::path& path, const Model& model, const TrainCheckpoint& cp, const Config& c) {
  auto tensors = state_dict(model);
  for (std::size_t i = 0; i < cp.velocity.size(); ++i) {
    tensors.push_back({fmt::format("velocity.{}", i), {cp.velocity[i].size()}, cp.velocity[i]});
  }
  json meta = {{"format", "sdtrack-checkpoint-1"},
               {"config", to_json(c)},
               {"seed", c.seed},
               {"stage", std::string(to_string(cp.stage))},
               {"epochs_done", cp.epochs_done},
               {"velocities", cp.velocity.size()},
               {"records", records_json(cp.records)}};
  save_weights(path, {meta.dump(), tensors});
}

TrainCheckpoint load_checkpoint(const fs::path& path, Model& model) {
  WeightsFile f = load_weights(path);
  const json meta = json::parse(f.meta);
  std::vector<NamedTensor> state;
  std::vector<std::vector<float>> velocity(meta.at("velocities").get<std::size_t>());
  for (auto& t : f.tensors) {
    if (t.name.rfind("velocity.", 0) == 0) {
      const auto idx = std::stoul(t.name.substr(9));
      if (idx >= velocity.size()) throw StoreError(path.string() + ": stray velocity tensor " + t.name);
      velocity[idx] = std::move(t.values);
    } else {
      state.push_back(std::move(t));
    }
  }
  Model fresh(model.backbone.config());
  load_state_dict(fresh, state);
  model = std::move(fresh);
  TrainCheckpoint cp;
  cp.stage = parse_stage(meta.at("stage").get<std::string>());
  cp.epochs_done = meta.at("epochs_done").get<std::size_t>();
  cp.velocity = std::move(velocity);
  cp.records = records_from_json(meta.at("records"));
  return cp;
}

int run_train(const Common& common, const TrainArgs& a) {
  const Config c = common.resolve();
  const fs::path out = a.out.empty() ? fs::path(c.paths.weights) : fs::path(a.out);
  fs::create_directories(out);
  const TrainConfig tc = c.resolved_trainer();
  const DropoutSpec dropout = c.resolved_dropout();
  if (dropout.kind == MaskKind::none) throw std::invalid_argument("train: the dropout kind must not be none");

  Model model(c.resolved_backbone());
  std::optional<TrainCheckpoint> resume;
  const fs::path cp_path = out / "checkpoint.weights";
  if (a.resume) {
    if (!fs::exists(cp_path)) throw StoreError("train: nothing to resume, " + cp_path.string() + " missing");
    resume = load_checkpoint(cp_path, model);
    fmt::print("resuming at {} after epoch {}\n", to_string(resume->stage), resume->epochs_done);
  }

  const auto start = std::chrono::steady_clock::now();
  const TrainData data = default_corpus(tc, common.jobs);
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  auto meta = [&](const char* kind, const std::vector<LossRecord>& records) {
    return json{{"format", "sdtrack-weights-1"}, {"kind", kind}, {"config", to_json(c)}, {"seed", c.seed},
                {"records", records_json(records)}}
        .dump();
  };
  std::vector<LossRecord> seen = resume ? resume->records : std::vector<LossRecord>{};

  TrainHooks hooks;
  hooks.on_epoch = [&](const Model& m, const TrainCheckpoint& cp) {
    const auto& r = cp.records.back();
    fmt::print("{:<17} epoch {:>2}  loss {:.5f}  val_auc {}  ({:.0f}s)\n", to_string(r.stage), r.epoch, r.mean_loss,
               r.val_auc ? fmt::format("{:.4f}", *r.val_auc) : "-", elapsed());
    std::fflush(stdout);
    seen = cp.records;
    save_checkpoint(cp_path, m, cp, c);
  };
  hooks.on_stage_end = [&](Stage stage, const Model& m) {
    if (stage == Stage::backbone_pretrain) save_model(out / "baseline.weights", m, meta("baseline", seen));
  };
  const auto records = train(model, data, tc, dropout, c.tracking(), hooks, resume);
  save_model(out / "sd.weights", model, meta("sd", records));

  std::string csv;
  for (const auto& line : provenance(c)) csv += "# " + line + "\n";
  csv += "stage,epoch,mean_loss,val_auc\n";
  for (const auto& r : records) {
    csv += fmt::format("{},{},{},{}\n", to_string(r.stage), r.epoch, format_real(r.mean_loss),
                       r.val_auc ? format_real(*r.val_auc) : "");
  }
  write_file_atomic(out / "train_log.csv", csv);
  fmt::print("wrote {} and {} ({:.0f}s)\n", (out / "baseline.weights").string(), (out / "sd.weights").string(),
             elapsed());
  return 0;
}

// ---- track ----------------------------------------------------------------

struct TrackArgs {
  std::string weights;
  std::string input;  // sequence or suite directory
  std::string out;
};

ResultsFile to_results_file(const TrackedRun& run, const Config& c) {
  ResultsFile f;
  f.header = {"sdtrack results v1", "sequence: " + run.result.sequence};
  for (const auto& line : provenance(c)) f.header.push_back(line);
  f.header.push_back("columns: frame,x,y,w,h,score,degenerate");
  f.predictions = run.result.predictions;
  return f;
}

int run_track(const Common& common, const TrackArgs& a) {
  const Config c = common.resolve();
  const Model model = load_or_throw(c, a.weights);
  const TrackingOptions options = c.tracking();
  const fs::path in(a.input);
  if (is_sequence_dir(in)) {
    const auto seq = load_sequence(in);
    const auto run = track_sequence(model, options, seq);
    save_results(a.out, to_results_file(run, c));
    fmt::print("{}: {} frames -> {}\n", seq.id, seq.size(), a.out);
    return 0;
  }
  const auto suite = load_suite(in);
  const auto runs = track_suite(model, options, suite, common.jobs);
  fs::create_directories(a.out);
  for (const auto& r : runs) save_results(fs::path(a.out) / (r.result.sequence + ".txt"), to_results_file(r, c));
  fmt::print("tracked {} sequences -> {}\n", runs.size(), a.out);
  return 0;
}

// ---- eval / analyze-occlusion ---------------------------------------------

std::vector<RunResult> load_runs(const fs::path& results, const fs::path& data) {
  std::vector<RunResult> runs;
  auto one = [&](const SequenceDataset& seq, const fs::path& file) {
    RunResult r;
    r.sequence = seq.id;
    r.gt = seq.gt;
    r.occ_fraction = seq.occ_fraction;
    r.predictions = load_results(file).predictions;
    if (r.predictions.size() != r.gt.size()) {
      throw MetricsError(fmt::format("{}: {} result records for {} frames", file.string(), r.predictions.size(),
                                     r.gt.size()));
    }
    runs.push_back(std::move(r));
  };
  if (is_sequence_dir(data)) {
    const auto seq = load_sequence(data);
    one(seq, fs::is_directory(results) ? results / (seq.id + ".txt") : results);
    return runs;
  }
  for (const auto& id : suite_ids(data)) {
    const auto seq = load_sequence(data / id);
    one(seq, results / (id + ".txt"));
  }
  return runs;
}

struct EvalArgs {
  std::string results;
  std::string data;
  std::string out;
  std::string csv;
};

int run_eval(const Common& common, const EvalArgs& a) {
  const Config c = common.resolve();
  const auto runs = load_runs(a.results, a.data);
  const auto report = evaluate(runs);
  std::vector<std::string> header = {"sdtrack report v1", "results: " + a.results, "data: " + a.data};
  for (const auto& line : provenance(c)) header.push_back(line);
  write_file_atomic(a.out, format_report(header, report_values(report)));
  const fs::path csv = a.csv.empty() ? fs::path(a.out).replace_extension(".success.csv") : fs::path(a.csv);
  std::string text;
  for (const auto& h : header) text += "# " + h + "\n";
  text += "threshold,all";
  for (const auto& s : report.sequences) text += "," + s.sequence;
  text += "\n";
  for (std::size_t k = 0; k <= kSuccessSteps; ++k) {
    text += format_real(static_cast<double>(k) / static_cast<double>(kSuccessSteps)) + "," +
            format_real(report.aggregate.curve[k]);
    for (const auto& s : report.sequences) text += "," + format_real(s.curve[k]);
    text += "\n";
  }
  write_file_atomic(csv, text);
  const auto& g = report.aggregate;
  fmt::print("{} sequences: precision@20 {:.4f}  AUC {:.4f}  AO {:.4f}  SR0.5 {:.4f}  SR0.75 {:.4f}\n",
             report.sequences.size(), g.precision, g.auc, g.ao, g.sr50, g.sr75);
  return 0;
}

struct AnalyzeArgs {
  std::string a;
  std::string b;
  std::string data;
  std::string out;
  std::string report;
};

int run_analyze(const Common& common, const AnalyzeArgs& a) {
  const Config c = common.resolve();
  const auto ra = load_runs(a.a, a.data);
  const auto rb = load_runs(a.b, a.data);
  const auto analysis = occlusion_gain_analysis(ra, rb);
  std::vector<std::string> header = {"sdtrack occlusion analysis v1", "run_a: " + a.a, "run_b: " + a.b,
                                     "data: " + a.data};
  for (const auto& line : provenance(c)) header.push_back(line);
  std::string csv;
  for (const auto& h : header) csv += "# " + h + "\n";
  csv += "sequence,frame,occ_fraction,iou_a,iou_b,delta_iou\n";
  for (const auto& r : analysis.rows) {
    csv += fmt::format("{},{},{},{},{},{}\n", r.sequence, r.frame, format_real(r.occ_fraction), format_real(r.iou_a),
                       format_real(r.iou_b), format_real(r.delta));
  }
  write_file_atomic(a.out, csv);
  const auto ma = evaluate(ra).aggregate;
  const auto mb = evaluate(rb).aggregate;
  KeyValues kv = {{"frames", std::to_string(analysis.rows.size())},
                  {"rank_correlation", analysis.correlation ? format_real(*analysis.correlation) : "none"},
                  {"mean_delta_iou", format_real(analysis.mean_delta)},
                  {"ao_a", format_real(ma.ao)},
                  {"ao_b", format_real(mb.ao)},
                  {"ao_gain", format_real(mb.ao - ma.ao)}};
  const fs::path report = a.report.empty() ? fs::path(a.out).replace_extension(".report.txt") : fs::path(a.report);
  write_file_atomic(report, format_report(header, kv));
  fmt::print("{} frames: rank correlation {}  mean dIoU {:.4f}  AO {:.4f} -> {:.4f}\n", analysis.rows.size(),
             analysis.correlation ? fmt::format("{:.4f}", *analysis.correlation) : "none", analysis.mean_delta,
             ma.ao, mb.ao);
  return 0;
}

// ---- bench-speed ----------------------------------------------------------

struct BenchArgs {
  std::string weights;
  std::string data;
  std::size_t sequences = 2;
  std::vector<std::size_t> passes{5, 9, 13, 17, 21};
  std::string explicit_kind = "channel";
  std::string out;
};

struct Cost {
  double ops = 0;      // per frame
  double seconds = 0;  // per frame
};

Cost measure(const Model& model, const TrackingOptions& o, const std::vector<SequenceDataset>& suite) {
  Cost c;
  std::size_t frames = 0;
  for (const auto& s : suite) {
    const auto run = track_sequence(model, o, s);
    c.ops += static_cast<double>(run.ops.total());
    c.seconds += run.seconds;
    frames += s.size() - 1;
  }
  c.ops /= static_cast<double>(frames);
  c.seconds /= static_cast<double>(frames);
  return c;
}

int run_bench(const Common& common, const BenchArgs& a) {
  Config c = common.resolve();
  Model model = a.weights.empty() ? Model(c.resolved_backbone()) : load_or_throw(c, a.weights);
  std::vector<SequenceDataset> suite;
  if (a.data.empty()) {
    suite = make_benchmark(Profile::easy, a.sequences, c.seed, common.jobs);
  } else {
    suite = load_suite(a.data);
    if (suite.size() > a.sequences) suite.resize(a.sequences);
  }

  TrackingOptions base = c.tracking();
  base.combiner = CombinerKind::encoder;
  base.dropout.kind = MaskKind::none;
  const Cost baseline = measure(model, base, suite);

  TrackingOptions enc = c.tracking();
  enc.combiner = CombinerKind::encoder;
  enc.dropout.kind = MaskKind::slice;
  const std::size_t enc_passes = enc.dropout.passes();
  Model enc_model = model;
  if (!enc_model.head || enc_model.head->passes() != enc_passes) enc_model.head = EncoderHead<float>::averaging(enc_passes);
  const Cost encoder = measure(enc_model, enc, suite);

  std::vector<std::string> header = {"sdtrack speed report v1"};
  for (const auto& line : provenance(c)) header.push_back(line);
  KeyValues kv = {{"frames_per_run", std::to_string(suite.empty() ? 0 : suite[0].size() - 1)},
                  {"baseline.ops_per_frame", format_real(baseline.ops)},
                  {"baseline.seconds_per_frame", format_real(baseline.seconds)},
                  {"encoder.passes", std::to_string(enc_passes)},
                  {"encoder.ops_per_frame", format_real(encoder.ops)},
                  {"encoder.seconds_per_frame", format_real(encoder.seconds)},
                  {"encoder.ops_ratio", format_real(encoder.ops / baseline.ops)},
                  {"encoder.time_ratio", format_real(encoder.seconds / baseline.seconds)},
                  {"encoder.fps_ratio", format_real(baseline.seconds / encoder.seconds)}};
  fmt::print("baseline {:.3e} ops/frame {:.2f} ms/frame\n", baseline.ops, 1e3 * baseline.seconds);
  fmt::print("encoder n={} {:.3e} ops/frame ({:.3f}x) {:.2f} ms/frame ({:.3f}x)\n", enc_passes, encoder.ops,
             encoder.ops / baseline.ops, 1e3 * encoder.seconds, encoder.seconds / baseline.seconds);

  // Explicit sampling cost against n, with a least-squares line.
  const MaskKind kind = parse_mask_kind(a.explicit_kind);
  if (kind == MaskKind::none || kind == MaskKind::slice) {
    throw std::invalid_argument("bench-speed: explicit sweep needs a sampled kind (channel, segment or mc)");
  }
  std::vector<double> xs, ys;
  for (std::size_t n : a.passes) {
    TrackingOptions ex = c.tracking();
    ex.combiner = CombinerKind::explicit_sampling;
    ex.dropout.kind = kind;
    ex.dropout.n = n;
    const Cost cost = measure(model, ex, suite);
    xs.push_back(static_cast<double>(n));
    ys.push_back(cost.ops);
    kv.emplace_back(fmt::format("explicit.n{}.ops_per_frame", n), format_real(cost.ops));
    kv.emplace_back(fmt::format("explicit.n{}.seconds_per_frame", n), format_real(cost.seconds));
    kv.emplace_back(fmt::format("explicit.n{}.ops_ratio", n), format_real(cost.ops / baseline.ops));
    fmt::print("explicit {} n={} {:.3e} ops/frame ({:.3f}x) {:.2f} ms/frame\n", a.explicit_kind, n, cost.ops,
               cost.ops / baseline.ops, 1e3 * cost.seconds);
  }
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i] / static_cast<double>(xs.size());
      my += ys[i] / static_cast<double>(xs.size());
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    kv.emplace_back("explicit.kind", a.explicit_kind);
    kv.emplace_back("explicit.ops_per_pass", format_real(slope));
    kv.emplace_back("explicit.intercept", format_real(my - slope * mx));
    kv.emplace_back("explicit.linear_r2", format_real(r2));
    fmt::print("explicit cost per extra pass {:.3e} ops (r2 {:.6f})\n", slope, r2);
  }
  if (!a.out.empty()) write_file_atomic(a.out, format_report(header, kv));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured-dropout Siamese tracking on synthetic occlusion benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Master seed (overrides config)");
  app.add_option("--dropout", common.dropout, "Mask kind: none, channel, segment, slice, mc");
  app.add_option("--combiner", common.combiner, "encoder or explicit");
  app.add_option("--jobs", common.jobs, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Render a benchmark suite");
  s->add_option("--profile", synth.profile, "easy or occlusion-heavy");
  s->add_option("--count", synth.count, "Number of sequences")->check(CLI::PositiveNumber);
  s->add_option("--out", synth.out, "Output directory")->required();

  TrainArgs train_args;
  auto* t = app.add_subcommand("train", "Staged training on the default synthetic corpus");
  t->add_option("--out", train_args.out, "Weights directory (default: paths.weights)");
  t->add_flag("--resume", train_args.resume, "Continue from <out>/checkpoint.weights");

  TrackArgs track;
  auto* k = app.add_subcommand("track", "Track one sequence or every sequence of a suite");
  k->add_option("--weights", track.weights, "Weights file")->required()->check(CLI::ExistingFile);
  k->add_option("input", track.input, "Sequence or suite directory")->required()->check(CLI::ExistingDirectory);
  k->add_option("--out", track.out, "Results file (sequence) or directory (suite)")->required();

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Metrics report for a results directory");
  e->add_option("--results", eval.results, "Results directory or file")->required()->check(CLI::ExistingPath);
  e->add_option("--data", eval.data, "Suite or sequence directory")->required()->check(CLI::ExistingDirectory);
  e->add_option("--out", eval.out, "Report file")->required();
  e->add_option("--csv", eval.csv, "Success-curve CSV (default: <out>.success.csv)");

  AnalyzeArgs analyze;
  auto* o = app.add_subcommand("analyze-occlusion", "Per-frame IoU change against occlusion fraction");
  o->add_option("--a", analyze.a, "Reference results")->required()->check(CLI::ExistingPath);
  o->add_option("--b", analyze.b, "Compared results")->required()->check(CLI::ExistingPath);
  o->add_option("--data", analyze.data, "Suite or sequence directory")->required()->check(CLI::ExistingDirectory);
  o->add_option("--out", analyze.out, "Per-frame CSV")->required();
  o->add_option("--report", analyze.report, "Summary report (default: <out>.report.txt)");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench-speed", "Per-frame cost of dropout trackers relative to the baseline");
  b->add_option("--weights", bench.weights, "Weights file (default: fresh initialization)")->check(CLI::ExistingFile);
  b->add_option("--data", bench.data, "Suite directory (default: synthesize easy sequences)");
  b->add_option("--sequences", bench.sequences, "Sequences to run")->check(CLI::PositiveNumber);
  b->add_option("--passes", bench.passes, "Explicit-sampling pass counts")->delimiter(',');
  b->add_option("--explicit-kind", bench.explicit_kind, "Mask kind for the explicit sweep");
  b->add_option("--out", bench.out, "Report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    std::cerr << "sdtrack: error: " << ex.what() << "\n";
    return ex.get_exit_code() ? ex.get_exit_code() : 2;
  }

  if (common.jobs > 0) omp_set_num_threads(common.jobs);
  try {
    if (*s) return run_synth(common, synth);
    if (*t) return run_train(common, train_args);
    if (*k) return run_track(common, track);
    if (*e) return run_eval(common, eval);
    if (*o) return run_analyze(common, analyze);
    if (*b) return run_bench(common, bench);
  } catch (const std::exception& ex) {
    std::string msg = ex.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::cerr << "sdtrack: error: " << msg << "\n";
    return 1;
  }
  return 1;
}
