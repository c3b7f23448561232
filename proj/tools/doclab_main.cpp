// Command-line front end for the layout evaluation toolkit. Everything goes
// through the public C API; this file only parses flags, moves bytes to disk
// and maps failures to exit codes (0 ok, 1 domain error, 2 usage).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "doclab.h"

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(int status) {
  if (status == DOCLAB_OK) return;
  throw CliError(std::string(doclab_status_name(status)) + ": " + doclab_last_error());
}

struct StringDeleter {
  void operator()(char* p) const { doclab_string_free(p); }
};
using CString = std::unique_ptr<char, StringDeleter>;

struct DatasetDeleter {
  void operator()(doclab_dataset* p) const { doclab_dataset_free(p); }
};
using Dataset = std::unique_ptr<doclab_dataset, DatasetDeleter>;

struct DetectionsDeleter {
  void operator()(doclab_detections* p) const { doclab_detections_free(p); }
};
using Detections = std::unique_ptr<doclab_detections, DetectionsDeleter>;

struct ThresholdsDeleter {
  void operator()(doclab_thresholds* p) const { doclab_thresholds_free(p); }
};
using Thresholds = std::unique_ptr<doclab_thresholds, ThresholdsDeleter>;

struct ReportDeleter {
  void operator()(doclab_report* p) const { doclab_report_free(p); }
};
using Report = std::unique_ptr<doclab_report, ReportDeleter>;

struct StyleDeleter {
  void operator()(doclab_style* p) const { doclab_style_free(p); }
};
using Style = std::unique_ptr<doclab_style, StyleDeleter>;

struct FeaturesDeleter {
  void operator()(doclab_features* p) const { doclab_features_free(p); }
};
using Features = std::unique_ptr<doclab_features, FeaturesDeleter>;

struct ProjectionDeleter {
  void operator()(doclab_projection* p) const { doclab_projection_free(p); }
};
using Projection = std::unique_ptr<doclab_projection, ProjectionDeleter>;

Dataset load_dataset(const std::string& path, int split) {
  doclab_dataset* raw = nullptr;
  check(doclab_dataset_load(path.c_str(), split, &raw));
  return Dataset(raw);
}

Detections load_detections(const std::string& path) {
  doclab_detections* raw = nullptr;
  check(doclab_detections_load(path.c_str(), &raw));
  return Detections(raw);
}

Thresholds load_thresholds(const std::string& path) {
  doclab_thresholds* raw = nullptr;
  check(doclab_thresholds_load(path.c_str(), &raw));
  return Thresholds(raw);
}

// All outputs of one invocation land under this directory.
struct OutputSink {
  fs::path dir;
  std::vector<std::string> written;

  explicit OutputSink(const std::string& out_dir) : dir(out_dir) {
    fs::create_directories(dir);
  }

  fs::path resolve(const std::string& name) {
    fs::path p(name);
    return p.is_absolute() ? p : dir / p;
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = resolve(name);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError("IoError: cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw CliError("IoError: short write to " + path.string());
    written.push_back(name);
  }

  void note(const std::string& name) { written.push_back(name); }
};

// Machine-readable record of what ran; deliberately timestamp-free so reruns
// are byte-identical.
void write_manifest(OutputSink& sink, const std::string& command, const ordered_json& config,
                    const std::vector<std::string>& inputs) {
  ordered_json doc;
  doc["tool"] = "doclab";
  doc["version"] = doclab_version();
  doc["command"] = command;
  doc["config"] = config;
  doc["inputs"] = inputs;
  doc["outputs"] = sink.written;
  sink.write("run_manifest.json", doc.dump(2) + "\n");
}

std::string default_out_dir() {
  const char* env = std::getenv("DOCLAB_OUT_DIR");
  return env && *env ? env : ".";
}

struct CommonOpts {
  std::string out_dir = default_out_dir();
  double iou = 0.5;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_iou = true) {
  cmd->add_option("--out-dir", opts.out_dir,
                  "Output directory (or set DOCLAB_OUT_DIR); default \".\"");
  if (with_iou)
    cmd->add_option("--iou", opts.iou, "IoU threshold for matching, in (0, 1]")
        ->default_val(0.5);
  cmd->add_option("--threads", opts.threads, "Worker threads for per-class loops")
      ->default_val(1);
}

int run_evaluate(const std::string& gt, const std::string& dets, const CommonOpts& opts,
                 int interp) {
  Dataset dataset = load_dataset(gt, DOCLAB_SPLIT_VALIDATION);
  Detections detections = load_detections(dets);
  doclab_report* raw = nullptr;
  check(doclab_evaluate(detections.get(), dataset.get(), opts.iou, interp, opts.threads, &raw));
  Report report(raw);

  char* json = nullptr;
  check(doclab_report_json(report.get(), &json));
  CString json_guard(json);
  char* text = nullptr;
  check(doclab_report_text(report.get(), &text));
  CString text_guard(text);
  double map50 = 0;
  check(doclab_report_map50(report.get(), &map50));

  OutputSink sink(opts.out_dir);
  sink.write("report.json", json);
  sink.write("report.txt", text);
  ordered_json config;
  config["iou"] = opts.iou;
  config["interpolation"] = interp == DOCLAB_INTERP_COCO101 ? "coco101" : "allpoint";
  config["threads"] = opts.threads;
  write_manifest(sink, "evaluate", config, {gt, dets});
  std::printf("map50 %.6f\n", map50);
  return 0;
}

int run_optimize(const std::string& gt, const std::string& dets, const CommonOpts& opts,
                 double fallback, const std::string& out_name, const std::string& trace_class) {
  Dataset dataset = load_dataset(gt, DOCLAB_SPLIT_VALIDATION);
  Detections detections = load_detections(dets);
  doclab_thresholds* raw = nullptr;
  check(doclab_optimize_thresholds(detections.get(), dataset.get(), opts.iou, fallback,
                                   opts.threads, &raw));
  Thresholds thresholds(raw);

  OutputSink sink(opts.out_dir);
  check(doclab_thresholds_save(thresholds.get(), sink.resolve(out_name).string().c_str()));
  sink.note(out_name);
  if (!trace_class.empty()) {
    int category_id = -1;
    check(doclab_category_id(trace_class.c_str(), &category_id));
    char* csv = nullptr;
    check(doclab_sweep_trace_csv(detections.get(), dataset.get(), category_id, opts.iou, &csv));
    CString csv_guard(csv);
    sink.write("sweep_" + trace_class + ".csv", csv);
  }
  char* provenance = nullptr;
  check(doclab_thresholds_provenance(thresholds.get(), &provenance));
  CString prov_guard(provenance);

  ordered_json config;
  config["iou"] = opts.iou;
  config["fallback"] = fallback;
  config["threads"] = opts.threads;
  if (!trace_class.empty()) config["trace_class"] = trace_class;
  write_manifest(sink, "optimize-thresholds", config, {gt, dets});
  std::printf("thresholds written to %s (%s)\n", out_name.c_str(), provenance);
  return 0;
}

int run_pseudo_label(const std::string& dets, const std::string& thresholds_path,
                     const std::string& labeled, const std::string& unlabeled, bool nms,
                     const std::string& out_name, const CommonOpts& opts) {
  Detections detections = load_detections(dets);
  Thresholds thresholds = load_thresholds(thresholds_path);
  Dataset labeled_ds = load_dataset(labeled, DOCLAB_SPLIT_LABELED);
  Dataset unlabeled_ds;
  if (!unlabeled.empty()) unlabeled_ds = load_dataset(unlabeled, DOCLAB_SPLIT_UNLABELED);

  doclab_dataset* merged_raw = nullptr;
  char* report_json = nullptr;
  char* report_text = nullptr;
  check(doclab_pseudo_label(detections.get(), thresholds.get(), labeled_ds.get(),
                            unlabeled_ds.get(), nms ? 1 : 0, &merged_raw, &report_json,
                            &report_text));
  Dataset merged(merged_raw);
  CString json_guard(report_json);
  CString text_guard(report_text);

  OutputSink sink(opts.out_dir);
  check(doclab_dataset_save(merged.get(), sink.resolve(out_name).string().c_str()));
  sink.note(out_name);
  sink.write("pseudo_report.json", report_json);
  sink.write("pseudo_report.txt", report_text);

  ordered_json config;
  config["nms"] = nms;
  std::vector<std::string> inputs{dets, thresholds_path, labeled};
  if (!unlabeled.empty()) inputs.push_back(unlabeled);
  write_manifest(sink, "pseudo-label", config, inputs);
  std::printf("merged dataset: %lld images, %lld annotations\n",
              doclab_dataset_image_count(merged.get()),
              doclab_dataset_annotation_count(merged.get()));
  return 0;
}

int run_remap(const std::string& gt, const std::string& out_name, const CommonOpts& opts) {
  Dataset dataset = load_dataset(gt, DOCLAB_SPLIT_LABELED);
  OutputSink sink(opts.out_dir);
  check(doclab_dataset_remap_to_file(dataset.get(), sink.resolve(out_name).string().c_str()));
  sink.note(out_name);
  write_manifest(sink, "remap", ordered_json::object(), {gt});
  std::printf("coarse dataset written to %s\n", out_name.c_str());
  return 0;
}

int run_stats(const std::string& gt, int split, const std::string& out_name,
              const CommonOpts& opts) {
  Dataset dataset = load_dataset(gt, split);
  char* csv = nullptr;
  check(doclab_dataset_histogram_csv(dataset.get(), &csv));
  CString csv_guard(csv);
  OutputSink sink(opts.out_dir);
  sink.write(out_name, csv);
  ordered_json config;
  config["split"] = split;
  write_manifest(sink, "stats", config, {gt});
  std::printf("histogram for %lld annotations written to %s\n",
              doclab_dataset_annotation_count(dataset.get()), out_name.c_str());
  return 0;
}

int run_render(const std::string& gt, const std::string& dets, bool href,
               const CommonOpts& opts) {
  Dataset dataset = load_dataset(gt, DOCLAB_SPLIT_LABELED);
  Detections detections;
  if (!dets.empty()) detections = load_detections(dets);
  doclab_style* style_raw = nullptr;
  check(doclab_style_default(&style_raw));
  Style style(style_raw);

  OutputSink sink(opts.out_dir);
  const long long n = doclab_dataset_image_count(dataset.get());
  for (long long i = 0; i < n; ++i) {
    long long image_id = 0;
    check(doclab_dataset_image_id(dataset.get(), i, &image_id));
    char* svg = nullptr;
    check(doclab_render_gt_svg(dataset.get(), image_id, style.get(), href ? 1 : 0, &svg));
    CString svg_guard(svg);
    sink.write("gt_" + std::to_string(image_id) + ".svg", svg);
    if (detections) {
      char* det_svg = nullptr;
      check(doclab_render_detections_svg(dataset.get(), detections.get(), image_id, style.get(),
                                         href ? 1 : 0, &det_svg));
      CString det_guard(det_svg);
      sink.write("det_" + std::to_string(image_id) + ".svg", det_svg);
    }
  }
  ordered_json config;
  config["href"] = href;
  std::vector<std::string> inputs{gt};
  if (!dets.empty()) inputs.push_back(dets);
  write_manifest(sink, "render", config, inputs);
  std::printf("rendered %lld page%s\n", n, n == 1 ? "" : "s");
  return 0;
}

int run_distill_demo(const std::string& teacher_path, const std::string& student_path, double lr,
                     int epochs, unsigned long long seed, bool no_bias, const CommonOpts& opts) {
  Features teacher, student;
  {
    doclab_features* raw = nullptr;
    check(doclab_features_load(teacher_path.c_str(), &raw));
    teacher.reset(raw);
    raw = nullptr;
    check(doclab_features_load(student_path.c_str(), &raw));
    student.reset(raw);
  }
  const int with_bias = no_bias ? 0 : 1;

  doclab_projection* gd_raw = nullptr;
  char* trace = nullptr;
  check(doclab_distill_fit_gd(teacher.get(), student.get(), lr, epochs, seed, with_bias, &gd_raw,
                              &trace));
  Projection gd(gd_raw);
  CString trace_guard(trace);

  doclab_projection* cf_raw = nullptr;
  check(doclab_distill_fit_closed_form(teacher.get(), student.get(), with_bias, &cf_raw));
  Projection closed_form(cf_raw);

  double gd_loss = 0, cf_loss = 0;
  check(doclab_distill_loss(teacher.get(), student.get(), gd.get(), &gd_loss));
  check(doclab_distill_loss(teacher.get(), student.get(), closed_form.get(), &cf_loss));

  OutputSink sink(opts.out_dir);
  sink.write("distill_trace.csv", trace);
  ordered_json summary;
  summary["rows"] = doclab_features_rows(teacher.get());
  summary["teacher_dim"] = doclab_features_cols(teacher.get());
  summary["student_dim"] = doclab_features_cols(student.get());
  summary["epochs"] = epochs;
  summary["seed"] = seed;
  summary["with_bias"] = with_bias == 1;
  summary["gd_loss"] = gd_loss;
  summary["closed_form_loss"] = cf_loss;
  summary["gap"] = gd_loss - cf_loss;
  sink.write("distill_summary.json", summary.dump(2) + "\n");

  ordered_json config;
  config["lr"] = lr;
  config["epochs"] = epochs;
  config["seed"] = seed;
  config["with_bias"] = with_bias == 1;
  write_manifest(sink, "distill-demo", config, {teacher_path, student_path});
  std::printf("gd loss %.9g, closed-form loss %.9g, gap %.9g\n", gd_loss, cf_loss,
              gd_loss - cf_loss);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Document layout detection evaluation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(doclab_version()));

  const std::map<std::string, int> interp_values{{"coco101", DOCLAB_INTERP_COCO101},
                                                 {"allpoint", DOCLAB_INTERP_ALLPOINT}};
  const std::map<std::string, int> split_values{{"labeled", DOCLAB_SPLIT_LABELED},
                                                {"unlabeled", DOCLAB_SPLIT_UNLABELED},
                                                {"validation", DOCLAB_SPLIT_VALIDATION}};

  // evaluate
  std::string ev_gt, ev_dets;
  CommonOpts ev_opts;
  int ev_interp = DOCLAB_INTERP_COCO101;
  auto* evaluate = app.add_subcommand("evaluate", "Score detections against ground truth");
  evaluate->add_option("--gt", ev_gt, "Ground-truth dataset (json)")->required();
  evaluate->add_option("--dets", ev_dets, "Detections (json)")->required();
  evaluate->add_option("--interp", ev_interp, "AP interpolation")
      ->transform(CLI::CheckedTransformer(interp_values, CLI::ignore_case))
      ->default_val("coco101");
  add_common(evaluate, ev_opts);

  // optimize-thresholds
  std::string opt_gt, opt_dets, opt_out = "thresholds.json", opt_trace;
  CommonOpts opt_opts;
  double opt_fallback = 0.5;
  auto* optimize =
      app.add_subcommand("optimize-thresholds", "Pick the F1-optimal score cutoff per class");
  optimize->add_option("--gt", opt_gt, "Ground-truth dataset (json)")->required();
  optimize->add_option("--dets", opt_dets, "Detections (json)")->required();
  optimize->add_option("--out", opt_out, "Threshold table file name")->default_val("thresholds.json");
  optimize->add_option("--fallback", opt_fallback,
                       "Threshold for classes without usable ground truth")
      ->default_val(0.5);
  optimize->add_option("--trace-class", opt_trace, "Also dump the sweep trace for this category");
  add_common(optimize, opt_opts);

  // pseudo-label
  std::string pl_dets, pl_thresholds, pl_labeled, pl_unlabeled, pl_out = "merged.json";
  CommonOpts pl_opts;
  bool pl_nms = false;
  auto* pseudo = app.add_subcommand(
      "pseudo-label", "Filter detections by class thresholds and merge into the labeled split");
  pseudo->add_option("--dets", pl_dets, "Detections on the unlabeled pool (json)")->required();
  pseudo->add_option("--thresholds", pl_thresholds, "Per-class threshold table (json)")->required();
  pseudo->add_option("--labeled", pl_labeled, "Labeled dataset (json)")->required();
  pseudo->add_option("--unlabeled", pl_unlabeled,
                     "Unlabeled image list (json); synthesized from detections when omitted");
  pseudo->add_flag("--nms", pl_nms, "Class-wise NMS at IoU 0.5 before filtering");
  pseudo->add_option("--out", pl_out, "Merged dataset file name")->default_val("merged.json");
  add_common(pseudo, pl_opts, /*with_iou=*/false);

  // remap
  std::string rm_gt, rm_out = "coarse.json";
  CommonOpts rm_opts;
  auto* remap = app.add_subcommand("remap", "Rewrite annotations in the 9-class coarse scheme");
  remap->add_option("--gt", rm_gt, "Dataset to remap (json)")->required();
  remap->add_option("--out", rm_out, "Coarse dataset file name")->default_val("coarse.json");
  add_common(remap, rm_opts, /*with_iou=*/false);

  // stats
  std::string st_gt, st_out = "stats.csv";
  CommonOpts st_opts;
  int st_split = DOCLAB_SPLIT_LABELED;
  auto* stats = app.add_subcommand("stats", "Per-category instance histogram as CSV");
  stats->add_option("--gt", st_gt, "Dataset (json)")->required();
  stats->add_option("--split", st_split, "Split label recorded in the histogram")
      ->transform(CLI::CheckedTransformer(split_values, CLI::ignore_case))
      ->default_val("labeled");
  stats->add_option("--out", st_out, "CSV file name")->default_val("stats.csv");
  add_common(stats, st_opts, /*with_iou=*/false);

  // render
  std::string rd_gt, rd_dets;
  CommonOpts rd_opts;
  bool rd_href = false;
  auto* render = app.add_subcommand("render", "Render page overlays as SVG");
  render->add_option("--gt", rd_gt, "Dataset whose pages to render (json)")->required();
  render->add_option("--dets", rd_dets, "Also render these detections (json)");
  render->add_flag("--href", rd_href, "Reference page images via their file_name");
  add_common(render, rd_opts, /*with_iou=*/false);

  // distill-demo
  std::string dd_teacher, dd_student;
  CommonOpts dd_opts;
  double dd_lr = 0.0;
  int dd_epochs = 200;
  unsigned long long dd_seed = 42;
  bool dd_no_bias = false;
  auto* distill = app.add_subcommand(
      "distill-demo", "Fit a linear projection to teacher features, gradient descent vs exact");
  distill->add_option("--teacher", dd_teacher, "Teacher feature CSV")->required();
  distill->add_option("--student", dd_student, "Student feature CSV")->required();
  distill->add_option("--lr", dd_lr, "Step size; <= 0 picks a guaranteed-descent value")
      ->default_val(0.0);
  distill->add_option("--epochs", dd_epochs, "Gradient steps")->default_val(200);
  distill->add_option("--seed", dd_seed, "Initialization seed")->default_val(42);
  distill->add_flag("--no-bias", dd_no_bias, "Fit without a bias term");
  add_common(distill, dd_opts, /*with_iou=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (evaluate->parsed()) return run_evaluate(ev_gt, ev_dets, ev_opts, ev_interp);
    if (optimize->parsed())
      return run_optimize(opt_gt, opt_dets, opt_opts, opt_fallback, opt_out, opt_trace);
    if (pseudo->parsed())
      return run_pseudo_label(pl_dets, pl_thresholds, pl_labeled, pl_unlabeled, pl_nms, pl_out,
                              pl_opts);
    if (remap->parsed()) return run_remap(rm_gt, rm_out, rm_opts);
    if (stats->parsed()) return run_stats(st_gt, st_split, st_out, st_opts);
    if (render->parsed()) return run_render(rd_gt, rd_dets, rd_href, rd_opts);
    if (distill->parsed())
      return run_distill_demo(dd_teacher, dd_student, dd_lr, dd_epochs, dd_seed, dd_no_bias,
                              dd_opts);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
