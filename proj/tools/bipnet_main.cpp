// bipnet: ray-cluster text contour encoding, decoding and evaluation tools.
//
// Subcommands: encode | gtmaps | decode | roundtrip | eval | synth | bench.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bipnet/annotations.hpp"
#include "bipnet/decoder.hpp"
#include "bipnet/encoder.hpp"
#include "bipnet/eval.hpp"
#include "bipnet/map_container.hpp"
#include "bipnet/synth.hpp"

using namespace bipnet;

namespace {

constexpr int kExitData = 2;

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
      stream = &file;
    }
  }
  std::ostream& out() { return *stream; }
};

struct AnnotationOptions {
  std::string path;
  std::string format;
  std::string ctw_mode = "absolute";

  void attach(CLI::App* cmd) {
    cmd->add_option("--ann", path, "annotation file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--format", format, "annotation format")
        ->required()
        ->check(CLI::IsMember({"icdar2015", "ctw1500", "msra-td500", "synth"}));
    cmd->add_option("--ctw-mode", ctw_mode, "ctw1500 coordinate convention")
        ->check(CLI::IsMember({"absolute", "bbox-offset"}));
  }
};

// Parses annotations, reporting recovered per-line failures on stderr.
// Returns true when every line parsed.
bool load_annotations(const AnnotationOptions& opt, std::vector<AnnotationRecord>* records) {
  std::ifstream in(opt.path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + opt.path);
  ParseResult res;
  if (opt.format == "icdar2015") {
    res = parse_icdar2015(in);
  } else if (opt.format == "ctw1500") {
    res = parse_ctw1500(in, opt.ctw_mode == "absolute" ? CtwMode::Absolute : CtwMode::BboxOffset);
  } else if (opt.format == "msra-td500") {
    res = parse_msra_td500(in);
  } else {
    res = parse_synth(in);
  }
  for (const auto& issue : res.issues) {
    std::cerr << opt.path << ":" << issue.line << ": " << issue.message << "\n";
  }
  *records = std::move(res.records);
  return res.issues.empty();
}

ReadMode parse_read_mode(const std::string& name) {
  return name == "mean3" ? ReadMode::Mean3x3 : ReadMode::Nearest;
}

double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * v.size()));
  return v[std::min(v.size() - 1, rank == 0 ? 0 : rank - 1)];
}

std::string polygon_fields(const Polygon& poly) {
  std::string out;
  for (const auto& p : poly.vertices()) {
    out += " " + fmt4(p.x) + " " + fmt4(p.y);
  }
  return out;
}

int run_encode(const AnnotationOptions& ann, int height, int width, int n, int m, double ratio,
               const std::string& axis, const std::string& out_path) {
  std::vector<AnnotationRecord> records;
  const bool clean = load_annotations(ann, &records);
  Output out(out_path);
  const SampleAxis sample_axis = axis == "principal" ? SampleAxis::Principal : SampleAxis::X;
  for (std::size_t id = 0; id < records.size(); ++id) {
    try {
      const InstanceEncoding enc =
          encode_instance(records[id].polygon, n, m, ratio, height, width, sample_axis);
      out.out() << id << " " << enc.clusters.size() << " " << m;
      for (const auto& cl : enc.clusters) {
        out.out() << " " << fmt4(cl.center.x) << " " << fmt4(cl.center.y);
        for (double d : cl.distances) out.out() << " " << fmt4(d);
      }
      out.out() << "\n";
    } catch (const Error& e) {
      std::cerr << "instance " << id << " skipped: " << e.what() << "\n";
    }
  }
  return clean ? 0 : kExitData;
}

int run_gtmaps(const AnnotationOptions& ann, int height, int width, int m, double ratio,
               const std::string& out_path) {
  std::vector<AnnotationRecord> records;
  const bool clean = load_annotations(ann, &records);
  std::vector<Polygon> contours;
  contours.reserve(records.size());
  for (const auto& rec : records) contours.push_back(rec.polygon);

  GtMapsResult res = generate_gt_maps(contours, height, width, m, ratio);
  for (const auto& w : res.warnings) std::cerr << w << "\n";
  write_maps_file(pack_maps(res.maps.shrink_mask, res.maps.distance_maps), out_path);
  return clean ? 0 : kExitData;
}

int run_decode(const std::string& maps_path, double threshold, int min_area, int n, int m_expect,
               const std::string& read_mode, bool trace, const std::string& out_path) {
  const MapContainer container = read_maps_file(maps_path);
  if (container.channels < 2) {
    throw Error(ErrorCode::DimensionMismatch, "container needs a shrink channel plus rays");
  }
  const int m = static_cast<int>(container.channels) - 1;
  if (m_expect > 0 && m_expect != m) {
    throw Error(ErrorCode::DimensionMismatch,
                "container holds " + std::to_string(m) + " ray channels, --m says " +
                    std::to_string(m_expect));
  }
  PredictionMaps maps;
  maps.shrink_prob = channel_raster(container, 0);
  for (int i = 1; i <= m; ++i) maps.distance_maps.push_back(channel_raster(container, i));

  DecodeConfig cfg;
  cfg.threshold = threshold;
  cfg.min_area = min_area;
  cfg.n = n;
  cfg.read_mode = parse_read_mode(read_mode);
  cfg.trace = trace;

  const DetectionResult det = decode(maps, cfg);
  for (const auto& msg : det.dropped) std::cerr << msg << "\n";

  Output out(out_path);
  for (std::size_t id = 0; id < det.polygons.size(); ++id) {
    out.out() << id << " " << fmt4(det.scores[id]) << polygon_fields(det.polygons[id]) << "\n";
    if (!trace) continue;
    const InstanceTrace& tr = det.traces[id];
    for (std::size_t k = 0; k < tr.centers.size(); ++k) {
      out.out() << "trace " << id << " center " << k << " " << fmt4(tr.centers[k].x) << " "
                << fmt4(tr.centers[k].y) << "\n";
    }
    for (std::size_t k = 0; k < tr.clusters.size(); ++k) {
      out.out() << "trace " << id << " cluster " << k << " " << fmt4(tr.clusters[k].center.x)
                << " " << fmt4(tr.clusters[k].center.y);
      for (double d : tr.clusters[k].distances) out.out() << " " << fmt4(d);
      out.out() << "\n";
    }
    for (std::size_t k = 0; k < tr.piecewise.size(); ++k) {
      out.out() << "trace " << id << " piecewise " << k << polygon_fields(tr.piecewise[k]) << "\n";
    }
    for (std::size_t k = 0; k < tr.intervals.size(); ++k) {
      out.out() << "trace " << id << " interval " << k << polygon_fields(tr.intervals[k]) << "\n";
    }
  }
  return 0;
}

int run_roundtrip(const AnnotationOptions& ann, int n, int m, double ratio,
                  const std::string& out_path) {
  std::vector<AnnotationRecord> records;
  const bool clean = load_annotations(ann, &records);
  Output out(out_path);
  std::vector<double> ious;
  for (std::size_t id = 0; id < records.size(); ++id) {
    const Bounds b = records[id].polygon.bounds();
    const int h = static_cast<int>(std::ceil(b.max_y)) + 8;
    const int w = static_cast<int>(std::ceil(b.max_x)) + 8;
    const double iou = roundtrip_fidelity(records[id].polygon, n, m, ratio, h, w);
    ious.push_back(iou);
    out.out() << id << " " << fmt4(iou) << "\n";
  }
  if (!ious.empty()) {
    double mean = 0.0;
    for (double v : ious) mean += v;
    mean /= ious.size();
    out.out() << "count " << ious.size() << "\n";
    out.out() << "mean " << fmt4(mean) << "\n";
    out.out() << "min " << fmt4(*std::min_element(ious.begin(), ious.end())) << "\n";
    out.out() << "p05 " << fmt4(percentile(ious, 5)) << "\n";
    out.out() << "p50 " << fmt4(percentile(ious, 50)) << "\n";
    out.out() << "p95 " << fmt4(percentile(ious, 95)) << "\n";
    out.out() << "max " << fmt4(*std::max_element(ious.begin(), ious.end())) << "\n";
  }
  return clean ? 0 : kExitData;
}

// Detection files hold one instance per line: id score x1 y1 x2 y2 ...
std::vector<Polygon> load_detections(const std::string& path, bool* clean) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  std::vector<Polygon> dets;
  std::string line;
  int line_no = 0;
  *clean = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("trace ", 0) == 0) continue;
    std::istringstream ss(line);
    std::vector<double> nums;
    double v;
    while (ss >> v) nums.push_back(v);
    if (nums.size() < 8 || (nums.size() - 2) % 2 != 0) {
      std::cerr << path << ":" << line_no << ": expected id, score and >= 3 vertices\n";
      *clean = false;
      continue;
    }
    std::vector<Point2> pts;
    for (std::size_t i = 2; i + 1 < nums.size(); i += 2) pts.push_back({nums[i], nums[i + 1]});
    try {
      dets.push_back(Polygon(std::move(pts)));
    } catch (const Error& e) {
      std::cerr << path << ":" << line_no << ": " << e.what() << "\n";
      *clean = false;
    }
  }
  return dets;
}

int run_eval(const std::string& dets_path, const AnnotationOptions& ann, double iou_threshold,
             bool count_difficult, const std::string& out_path) {
  bool dets_clean = true;
  const std::vector<Polygon> dets = load_detections(dets_path, &dets_clean);
  std::vector<AnnotationRecord> records;
  const bool gt_clean = load_annotations(ann, &records);

  std::vector<Polygon> gts;
  std::vector<bool> ignored;
  for (const auto& rec : records) {
    gts.push_back(rec.polygon);
    ignored.push_back(count_difficult ? false : rec.ignore);
  }
  const EvalReport rep = match_and_score(dets, gts, ignored, iou_threshold);

  Output out(out_path);
  out.out() << "P " << fmt4(rep.precision) << " R " << fmt4(rep.recall) << " F "
            << fmt4(rep.f_measure) << "\n";
  out.out() << "matched " << rep.matched_pairs.size() << "\n";
  out.out() << "ignored_gt " << rep.ignored_gt << "\n";
  out.out() << "dets_matched_ignored " << rep.dets_matched_ignored << "\n";
  return dets_clean && gt_clean ? 0 : kExitData;
}

int run_synth(const SynthParams& params, const std::string& out_path) {
  const auto records = synth_generate(params);
  Output out(out_path);
  for (const auto& rec : records) out.out() << format_synth_line(rec.polygon) << "\n";
  return 0;
}

int run_bench(const std::string& maps_path, int reps, double threshold, int min_area, int n,
              const std::string& read_mode, const std::string& out_path) {
  const MapContainer container = read_maps_file(maps_path);
  if (container.channels < 2) {
    throw Error(ErrorCode::DimensionMismatch, "container needs a shrink channel plus rays");
  }
  PredictionMaps maps;
  maps.shrink_prob = channel_raster(container, 0);
  for (uint32_t i = 1; i < container.channels; ++i) {
    maps.distance_maps.push_back(channel_raster(container, i));
  }
  DecodeConfig cfg;
  cfg.threshold = threshold;
  cfg.min_area = min_area;
  cfg.n = n;
  cfg.read_mode = parse_read_mode(read_mode);

  std::vector<StageTimes> runs(reps);
  for (int r = 0; r < reps; ++r) {
    decode(maps, cfg, &runs[r]);
  }
  auto stat_line = [&](const std::string& name, auto pick) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& t : runs) v.push_back(pick(t));
    return name + " " + fmt4(percentile(v, 50)) + " " + fmt4(percentile(v, 95));
  };
  Output out(out_path);
  out.out() << stat_line("components", [](const StageTimes& t) { return t.components; }) << "\n";
  out.out() << stat_line("centers", [](const StageTimes& t) { return t.centers; }) << "\n";
  out.out() << stat_line("rays", [](const StageTimes& t) { return t.rays; }) << "\n";
  out.out() << stat_line("CC", [](const StageTimes& t) { return t.cc; }) << "\n";
  out.out() << stat_line("union", [](const StageTimes& t) { return t.union_fill; }) << "\n";
  out.out() << stat_line("trace", [](const StageTimes& t) { return t.trace; }) << "\n";
  out.out() << stat_line("decode", [](const StageTimes& t) { return t.total; }) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ray-cluster text contour encoding, decoding and evaluation"};
  app.require_subcommand(1);

  // encode
  auto* encode_cmd = app.add_subcommand("encode", "annotations -> per-instance ray clusters");
  AnnotationOptions encode_ann;
  encode_ann.attach(encode_cmd);
  int enc_height = 0, enc_width = 0, enc_n = 5, enc_m = 8;
  double enc_ratio = 0.4;
  std::string enc_axis = "x", enc_out;
  encode_cmd->add_option("--height", enc_height, "mask height")->required();
  encode_cmd->add_option("--width", enc_width, "mask width")->required();
  encode_cmd->add_option("--n", enc_n, "clusters per instance");
  encode_cmd->add_option("--m", enc_m, "rays per cluster");
  encode_cmd->add_option("--shrink-ratio", enc_ratio, "shrink ratio");
  encode_cmd->add_option("--axis", enc_axis, "sampling axis")
      ->check(CLI::IsMember({"x", "principal"}));
  encode_cmd->add_option("-o,--out", enc_out, "output file (default stdout)");

  // gtmaps
  auto* gtmaps_cmd = app.add_subcommand("gtmaps", "annotations -> prediction-map container");
  AnnotationOptions gtmaps_ann;
  gtmaps_ann.attach(gtmaps_cmd);
  int gt_height = 0, gt_width = 0, gt_m = 8;
  double gt_ratio = 0.4;
  std::string gt_out;
  gtmaps_cmd->add_option("--height", gt_height, "map height")->required();
  gtmaps_cmd->add_option("--width", gt_width, "map width")->required();
  gtmaps_cmd->add_option("--m", gt_m, "rays per cluster");
  gtmaps_cmd->add_option("--shrink-ratio", gt_ratio, "shrink ratio");
  gtmaps_cmd->add_option("-o,--out", gt_out, "output container")->required();

  // decode
  auto* decode_cmd = app.add_subcommand("decode", "prediction maps -> text polygons");
  std::string dec_maps, dec_read = "nearest", dec_out;
  double dec_threshold = 0.5;
  int dec_min_area = 16, dec_n = 5, dec_m = 0;
  bool dec_trace = false;
  decode_cmd->add_option("--maps", dec_maps, "container file")->required()->check(CLI::ExistingFile);
  decode_cmd->add_option("--threshold", dec_threshold, "binarization threshold");
  decode_cmd->add_option("--min-area", dec_min_area, "minimum component area, px");
  decode_cmd->add_option("--n", dec_n, "clusters per instance");
  decode_cmd->add_option("--m", dec_m, "expected ray channel count (validated)");
  decode_cmd->add_option("--read-mode", dec_read, "distance read mode")
      ->check(CLI::IsMember({"nearest", "mean3"}));
  decode_cmd->add_flag("--trace", dec_trace, "dump per-stage debug polygons");
  decode_cmd->add_option("-o,--out", dec_out, "output file (default stdout)");

  // roundtrip
  auto* rt_cmd = app.add_subcommand("roundtrip", "annotations -> encode/decode IoU table");
  AnnotationOptions rt_ann;
  rt_ann.attach(rt_cmd);
  int rt_n = 5, rt_m = 8;
  double rt_ratio = 0.4;
  std::string rt_out;
  rt_cmd->add_option("--n", rt_n, "clusters per instance");
  rt_cmd->add_option("--m", rt_m, "rays per cluster");
  rt_cmd->add_option("--shrink-ratio", rt_ratio, "shrink ratio");
  rt_cmd->add_option("-o,--out", rt_out, "output file (default stdout)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "detections + annotations -> P/R/F report");
  AnnotationOptions eval_ann;
  eval_ann.attach(eval_cmd);
  std::string eval_dets, eval_out;
  double eval_iou = 0.5;
  bool eval_count_difficult = false;
  eval_cmd->add_option("--dets", eval_dets, "detection file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--iou-threshold", eval_iou, "match threshold");
  eval_cmd->add_flag("--count-difficult", eval_count_difficult,
                     "count don't-care ground truth instead of ignoring it");
  eval_cmd->add_option("-o,--out", eval_out, "output file (default stdout)");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate sine-ribbon annotations");
  SynthParams synth_params;
  std::string synth_out;
  synth_cmd->add_option("--seed", synth_params.seed, "random seed");
  synth_cmd->add_option("--count", synth_params.count, "instance count");
  synth_cmd->add_option("--amplitude", synth_params.amplitude, "sine amplitude, px");
  synth_cmd->add_option("--wavelength", synth_params.wavelength, "sine wavelength, px");
  synth_cmd->add_option("--half-width", synth_params.half_width, "ribbon half-width, px");
  synth_cmd->add_option("--length", synth_params.length, "ribbon length, px");
  synth_cmd->add_option("--height", synth_params.canvas_height, "canvas height");
  synth_cmd->add_option("--width", synth_params.canvas_width, "canvas width");
  synth_cmd->add_option("--max-rotation", synth_params.max_rotation, "max |rotation|, radians");
  synth_cmd->add_option("-o,--out", synth_out, "output file (default stdout)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "decode timing per pipeline stage");
  std::string bench_maps, bench_read = "nearest", bench_out;
  int bench_reps = 20, bench_min_area = 16, bench_n = 5;
  double bench_threshold = 0.5;
  bench_cmd->add_option("--maps", bench_maps, "container file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--reps", bench_reps, "repetitions")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--threshold", bench_threshold, "binarization threshold");
  bench_cmd->add_option("--min-area", bench_min_area, "minimum component area, px");
  bench_cmd->add_option("--n", bench_n, "clusters per instance");
  bench_cmd->add_option("--read-mode", bench_read, "distance read mode")
      ->check(CLI::IsMember({"nearest", "mean3"}));
  bench_cmd->add_option("-o,--out", bench_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (encode_cmd->parsed()) {
      return run_encode(encode_ann, enc_height, enc_width, enc_n, enc_m, enc_ratio, enc_axis,
                        enc_out);
    }
    if (gtmaps_cmd->parsed()) {
      return run_gtmaps(gtmaps_ann, gt_height, gt_width, gt_m, gt_ratio, gt_out);
    }
    if (decode_cmd->parsed()) {
      return run_decode(dec_maps, dec_threshold, dec_min_area, dec_n, dec_m, dec_read, dec_trace,
                        dec_out);
    }
    if (rt_cmd->parsed()) {
      return run_roundtrip(rt_ann, rt_n, rt_m, rt_ratio, rt_out);
    }
    if (eval_cmd->parsed()) {
      return run_eval(eval_dets, eval_ann, eval_iou, eval_count_difficult, eval_out);
    }
    if (synth_cmd->parsed()) {
      return run_synth(synth_params, synth_out);
    }
    if (bench_cmd->parsed()) {
      return run_bench(bench_maps, bench_reps, bench_threshold, bench_min_area, bench_n,
                       bench_read, bench_out);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 1;
}
