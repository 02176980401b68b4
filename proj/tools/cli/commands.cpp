// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "annotation_service.hpp"
#include "cornerbox/annotation_io.hpp"
#include "cornerbox/error.hpp"
#include "cornerbox/kitti_io.hpp"
#include "cornerbox/pipeline.hpp"
#include "cornerbox/sensitivity.hpp"

namespace cornerbox::cli {

namespace {

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(',', start);
    out.push_back(parse_number(std::string_view(text).substr(start, end - start), what));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

struct ConvertArgs {
  std::string labels, clouds, calib, out;
  double visibility_radius = 0.3;
  int camera = 2;
};

struct RecoverArgs {
  std::string annotations, calib, clouds, out;
  int camera = 2;
  bool no_cloud_extent = false;
  bool no_image_extent = false;
  std::optional<double> diagonal_length, diagonal_width;
};

struct SweepArgs {
  std::string scheme, param, range, out;
  std::string box = "0,0,3.9,1.6,0";
  int corner = 0;
  std::string noise = "none";
  int trials = 1000;
  std::uint64_t seed = 42;
};

struct CompareArgs {
  double noise = 0.1;
  std::optional<double> angle_noise;
  int trials = 10000;
  std::uint64_t seed = 42;
  int corner = 0;
  std::string box = "0,0,3.9,1.6,0";
  std::string out;
};

struct ServeArgs {
  std::string data;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t decimate = 50000;
  int camera = 2;
};

BoxBEV parse_box(const std::string& text) {
  const auto v = parse_list(text, "--box");
  if (v.size() != 5) {
    throw Error(ErrorCode::kInvalidArgument, "--box: expected x,y,l,w,theta");
  }
  const BoxBEV box{v[0], v[1], v[2], v[3], v[4]};
  if (!box.valid()) throw Error(ErrorCode::kInvalidArgument, "--box: invalid box");
  return box;
}

int do_convert(const ConvertArgs& a, std::ostream& out) {
  ConvertOptions opts;
  opts.visibility_radius = a.visibility_radius;
  opts.camera = a.camera;
  const ConvertResult result = convert_dataset(a.labels, a.clouds, a.calib, opts);
  write_file_atomic(a.out, serialize_annotation_lines(result.annotations));
  out << "frames " << result.frames << '\n';
  out << "objects " << result.annotations.size() << '\n';
  for (std::size_t k = 0; k < result.corner_histogram.size(); ++k) {
    out << "corners " << k << ' ' << result.corner_histogram[k] << '\n';
  }
  out << "weight-0 objects " << result.weightless() << '\n';
  return 0;
}

int do_recover(const RecoverArgs& a, std::ostream& out) {
  const auto anns = parse_annotation_lines(read_text_file(a.annotations));
  RecoverOptions opts;
  opts.extent_from_cloud = !a.no_cloud_extent;
  opts.extent_from_image = !a.no_image_extent;
  opts.size_prior.length = a.diagonal_length;
  opts.size_prior.width = a.diagonal_width;
  const RecoverResult result = recover_annotations(anns, a.calib, a.clouds, opts, a.camera);
  write_recover_output(result, a.out);

  std::size_t ok = 0;
  std::map<std::string, std::size_t> reasons;
  for (const auto& o : result.objects) {
    if (o.box) ++ok;
    if (o.reason) ++reasons[std::string(to_string(*o.reason))];
  }
  out << "recovered " << ok << " of " << result.objects.size() << '\n';
  for (const auto& [reason, n] : reasons) out << "reason " << reason << ' ' << n << '\n';
  for (const auto& o : result.objects) {
    if (o.reason) {
      out << o.frame << ' ' << o.object << ' ' << to_string(*o.reason) << '\n';
    }
  }
  return 0;
}

int do_sweep(const SweepArgs& a, std::ostream& out) {
  const Scheme scheme = parse_scheme(a.scheme);
  const auto r = parse_range(a.range);
  PerturbationSpec spec;
  spec.parameter = a.param;
  spec.values = make_range(r[0], r[1], r[2]);
  if (a.noise != "none") {
    NoiseModel noise;
    noise.distribution =
        a.noise == "uniform" ? NoiseDistribution::kUniform : NoiseDistribution::kGaussian;
    noise.trials = a.trials;
    noise.seed = a.seed;
    spec.noise = noise;
  }
  const SensitivityCurve curve = sweep(parse_box(a.box), scheme, spec, a.corner);
  {
    std::ostringstream csv;
    write_csv(csv, curve);
    write_file_atomic(a.out, csv.str());
  }
  out << "rows " << curve.rows.size() << '\n';
  out << "min_mean_iou " << format_double(min_mean_iou(curve)) << '\n';
  for (double level : {0.5, 0.33, 0.25}) {
    const auto at = first_crossing(curve, level);
    out << "crossing " << format_double(level) << ' '
        << (at ? format_double(*at) : std::string("none")) << '\n';
  }
  return 0;
}

int do_compare(const CompareArgs& a, std::ostream& out) {
  ComparisonOptions opts;
  opts.noise_scale = a.noise;
  opts.angle_scale = a.angle_noise;
  opts.trials = a.trials;
  opts.seed = a.seed;
  opts.corner = a.corner;
  const auto scores = compare_schemes(parse_box(a.box), opts);
  std::ostringstream table;
  table << "scheme,mean_iou,failures\n";
  for (const auto& s : scores) {
    table << to_string(s.scheme) << ',' << format_double(s.mean_iou) << ',' << s.failures << '\n';
  }
  if (!a.out.empty()) write_file_atomic(a.out, table.str());
  out << table.str();
  return 0;
}

int do_serve(const ServeArgs& a, std::ostream& err) {
  std::string data = a.data;
  if (data.empty()) {
    if (const char* env = std::getenv("CORNERBOX_DATA")) data = env;
  }
  if (data.empty()) {
    err << "serve: --data not given and CORNERBOX_DATA is unset\n";
    return 2;
  }
  service::ServiceOptions opts;
  opts.data_dir = data;
  opts.default_decimate = a.decimate;
  opts.camera = a.camera;
  return service::serve(opts, a.host, a.port);
}

}  // namespace

std::array<double, 3> parse_range(const std::string& text) {
  std::array<std::string_view, 3> parts;
  std::string_view rest = text;
  for (int i = 0; i < 3; ++i) {
    const std::size_t colon = rest.find(':');
    if ((i < 2) != (colon != std::string_view::npos)) {
      throw Error(ErrorCode::kInvalidArgument, "--range: expected A:B:STEP, got '" + text + "'");
    }
    parts[i] = rest.substr(0, colon);
    if (i < 2) rest.remove_prefix(colon + 1);
  }
  return {parse_number(parts[0], "--range"), parse_number(parts[1], "--range"),
          parse_number(parts[2], "--range")};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Corner-based 3D box tools", "cornerbox"};
  app.require_subcommand(1);

  ConvertArgs conv;
  auto* convert = app.add_subcommand("convert", "Full labels to weak corner annotations");
  convert->add_option("--labels", conv.labels, "Label directory")->required();
  convert->add_option("--clouds", conv.clouds, "Point-cloud directory")->required();
  convert->add_option("--calib", conv.calib, "Calibration directory")->required();
  convert->add_option("--out", conv.out, "Output annotation file (JSON lines)")->required();
  convert->add_option("--visibility-radius", conv.visibility_radius, "Metres")
      ->capture_default_str();
  convert->add_option("--camera", conv.camera, "Projection camera 0-3")->capture_default_str();

  RecoverArgs rec;
  auto* recover = app.add_subcommand("recover", "Weak annotations to full 3D boxes");
  recover->add_option("--annotations", rec.annotations, "Annotation file")->required();
  recover->add_option("--calib", rec.calib, "Calibration directory")->required();
  recover->add_option("--clouds", rec.clouds, "Point-cloud directory")->required();
  recover->add_option("--out", rec.out, "Output directory for labels and report")->required();
  recover->add_option("--camera", rec.camera, "Projection camera 0-3")->capture_default_str();
  recover->add_flag("--no-image-extent", rec.no_image_extent,
                    "Do not fit an adjacent pair's open dimension to the image box");
  recover->add_flag("--no-cloud-extent", rec.no_cloud_extent,
                    "Do not estimate the open dimension from the cloud");
  recover->add_option("--diagonal-length", rec.diagonal_length, "Length for diagonal pairs");
  recover->add_option("--diagonal-width", rec.diagonal_width, "Width for diagonal pairs");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "IoU sensitivity of one encoding slot");
  sweep_cmd->add_option("--scheme", sw.scheme, "Encoding scheme")->required();
  sweep_cmd->add_option("--param", sw.param, "Slot name")->required();
  sweep_cmd->add_option("--range", sw.range, "A:B:STEP")->required();
  sweep_cmd->add_option("--out", sw.out, "Output CSV")->required();
  sweep_cmd->add_option("--box", sw.box, "x,y,l,w,theta")->capture_default_str();
  sweep_cmd->add_option("--corner", sw.corner, "Reference corner index")->capture_default_str();
  sweep_cmd->add_option("--noise", sw.noise, "none, gaussian or uniform")
      ->check(CLI::IsMember({"none", "gaussian", "uniform"}))
      ->capture_default_str();
  sweep_cmd->add_option("--trials", sw.trials, "Draws per row with --noise")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sw.seed, "Random seed")->capture_default_str();

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Mean IoU of every scheme under slot noise");
  compare->add_option("--noise", cmp.noise, "Metric noise sigma, metres")->capture_default_str();
  compare->add_option("--angle-noise", cmp.angle_noise, "Angle noise sigma, radians");
  compare->add_option("--trials", cmp.trials, "Trials per scheme")->capture_default_str();
  compare->add_option("--seed", cmp.seed, "Random seed")->capture_default_str();
  compare->add_option("--corner", cmp.corner, "Reference corner index")->capture_default_str();
  compare->add_option("--box", cmp.box, "x,y,l,w,theta")->capture_default_str();
  compare->add_option("--out", cmp.out, "Optional CSV copy of the table");

  ServeArgs srv;
  auto* serve_cmd = app.add_subcommand("serve", "Annotation HTTP service");
  serve_cmd->add_option("--data", srv.data, "Data directory (default: $CORNERBOX_DATA)");
  serve_cmd->add_option("--host", srv.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", srv.port, "Port")->capture_default_str();
  serve_cmd->add_option("--decimate", srv.decimate, "Default BEV point cap")
      ->capture_default_str();
  serve_cmd->add_option("--camera", srv.camera, "Projection camera 0-3")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*convert) return do_convert(conv, out);
    if (*recover) return do_recover(rec, out);
    if (*sweep_cmd) return do_sweep(sw, out);
    if (*compare) return do_compare(cmp, out);
    if (*serve_cmd) return do_serve(srv, err);
  } catch (const Error& e) {
    const bool usage = e.code() == ErrorCode::kUnknownParameter ||
                       e.code() == ErrorCode::kUnsupportedScheme ||
                       e.code() == ErrorCode::kInvalidArgument;
    err << (usage ? "usage error: " : "error: ") << e.what() << '\n';
    return usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace cornerbox::cli
