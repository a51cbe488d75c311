#include "nlos/cli.hpp"

#include "nlos/dataset.hpp"
#include "nlos/error.hpp"
#include "nlos/hash.hpp"
#include "nlos/optimizer.hpp"
#include "nlos/radiosity.hpp"
#include "nlos/renderer.hpp"
#include "nlos/report.hpp"
#include "nlos/scene.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace nlos {

namespace {

constexpr std::uint64_t kRenderNoiseSalt = 0x72656e646572ULL;  // "render"

struct Options {
  std::string scene;
  int voxel = 0;
  int m = 1;
  std::optional<double> budget;
  std::optional<double> cap;
  std::string mode;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;
  std::optional<int> resolution;
  std::optional<double> noise_sigma;
  bool inference_set = false;
  std::string config;
  std::string plan;
  std::string object;
  std::vector<double> centroid;
  std::string raster;
  std::string report;
  std::string manifest;
  std::string predictions;
  std::string curve;
  std::string curve_out;
  std::vector<int> supports;
  std::optional<int> samples;
  std::vector<double> waypoints;
  int steps = 0;
  bool m_given = false;
  std::optional<double> exposure;
  std::string name;
};

void configure_logging(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("nlos-radiant", sink);
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("NLOS_RADIANT_LOG")) {
    level = spdlog::level::from_str(env);
  }
  logger->set_level(level);
  spdlog::set_default_logger(logger);
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) {
    throw IoError(fmt::format("cannot write '{}'", path));
  }
  fn(file);
  if (!file) {
    throw IoError(fmt::format("write to '{}' failed", path));
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot read '{}'", path));
  }
  return in;
}

void check_voxel(const Scene& scene, int voxel) {
  if (voxel < 0 || voxel >= scene.grid.size()) {
    throw ValidationError(fmt::format("voxel {} outside [0, {})", voxel, scene.grid.size()));
  }
}

IlluminationPlan build_plan(const Transport& transport, const Options& o) {
  const Scene& scene = transport.scene();
  check_voxel(scene, o.voxel);
  const double budget = o.budget.value_or(scene.light.power);
  const double cap = o.cap.value_or(budget);
  const std::string mode = o.mode.empty() ? "top-m" : o.mode;
  if (mode == "floodlight") {
    IlluminationPlan plan = floodlight_plan(scene.patch_count(), budget, o.m);
    plan.voxel = o.voxel;
    plan.objective = nlos_objective(transport, plan, o.voxel);
    plan.unreachable = plan.objective == 0.0;
    return plan;
  }
  const PatchRanking ranking = rank_patches(transport, o.voxel);
  if (mode == "top-m") {
    return select_top_m(ranking, o.m, budget);
  }
  if (mode == "distribute") {
    return distribute_power(ranking, o.m, budget, cap);
  }
  if (mode == "method1" || mode == "method2") {
    BaselinePlans b = baseline_plans(ranking, o.m, budget, cap, o.seed);
    return mode == "method1" ? b.method1 : b.method2;
  }
  throw ValidationError(
      fmt::format("unknown plan mode '{}' (top-m, distribute, method1, method2, floodlight)", mode));
}

std::optional<NlosProxy> object_proxy(const Scene& scene, const Options& o, std::uint64_t seed) {
  if (o.object.empty()) {
    return std::nullopt;
  }
  Vec3 centroid;
  if (!o.centroid.empty()) {
    centroid = Vec3(o.centroid[0], o.centroid[1], o.centroid[2]);
    if (!scene.grid.contains(centroid)) {
      throw ValidationError("object centroid lies outside the NLOS grid");
    }
  } else {
    check_voxel(scene, o.voxel);
    centroid = scene.grid.center(o.voxel);
  }
  std::mt19937_64 rng(seed);
  return make_object_proxy(scene.object(o.object), centroid, scene.wall_centroid(), rng);
}

int cmd_rank(const Options& o, const std::string& invocation, std::ostream& out) {
  const Transport transport(load_scene(o.scene));
  check_voxel(transport.scene(), o.voxel);
  const PatchRanking ranking = rank_patches(transport, o.voxel);
  emit(o.out, out, [&](std::ostream& s) {
    s << "# " << invocation << '\n';
    s << "rank,patch,contribution\n";
    for (std::size_t k = 0; k < ranking.order.size(); ++k) {
      s << fmt::format("{},{},{:.17g}\n", k + 1, ranking.order[k].patch, ranking.order[k].contribution);
    }
  });
  return kExitOk;
}

int cmd_plan(const Options& o, const std::string& invocation, std::ostream& out) {
  const Transport transport(load_scene(o.scene));
  const IlluminationPlan plan = build_plan(transport, o);
  if (o.out.empty() || o.out == "-") {
    out << "# " << invocation << '\n';
    write_plan(out, plan);
    return kExitOk;
  }
  emit(o.out, out, [&](std::ostream& s) {
    write_plan(s, plan);
    s << "# " << invocation << '\n';
  });
  out << fmt::format("objective {:.17g}\n", plan.objective);
  if (plan.unreachable) {
    out << "voxel unreachable\n";
  }
  return kExitOk;
}

int cmd_energy(const Options& o, const std::string& invocation, std::ostream& out) {
  const Transport transport(load_scene(o.scene));
  check_voxel(transport.scene(), o.voxel);
  std::vector<int> supports = o.supports;
  if (supports.empty()) {
    supports.resize(static_cast<std::size_t>(transport.size()));
    std::iota(supports.begin(), supports.end(), 1);
  }
  const double budget = o.budget.value_or(transport.scene().light.power);
  const std::vector<EnergyRow> rows = energy_curve(transport, o.voxel, supports, budget);
  emit(o.out, out, [&](std::ostream& s) {
    s << "# " << invocation << '\n';
    write_energy_csv(s, rows);
  });
  return kExitOk;
}

int cmd_dataset(const Options& o, const std::string& invocation, std::ostream& out) {
  const Scene scene = load_scene(o.scene);
  if (o.out.empty()) {
    throw ValidationError("dataset needs --out <directory>");
  }
  if (!o.waypoints.empty()) {
    if (o.waypoints.size() % 3 != 0) {
      throw ValidationError("--waypoints needs x,y,z triples");
    }
    std::vector<Vec3> points;
    for (std::size_t k = 0; k < o.waypoints.size(); k += 3) {
      points.emplace_back(o.waypoints[k], o.waypoints[k + 1], o.waypoints[k + 2]);
    }
    TrajectoryOptions t;
    if (!o.object.empty()) {
      t.object = o.object;
    }
    if (!o.mode.empty()) {
      t.lighting = LightingSpec::parse(o.mode);
    }
    t.budget = o.budget;
    t.cap = o.cap;
    t.m = o.m;
    t.resolution = o.resolution;
    t.seed = o.seed;
    const std::filesystem::path dir = std::filesystem::path(o.out) / (o.name.empty() ? "trajectory" : o.name);
    const DatasetManifest m = generate_trajectory(scene, points, o.steps, t, dir);
    emit((dir / "command.txt").string(), out, [&](std::ostream& s) { s << invocation << '\n'; });
    out << fmt::format("{} trajectory frames written to {}\n", m.records.size(), dir.string());
    return kExitOk;
  }

  GenerationConfig config;
  if (!o.config.empty()) {
    std::ifstream in = open_input(o.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(fmt::format("{}: {}", o.config, e.what()));
    }
    config = GenerationConfig::from_json(j);
  }
  if (!o.name.empty()) {
    config.name = o.name;
  }
  if (o.samples) {
    config.samples = *o.samples;
  }
  if (!o.mode.empty()) {
    config.lighting = LightingSpec::parse(o.mode);
  }
  if (o.budget) {
    config.budget = o.budget;
  }
  if (o.cap) {
    config.cap = o.cap;
  }
  if (o.m_given) {
    config.m = o.m;
  }
  if (o.resolution) {
    config.resolution = o.resolution;
  }
  if (o.noise_sigma) {
    config.noise_sigma = *o.noise_sigma;
  }
  if (o.inference_set) {
    config.inference_set = true;
  }
  if (o.exposure) {
    config.exposure = o.exposure;
  }
  config.threads = o.threads;
  const std::filesystem::path dir = std::filesystem::path(o.out) / config.name;
  const DatasetManifest m = generate(scene, config, o.seed, dir);
  emit((dir / "command.txt").string(), out, [&](std::ostream& s) { s << invocation << '\n'; });
  out << fmt::format("{} samples written to {} (manifest {})\n", m.records.size(), dir.string(),
                     manifest_hash(m).substr(0, 16));
  return kExitOk;
}

int cmd_score(const Options& o, std::ostream& out) {
  const DatasetManifest manifest = read_manifest(o.manifest);
  std::ifstream in = open_input(o.predictions);
  const std::vector<PredictionRecord> predictions = read_predictions(in);
  const Metrics metrics = score(manifest, predictions);
  emit(o.out, out, [&](std::ostream& s) { write_metrics_csv(s, metrics); });
  if (!o.curve.empty()) {
    std::vector<CurveRow> rows;
    std::string key;
    if (o.curve == "size") {
      rows = error_by_object_size(manifest, predictions);
      key = "object_area_m2";
    } else if (o.curve == "noise") {
      rows = error_by_noise(manifest, predictions);
      key = "noise_sigma";
    } else {
      throw ValidationError(fmt::format("unknown curve '{}' (size, noise)", o.curve));
    }
    emit(o.curve_out, out, [&](std::ostream& s) { write_curve_csv(s, key, rows); });
  }
  return kExitOk;
}

int cmd_render(const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    throw ValidationError("render needs --out <image.png>");
  }
  auto scene = std::make_shared<const Scene>(with_resolution(load_scene(o.scene), o.resolution));
  auto transport = std::make_shared<const Transport>(scene);
  const Renderer renderer(transport);
  IlluminationPlan plan;
  if (!o.plan.empty()) {
    std::ifstream in = open_input(o.plan);
    plan = read_plan(in);
  } else {
    plan = build_plan(*transport, o);
  }
  plan.validate(scene->patch_count());
  const std::optional<NlosProxy> proxy = object_proxy(*scene, o, o.seed);
  const RadiosityReport report = evaluate(*transport, plan, proxy);
  const Image clean = renderer.render(report);
  const double exposure = o.exposure ? *o.exposure : auto_exposure(renderer.render(plan, std::nullopt));
  const double sigma = o.noise_sigma.value_or(0.0) * clean.mean();
  const Image noisy = add_noise(clean, sigma, mix64(o.seed ^ kRenderNoiseSalt));
  write_png(o.out, quantize(noisy, 16, exposure));
  if (!o.raster.empty()) {
    emit(o.raster, out, [&](std::ostream& s) { write_float_raster(s, noisy); });
  }
  if (!o.report.empty()) {
    emit(o.report, out, [&](std::ostream& s) { write_report_csv(s, report); });
  }
  out << fmt::format("B_LOS {:.17g}\nB_NLOS {:.17g}\nB_total {:.17g}\n", report.los, report.nlos, report.total);
  return kExitOk;
}

std::string join_args(const std::vector<std::string>& args) {
  std::string s = "nlos-radiant";
  for (const std::string& a : args) {
    s += ' ';
    s += a;
  }
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging(err);
  Options o;
  CLI::App app{"Adaptive-lighting radiosity simulator for non-line-of-sight scenes", "nlos-radiant"};
  app.require_subcommand(1);

  const auto scene_opt = [&](CLI::App* sub) {
    sub->add_option("--scene", o.scene, "Scene JSON file")->required();
  };
  const auto plan_opts = [&](CLI::App* sub) {
    sub->add_option("--voxel", o.voxel, "NLOS voxel index");
    sub->add_option("--m", o.m, "Number of lit patches")->check(CLI::PositiveNumber);
    sub->add_option("--budget", o.budget, "Total exitance T (default: scene light power)");
    sub->add_option("--cap", o.cap, "Per-patch exitance cap I_o (default: budget)");
    sub->add_option("--seed", o.seed, "Seed for random selections");
  };

  CLI::App* rank = app.add_subcommand("rank", "Rank LOS patches by NLOS contribution for a voxel");
  scene_opt(rank);
  rank->add_option("--voxel", o.voxel, "NLOS voxel index")->required();
  rank->add_option("--out", o.out, "Output CSV (default: stdout)");

  CLI::App* plan = app.add_subcommand("plan", "Build an illumination plan for a voxel");
  scene_opt(plan);
  plan_opts(plan);
  plan->add_option("--mode", o.mode, "top-m, distribute, method1, method2 or floodlight");
  plan->add_option("--out", o.out, "Output plan file (default: stdout)");

  CLI::App* energy = app.add_subcommand("energy", "NLOS radiosity against support size");
  scene_opt(energy);
  energy->add_option("--voxel", o.voxel, "NLOS voxel index");
  energy->add_option("--budget", o.budget, "Total exitance T (default: scene light power)");
  energy->add_option("--supports", o.supports, "Support sizes (default: 1..N)")->delimiter(',');
  energy->add_option("--out", o.out, "Output CSV (default: stdout)");

  CLI::App* dataset = app.add_subcommand("dataset", "Generate a labelled image dataset");
  scene_opt(dataset);
  dataset->add_option("--config", o.config, "Generation config JSON; flags override it")
      ;
  dataset->add_option("--out", o.out, "Dataset root; files go to <out>/<name>/")->required();
  dataset->add_option("--name", o.name, "Dataset name (default: from --config, else \"dataset\")");
  dataset->add_option("--seed", o.seed, "Master seed");
  dataset->add_option("--samples", o.samples, "Number of samples");
  dataset->add_option("--mode", o.mode, "adaptive-optimal, ranked-<k>, random-spot or distributed");
  dataset->add_option("--budget", o.budget, "Total exitance T");
  dataset->add_option("--cap", o.cap, "Per-patch exitance cap I_o (distributed mode)");
  CLI::Option* dataset_m =
      dataset->add_option("--m", o.m, "Patch limit (distributed mode)")->check(CLI::PositiveNumber);
  dataset->add_option("--resolution", o.resolution, "Square image resolution")->check(CLI::PositiveNumber);
  dataset->add_option("--exposure", o.exposure, "Fixed exposure scale (default: brightest LOS-only pixel at 0.8)")
      ->check(CLI::PositiveNumber);
  dataset->add_option("--noise-sigma", o.noise_sigma, "Gaussian noise sigma relative to the image mean")
      ->check(CLI::NonNegativeNumber);
  dataset->add_flag("--inference-set", o.inference_set, "Also render every voxel's lighting per test sample");
  dataset->add_option("--threads", o.threads, "Worker threads (outputs do not depend on it)")
      ->check(CLI::PositiveNumber);
  dataset->add_option("--waypoints", o.waypoints, "Trajectory waypoints x,y,z,x,y,z,...")->delimiter(',');
  dataset->add_option("--steps", o.steps, "Trajectory frame count");
  dataset->add_option("--object", o.object, "Trajectory object class");

  CLI::App* score_cmd = app.add_subcommand("score", "Score localization or identification predictions");
  score_cmd->add_option("--manifest", o.manifest, "Dataset manifest.jsonl")->required();
  score_cmd->add_option("--predictions", o.predictions, "Predictions CSV")->required();
  score_cmd->add_option("--out", o.out, "Metrics CSV (default: stdout)");
  score_cmd->add_option("--curve", o.curve, "Also report error by 'size' or 'noise'");
  score_cmd->add_option("--curve-out", o.curve_out, "Curve CSV (default: stdout)");

  CLI::App* render_cmd = app.add_subcommand("render", "Render the camera image for a plan");
  scene_opt(render_cmd);
  plan_opts(render_cmd);
  render_cmd->add_option("--mode", o.mode, "Plan mode when --plan is absent");
  render_cmd->add_option("--plan", o.plan, "Plan file");
  render_cmd->add_option("--object", o.object, "Hidden object class (default: none)");
  render_cmd->add_option("--centroid", o.centroid, "Object centroid x,y,z (default: voxel center)")
      ->delimiter(',')
      ->expected(3);
  render_cmd->add_option("--out", o.out, "Output 16-bit PNG")->required();
  render_cmd->add_option("--raster", o.raster, "Also write the linear float raster");
  render_cmd->add_option("--report", o.report, "Also write the per-patch radiosity CSV");
  render_cmd->add_option("--resolution", o.resolution, "Square image resolution")->check(CLI::PositiveNumber);
  render_cmd->add_option("--exposure", o.exposure, "Fixed exposure scale (default: brightest LOS-only pixel at 0.8)")
      ->check(CLI::PositiveNumber);
  render_cmd->add_option("--noise-sigma", o.noise_sigma, "Gaussian noise sigma relative to the image mean")
      ->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  o.m_given = dataset_m->count() > 0;
  const std::string invocation = join_args(args);
  try {
    if (*rank) {
      return cmd_rank(o, invocation, out);
    }
    if (*plan) {
      return cmd_plan(o, invocation, out);
    }
    if (*energy) {
      return cmd_energy(o, invocation, out);
    }
    if (*dataset) {
      return cmd_dataset(o, invocation, out);
    }
    if (*score_cmd) {
      return cmd_score(o, out);
    }
    return cmd_render(o, out);
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace nlos
