#include "htsne/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>

#include "htsne/affinity.hpp"
#include "htsne/error.hpp"
#include "htsne/io.hpp"
#include "htsne/metrics.hpp"
#include "htsne/pca.hpp"
#include "htsne/svg.hpp"

namespace htsne {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr std::size_t kAutoExactNeighbors = 5000;

// Problems the user can fix by changing the command line.
class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

std::string solver_name(std::optional<Solver> s) {
  if (!s) return "auto";
  return *s == Solver::Exact ? "exact" : "accelerated";
}

std::optional<Solver> parse_solver(const std::string& s) {
  if (s == "auto") return std::nullopt;
  if (s == "exact") return Solver::Exact;
  if (s == "accelerated") return Solver::Accelerated;
  throw UsageError("solver must be exact, accelerated or auto, got '" + s + "'");
}

std::string neighbors_name(std::optional<NeighborMode> m) {
  if (!m) return "auto";
  return *m == NeighborMode::Exact ? "exact" : "approximate";
}

std::optional<NeighborMode> parse_neighbors(const std::string& s) {
  if (s == "auto") return std::nullopt;
  if (s == "exact") return NeighborMode::Exact;
  if (s == "approximate") return NeighborMode::Approximate;
  throw UsageError("neighbors must be exact, approximate or auto, got '" + s + "'");
}

InputFormat parse_format(const std::string& s) {
  if (s == "csv") return InputFormat::Csv;
  if (s == "idx") return InputFormat::Idx;
  throw UsageError("format must be csv or idx, got '" + s + "'");
}

InitMode parse_init(const std::string& s) {
  if (s == "pca") return InitMode::Pca;
  if (s == "random") return InitMode::Random;
  throw UsageError("init must be pca or random, got '" + s + "'");
}

KernelVariant parse_variant(const std::string& s) {
  if (s == "simplified") return KernelVariant::Simplified;
  if (s == "classic") return KernelVariant::Classic;
  throw UsageError("variant must be simplified or classic, got '" + s + "'");
}

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || v <= 0) throw UsageError("metrics k values must be positive integers, got '" + part + "'");
    ks.push_back(static_cast<std::size_t>(v));
  }
  if (ks.empty()) throw UsageError("--metrics needs at least one k");
  return ks;
}

std::string alpha_tag(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

Json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

struct Dataset {
  DataMatrix original;
  Labels labels;
};

fs::path require_file(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("input file not found: " + path);
  return path;
}

IdxData load_idx_dir(const fs::path& dir) {
  const std::pair<const char*, const char*> sets[] = {{"train-images-idx3-ubyte", "train-labels-idx1-ubyte"},
                                                      {"t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"},
                                                      {"train-images.idx3-ubyte", "train-labels.idx1-ubyte"},
                                                      {"t10k-images.idx3-ubyte", "t10k-labels.idx1-ubyte"}};
  std::vector<std::pair<fs::path, fs::path>> files;
  for (const auto& [images, labels] : sets) {
    if (fs::exists(dir / images) && fs::exists(dir / labels)) files.emplace_back(dir / images, dir / labels);
  }
  if (files.empty()) {
    throw UsageError("no MNIST IDX image/label pairs found in " + dir.string() +
                     " (expected train-images-idx3-ubyte and train-labels-idx1-ubyte, optionally t10k-*)");
  }
  return load_idx_concat(files);
}

Dataset load_dataset(const RunConfig& config) {
  Dataset ds;
  if (config.input.empty()) {
    const std::uint64_t seed = config.data_seed.value_or(config.seed);
    LabeledData gen;
    if (config.preset == "toy10") {
      gen = gen_gaussian_clusters(100, 10, 10, 4.0, seed);
    } else if (config.preset == "dumbbells") {
      gen = gen_dumbbells(seed);
    } else if (config.preset == "two-clusters") {
      gen = gen_two_clusters(seed);
    } else if (config.preset == "mnist") {
      throw UsageError("the mnist preset needs --input pointing at the MNIST IDX files or their directory");
    } else {
      throw UsageError("--input is required unless a synthetic preset is chosen");
    }
    ds.original = std::move(gen.data);
    ds.labels = std::move(gen.labels);
    return ds;
  }

  const fs::path input = require_file(config.input);
  if (config.format == InputFormat::Csv) {
    CsvTable table = load_csv(input);
    ds.original = std::move(table.data);
    if (table.labels) ds.labels = std::move(*table.labels);
  } else if (fs::is_directory(input)) {
    IdxData idx = load_idx_dir(input);
    ds.original = std::move(idx.data);
    ds.labels = std::move(idx.labels);
  } else if (!config.labels.empty()) {
    IdxData idx = load_idx(input, require_file(config.labels));
    ds.original = std::move(idx.data);
    ds.labels = std::move(idx.labels);
  } else {
    ds.original = parse_idx_images(read_file(input));
  }
  return ds;
}

bool separable(const Labels& labels) {
  std::map<int, std::size_t> counts;
  for (int l : labels) {
    if (l >= 0) ++counts[l];
  }
  if (counts.size() < 2) return false;
  for (const auto& [l, c] : counts) {
    if (c < 2) return false;
  }
  return true;
}

std::string profiles_csv(const std::vector<ClusterProfile>& profiles, std::size_t dim) {
  std::string out = "cluster,size";
  for (std::size_t c = 0; c < dim; ++c) out += ",f" + std::to_string(c);
  out += '\n';
  char buf[40];
  for (const auto& p : profiles) {
    out += std::to_string(p.label) + "," + std::to_string(p.size);
    for (double v : p.mean) {
      std::snprintf(buf, sizeof buf, ",%.10g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Json loss_json(const std::vector<LossSample>& trace) {
  Json arr = Json::array();
  for (const auto& s : trace) arr.push_back({{"iteration", s.iteration}, {"kl", s.kl}});
  return arr;
}

void write(PipelineResult& result, const std::string& name, const std::string& contents) {
  const fs::path path = result.out_dir / name;
  write_file(path, contents);
  result.files.push_back(path);
}

}  // namespace

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "toy10" || name == "dumbbells" || name == "two-clusters") {
    c.perplexity = 50.0;
  } else if (name == "mnist") {
    c.perplexity = 50.0;
    c.optimizer.learning_rate = 1000.0;
    c.init = InitMode::Pca;
    c.pca_dims = 50;
    c.format = InputFormat::Idx;
    c.solver = Solver::Accelerated;
  } else {
    throw UsageError("unknown preset '" + name + "' (choose toy10, dumbbells, two-clusters or mnist)");
  }
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  Json j;
  j["preset"] = c.preset;
  j["input"] = c.input;
  j["format"] = c.format == InputFormat::Csv ? "csv" : "idx";
  j["labels"] = c.labels;
  j["alpha"] = c.alpha;
  j["variant"] = c.variant == KernelVariant::Classic ? "classic" : "simplified";
  j["perplexity"] = c.perplexity;
  j["solver"] = solver_name(c.solver);
  j["iterations"] = c.optimizer.iterations;
  j["learning_rate"] = c.optimizer.learning_rate;
  j["early_exaggeration"] = c.optimizer.early_exaggeration;
  j["early_exaggeration_length"] = c.optimizer.early_exaggeration_length;
  j["momentum_initial"] = c.optimizer.momentum_initial;
  j["momentum_final"] = c.optimizer.momentum_final;
  j["momentum_switch_iter"] = c.optimizer.momentum_switch_iter;
  j["late_exaggeration"] = c.optimizer.late_exaggeration;
  j["loss_every"] = c.optimizer.loss_every;
  j["strict_deterministic"] = c.optimizer.strict_deterministic;
  j["threads"] = c.optimizer.threads;
  j["nodes_per_interval"] = c.interp.nodes_per_interval;
  j["min_boxes"] = c.interp.min_boxes;
  j["max_box_width"] = c.interp.max_box_width;
  j["alpha_refinement"] = c.interp.alpha_refinement;
  j["max_boxes"] = c.interp.max_boxes;
  j["init"] = c.init == InitMode::Pca ? "pca" : "random";
  j["pca_dims"] = c.pca_dims ? Json(*c.pca_dims) : Json(nullptr);
  j["seed"] = c.seed;
  j["data_seed"] = c.data_seed ? Json(*c.data_seed) : Json(nullptr);
  j["neighbors"] = neighbors_name(c.neighbors);
  j["out"] = c.out;
  j["sweep_alphas"] = c.sweep_alphas;
  j["metrics"] = c.metrics_k;
  j["knn_queries"] = c.knn_queries;
  j["dbscan_eps"] = c.dbscan_eps ? Json(*c.dbscan_eps) : Json(nullptr);
  j["dbscan_min_pts"] = c.dbscan_min_pts;
  j["verbose"] = c.verbose;
  return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text, RunConfig c) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "preset") c.preset = v.get<std::string>();
      else if (key == "input") c.input = v.get<std::string>();
      else if (key == "format") c.format = parse_format(v.get<std::string>());
      else if (key == "labels") c.labels = v.get<std::string>();
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "variant") c.variant = parse_variant(v.get<std::string>());
      else if (key == "perplexity") c.perplexity = v.get<double>();
      else if (key == "solver") c.solver = parse_solver(v.get<std::string>());
      else if (key == "iterations") c.optimizer.iterations = v.get<int>();
      else if (key == "learning_rate") c.optimizer.learning_rate = v.get<double>();
      else if (key == "early_exaggeration") c.optimizer.early_exaggeration = v.get<double>();
      else if (key == "early_exaggeration_length") c.optimizer.early_exaggeration_length = v.get<int>();
      else if (key == "momentum_initial") c.optimizer.momentum_initial = v.get<double>();
      else if (key == "momentum_final") c.optimizer.momentum_final = v.get<double>();
      else if (key == "momentum_switch_iter") c.optimizer.momentum_switch_iter = v.get<int>();
      else if (key == "late_exaggeration") c.optimizer.late_exaggeration = v.get<double>();
      else if (key == "loss_every") c.optimizer.loss_every = v.get<int>();
      else if (key == "strict_deterministic") c.optimizer.strict_deterministic = v.get<bool>();
      else if (key == "threads") c.optimizer.threads = v.get<int>();
      else if (key == "nodes_per_interval") c.interp.nodes_per_interval = v.get<int>();
      else if (key == "min_boxes") c.interp.min_boxes = v.get<int>();
      else if (key == "max_box_width") c.interp.max_box_width = v.get<double>();
      else if (key == "alpha_refinement") c.interp.alpha_refinement = v.get<bool>();
      else if (key == "max_boxes") c.interp.max_boxes = v.get<int>();
      else if (key == "init") c.init = parse_init(v.get<std::string>());
      else if (key == "pca_dims") c.pca_dims = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "data_seed") {
        c.data_seed = v.is_null() ? std::nullopt : std::optional<std::uint64_t>(v.get<std::uint64_t>());
      }
      else if (key == "neighbors") c.neighbors = parse_neighbors(v.get<std::string>());
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "sweep_alphas") c.sweep_alphas = v.get<std::string>();
      else if (key == "metrics") c.metrics_k = v.get<std::vector<std::size_t>>();
      else if (key == "knn_queries") c.knn_queries = v.get<std::size_t>();
      else if (key == "dbscan_eps") c.dbscan_eps = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      else if (key == "dbscan_min_pts") c.dbscan_min_pts = v.get<int>();
      else if (key == "verbose") c.verbose = v.get<bool>();
      else throw UsageError("unknown config field '" + key + "'");
    } catch (const Json::exception& e) {
      throw UsageError("config field '" + key + "' has the wrong type: " + e.what());
    }
  }
  return c;
}

void validate(const RunConfig& c) {
  if (!std::isfinite(c.alpha) || c.alpha <= 0.0) throw UsageError("alpha must be positive");
  if (c.variant == KernelVariant::Classic && !(c.alpha > 0.5)) {
    throw UsageError("the classic kernel needs alpha > 0.5 (positive degrees of freedom)");
  }
  if (!std::isfinite(c.perplexity) || c.perplexity <= 0.0) throw UsageError("perplexity must be positive");
  if (c.pca_dims && *c.pca_dims < 1) throw UsageError("pca-dims must be positive");
  if (c.dbscan_eps && !(*c.dbscan_eps > 0.0)) throw UsageError("dbscan-eps must be positive");
  if (c.dbscan_min_pts < 1) throw UsageError("dbscan-min-pts must be positive");
  if (c.metrics_k.empty()) throw UsageError("at least one metrics k is required");
  for (std::size_t k : c.metrics_k) {
    if (k == 0) throw UsageError("metrics k values must be positive");
  }
  if (!c.preset.empty() && c.preset != "toy10" && c.preset != "dumbbells" && c.preset != "two-clusters" &&
      c.preset != "mnist") {
    throw UsageError("unknown preset '" + c.preset + "'");
  }
  if (c.out.empty()) throw UsageError("an output directory is required");
  try {
    validate(c.optimizer);
    validate(c.interp);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (!c.sweep_alphas.empty()) {
    try {
      parse_alpha_list(c.sweep_alphas);
    } catch (const InvalidArgument& e) {
      throw UsageError(std::string("--sweep-alphas: ") + e.what());
    }
    if (c.variant == KernelVariant::Classic) throw UsageError("alpha sweeps use the simplified kernel only");
  }
}

PipelineResult run_pipeline(const RunConfig& config, std::ostream& log) {
  validate(config);
  Dataset ds = load_dataset(config);
  const std::size_t n = ds.original.rows();
  validate_data(ds.original);
  if (!ds.labels.empty() && ds.labels.size() != n) throw InvalidInput("label count does not match the data");
  const bool sweeping = !config.sweep_alphas.empty();
  if (sweeping && ds.labels.empty()) {
    throw UsageError("--sweep-alphas needs class labels (a 'label' CSV column or an IDX label file)");
  }

  DataMatrix work = ds.original;
  if (config.pca_dims) {
    const auto dims = static_cast<std::size_t>(*config.pca_dims);
    if (dims > std::min(n, work.cols())) {
      throw UsageError("pca-dims " + std::to_string(dims) + " exceeds min(n, D) = " +
                       std::to_string(std::min(n, work.cols())));
    }
    log << "reducing " << work.cols() << " dimensions to " << dims << " with PCA\n";
    work = pca_reduce(work, dims, config.seed);
  }

  PipelineResult result;
  result.out_dir = config.out;
  fs::create_directories(result.out_dir);

  OptimizerConfig opt = config.optimizer;
  opt.seed = config.seed;
  const Solver solver = config.solver.value_or(n <= kSweepExactLimit ? Solver::Exact : Solver::Accelerated);
  const NeighborMode neighbors =
      config.neighbors.value_or(n <= kAutoExactNeighbors ? NeighborMode::Exact : NeighborMode::Approximate);
  std::vector<std::size_t> ks;
  for (std::size_t k : config.metrics_k) {
    if (k < n) ks.push_back(k);
  }

  if (sweeping) {
    SweepConfig sc;
    sc.perplexity = config.perplexity;
    sc.optimizer = opt;
    sc.interp = config.interp;
    sc.solver = solver;
    sc.init = config.init;
    sc.neighbors = neighbors;
    sc.knn_ks = ks;
    sc.dbscan_min_pts = config.dbscan_min_pts;
    sc.fixed_eps = config.dbscan_eps.value_or(kDbscanEps);
    sc.keep_embeddings = true;
    const auto alphas = parse_alpha_list(config.sweep_alphas);
    log << "sweeping " << alphas.size() << " alpha values over n=" << n << " points\n";
    SweepResult sweep = sweep_alpha(work, ds.labels, alphas, sc);

    write(result, "sweep.csv", sweep_csv(sweep));
    Json rows = Json::array();
    std::vector<double> xs, sep, kl, count;
    std::map<std::size_t, std::vector<double>> knn;
    for (const auto& row : sweep.rows) {
      Json r;
      r["alpha"] = row.alpha;
      r["separation_ratio"] = json_number(row.separation_ratio);
      r["kl"] = row.kl;
      Json kj = Json::object();
      for (const auto& [k, v] : row.knn_preservation) {
        kj[std::to_string(k)] = v;
        knn[k].push_back(v);
      }
      r["knn_preservation"] = kj;
      r["adaptive_eps"] = row.adaptive_eps;
      r["cluster_count"] = row.cluster_count;
      r["cluster_count_fixed_eps"] = row.cluster_count_fixed_eps;
      r["span"] = row.span;
      r["wall_time_seconds"] = row.wall_time_seconds;
      r["warnings"] = row.warnings;
      rows.push_back(r);
      xs.push_back(row.alpha);
      sep.push_back(row.separation_ratio);
      kl.push_back(row.kl);
      count.push_back(row.cluster_count);
      if (row.embedding) {
        SvgStyle style;
        style.title = "alpha = " + alpha_tag(row.alpha);
        write(result, "embedding_alpha_" + alpha_tag(row.alpha) + ".svg", emit_svg(*row.embedding, ds.labels, style));
      }
    }
    Json doc;
    doc["config"] = Json::parse(run_config_to_json(config));
    doc["solver"] = solver_name(sweep.solver);
    doc["neighbors"] = neighbors_name(neighbors);
    doc["n"] = n;
    doc["rows"] = rows;
    doc["warnings"] = sweep.warnings;
    write(result, "sweep.json", doc.dump(2) + "\n");

    std::vector<std::pair<std::string, std::vector<double>>> series{{"separation ratio", sep}, {"KL divergence", kl}};
    for (const auto& [k, v] : knn) series.emplace_back("kNN preservation (k=" + std::to_string(k) + ")", v);
    series.emplace_back("DBSCAN clusters (adaptive eps)", count);
    write(result, "sweep.svg", emit_line_chart(xs, series, "alpha", "alpha sweep"));
    for (const auto& row : sweep.rows) {
      log << "alpha=" << row.alpha << " separation=" << row.separation_ratio << " kl=" << row.kl
          << " clusters=" << row.cluster_count << "\n";
    }
    for (auto& row : sweep.rows) row.embedding.reset();
    result.sweep = std::move(sweep);
    return result;
  }

  std::vector<std::string> warnings;
  AffinityOptions aff;
  aff.mode = neighbors;
  aff.seed = config.seed;
  log << "computing affinities for n=" << n << " points (perplexity " << config.perplexity << ")\n";
  const SparseAffinity p = build_affinities(work, config.perplexity, aff);
  warnings.insert(warnings.end(), p.warnings.begin(), p.warnings.end());
  const Embedding init = initialize(work, config.init, config.seed, 1e-4, &warnings);
  const KernelParams params =
      config.variant == KernelVariant::Classic ? KernelParams::classic(config.alpha) : KernelParams::simplified(config.alpha);

  RunHooks hooks;
  if (config.verbose) {
    hooks.progress = [&log](int it, double kl, const Embedding&) {
      log << "iteration " << it << "  KL " << kl << "\n";
    };
  }
  RunReport report = run(p, init, params, opt, config.interp, solver, hooks);
  warnings.insert(warnings.end(), report.warnings.begin(), report.warnings.end());
  for (const auto& w : warnings) log << "warning: " << w << "\n";
  const Embedding& emb = report.final_embedding;

  Json metrics;
  Json kj = Json::object();
  if (!ks.empty()) {
    for (const auto& [k, v] : knn_preservation(work, emb, ks, config.knn_queries, config.seed)) {
      kj[std::to_string(k)] = v;
    }
  }
  metrics["knn_preservation"] = kj;
  metrics["kl"] = report.final_kl;
  metrics["separation"] = separable(ds.labels) ? json_number(mean_separation_ratio(emb, ds.labels)) : Json(nullptr);
  if (n >= static_cast<std::size_t>(config.dbscan_min_pts) && n > 5) {
    const double eps = config.dbscan_eps ? *config.dbscan_eps : adaptive_eps(emb);
    const DbscanResult db = dbscan_clusters(emb, eps, config.dbscan_min_pts);
    metrics["cluster_count"] = db.cluster_count;
    metrics["dbscan"] = {{"eps", eps},
                         {"eps_mode", config.dbscan_eps ? "fixed" : "adaptive"},
                         {"min_pts", config.dbscan_min_pts},
                         {"noise", db.noise},
                         {"cluster_count_fixed_eps", dbscan_clusters(emb, kDbscanEps, config.dbscan_min_pts).cluster_count}};
    metrics["cluster_assignments"] = db.assignments;
    write(result, "cluster_profiles.csv",
          profiles_csv(cluster_mean_profiles(ds.original, db.assignments), ds.original.cols()));
  } else {
    metrics["cluster_count"] = nullptr;
    metrics["cluster_assignments"] = nullptr;
  }

  Json rep;
  rep["config"] = Json::parse(run_config_to_json(config));
  rep["run"] = Json::parse(report.config_snapshot);
  rep["n"] = n;
  rep["input_dim"] = ds.original.cols();
  rep["working_dim"] = work.cols();
  rep["solver"] = solver_name(solver);
  rep["neighbors"] = neighbors_name(neighbors);
  rep["final_kl"] = report.final_kl;
  rep["final_span"] = report.final_span;
  rep["wall_time_seconds"] = report.wall_time_seconds;
  rep["loss_trace"] = loss_json(report.loss_trace);
  rep["warnings"] = warnings;

  write(result, "embedding.csv", embedding_csv(emb, ds.labels));
  write(result, "metrics.json", metrics.dump(2) + "\n");
  write(result, "report.json", rep.dump(2) + "\n");
  SvgStyle style;
  style.title = "alpha = " + alpha_tag(config.alpha);
  write(result, "embedding.svg", emit_svg(emb, ds.labels, style));
  log << "final KL " << report.final_kl << " after " << opt.iterations << " iterations in "
      << report.wall_time_seconds << " s\n";
  result.report = std::move(report);
  return result;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heavy-tailed t-SNE: embed data in two dimensions with kernel (1 + d^2/alpha)^-alpha"};
  app.set_help_all_flag("--help-all");

  std::string preset, input, format, labels, variant, solver, init, out_dir, sweep, metrics, neighbors, config_path;
  double alpha = 0, perplexity = 0, learning_rate = 0, early = 0, late = 0, eps = 0;
  int iterations = 0, early_iters = 0, pca_dims = 0, min_pts = 0, threads = 0;
  std::uint64_t seed = 0, data_seed = 0;
  std::size_t knn_queries = 0;
  bool strict = false, refinement = false, verbose = false;

  app.add_option("--preset", preset, "toy10, dumbbells, two-clusters or mnist");
  app.add_option("--config", config_path, "JSON file of RunConfig fields (applied after the preset)");
  app.add_option("--input", input, "CSV file, IDX image file, or directory holding the MNIST IDX files");
  app.add_option("--format", format, "csv or idx");
  app.add_option("--labels", labels, "IDX label file for an IDX image file");
  app.add_option("--alpha", alpha, "kernel tail parameter (1 = standard t-SNE)");
  app.add_option("--variant", variant, "simplified or classic");
  app.add_option("--perplexity", perplexity);
  app.add_option("--iterations", iterations);
  app.add_option("--learning-rate", learning_rate);
  app.add_option("--early-exag", early, "early exaggeration factor");
  app.add_option("--early-exag-iters", early_iters, "length of the early exaggeration phase");
  app.add_option("--late-exag", late, "exaggeration after the early phase (1 = off)");
  app.add_option("--init", init, "pca or random");
  app.add_option("--pca-dims", pca_dims, "reduce the input with PCA first");
  app.add_option("--solver", solver, "exact, accelerated or auto");
  app.add_option("--neighbors", neighbors, "exact, approximate or auto");
  app.add_flag("--alpha-refinement", refinement, "halve the interpolation grid spacing (useful for small alpha)");
  app.add_option("--seed", seed);
  app.add_option("--data-seed", data_seed, "seed of the synthetic presets (defaults to --seed)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--sweep-alphas", sweep, "comma list or start:stop:step");
  app.add_option("--metrics", metrics, "k values for kNN preservation, e.g. 10,50,100");
  app.add_option("--knn-queries", knn_queries, "points sampled for kNN preservation");
  app.add_option("--dbscan-eps", eps, "fixed DBSCAN eps (default: adaptive)");
  app.add_option("--dbscan-min-pts", min_pts);
  app.add_flag("--strict-deterministic", strict, "single thread, bit-reproducible");
  app.add_option("--threads", threads);
  app.add_flag("-v,--verbose", verbose, "log the loss during optimisation");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }
  auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };

  try {
    RunConfig c;
    if (given("--preset")) c = preset_config(preset);
    if (given("--config")) c = run_config_from_json(read_file(require_file(config_path)), c);
    if (given("--input")) c.input = input;
    if (given("--format")) c.format = parse_format(format);
    if (given("--labels")) c.labels = labels;
    if (given("--alpha")) c.alpha = alpha;
    if (given("--variant")) c.variant = parse_variant(variant);
    if (given("--perplexity")) c.perplexity = perplexity;
    if (given("--iterations")) {
      c.optimizer.iterations = iterations;
      // Keep the default phase lengths valid for short runs.
      if (!given("--early-exag-iters")) {
        c.optimizer.early_exaggeration_length = std::min(c.optimizer.early_exaggeration_length, iterations);
      }
      c.optimizer.momentum_switch_iter = std::min(c.optimizer.momentum_switch_iter, iterations);
    }
    if (given("--learning-rate")) c.optimizer.learning_rate = learning_rate;
    if (given("--early-exag")) c.optimizer.early_exaggeration = early;
    if (given("--early-exag-iters")) c.optimizer.early_exaggeration_length = early_iters;
    if (given("--late-exag")) c.optimizer.late_exaggeration = late;
    if (given("--init")) c.init = parse_init(init);
    if (given("--pca-dims")) c.pca_dims = pca_dims;
    if (given("--solver")) c.solver = parse_solver(solver);
    if (given("--neighbors")) c.neighbors = parse_neighbors(neighbors);
    if (refinement) c.interp.alpha_refinement = true;
    if (given("--seed")) c.seed = seed;
    if (given("--data-seed")) c.data_seed = data_seed;
    if (given("--out")) c.out = out_dir;
    if (given("--sweep-alphas")) c.sweep_alphas = sweep;
    if (given("--metrics")) c.metrics_k = parse_ks(metrics);
    if (given("--knn-queries")) c.knn_queries = knn_queries;
    if (given("--dbscan-eps")) c.dbscan_eps = eps;
    if (given("--dbscan-min-pts")) c.dbscan_min_pts = min_pts;
    if (strict) c.optimizer.strict_deterministic = true;
    if (given("--threads")) c.optimizer.threads = threads;
    if (verbose) c.verbose = true;

    const PipelineResult result = run_pipeline(c, err);
    for (const auto& f : result.files) out << f.string() << "\n";
    return 0;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace htsne
