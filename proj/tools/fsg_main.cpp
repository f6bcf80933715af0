#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsg/common.hpp"
#include "fsg/datasets.hpp"
#include "fsg/rng.hpp"
#include "fsg/eval.hpp"
#include "fsg/kde.hpp"
#include "fsg/sparsifier.hpp"
#include "fsg/spectral.hpp"

using nlohmann::json;

namespace {

struct CommonOpts {
  unsigned threads = 0;
  uint64_t seed = 1;
  size_t oracle_cap = 20000;
};

struct KernelOpts {
  std::string family = "gaussian";
  double sigma = 0.1;
};

struct SparsifierOpts {
  double C = 1.0;
  double lambda = 1.0;
  uint32_t rounds = 0;
  double epsilon = 0.0;
  std::string backend = "auto";
  std::string log_base = "2";
};

fsg::Kernel make_kernel(const KernelOpts& k) {
  return fsg::Kernel(fsg::kernel_family_from_name(k.family), k.sigma);
}

fsg::SparsifierConfig make_sparsifier_config(const SparsifierOpts& s,
                                             const CommonOpts& c) {
  fsg::SparsifierConfig cfg;
  cfg.C = s.C;
  cfg.lambda_k1_estimate = s.lambda;
  cfg.rounds = s.rounds;
  cfg.epsilon = s.epsilon;
  cfg.seed = c.seed;
  if (s.log_base == "2") {
    cfg.log_base = fsg::LogBase::two;
  } else if (s.log_base == "e") {
    cfg.log_base = fsg::LogBase::natural;
  } else {
    throw fsg::InvalidConfig("log base must be '2' or 'e'");
  }
  if (s.backend == "auto") {
    cfg.kde.backend = fsg::KdeBackend::autoselect;
  } else if (s.backend == "exact") {
    cfg.kde.backend = fsg::KdeBackend::exact;
  } else if (s.backend == "fast") {
    cfg.kde.backend = fsg::KdeBackend::fast;
  } else {
    throw fsg::InvalidConfig("backend must be auto, exact, or fast");
  }
  return cfg;
}

json config_json(const CommonOpts& c, const KernelOpts* k,
                 const SparsifierOpts* s) {
  json j;
  j["version"] = FSG_VERSION;
  j["seed"] = c.seed;
  j["threads"] = c.threads == 0 ? fsg::worker_count() : c.threads;
  j["oracle_cap"] = c.oracle_cap;
  if (k) {
    j["kernel"] = k->family;
    j["sigma"] = k->sigma;
  }
  if (s) {
    j["C"] = s->C;
    j["lambda_k1_estimate"] = s->lambda;
    j["rounds"] = s->rounds;
    j["epsilon"] = s->epsilon;
    j["backend"] = s->backend;
    j["log_base"] = s->log_base;
  }
  return j;
}

void write_json(const std::string& path, const json& j) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw fsg::IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

// The fast path must never hold anything close to an n x n structure.
void assert_subquadratic(size_t bytes, uint32_t n) {
  double logn = std::max(std::log2(double(std::max(n, 2u))), 1.0);
  double budget = 512.0 * double(n) * logn + 16.0 * 1024 * 1024;
  if (double(bytes) > budget)
    throw fsg::NumericError("memory guard tripped: " + std::to_string(bytes) +
                            " bytes for n = " + std::to_string(n));
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return out;
}

std::vector<std::vector<double>> parse_centers(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::string cur;
  for (char ch : text + ";") {
    if (ch == ';') {
      if (!cur.empty()) out.push_back(parse_number_list(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return out;
}

struct PipelineResult {
  fsg::ClusterLabels labels;
  std::vector<double> eigenvalues;
  double build_seconds = 0.0;
  double eigen_seconds = 0.0;
  double kmeans_seconds = 0.0;
  size_t edge_count = 0;
  fsg::BuildReport build_report;
  bool have_build_report = false;
};

PipelineResult run_pipeline(const fsg::Dataset& ds, const fsg::Kernel& kernel,
                            const std::string& graph_kind, uint32_t k,
                            const fsg::SparsifierConfig& cfg,
                            const CommonOpts& common,
                            const std::string& graph_out) {
  PipelineResult out;
  double t0 = fsg::now_seconds();
  std::optional<fsg::WeightedGraph> graph;
  if (graph_kind == "fast") {
    graph = fsg::build_similarity_graph(ds, kernel, cfg, &out.build_report);
    out.have_build_report = true;
    assert_subquadratic(
        out.build_report.estimator_bytes + out.build_report.graph_bytes,
        ds.size());
  } else if (graph_kind == "full") {
    graph = fsg::build_full_graph(ds, kernel, common.oracle_cap);
  } else if (graph_kind == "sz") {
    fsg::WeightedGraph full = fsg::build_full_graph(ds, kernel,
                                                    common.oracle_cap);
    graph = fsg::sz_sparsify(full, k, cfg.lambda_k1_estimate, cfg.C, cfg.seed,
                             cfg.log_base);
  } else {
    throw fsg::InvalidConfig("graph kind must be fast, full, or sz");
  }
  double t1 = fsg::now_seconds();
  out.build_seconds = t1 - t0;
  out.edge_count = graph->num_edges();
  if (!graph_out.empty()) fsg::save_edge_list(graph_out, *graph);

  uint32_t q = std::min<uint32_t>(k + 2, graph->num_vertices());
  fsg::EigenOptions eopts;
  eopts.seed = fsg::splitmix64(common.seed ^ 0x73706563747261ULL);
  fsg::EigenResult eig = fsg::smallest_eigenpairs(*graph, q, eopts);
  out.eigenvalues = eig.eigenvalues;
  double t2 = fsg::now_seconds();
  out.eigen_seconds = t2 - t1;

  std::vector<double> embed = fsg::spectral_embed(eig, k);
  fsg::KMeansOptions kopts;
  kopts.seed = common.seed;
  out.labels = fsg::kmeans(embed, graph->num_vertices(), k, k, kopts).labels;
  out.kmeans_seconds = fsg::now_seconds() - t2;

  // Conductance is measured on the graph we clustered.
  fsg::MetricReport mr = fsg::conductance_report(*graph, out.labels);
  out.build_report.graph_bytes = graph->memory_bytes();
  out.build_report.edge_count = graph->num_edges();
  (void)mr;
  return out;
}

int cmd_generate(const std::string& kind, uint32_t n, double noise,
                 double factor, const std::string& centers_text,
                 uint32_t num_centers, double stddev,
                 const std::string& transform_text, const CommonOpts& common,
                 const std::string& out_path) {
  fsg::LabeledDataset data =
      [&]() -> fsg::LabeledDataset {
    if (kind == "moons") return fsg::make_moons(n, noise, common.seed);
    if (kind == "circles")
      return fsg::make_circles(n, noise, factor, common.seed);
    // blobs
    std::vector<std::vector<double>> centers;
    if (!centers_text.empty()) {
      centers = parse_centers(centers_text);
    } else {
      fsg::RngStream rng = fsg::RngStream::keyed(common.seed, 0x63656e746572ULL);
      for (uint32_t c = 0; c < num_centers; ++c)
        centers.push_back({rng.next_double() * 20.0 - 10.0,
                           rng.next_double() * 20.0 - 10.0});
    }
    std::array<double, 4> tr = fsg::kIdentityTransform;
    if (!transform_text.empty()) {
      auto v = parse_number_list(transform_text);
      if (v.size() != 4)
        throw fsg::InvalidConfig("transform needs 4 comma-separated values");
      tr = {v[0], v[1], v[2], v[3]};
    }
    return fsg::make_blobs(n, centers, stddev, tr, common.seed);
  }();

  fsg::save_csv(out_path, data.data, &data.labels.labels);
  std::cerr << "wrote " << data.data.size() << " points to " << out_path
            << "\n";
  return 0;
}

int cmd_cluster(const std::string& input, const KernelOpts& kopts, uint32_t k,
                const std::string& graph_kind, const SparsifierOpts& sopts,
                const CommonOpts& common, const std::string& out_path,
                const std::string& report_path, const std::string& graph_out) {
  fsg::CsvDataset csv = fsg::load_csv(input);
  fsg::Kernel kernel = make_kernel(kopts);
  fsg::SparsifierConfig cfg = make_sparsifier_config(sopts, common);

  PipelineResult res = run_pipeline(csv.data, kernel, graph_kind, k, cfg,
                                    common, graph_out);
  fsg::save_labels_csv(out_path, res.labels);

  json rep = config_json(common, &kopts, &sopts);
  rep["command"] = "cluster";
  rep["input"] = input;
  rep["n"] = csv.data.size();
  rep["d"] = csv.data.dim();
  rep["k"] = k;
  rep["graph"] = graph_kind;
  rep["edge_count"] = res.edge_count;
  rep["eigenvalues"] = res.eigenvalues;
  rep["timings"] = {{"build_seconds", res.build_seconds},
                    {"eigen_seconds", res.eigen_seconds},
                    {"kmeans_seconds", res.kmeans_seconds}};
  if (res.have_build_report)
    rep["build"] = json::parse(res.build_report.to_json());
  if (csv.labels) {
    fsg::ClusterLabels truth = fsg::compact_labels(*csv.labels);
    rep["rand_index"] = fsg::rand_index(res.labels, truth);
    rep["adjusted_rand_index"] = fsg::adjusted_rand_index(res.labels, truth);
  }
  write_json(report_path, rep);
  return 0;
}

int cmd_segment(const std::string& image_path, const KernelOpts& kopts,
                uint32_t k, const SparsifierOpts& sopts,
                const CommonOpts& common, const std::string& out_path,
                const std::string& report_path) {
  fsg::Image img = fsg::read_image(image_path);
  fsg::Dataset points = fsg::image_to_points(img, /*scale=*/true);
  fsg::Kernel kernel = make_kernel(kopts);
  fsg::SparsifierConfig cfg = make_sparsifier_config(sopts, common);

  PipelineResult res =
      run_pipeline(points, kernel, "fast", k, cfg, common, "");
  fsg::Image seg = fsg::labels_to_image(res.labels, img.width, img.height,
                                        &img);
  fsg::write_image(out_path, seg);

  json rep = config_json(common, &kopts, &sopts);
  rep["command"] = "segment";
  rep["image"] = image_path;
  rep["width"] = img.width;
  rep["height"] = img.height;
  rep["n"] = points.size();
  rep["k"] = k;
  rep["edge_count"] = res.edge_count;
  rep["eigenvalues"] = res.eigenvalues;
  rep["timings"] = {{"build_seconds", res.build_seconds},
                    {"eigen_seconds", res.eigen_seconds},
                    {"kmeans_seconds", res.kmeans_seconds}};
  rep["build"] = json::parse(res.build_report.to_json());
  write_json(report_path, rep);
  return 0;
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [n, t] : pts) {
    double x = std::log(n), y = std::log(std::max(t, 1e-9));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double m = double(pts.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

int cmd_bench(const std::string& generator, const std::string& sizes_text,
              uint32_t repeats, double noise, const KernelOpts& kopts,
              uint32_t k, bool with_explicit, const SparsifierOpts& sopts,
              const CommonOpts& common, const std::string& out_path,
              const std::string& report_path) {
  auto sizes_d = parse_number_list(sizes_text);
  if (sizes_d.empty()) throw fsg::InvalidConfig("no benchmark sizes given");
  std::vector<uint32_t> sizes;
  for (double s : sizes_d) sizes.push_back(static_cast<uint32_t>(s));
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    throw fsg::InvalidConfig("benchmark sizes must be ascending");

  fsg::Kernel kernel = make_kernel(kopts);
  std::ofstream csv(out_path);
  if (!csv) throw fsg::IoError("cannot write " + out_path);
  csv << "n,repeat,pipeline,phase,seconds,edges\n";

  std::vector<std::pair<double, double>> fast_pts, explicit_pts;
  for (uint32_t n : sizes) {
    // Repeats reuse the seed: they measure timing variance, not sampling
    // variance, so edge counts are identical across repeats.
    for (uint32_t rep = 0; rep < std::max<uint32_t>(repeats, 1); ++rep) {
      CommonOpts run_common = common;
      fsg::LabeledDataset data =
          generator == "moons"
              ? fsg::make_moons(n, noise, run_common.seed)
              : fsg::make_circles(n, noise, 0.5, run_common.seed);
      fsg::SparsifierConfig cfg = make_sparsifier_config(sopts, run_common);

      PipelineResult res = run_pipeline(data.data, kernel, "fast", k, cfg,
                                        run_common, "");
      double cluster_s = res.eigen_seconds + res.kmeans_seconds;
      csv << n << ',' << rep << ",fast,build," << res.build_seconds << ','
          << res.edge_count << '\n';
      csv << n << ',' << rep << ",fast,cluster," << cluster_s << ','
          << res.edge_count << '\n';
      if (rep == 0) fast_pts.push_back({double(n), res.build_seconds + cluster_s});

      if (with_explicit && n <= common.oracle_cap) {
        PipelineResult ex = run_pipeline(data.data, kernel, "full", k, cfg,
                                         run_common, "");
        double ex_cluster = ex.eigen_seconds + ex.kmeans_seconds;
        csv << n << ',' << rep << ",explicit,build," << ex.build_seconds << ','
            << ex.edge_count << '\n';
        csv << n << ',' << rep << ",explicit,cluster," << ex_cluster << ','
            << ex.edge_count << '\n';
        if (rep == 0)
          explicit_pts.push_back({double(n), ex.build_seconds + ex_cluster});
      }
    }
  }

  json rep = config_json(common, &kopts, &sopts);
  rep["command"] = "bench";
  rep["generator"] = generator;
  rep["sizes"] = sizes;
  rep["repeats"] = repeats;
  if (fast_pts.size() >= 2) rep["fast_loglog_slope"] = fit_loglog_slope(fast_pts);
  if (explicit_pts.size() >= 2)
    rep["explicit_loglog_slope"] = fit_loglog_slope(explicit_pts);
  write_json(report_path, rep);
  if (rep.contains("fast_loglog_slope"))
    std::cerr << "fast pipeline log-log slope: " << rep["fast_loglog_slope"]
              << "\n";
  if (rep.contains("explicit_loglog_slope"))
    std::cerr << "explicit pipeline log-log slope: "
              << rep["explicit_loglog_slope"] << "\n";
  return 0;
}

int cmd_eigengap(const std::string& input, const KernelOpts& kopts, uint32_t q,
                 const SparsifierOpts& sopts, const CommonOpts& common,
                 const std::string& out_path) {
  fsg::CsvDataset csv = fsg::load_csv(input);
  fsg::Kernel kernel = make_kernel(kopts);
  fsg::SparsifierConfig cfg = make_sparsifier_config(sopts, common);
  if (q > csv.data.size())
    throw fsg::InvalidConfig("q exceeds the number of points");

  fsg::WeightedGraph graph = fsg::build_similarity_graph(csv.data, kernel, cfg);
  fsg::EigenOptions eopts;
  eopts.seed = fsg::splitmix64(common.seed ^ 0x73706563747261ULL);
  fsg::EigenGapScan scan = fsg::eigen_gap_scan(graph, q, eopts);

  std::ofstream out(out_path);
  if (!out) throw fsg::IoError("cannot write " + out_path);
  out << "i,lambda,ratio_to_previous\n";
  char buf[64];
  for (uint32_t i = 0; i < scan.eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%u,%.17g,", i + 1, scan.eigenvalues[i]);
    out << buf;
    if (i > 0)
      out << scan.ratios[i - 1];
    out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fsg: sparse similarity graphs via kernel density estimation"};
  app.set_version_flag("--version", FSG_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts common;
  app.add_option("--threads", common.threads,
                 "worker threads (0 = all cores, or FSG_THREADS)");
  app.add_option("--seed", common.seed, "random seed");
  app.add_option("--oracle-cap", common.oracle_cap,
                 "max n for explicit quadratic constructions");

  KernelOpts kopts;
  SparsifierOpts sopts;
  uint32_t k = 2;

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset CSV");
  std::string gen_kind, gen_out = "points.csv", gen_centers, gen_transform;
  uint32_t gen_n = 1000, gen_num_centers = 3;
  double gen_noise = 0.05, gen_factor = 0.5, gen_stddev = 1.0;
  gen->add_option("kind", gen_kind, "moons | circles | blobs")
      ->required()
      ->check(CLI::IsMember({"moons", "circles", "blobs"}));
  gen->add_option("--n", gen_n, "number of points");
  gen->add_option("--noise", gen_noise, "Gaussian noise stddev");
  gen->add_option("--factor", gen_factor, "circles: inner/outer radius ratio");
  gen->add_option("--centers", gen_centers, "blobs: centers 'x,y;x,y;...'");
  gen->add_option("--num-centers", gen_num_centers,
                  "blobs: random centers when --centers is absent");
  gen->add_option("--stddev", gen_stddev, "blobs: per-blob stddev");
  gen->add_option("--transform", gen_transform,
                  "blobs: 2x2 row-major transform 'a,b,c,d'");
  gen->add_option("--out", gen_out, "output CSV path");

  // cluster
  auto* clu = app.add_subcommand("cluster", "cluster a CSV dataset");
  std::string clu_input, clu_out = "labels.csv", clu_report, clu_graph = "fast",
              clu_graph_out;
  clu->add_option("--input", clu_input, "input CSV")->required();
  clu->add_option("--kernel", kopts.family, "gaussian | exponential | laplacian");
  clu->add_option("--sigma", kopts.sigma, "kernel bandwidth");
  clu->add_option("--k", k, "number of clusters");
  clu->add_option("--graph", clu_graph, "fast | full | sz");
  clu->add_option("--rounds", sopts.rounds, "sampling rounds (0 = default)");
  clu->add_option("--C", sopts.C, "sampling constant C");
  clu->add_option("--lambda", sopts.lambda, "lambda_{k+1} estimate");
  clu->add_option("--epsilon", sopts.epsilon, "KDE accuracy (0 = default)");
  clu->add_option("--backend", sopts.backend, "auto | exact | fast");
  clu->add_option("--log-base", sopts.log_base, "2 | e");
  clu->add_option("--out", clu_out, "labels CSV path");
  clu->add_option("--report", clu_report, "JSON report path");
  clu->add_option("--graph-out", clu_graph_out, "edge list output path");

  // segment
  auto* seg = app.add_subcommand("segment", "segment an image");
  std::string seg_image, seg_out = "segmented.ppm", seg_report;
  KernelOpts seg_kopts;
  seg_kopts.sigma = 0.2;
  uint32_t seg_k = 4;
  seg->add_option("--image", seg_image, "input image (.ppm or .png)")
      ->required();
  seg->add_option("--sigma", seg_kopts.sigma, "kernel bandwidth");
  seg->add_option("--k", seg_k, "number of segments");
  seg->add_option("--rounds", sopts.rounds, "sampling rounds (0 = default)");
  seg->add_option("--C", sopts.C, "sampling constant C");
  seg->add_option("--lambda", sopts.lambda, "lambda_{k+1} estimate");
  seg->add_option("--epsilon", sopts.epsilon, "KDE accuracy (0 = default)");
  seg->add_option("--backend", sopts.backend, "auto | exact | fast");
  seg->add_option("--out", seg_out, "output image path");
  seg->add_option("--report", seg_report, "JSON report path");

  // bench
  auto* ben = app.add_subcommand("bench", "time the pipeline across sizes");
  std::string ben_gen = "moons", ben_sizes, ben_out = "bench.csv", ben_report;
  uint32_t ben_repeats = 1;
  double ben_noise = 0.05;
  bool ben_explicit = false;
  ben->add_option("--generator", ben_gen, "moons | circles");
  ben->add_option("--sizes", ben_sizes, "comma-separated ascending sizes")
      ->required();
  ben->add_option("--repeats", ben_repeats, "repeats per size");
  ben->add_option("--noise", ben_noise, "generator noise");
  ben->add_option("--sigma", kopts.sigma, "kernel bandwidth");
  ben->add_option("--k", k, "number of clusters");
  ben->add_flag("--explicit", ben_explicit,
                "also time the explicit quadratic baseline");
  ben->add_option("--backend", sopts.backend, "auto | exact | fast");
  ben->add_option("--out", ben_out, "CSV of (n, phase, seconds)");
  ben->add_option("--report", ben_report, "JSON report path");

  // eigengap
  auto* eig = app.add_subcommand("eigengap", "bottom eigenvalues of the graph");
  std::string eig_input, eig_out = "eigenvalues.csv";
  uint32_t eig_q = 6;
  eig->add_option("--input", eig_input, "input CSV")->required();
  eig->add_option("--kernel", kopts.family, "kernel family");
  eig->add_option("--sigma", kopts.sigma, "kernel bandwidth");
  eig->add_option("--q", eig_q, "number of eigenvalues");
  eig->add_option("--backend", sopts.backend, "auto | exact | fast");
  eig->add_option("--out", eig_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    fsg::set_worker_count(common.threads);
    if (gen->parsed())
      return cmd_generate(gen_kind, gen_n, gen_noise, gen_factor, gen_centers,
                          gen_num_centers, gen_stddev, gen_transform, common,
                          gen_out);
    if (clu->parsed())
      return cmd_cluster(clu_input, kopts, k, clu_graph, sopts, common,
                         clu_out, clu_report, clu_graph_out);
    if (seg->parsed())
      return cmd_segment(seg_image, seg_kopts, seg_k, sopts, common, seg_out,
                         seg_report);
    if (ben->parsed())
      return cmd_bench(ben_gen, ben_sizes, ben_repeats, ben_noise, kopts, k,
                       ben_explicit, sopts, common, ben_out, ben_report);
    if (eig->parsed())
      return cmd_eigengap(eig_input, kopts, eig_q, sopts, common, eig_out);
  } catch (const fsg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
