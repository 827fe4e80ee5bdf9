// pembed: build affinities, embed, diagnose pressured points, refine with the
// pressured-point loop, and benchmark random restarts.

#include "pembed/affinity.hpp"
#include "pembed/augmented.hpp"
#include "pembed/data_io.hpp"
#include "pembed/optimizer.hpp"
#include "pembed/pressure.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <string>

namespace {

using namespace pembed;

struct CommonOpts {
  std::string delimiter = ",";
  bool labels = false;

  std::string method = "ee";
  double umap_a = 1.0;
  double umap_b = 1.0;

  double sigma = 1.0;
  double perplexity = 30.0;
  double lambda = 1.0;
  std::string wminus = "sqdist";
  CLI::Option* sigma_opt = nullptr;

  int max_iter = 2000;
  double tol = 1e-5;
  std::uint64_t seed = 0;
  int dim = 2;
};

void add_io_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--delimiter", o.delimiter, "Field delimiter for data files")
      ->default_val(",");
  cmd->add_flag("--labels", o.labels, "Input file carries a trailing integer label column");
}

void add_method_flags(CLI::App* cmd, CommonOpts& o, bool pp_only) {
  cmd->add_option("--method", o.method,
                  pp_only ? "Objective (ee|sne)" : "Objective (ee|sne|tsne|umap)")
      ->default_val("ee");
  if (!pp_only) {
    cmd->add_option("--umap-a", o.umap_a, "UMAP kernel constant a")->default_val(1.0);
    cmd->add_option("--umap-b", o.umap_b, "UMAP kernel constant b")->default_val(1.0);
  }
}

void add_affinity_flags(CLI::App* cmd, CommonOpts& o) {
  o.sigma_opt =
      cmd->add_option("--sigma", o.sigma, "Fixed Gaussian bandwidth for attraction weights");
  CLI::Option* perp =
      cmd->add_option("--perplexity", o.perplexity, "Per-point bandwidth target (default mode)")
          ->default_val(30.0);
  o.sigma_opt->excludes(perp);
  cmd->add_option("--lambda", o.lambda, "Repulsion weight (ee)")->default_val(1.0);
  cmd->add_option("--wminus", o.wminus, "Repulsion weights: sqdist|uniform")
      ->default_val("sqdist")
      ->check(CLI::IsMember({"sqdist", "uniform"}));
}

void add_optim_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--max-iter", o.max_iter, "Iteration cap")->default_val(2000);
  cmd->add_option("--tol", o.tol, "Convergence tolerance on the per-iteration objective change")
      ->default_val(1e-5);
  cmd->add_option("--seed", o.seed, "Random seed")->default_val(0);
}

char delimiter_char(const CommonOpts& o) {
  if (o.delimiter.size() != 1)
    throw ValidationError("--delimiter must be a single character");
  return o.delimiter[0];
}

Method make_method(const CommonOpts& o) {
  return Method{method_tag_from_string(o.method), o.umap_a, o.umap_b};
}

AffinityConfig make_affinity_config(const CommonOpts& o) {
  AffinityConfig cfg;
  cfg.mode = (o.sigma_opt != nullptr && o.sigma_opt->count() > 0)
                 ? AffinityConfig::Mode::FixedSigma
                 : AffinityConfig::Mode::Perplexity;
  cfg.sigma = o.sigma;
  cfg.perplexity = o.perplexity;
  cfg.lambda = o.lambda;
  cfg.repulsion = o.wminus == "uniform" ? AffinityConfig::Repulsion::Uniform
                                        : AffinityConfig::Repulsion::SqDist;
  return cfg;
}

OptimConfig make_optim_config(const CommonOpts& o) {
  OptimConfig cfg;
  cfg.max_iter = o.max_iter;
  cfg.conv_tol = o.tol;
  cfg.seed = o.seed;
  return cfg;
}

IterCallback progress_printer() {
  return [](const TraceRecord& rec) {
    if (rec.iter % 25 == 0)
      std::fprintf(stderr, "iter %d objective %.8g fraction %.3f mu %.4g\n", rec.iter,
                   rec.objective, rec.pressured_fraction, rec.mu);
  };
}

int run_embed(const CommonOpts& o, const std::string& input, const std::string& out,
              const std::string& trace_out) {
  const Dataset data = load_delimited(input, delimiter_char(o), o.labels);
  const AffinityGraph graph = build_affinities(data, make_affinity_config(o));
  const Method method = make_method(o);
  const Embedding x0 = random_embedding(data.n(), o.dim, o.seed);
  const OptimRun run = minimize(method, graph, x0, make_optim_config(o), progress_printer());
  for (const std::string& w : run.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  save_embedding(out, run.final_embedding, delimiter_char(o));
  if (!trace_out.empty()) save_trace(trace_out, run.trace);
  std::printf("final_objective %s\n", format_double(run.final_objective).c_str());
  return run.converged ? 0 : 2;
}

int run_diagnose(const CommonOpts& o, const std::string& input, const std::string& embedding_path,
                 const std::string& out_report, const std::string& out_plot) {
  const Dataset data = load_delimited(input, delimiter_char(o), o.labels);
  const Embedding embedding = load_embedding(embedding_path, delimiter_char(o));
  if (embedding.n() != data.n())
    throw ValidationError("embedding has " + std::to_string(embedding.n()) +
                          " rows but the dataset has " + std::to_string(data.n()));
  const AffinityGraph graph = build_affinities(data, make_affinity_config(o));
  const PressureReport report = compute_pressure(make_method(o), graph, embedding);
  for (const std::string& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("pressured_fraction %s\n", format_double(report.fraction).c_str());
  if (!out_report.empty()) save_report(out_report, report);
  if (!out_plot.empty())
    render_scatter(out_plot, embedding, &report, data.labels.empty() ? nullptr : &data.labels);
  return 0;
}

int run_pp(const CommonOpts& o, const std::string& input, const std::string& init,
           const std::string& init_file, const std::string& mu_strategy,
           const std::string& out, const std::string& trace_out) {
  const Dataset data = load_delimited(input, delimiter_char(o), o.labels);
  const AffinityGraph graph = build_affinities(data, make_affinity_config(o));
  const Method method = make_method(o);

  Embedding x0;
  if (init == "file") {
    if (init_file.empty()) throw ValidationError("--init file requires --init-file");
    x0 = load_embedding(init_file, delimiter_char(o));
  } else {
    x0 = random_embedding(data.n(), o.dim, o.seed);
  }

  const MuSchedule schedule = make_mu_schedule(graph, mu_strategy_from_string(mu_strategy));
  const double initial = objective(method, graph, x0).total;
  const OptimRun run =
      pp_optimize(method, graph, x0, schedule, make_optim_config(o), progress_printer());
  for (const std::string& w : run.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  save_embedding(out, run.final_embedding, delimiter_char(o));
  if (!trace_out.empty()) save_trace(trace_out, run.trace);
  std::printf("initial_objective %s\n", format_double(initial).c_str());
  std::printf("final_objective %s\n", format_double(run.final_objective).c_str());
  std::printf("improvement %s\n", format_double(initial - run.final_objective).c_str());
  return run.converged ? 0 : 2;
}

int run_benchmark(const CommonOpts& o, const std::string& input, int restarts,
                  const std::string& mu_strategy, const std::string& out_table) {
  const Dataset data = load_delimited(input, delimiter_char(o), o.labels);
  const AffinityGraph graph = build_affinities(data, make_affinity_config(o));
  const RestartBenchmark bench =
      restart_benchmark(make_method(o), graph, restarts, make_optim_config(o), o.dim,
                        mu_strategy_from_string(mu_strategy));

  std::string table = "# seed\tsd_final\tpp_final\timprovement\n";
  for (const RestartPair& pair : bench.pairs) {
    table += std::to_string(pair.seed) + '\t' + format_double(pair.sd.final_objective) +
             '\t' + format_double(pair.pp.final_objective) + '\t' +
             format_double(pair.sd.final_objective - pair.pp.final_objective) + '\n';
  }
  table += "# sd " + format_double(bench.summary.sd_mean) + " ± " +
           format_double(bench.summary.sd_std) + '\n';
  table += "# pp " + format_double(bench.summary.pp_mean) + " ± " +
           format_double(bench.summary.pp_std) + '\n';

  std::FILE* f = std::fopen(out_table.c_str(), "wb");
  if (f == nullptr) throw IoError(out_table + ": cannot open for writing");
  const std::size_t written = std::fwrite(table.data(), 1, table.size(), f);
  const bool ok = (written == table.size()) && (std::fclose(f) == 0);
  if (!ok) throw IoError(out_table + ": write failed");

  std::printf("sd %s ± %s\n", format_double(bench.summary.sd_mean).c_str(),
              format_double(bench.summary.sd_std).c_str());
  std::printf("pp %s ± %s\n", format_double(bench.summary.pp_mean).c_str(),
              format_double(bench.summary.pp_std).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pembed: nonlinear embedding with pressured-point diagnostics"};
  app.require_subcommand(1);

  int exit_code = 0;
  // Each subcommand owns its options; in particular sigma_opt must point at
  // that subcommand's --sigma to detect fixed-sigma mode.
  CommonOpts embed_o, diag_o, pp_o, bench_o;

  // generate
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  generate->require_subcommand(1);
  std::uint64_t gen_seed = 0;
  std::string gen_out;

  CLI::App* swiss = generate->add_subcommand("swissroll", "Noisy swissroll in 3-D");
  int swiss_n = 1000;
  double swiss_noise = 0.0;
  swiss->add_option("--n", swiss_n, "Point count")->default_val(1000);
  swiss->add_option("--noise", swiss_noise, "Gaussian noise scale")->default_val(0.0);

  CLI::App* rings = generate->add_subcommand("rings", "Randomly oriented circles in 3-D");
  int ring_objects = 10, ring_points = 72;
  double ring_radius = 1.0, ring_sep = 4.0;
  rings->add_option("--objects", ring_objects, "Ring count")->default_val(10);
  rings->add_option("--per-ring", ring_points, "Points per ring")->default_val(72);
  rings->add_option("--radius", ring_radius, "Ring radius")->default_val(1.0);
  rings->add_option("--separation", ring_sep, "Minimum center separation")->default_val(4.0);

  CLI::App* clusters = generate->add_subcommand("clusters", "Gaussian blobs");
  int cl_count = 3, cl_per = 20, cl_dim = 3;
  double cl_spread = 0.5, cl_sep = 6.0;
  clusters->add_option("--clusters", cl_count, "Cluster count")->default_val(3);
  clusters->add_option("--per-cluster", cl_per, "Points per cluster")->default_val(20);
  clusters->add_option("--dim", cl_dim, "Ambient dimension")->default_val(3);
  clusters->add_option("--spread", cl_spread, "Within-cluster standard deviation")
      ->default_val(0.5);
  clusters->add_option("--separation", cl_sep, "Center lattice pitch")->default_val(6.0);

  for (CLI::App* g : {swiss, rings, clusters}) {
    g->add_option("--seed", gen_seed, "Random seed")->default_val(0);
    g->add_option("--out", gen_out, "Output file")->required();
    g->set_config("--config");
  }
  swiss->callback([&] { save_dataset(gen_out, generate_swissroll(swiss_n, swiss_noise, gen_seed)); });
  rings->callback([&] {
    save_dataset(gen_out, generate_rings(ring_objects, ring_points, ring_radius, ring_sep, gen_seed));
  });
  clusters->callback([&] {
    save_dataset(gen_out,
                 generate_clusters(cl_count, cl_per, cl_dim, cl_spread, cl_sep, gen_seed));
  });

  // embed
  CLI::App* embed = app.add_subcommand("embed", "Minimize an embedding objective");
  std::string embed_input, embed_out, embed_trace;
  embed->add_option("input", embed_input, "Dataset file")->required();
  embed->add_option("--dim", embed_o.dim, "Embedding dimension")->default_val(2);
  embed->add_option("--out", embed_out, "Embedding output file")->required();
  embed->add_option("--trace-out", embed_trace, "Optimization trace output (JSON lines)");
  add_method_flags(embed, embed_o, false);
  add_affinity_flags(embed, embed_o);
  add_optim_flags(embed, embed_o);
  add_io_flags(embed, embed_o);
  embed->set_config("--config");
  embed->callback([&] { exit_code = run_embed(embed_o, embed_input, embed_out, embed_trace); });

  // diagnose
  CLI::App* diagnose = app.add_subcommand("diagnose", "Report pressured points of an embedding");
  std::string diag_input, diag_embedding, diag_report, diag_plot;
  diagnose->add_option("input", diag_input, "Dataset file")->required();
  diagnose->add_option("embedding", diag_embedding, "Embedding file")->required();
  diagnose->add_option("--out-report", diag_report, "Pressure report output (JSON lines)");
  diagnose->add_option("--out-plot", diag_plot, "Annotated scatter plot (SVG)");
  add_method_flags(diagnose, diag_o, false);
  add_affinity_flags(diagnose, diag_o);
  add_io_flags(diagnose, diag_o);
  diagnose->set_config("--config");
  diagnose->callback([&] {
    exit_code = run_diagnose(diag_o, diag_input, diag_embedding, diag_report, diag_plot);
  });

  // pp
  CLI::App* pp = app.add_subcommand("pp", "Pressured-point refinement (Algorithm: SD + mu sweep)");
  std::string pp_input, pp_init = "random", pp_init_file, pp_strategy = "mean", pp_out, pp_trace;
  pp->add_option("input", pp_input, "Dataset file")->required();
  pp->add_option("--init", pp_init, "Initialization: random|file")
      ->default_val("random")
      ->check(CLI::IsMember({"random", "file"}));
  pp->add_option("--init-file", pp_init_file, "Embedding file for --init file");
  pp->add_option("--mu-strategy", pp_strategy, "Penalty step rule: mean|max|min")
      ->default_val("mean")
      ->check(CLI::IsMember({"mean", "max", "min"}));
  pp->add_option("--dim", pp_o.dim, "Embedding dimension for random init")->default_val(2);
  pp->add_option("--out", pp_out, "Embedding output file")->required();
  pp->add_option("--trace-out", pp_trace, "Optimization trace output (JSON lines)");
  add_method_flags(pp, pp_o, true);
  add_affinity_flags(pp, pp_o);
  add_optim_flags(pp, pp_o);
  add_io_flags(pp, pp_o);
  pp->set_config("--config");
  pp->callback([&] {
    exit_code = run_pp(pp_o, pp_input, pp_init, pp_init_file, pp_strategy, pp_out, pp_trace);
  });

  // benchmark
  CLI::App* benchmark = app.add_subcommand("benchmark", "Random-restart SD vs PP comparison");
  std::string bench_input, bench_strategy = "mean", bench_table;
  int bench_restarts = 10;
  benchmark->add_option("input", bench_input, "Dataset file")->required();
  benchmark->add_option("--restarts", bench_restarts, "Restart count")
      ->default_val(10)
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--mu-strategy", bench_strategy, "Penalty step rule: mean|max|min")
      ->default_val("mean")
      ->check(CLI::IsMember({"mean", "max", "min"}));
  benchmark->add_option("--dim", bench_o.dim, "Embedding dimension")->default_val(2);
  benchmark->add_option("--out-table", bench_table, "Result table output")->required();
  add_method_flags(benchmark, bench_o, true);
  add_affinity_flags(benchmark, bench_o);
  add_optim_flags(benchmark, bench_o);
  add_io_flags(benchmark, bench_o);
  benchmark->set_config("--config");
  benchmark->callback([&] {
    exit_code = run_benchmark(bench_o, bench_input, bench_restarts, bench_strategy, bench_table);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return exit_code;
}
