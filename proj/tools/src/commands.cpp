#include "isinglearn_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "isinglearn/diagnostics.hpp"
#include "isinglearn/exact.hpp"
#include "isinglearn/io.hpp"
#include "isinglearn/rng.hpp"
#include "isinglearn/sampler.hpp"

namespace isinglearn::cli {

namespace {

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

/// Writes to the file when a path is given, else to `fallback`.
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  file << text;
  if (!file) throw Error("write failed for " + path);
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::string fit_report_json(const FitReport& report, const ConstraintSet& set) {
  const auto array = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += format_double(v[i]);
    }
    return s + "]";
  };
  std::ostringstream out;
  out << "{\n"
      << "  \"constraint\": \"" << describe(set) << "\",\n"
      << "  \"iterations\": " << report.iterations << ",\n"
      << "  \"converged\": " << (report.converged ? "true" : "false") << ",\n"
      << "  \"wall_time\": " << format_double(report.wall_time) << ",\n"
      << "  \"grad_map_tol\": " << format_double(report.grad_map_tol) << ",\n"
      << "  \"projection_warnings\": " << report.projection_warnings << ",\n"
      << "  \"objective_trace\": " << array(report.objective_trace) << ",\n"
      << "  \"grad_map_trace\": " << array(report.grad_map_trace) << "\n"
      << "}\n";
  return out.str();
}

CouplingMatrix random_direction(int n, std::uint64_t seed) {
  CounterRng rng(derive_stream(seed, "direction", static_cast<std::uint64_t>(n)));
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) a(i, k) = a(k, i) = 2.0 * rng.uniform() - 1.0;
  return CouplingMatrix(a);
}

IsingModel require_same_size(const IsingModel& a, const std::string& path_b) {
  IsingModel b = load_model(path_b);
  if (b.size() != a.size())
    throw ConfigError("--model-b: dimension " + std::to_string(b.size()) + " does not match " +
                      std::to_string(a.size()));
  return b;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string config, out, encoding = "dense", kind;
  int n = 0, d = 0;
  double beta = 0.0, width = 0.0;
  std::uint64_t seed = 0;
};

int cmd_generate(CLI::App& sub, const GenerateArgs& a, std::ostream& out) {
  EnsembleSpec spec;
  bool have_kind = false;
  if (!a.config.empty()) {
    const ConfigFile file = load_config(a.config);
    if (file.ensemble) {
      spec = *file.ensemble;
      have_kind = true;
    }
  }
  if (sub.count("--kind")) {
    try {
      spec.kind = ensemble_kind_from_string(a.kind);
    } catch (const Error& e) {
      throw ConfigError(std::string("--kind: ") + e.what());
    }
    have_kind = true;
  }
  if (!have_kind) throw ConfigError("ensemble.kind: required (config block or --kind)");
  if (sub.count("--n")) spec.n = a.n;
  if (sub.count("--beta")) spec.beta = a.beta;
  if (sub.count("--d")) spec.d = a.d;
  if (sub.count("--width")) spec.width = a.width;
  if (sub.count("--seed")) spec.seed = a.seed;
  try {
    validate(spec);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("ensemble: ") + e.what());
  }
  const auto enc = a.encoding == "triplets" ? CouplingEncoding::Triplets : CouplingEncoding::Dense;
  emit(a.out, model_to_json(generate(spec), enc), out);
  return kExitOk;
}

struct SampleArgs {
  std::string model, out, method = "glauber";
  int l = 0, chains = 1, burn_in = 0, thinning = 0;
  std::uint64_t seed = 0;
};

int cmd_sample(CLI::App& sub, const SampleArgs& a, std::ostream& out) {
  const IsingModel m = load_model(a.model);
  if (a.l <= 0) throw ConfigError("--l: must be positive");
  SampleBatch batch;
  if (sample_method_from_string(a.method) == SampleMethod::Exact) {
    batch = exact_sample(m, a.l, a.seed, kTableCap);
  } else {
    GlauberConfig cfg = GlauberConfig::defaults(a.seed);
    cfg.chains = a.chains;
    if (sub.count("--burn-in")) cfg.burn_in_sweeps = a.burn_in;
    if (sub.count("--thinning")) cfg.thinning_sweeps = a.thinning;
    try {
      validate(cfg);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("sampler: ") + e.what());
    }
    batch = glauber_sample(m, a.l, cfg);
  }
  if (a.out.empty()) {
    write_samples(batch, out);
  } else {
    save_samples(batch, a.out);
  }
  return kExitOk;
}

struct FitArgs {
  std::string samples, h = "zero", constraint, config, out, report;
  int max_iters = 0;
};

int cmd_fit(CLI::App& sub, const FitArgs& a, std::ostream& out) {
  const SampleBatch batch = load_samples(a.samples);
  ConstraintSet set = SpectralSpread{1.0};
  FitConfig cfg;
  bool have_set = false;
  if (!a.config.empty()) {
    const ConfigFile file = load_config(a.config);
    if (file.constraint) {
      set = *file.constraint;
      have_set = true;
    }
    if (file.optimizer) cfg = *file.optimizer;
  }
  if (!a.constraint.empty()) {
    set = parse_constraint(a.constraint);
    have_set = true;
  }
  if (!have_set) throw ConfigError("constraint: required (config block or --constraint)");
  if (sub.count("--max-iters")) cfg.max_iters = a.max_iters;
  try {
    validate(set);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("constraint: ") + e.what());
  }
  try {
    validate(cfg);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }

  Vector field = Vector::Zero(batch.dimension());
  if (a.h != "zero") {
    field = load_model(a.h).field;
    if (field.size() != batch.dimension()) throw ConfigError("--h: field length does not match the samples");
  }
  const FitReport report = fit_mple(batch, field, set, cfg);
  const IsingModel estimate{report.estimate, field};
  emit(a.out, model_to_json(estimate), out);
  std::string report_path = a.report;
  if (report_path.empty() && !a.out.empty()) report_path = a.out + ".report.json";
  if (!report_path.empty()) emit(report_path, fit_report_json(report, set), out);
  return kExitOk;
}

struct EvaluateArgs {
  std::string model_a, model_b, out;
  std::vector<std::string> metrics;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const IsingModel ma = load_model(a.model_a);
  const IsingModel mb = require_same_size(ma, a.model_b);
  std::vector<std::string> metrics = split_list(a.metrics);
  if (metrics.empty()) metrics = {"frobenius"};
  bool exact = false;
  for (const auto& m : metrics) {
    if (m == "tv_exact" || m == "kl_exact") {
      exact = true;
    } else if (m != "frobenius" && m != "op_norm_err") {
      throw ConfigError("--metrics: unsupported metric \"" + m + "\"");
    }
  }
  if (exact) check_enumeration_cap(ma.size(), kTableCap);

  std::optional<DistributionTable> pa, pb;
  if (exact) {
    pa = distribution(ma);
    pb = distribution(mb);
  }
  const CouplingMatrix delta = mb.coupling - ma.coupling;
  std::ostringstream csv;
  csv << "metric,value\n";
  for (const auto& m : metrics) {
    double v = 0.0;
    if (m == "frobenius") v = delta.matrix().norm();
    if (m == "op_norm_err") v = operator_norm(delta);
    if (m == "tv_exact") v = tv_distance(*pa, *pb);
    if (m == "kl_exact") v = kl_divergence(*pa, *pb);
    csv << m << "," << format_double(v) << "\n";
  }
  emit(a.out, csv.str(), out);
  return kExitOk;
}

struct SweepArgs {
  std::string config, out;
  int jobs = 1;
  std::vector<int> l_values;
  std::vector<std::uint64_t> seeds;
};

int cmd_sweep(CLI::App& sub, const SweepArgs& a, std::ostream& out) {
  ConfigFile file = load_config(a.config);
  if (sub.count("--l-values") || sub.count("--seeds")) {
    if (!file.sweep) file.sweep = SweepSpec{};
    if (sub.count("--l-values")) file.sweep->l_values = a.l_values;
    if (sub.count("--seeds")) file.sweep->seeds = a.seeds;
  }
  const SweepSpec spec = resolve_sweep(file);
  if (a.jobs <= 0) throw ConfigError("--jobs: must be positive");
  std::ostringstream csv;
  write_sweep_csv(run_sweep(spec, a.jobs), csv);
  emit(a.out, csv.str(), out);
  return kExitOk;
}

struct DiagnoseArgs {
  std::string probe, model, model_b, out;
  std::uint64_t seed = 0;
  double eta = 0.0, width_bound = 0.0, gamma = 0.0;
  int num = 100, l = 1000, batches = 100;
};

int cmd_diagnose(CLI::App& sub, const DiagnoseArgs& a, std::ostream& out) {
  const IsingModel m = load_model(a.model);
  const int n = m.size();
  std::ostringstream csv;
  if (a.probe == "subset") {
    if (!sub.count("--eta")) throw ConfigError("--eta: required for the subset probe");
    const double bound = sub.count("--width-bound") ? a.width_bound : infinity_norm(m.coupling.matrix());
    const SubsetDecomposition dec = subset_decomposition(m.coupling, bound, a.eta, a.seed);
    const SubsetCheck check = check_subset_decomposition(m.coupling, dec);
    csv << "probe,n,eta,subsets,target_count,min_count,max_count,max_width,widths_ok,balanced\n"
        << "subset," << n << "," << format_double(a.eta) << "," << dec.subsets.size() << "," << dec.target_count << ","
        << check.min_count << "," << check.max_count << "," << format_double(check.max_width) << ","
        << (check.widths_ok ? 1 : 0) << "," << (check.balanced ? 1 : 0) << "\n";
  } else if (a.probe == "regularity") {
    const double gamma = sub.count("--gamma") ? a.gamma : 1.0 / n;
    const RegularityReport r = regularity_probe(m, gamma, a.num, a.seed);
    csv << "probe,id,e_jstar,e_j,ratio,status\n";
    for (const auto& e : r.ratios)
      csv << "regularity," << e.id << "," << format_double(e.e_jstar) << "," << format_double(e.e_j) << ","
          << format_double(e.ratio) << ",ok\n";
    for (int id : r.excluded) csv << "regularity," << id << ",,,,excluded\n";
  } else if (a.probe == "metric") {
    if (a.model_b.empty()) throw ConfigError("--model-b: required for the metric probe");
    const MetricComparison c = metric_comparison(m, require_same_size(m, a.model_b).coupling);
    csv << "probe,e_jstar,frob_sq,ratio,degenerate\n"
        << "metric," << format_double(c.e_jstar) << "," << format_double(c.frob_sq) << ","
        << (c.degenerate ? std::string() : format_double(c.ratio)) << "," << (c.degenerate ? 1 : 0) << "\n";
  } else if (a.probe == "tvfrob") {
    if (a.model_b.empty()) throw ConfigError("--model-b: required for the tvfrob probe");
    const TvFrobeniusResult r = tv_frobenius_check(m, require_same_size(m, a.model_b));
    csv << "probe,n,tv,frob,n_frob,bound_ok,kl,pinsker_slack\n"
        << "tvfrob," << n << "," << format_double(r.tv) << "," << format_double(r.frob) << ","
        << format_double(n * r.frob) << "," << (r.bound_ok ? 1 : 0) << "," << format_double(r.kl) << ","
        << format_double(r.pinsker_slack) << "\n";
  } else if (a.probe == "gradconc") {
    const CouplingMatrix dir =
        a.model_b.empty() ? random_direction(n, a.seed) : require_same_size(m, a.model_b).coupling - m.coupling;
    const GradientConcentration g = gradient_concentration_probe(m, dir, a.l, a.batches, a.seed);
    csv << "probe,l,batches,mean,stddev,t_statistic,exceed_t1,exceed_t2,exceed_t4\n"
        << "gradconc," << a.l << "," << a.batches << "," << format_double(g.mean) << "," << format_double(g.stddev)
        << "," << format_double(g.t_statistic) << "," << format_double(g.exceedance[0]) << ","
        << format_double(g.exceedance[1]) << "," << format_double(g.exceedance[2]) << "\n";
  } else {
    throw ConfigError("--probe: unknown probe \"" + a.probe + "\"");
  }
  emit(a.out, csv.str(), out);
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------

SweepRow run_sweep_cell(const SweepSpec& spec, int l, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const IsingModel truth = generate(spec.ensemble);
  const std::uint64_t sample_seed = derive_stream(seed, "sweep-sample", static_cast<std::uint64_t>(l));
  const SampleBatch batch = spec.method == SampleMethod::Exact
                                ? exact_sample(truth, l, sample_seed, kTableCap)
                                : glauber_sample(truth, l, GlauberConfig::defaults(sample_seed));
  const FitReport report = fit_mple(batch, truth.field, spec.constraint, spec.optimizer);

  SweepRow row;
  row.ensemble = std::string(to_string(spec.ensemble.kind));
  row.n = spec.ensemble.n;
  row.beta = spec.ensemble.beta;
  row.d = spec.ensemble.d;
  row.l = l;
  row.seed = seed;
  row.constraint = describe(spec.constraint);
  row.iters = report.iterations;
  const auto wants = [&](const char* name) {
    return std::find(spec.metrics.begin(), spec.metrics.end(), name) != spec.metrics.end();
  };
  if (wants("frobenius")) row.frob_err = (report.estimate - truth.coupling).matrix().norm();
  if (wants("tv_exact") || wants("kl_exact")) {
    const DistributionTable p_true = distribution(truth);
    const DistributionTable p_hat = distribution(IsingModel{report.estimate, truth.field});
    if (wants("tv_exact")) row.tv_exact = tv_distance(p_hat, p_true);
    if (wants("kl_exact")) row.kl_exact = kl_divergence(p_true, p_hat);
  }
  if (spec.timing)
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs) {
  std::vector<std::pair<int, std::uint64_t>> cells;
  for (int l : spec.l_values)
    for (std::uint64_t s : spec.seeds) cells.emplace_back(l, s);
  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      try {
        rows[k] = run_sweep_cell(spec, cells[k].first, cells[k].second);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  std::sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
    return std::tie(x.l, x.seed) < std::tie(y.l, y.seed);
  });
  return rows;
}

std::string sweep_csv_header() {
  return "ensemble,n,beta,d,l,seed,constraint,frob_err,tv_exact,kl_exact,iters,wall_time";
}

std::string format_sweep_row(const SweepRow& row) {
  return join({row.ensemble, std::to_string(row.n), format_double(row.beta), std::to_string(row.d),
               std::to_string(row.l), std::to_string(row.seed), row.constraint, optional_field(row.frob_err),
               optional_field(row.tv_exact), optional_field(row.kl_exact), std::to_string(row.iters),
               format_double(row.wall_time)},
              ',');
}

void write_sweep_csv(std::vector<SweepRow> rows, std::ostream& out) {
  std::sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
    return std::tie(x.ensemble, x.n, x.beta, x.d, x.l, x.seed, x.constraint) <
           std::tie(y.ensemble, y.n, y.beta, y.d, y.l, y.seed, y.constraint);
  });
  out << sweep_csv_header() << "\n";
  for (const auto& row : rows) out << format_sweep_row(row) << "\n";
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn Ising models by constrained maximum pseudo-likelihood", "isinglearn"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Draw an interaction matrix from an ensemble");
  generate_cmd->add_option("--config", gen.config, "Config file (ensemble block)");
  generate_cmd->add_option("--out", gen.out, "Model file (stdout when omitted)");
  generate_cmd->add_option("--kind", gen.kind, "SK, DilutedSK, CurieWeiss, AntiferroExpander, BoundedWidthRandom");
  generate_cmd->add_option("--n", gen.n);
  generate_cmd->add_option("--beta", gen.beta);
  generate_cmd->add_option("--d", gen.d);
  generate_cmd->add_option("--width", gen.width);
  generate_cmd->add_option("--seed", gen.seed);
  generate_cmd->add_option("--encoding", gen.encoding)->check(CLI::IsMember({"dense", "triplets"}));

  SampleArgs smp;
  auto* sample_cmd = app.add_subcommand("sample", "Draw samples from a model");
  sample_cmd->add_option("--model", smp.model)->required();
  sample_cmd->add_option("--l", smp.l, "Number of samples")->required();
  sample_cmd->add_option("--method", smp.method)->check(CLI::IsMember({"glauber", "exact"}));
  sample_cmd->add_option("--seed", smp.seed);
  sample_cmd->add_option("--out", smp.out, "Sample CSV (stdout when omitted)");
  sample_cmd->add_option("--chains", smp.chains);
  sample_cmd->add_option("--burn-in", smp.burn_in, "Burn-in sweeps");
  sample_cmd->add_option("--thinning", smp.thinning, "Sweeps between recorded samples");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Constrained MPLE fit");
  fit_cmd->set_help_flag("--help", "Print this help message and exit");
  fit_cmd->add_option("--samples", fit.samples)->required();
  fit_cmd->add_option("--h", fit.h, "\"zero\" or a model file whose field is used");
  fit_cmd->add_option("--constraint", fit.constraint, "e.g. SpectralSpread(0.9), AntiferroSpike(0.5;1.5)");
  fit_cmd->add_option("--config", fit.config, "Config file (constraint and optimizer blocks)");
  fit_cmd->add_option("--max-iters", fit.max_iters);
  fit_cmd->add_option("--out", fit.out, "Estimated model file");
  fit_cmd->add_option("--report", fit.report, "FitReport JSON (default <out>.report.json)");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare two models");
  evaluate_cmd->add_option("--model-a", ev.model_a)->required();
  evaluate_cmd->add_option("--model-b", ev.model_b)->required();
  evaluate_cmd->add_option("--metrics", ev.metrics, "frobenius, op_norm_err, tv_exact, kl_exact")->expected(1, -1);
  evaluate_cmd->add_option("--out", ev.out, "Metric CSV (stdout when omitted)");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sample-size sweep");
  sweep_cmd->add_option("--config", sw.config)->required();
  sweep_cmd->add_option("--out", sw.out, "Results CSV (stdout when omitted)");
  sweep_cmd->add_option("--jobs", sw.jobs, "Cells run concurrently");
  sweep_cmd->add_option("--l-values", sw.l_values, "Overrides sweep.l_values")->delimiter(',');
  sweep_cmd->add_option("--seeds", sw.seeds, "Overrides sweep.seeds")->delimiter(',');

  DiagnoseArgs dg;
  auto* diagnose_cmd = app.add_subcommand("diagnose", "Run a structural probe");
  diagnose_cmd->add_option("--probe", dg.probe)
      ->required()
      ->check(CLI::IsMember({"subset", "regularity", "metric", "tvfrob", "gradconc"}));
  diagnose_cmd->add_option("--model", dg.model)->required();
  diagnose_cmd->add_option("--model-b", dg.model_b, "Second model (metric, tvfrob, gradconc direction)");
  diagnose_cmd->add_option("--seed", dg.seed);
  diagnose_cmd->add_option("--eta", dg.eta, "subset: target width");
  diagnose_cmd->add_option("--width-bound", dg.width_bound, "subset: M (default |J|_inf)");
  diagnose_cmd->add_option("--gamma", dg.gamma, "regularity: base moment (default 1/n)");
  diagnose_cmd->add_option("--num", dg.num, "regularity: directions");
  diagnose_cmd->add_option("--l", dg.l, "gradconc: batch size");
  diagnose_cmd->add_option("--batches", dg.batches, "gradconc: batches");
  diagnose_cmd->add_option("--out", dg.out, "CSV (stdout when omitted)");

  std::vector<std::string> argv_storage{"isinglearn"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*generate_cmd) return cmd_generate(*generate_cmd, gen, out);
    if (*sample_cmd) return cmd_sample(*sample_cmd, smp, out);
    if (*fit_cmd) return cmd_fit(*fit_cmd, fit, out);
    if (*evaluate_cmd) return cmd_evaluate(ev, out);
    if (*sweep_cmd) return cmd_sweep(*sweep_cmd, sw, out);
    if (*diagnose_cmd) return cmd_diagnose(*diagnose_cmd, dg, out);
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCapability;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace isinglearn::cli
