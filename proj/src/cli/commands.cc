#include "dnns/cli.h"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnns/csv.h"
#include "dnns/inframetric.h"
#include "dnns/metrics.h"
#include "dnns/rng.h"

namespace dnns {

namespace fs = std::filesystem;

std::string provenance(std::uint64_t seed, std::uint64_t hash) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "seed=%" PRIu64 " config_hash=%016" PRIx64, seed, hash);
  return buf;
}

namespace {

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (double x : v) {
    if (!s.empty()) s += ',';
    s += fmt_double(x, 6);
  }
  return s;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

struct MatrixArgs {
  std::string path;
  std::string format = "king";
  std::string synthetic;
  SyntheticParams synth;
};

void add_matrix_options(CLI::App* cmd, MatrixArgs& a) {
  cmd->add_option("--matrix", a.path, "delay matrix file");
  cmd->add_option("--format", a.format, "matrix format: king or csv");
  cmd->add_option("--synthetic", a.synthetic, "generate instead: euclidean, clustered or asymmetric");
  cmd->add_option("--n", a.synth.n, "synthetic node count");
  cmd->add_option("--noise", a.synth.noise, "synthetic multiplicative noise");
  cmd->add_option("--asym", a.synth.asym_factor, "synthetic asymmetry factor");
  cmd->add_option("--clusters", a.synth.clusters, "synthetic cluster count");
  cmd->add_option("--aspect", a.synth.aspect, "synthetic box aspect: axis a has side box*aspect^a");
  cmd->add_option("--matrix-seed", a.synth.seed, "synthetic generator seed");
}

DelayMatrix matrix_from(const MatrixArgs& a, std::string& description) {
  if (!a.synthetic.empty()) {
    SyntheticParams p = a.synth;
    p.kind = parse_synthetic_kind(a.synthetic);
    description = "synthetic=" + a.synthetic + " n=" + std::to_string(p.n) + " noise=" + fmt_double(p.noise) +
                  " asym=" + fmt_double(p.asym_factor) + " clusters=" + std::to_string(p.clusters) +
                  " aspect=" + fmt_double(p.aspect) + " matrix_seed=" + std::to_string(p.seed);
    return gen_synthetic(p);
  }
  if (a.path.empty()) throw ContractError("--matrix: a matrix path or --synthetic is required");
  description = "matrix=" + a.path + " format=" + a.format;
  return load_matrix(a.path, parse_matrix_format(a.format));
}

struct AnalyzeArgs {
  MatrixArgs matrix;
  std::string out = ".";
  std::uint64_t seed = 1;
  std::size_t triples = 1'000'000;
  double rho = 3.0;
  std::vector<double> radii{5, 10, 20, 40, 80, 160};
  std::vector<double> xs{2, 3, 4, 9};
  std::vector<double> fractions{0.2, 0.5, 0.75, 1.0};
  std::vector<double> betas{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> alphas{0, 0.5, 1, 1.5, 2, 2.5, 3};
};

int analyze(const AnalyzeArgs& a, std::ostream& out) {
  std::string desc;
  const DelayMatrix m = matrix_from(a.matrix, desc);
  if (m.size() < 3) throw ContractError("--matrix: analysis needs at least 3 nodes");
  const std::string canon = desc + " seed=" + std::to_string(a.seed) + " triples=" + std::to_string(a.triples) +
                            " rho=" + fmt_double(a.rho) + " radii=" + join_doubles(a.radii) +
                            " xs=" + join_doubles(a.xs) + " fractions=" + join_doubles(a.fractions);
  const std::string prov = provenance(a.seed, fnv1a(canon));
  ensure_dir(a.out);

  const RhoStats rs = rho_stats(m, a.triples, a.seed);
  CsvWriter rho;
  rho.comment(prov);
  rho.comment(desc);
  rho.comment("evaluated=" + std::to_string(rs.evaluated) + " skipped=" + std::to_string(rs.skipped) +
              " exhaustive=" + (rs.exhaustive ? "1" : "0") + " mean=" + fmt_double(rs.mean) +
              " frac_rho_gt2=" + fmt_double(rs.frac_rho_gt2) + " frac_rho_gt3=" + fmt_double(rs.frac_rho_gt3));
  rho.header({"percentile", "rho"});
  for (const auto& [p, v] : rs.quantiles) rho.row({fmt_double(p, 0), fmt_double(v, 9)});
  rho.save(fs::path(a.out) / "rho.csv");

  CsvWriter growth;
  growth.comment(prov);
  growth.comment("rho=" + fmt_double(a.rho));
  growth.header({"node_fraction", "radius_ms", "median", "p90", "nodes"});
  for (double f : a.fractions) {
    for (const GrowthRow& g : growth_stats(m, a.rho, a.radii, f, a.seed)) {
      growth.row({fmt_double(f, 2), fmt_double(g.radius, 3), fmt_double(g.median), fmt_double(g.p90),
                  std::to_string(g.nodes)});
    }
  }
  growth.save(fs::path(a.out) / "growth.csv");

  CsvWriter alpha;
  alpha.comment(prov);
  alpha.header({"radius_ms", "x", "median_alpha"});
  for (const AlphaRow& r : alpha_stats(m, a.radii, a.xs, 1.0, a.seed)) {
    alpha.row({fmt_double(r.radius, 3), fmt_double(r.x, 3), fmt_double(r.median)});
  }
  alpha.save(fs::path(a.out) / "alpha.csv");

  const RingOccupancy occ = ring_occupancy(m, 1.0, 2.0, 20);
  CsvWriter rings;
  rings.comment(prov);
  rings.comment("alpha_base=1 s=2 rings=20");
  rings.header({"ring", "lower_ms", "upper_ms", "fraction"});
  for (std::size_t i = 0; i < occ.aggregate.size(); ++i) {
    rings.row({std::to_string(i + 1), fmt_double(i == 0 ? 0.0 : std::pow(2.0, static_cast<double>(i)), 3),
               i + 1 == occ.aggregate.size() ? "inf" : fmt_double(std::pow(2.0, static_cast<double>(i + 1)), 3),
               fmt_double(occ.aggregate[i], 9)});
  }
  rings.save(fs::path(a.out) / "ring_occupancy.csv");

  CsvWriter samples;
  samples.comment(prov);
  samples.header({"rho", "beta", "alpha", "samples"});
  for (double b : a.betas) {
    for (double al : a.alphas) {
      samples.row({fmt_double(a.rho, 3), fmt_double(b, 3), fmt_double(al, 3),
                   std::to_string(required_samples(a.rho, b, al))});
    }
  }
  samples.save(fs::path(a.out) / "samples_table.csv");

  out << "analyzed " << m.size() << " nodes; rho p95=" << fmt_double(rs.quantiles.at(95), 4)
      << " max=" << fmt_double(rs.max, 4) << "; outputs in " << a.out << "\n";
  return 0;
}

struct SimArgs {
  std::string config;
  std::vector<std::string> configs;
  std::vector<std::string> sets;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::string trace;
  std::size_t jobs = 1;
  std::string sweep;
  std::ostream* log = nullptr;  // per-trial progress when verbose
};

SimConfig build_config(const std::string& path, const SimArgs& a) {
  SimConfig cfg = path.empty() ? SimConfig{} : load_config(path);
  for (const std::string& s : a.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("--set " + s + ": expected key=value");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (a.seed) cfg.seed = *a.seed;
  validate(cfg);
  return cfg;
}

RunReport run_campaign(const SimConfig& cfg, const SimArgs& a, const std::string& trace_path) {
  const DelayMatrix m = load_or_generate(cfg);
  RunOptions opts;
  opts.jobs = a.jobs;
  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path, std::ios::binary);
    if (!trace) throw std::runtime_error("cannot write trace file " + trace_path);
    trace << "# " << provenance(cfg.seed, config_hash(cfg)) << "\n";
    opts.trace = &trace;
  }
  RunReport rep = run(cfg, m, opts);
  if (a.log != nullptr) {
    for (const TrialReport& t : rep.trials) {
      for (const AlgorithmRun& r : t.runs) {
        const Summary s = summarize(std::string(to_string(r.algo)), r.records);
        *a.log << "trial " << t.trial << " " << s.algorithm << ": hit=" << fmt_double(s.hit_fraction, 4)
               << " median_rel=" << fmt_double(s.rel_error.median, 4) << " probes=" << fmt_double(s.mean_probes, 2)
               << "\n";
      }
    }
  }
  return rep;
}

std::vector<Summary> pooled_summaries(const RunReport& rep, const SimConfig& cfg) {
  std::vector<Summary> rows;
  for (Algorithm algo : cfg.algorithms) {
    std::vector<QueryRecord> pooled;
    for (const TrialReport& t : rep.trials) {
      for (const AlgorithmRun& r : t.runs) {
        if (r.algo == algo) pooled.insert(pooled.end(), r.records.begin(), r.records.end());
      }
    }
    Summary s = summarize(std::string(to_string(algo)), pooled);
    s.trial = rep.trials.size();
    rows.push_back(std::move(s));
  }
  return rows;
}

int simulate(const SimArgs& a, std::ostream& out) {
  const SimConfig base = build_config(a.config, a);
  if (a.sweep.empty()) {
    const RunReport rep = run_campaign(base, a, a.trace);
    write_campaign(rep, base, a.out);
    out << "simulated " << rep.trials.size() << " trial(s); outputs in " << a.out << "\n";
    return 0;
  }
  auto eq = a.sweep.find('=');
  if (eq == std::string::npos) throw ParseError("--sweep " + a.sweep + ": expected key=v1,v2,...");
  const std::string key = a.sweep.substr(0, eq);
  std::vector<std::string> values;
  std::stringstream ss(a.sweep.substr(eq + 1));
  for (std::string v; std::getline(ss, v, ',');) {
    if (!v.empty()) values.push_back(v);
  }
  if (values.empty()) throw ParseError("--sweep " + a.sweep + ": no values");
  ensure_dir(a.out);
  std::vector<Summary> rows;
  std::vector<std::string> col_key, col_value, col_hash;
  for (const std::string& v : values) {
    SimConfig cfg = base;
    apply_setting(cfg, key, v);
    validate(cfg);
    const RunReport rep = run_campaign(cfg, a, "");
    const std::string sub = (fs::path(a.out) / (key + "_" + v)).string();
    write_campaign(rep, cfg, sub);
    for (Summary& s : pooled_summaries(rep, cfg)) {
      rows.push_back(std::move(s));
      col_key.push_back(key);
      col_value.push_back(v);
      char h[20];
      std::snprintf(h, sizeof h, "%016" PRIx64, config_hash(cfg));
      col_hash.push_back(h);
    }
  }
  const std::string csv = summary_csv(rows, provenance(base.seed, config_hash(base)),
                                      {{"sweep_key", col_key}, {"sweep_value", col_value}, {"config_hash", col_hash}});
  CsvWriter w;
  std::ofstream f(fs::path(a.out) / "sweep.csv", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(a.out) / "sweep.csv").string());
  f << csv;
  out << "swept " << key << " over " << values.size() << " value(s); outputs in " << a.out << "\n";
  return 0;
}

int compare(const SimArgs& a, std::ostream& out) {
  if (a.configs.empty()) throw ContractError("--configs: at least one config file is required");
  ensure_dir(a.out);
  std::vector<Summary> rows;
  std::vector<std::string> col_config, col_hash;
  std::uint64_t combined = 14695981039346656037ULL;
  std::uint64_t seed = 0;
  for (const std::string& path : a.configs) {
    const SimConfig cfg = build_config(path, a);
    seed = cfg.seed;
    combined = fnv1a(canonical_config(cfg), combined);
    const RunReport rep = run_campaign(cfg, a, "");
    const std::string name = fs::path(path).stem().string();
    write_campaign(rep, cfg, (fs::path(a.out) / name).string());
    for (Summary& s : pooled_summaries(rep, cfg)) {
      rows.push_back(std::move(s));
      col_config.push_back(name);
      char h[20];
      std::snprintf(h, sizeof h, "%016" PRIx64, config_hash(cfg));
      col_hash.push_back(h);
    }
  }
  const std::string csv =
      summary_csv(rows, provenance(seed, combined), {{"config", col_config}, {"config_hash", col_hash}});
  std::ofstream f(fs::path(a.out) / "compare.csv", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(a.out) / "compare.csv").string());
  f << csv;
  out << "compared " << a.configs.size() << " config(s); outputs in " << a.out << "\n";
  return 0;
}

struct GenArgs {
  std::string kind = "euclidean";
  SyntheticParams p;
  std::string out;
  std::string format = "king";
};

int gen(const GenArgs& a, std::ostream& out) {
  SyntheticParams p = a.p;
  p.kind = parse_synthetic_kind(a.kind);
  const DelayMatrix m = gen_synthetic(p);
  const MatrixFormat fmt = parse_matrix_format(a.format);
  const std::string canon = "kind=" + a.kind + " n=" + std::to_string(p.n) + " noise=" + fmt_double(p.noise) +
                            " asym=" + fmt_double(p.asym_factor) + " clusters=" + std::to_string(p.clusters) +
                            " dim=" + std::to_string(p.dim) + " box=" + fmt_double(p.box_ms) + " aspect=" + fmt_double(p.aspect);
  std::string text = "# " + provenance(p.seed, fnv1a(canon)) + "\n# " + canon + "\n" + serialize_matrix(m, fmt);
  std::ofstream f(a.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write matrix file " + a.out);
  f << text;
  f.close();
  if (!f) throw std::runtime_error("failed writing matrix file " + a.out);

  const double rho = instance_rho(m, 0, 200'000, p.seed);
  const std::vector<Millis> radii{10, 20, 40, 80};
  out << "wrote " << a.out << " (n=" << m.size() << ", symmetric=" << (m.symmetric() ? "true" : "false")
      << ")\n";
  out << "instance_rho_sampled=" << fmt_double(rho, 6) << "\n";
  for (const GrowthRow& g : growth_stats(m, 3.0, radii, std::min(1.0, 200.0 / static_cast<double>(m.size())),
                                         p.seed)) {
    out << "growth r=" << fmt_double(g.radius, 1) << " median=" << fmt_double(g.median, 4)
        << " p90=" << fmt_double(g.p90, 4) << "\n";
  }
  return 0;
}

}  // namespace

std::string campaign_summary_csv(const RunReport& rep, const SimConfig& cfg, const std::string& comment) {
  std::vector<Summary> rows;
  std::vector<std::string> scope;
  for (Algorithm algo : cfg.algorithms) {
    for (const TrialReport& t : rep.trials) {
      for (const AlgorithmRun& r : t.runs) {
        if (r.algo != algo) continue;
        Summary s = summarize(std::string(to_string(algo)), r.records);
        s.trial = t.trial;
        rows.push_back(std::move(s));
        scope.emplace_back("trial");
      }
    }
  }
  for (Summary& s : pooled_summaries(rep, cfg)) {
    rows.push_back(std::move(s));
    scope.emplace_back("pooled");
  }
  return summary_csv(rows, comment, {{"scope", scope}});
}

void write_campaign(const RunReport& rep, const SimConfig& cfg, const std::string& dir) {
  ensure_dir(dir);
  const std::string prov = provenance(cfg.seed, config_hash(cfg));
  for (const TrialReport& t : rep.trials) {
    for (const AlgorithmRun& r : t.runs) {
      const std::string name = "records_" + std::string(to_string(r.algo)) + "_t" + std::to_string(t.trial) + ".csv";
      std::ofstream f(fs::path(dir) / name, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
      f << records_csv(r.records, prov + " trial=" + std::to_string(t.trial));
    }
  }
  CsvWriter bytes;
  bytes.comment(prov);
  bytes.header({"trial", "profile", "maintenance_bytes", "query_bytes", "messages"});
  for (const TrialReport& t : rep.trials) {
    for (const ProfileStats& p : t.profiles) {
      bytes.row({std::to_string(t.trial), std::string(to_string(p.profile)), std::to_string(p.bytes.maintenance),
                 std::to_string(p.bytes.queries), std::to_string(p.bytes.messages)});
    }
  }
  bytes.save(fs::path(dir) / "overhead.csv");
  std::ofstream f(fs::path(dir) / "summary.csv", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / "summary.csv").string());
  f << campaign_summary_csv(rep, cfg, prov);
  std::ofstream c(fs::path(dir) / "config.txt", std::ios::binary);
  c << "# " << prov << "\n" << canonical_config(cfg);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed nearest-neighbor search simulator and delay-space analytics", "dnns"};
  app.require_subcommand(1, 1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "per-trial progress on stderr");

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "inframetric statistics of a delay matrix");
  add_matrix_options(c_an, an.matrix);
  c_an->add_option("--out", an.out, "output directory");
  c_an->add_option("--seed", an.seed, "sampling seed");
  c_an->add_option("--triples", an.triples, "sampled triples for rho statistics");
  c_an->add_option("--rho", an.rho, "rho used for growth and sample counts");
  c_an->add_option("--radii", an.radii, "growth and alpha radii (ms)")->delimiter(',');
  c_an->add_option("--xs", an.xs, "alpha ratios x")->delimiter(',');
  c_an->add_option("--fractions", an.fractions, "node fractions for growth")->delimiter(',');

  SimArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "run a seeded campaign");
  c_sim->add_option("--config", sim.config, "flat key = value config file");
  c_sim->add_option("--set", sim.sets, "override key=value (repeatable)");
  c_sim->add_option("--out", sim.out, "output directory");
  c_sim->add_option("--seed", sim.seed, "seed override");
  c_sim->add_option("--trace", sim.trace, "protocol trace log path");
  c_sim->add_option("--jobs", sim.jobs, "parallel trials");
  c_sim->add_option("--sweep", sim.sweep, "sensitivity sweep key=v1,v2,...");

  SimArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "run several configs with paired seeds and join summaries");
  c_cmp->add_option("--configs", cmp.configs, "config files")->required();
  c_cmp->add_option("--set", cmp.sets, "override key=value for every config");
  c_cmp->add_option("--out", cmp.out, "output directory");
  c_cmp->add_option("--seed", cmp.seed, "seed applied to every config");
  c_cmp->add_option("--jobs", cmp.jobs, "parallel trials");

  GenArgs g;
  auto* c_gen = app.add_subcommand("gen", "write a synthetic delay matrix");
  c_gen->add_option("--kind", g.kind, "euclidean, clustered or asymmetric");
  c_gen->add_option("--n", g.p.n, "node count");
  c_gen->add_option("--noise", g.p.noise, "multiplicative noise");
  c_gen->add_option("--asym", g.p.asym_factor, "asymmetry factor");
  c_gen->add_option("--clusters", g.p.clusters, "cluster count");
  c_gen->add_option("--dim", g.p.dim, "embedding dimension");
  c_gen->add_option("--box", g.p.box_ms, "longest side of the point box (ms)");
  c_gen->add_option("--aspect", g.p.aspect, "side ratio between consecutive axes");
  c_gen->add_option("--seed", g.p.seed, "generator seed");
  c_gen->add_option("--format", g.format, "king or csv");
  c_gen->add_option("--out", g.out, "output matrix file")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code;
  }

  if (verbose) sim.log = cmp.log = &err;
  try {
    if (c_an->parsed()) return analyze(an, out);
    if (c_sim->parsed()) return simulate(sim, out);
    if (c_cmp->parsed()) return compare(cmp, out);
    if (c_gen->parsed()) return gen(g, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace dnns
