#include "dnns/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "dnns/rng.h"

namespace dnns {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view what) {
  throw ParseError(std::string(key) + ": " + std::string(what) + " (got '" + std::string(value) + "')");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected a number");
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected a non-negative integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "expected true or false");
}

std::string num(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string num(std::uint64_t v) { return std::to_string(v); }

struct Key {
  const char* name;
  std::function<void(SimConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

#define DNNS_DOUBLE(name, field)                                                                         \
  Key {                                                                                                  \
    name, [](SimConfig& c, std::string_view k, std::string_view v) { c.field = to_double(k, v); },      \
        [](const SimConfig& c) { return num(static_cast<double>(c.field)); }                             \
  }
#define DNNS_COUNT(name, field)                                                                          \
  Key {                                                                                                  \
    name, [](SimConfig& c, std::string_view k, std::string_view v) { c.field = to_u64(k, v); },         \
        [](const SimConfig& c) { return num(static_cast<std::uint64_t>(c.field)); }                      \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      {"matrix", [](SimConfig& c, std::string_view, std::string_view v) { c.matrix_path = std::string(v); },
       [](const SimConfig& c) { return c.matrix_path; }},
      {"matrix_format",
       [](SimConfig& c, std::string_view k, std::string_view v) {
         try {
           c.matrix_format = parse_matrix_format(v);
         } catch (const std::exception&) {
           bad(k, v, "expected king or csv");
         }
       },
       [](const SimConfig& c) { return std::string(c.matrix_format == MatrixFormat::kCsv ? "csv" : "king"); }},
      {"synthetic",
       [](SimConfig& c, std::string_view k, std::string_view v) {
         try {
           c.synth.kind = parse_synthetic_kind(v);
         } catch (const std::exception&) {
           bad(k, v, "expected euclidean, clustered or asymmetric");
         }
       },
       [](const SimConfig& c) { return std::string(to_string(c.synth.kind)); }},
      DNNS_COUNT("n", synth.n),
      DNNS_DOUBLE("noise", synth.noise),
      DNNS_DOUBLE("asym_factor", synth.asym_factor),
      DNNS_COUNT("clusters", synth.clusters),
      DNNS_COUNT("synth_dim", synth.dim),
      DNNS_DOUBLE("box_ms", synth.box_ms),
      DNNS_DOUBLE("box_aspect", synth.aspect),
      DNNS_COUNT("matrix_seed", synth.seed),
      DNNS_COUNT("servers", servers),
      DNNS_COUNT("trials", trials),
      DNNS_COUNT("queries", queries),
      DNNS_DOUBLE("gossip_mean", gossip_mean),
      DNNS_DOUBLE("ring_mgmt_mean", ring_mgmt_mean),
      DNNS_DOUBLE("oversample_mean", oversample_mean),
      DNNS_DOUBLE("query_mean", query_mean),
      DNNS_DOUBLE("warmup", warmup),
      DNNS_COUNT("seed", seed),
      {"latency_mode",
       [](SimConfig& c, std::string_view k, std::string_view v) {
         if (v == "instant") {
           c.latency_mode = LatencyMode::kInstant;
         } else if (v == "matrix") {
           c.latency_mode = LatencyMode::kMatrix;
         } else {
           bad(k, v, "expected instant or matrix");
         }
       },
       [](const SimConfig& c) {
         return std::string(c.latency_mode == LatencyMode::kInstant ? "instant" : "matrix");
       }},
      {"measure",
       [](SimConfig& c, std::string_view k, std::string_view v) {
         if (v == "forward") {
           c.measure = MeasureMode::kForward;
         } else if (v == "rtt") {
           c.measure = MeasureMode::kRttAverage;
         } else {
           bad(k, v, "expected forward or rtt");
         }
       },
       [](const SimConfig& c) { return std::string(c.measure == MeasureMode::kForward ? "forward" : "rtt"); }},
      {"oracle",
       [](SimConfig& c, std::string_view k, std::string_view v) {
         if (v == "server_to_target") {
           c.oracle = OracleDirection::kServerToTarget;
         } else if (v == "target_to_server") {
           c.oracle = OracleDirection::kTargetToServer;
         } else if (v == "rtt") {
           c.oracle = OracleDirection::kRttAverage;
         } else {
           bad(k, v, "expected server_to_target, target_to_server or rtt");
         }
       },
       [](const SimConfig& c) {
         switch (c.oracle) {
           case OracleDirection::kServerToTarget: return std::string("server_to_target");
           case OracleDirection::kTargetToServer: return std::string("target_to_server");
           case OracleDirection::kRttAverage: break;
         }
         return std::string("rtt");
       }},
      DNNS_DOUBLE("probe_jitter", probe_jitter),
      {"oversample", [](SimConfig& c, std::string_view k, std::string_view v) { c.oversample = to_bool(k, v); },
       [](const SimConfig& c) { return std::string(c.oversample ? "true" : "false"); }},
      {"algorithms",
       [](SimConfig& c, std::string_view k, std::string_view v) {
         c.algorithms.clear();
         std::size_t pos = 0;
         while (pos <= v.size()) {
           auto comma = v.find(',', pos);
           if (comma == std::string_view::npos) comma = v.size();
           auto item = trim(v.substr(pos, comma - pos));
           if (!item.empty()) {
             try {
               c.algorithms.push_back(parse_algorithm(item));
             } catch (const std::exception&) {
               bad(k, item, "unknown algorithm");
             }
           }
           pos = comma + 1;
         }
       },
       [](const SimConfig& c) {
         std::string s;
         for (Algorithm a : c.algorithms) {
           if (!s.empty()) s += ',';
           s += to_string(a);
         }
         return s;
       }},
      DNNS_DOUBLE("rho", protocol.rho),
      DNNS_DOUBLE("beta", protocol.beta),
      DNNS_COUNT("m", protocol.m),
      DNNS_COUNT("tau", protocol.tau),
      DNNS_COUNT("K", protocol.K),
      DNNS_DOUBLE("err_gate", protocol.err_gate),
      DNNS_DOUBLE("tiv_gap", protocol.tiv_gap),
      DNNS_DOUBLE("beta_farthest", protocol.beta_farthest),
      DNNS_COUNT("hop_cap", protocol.hop_cap),
      DNNS_COUNT("bootstrap_probes", protocol.bootstrap_probes),
      DNNS_DOUBLE("beta_cutoff", protocol.beta_cutoff),
      DNNS_COUNT("target_refit", protocol.target_refit),
      DNNS_COUNT("ring_capacity", ring.capacity),
      DNNS_COUNT("ring_tolerance", ring.tolerance),
      DNNS_DOUBLE("ring_alpha", ring.alpha_base),
      DNNS_DOUBLE("ring_s", ring.s),
      DNNS_COUNT("ring_count", ring.max_rings),
      DNNS_COUNT("median_window", ring.window),
      DNNS_COUNT("dim", vivaldi.dim),
      DNNS_DOUBLE("cc", vivaldi.cc),
      DNNS_DOUBLE("ce", vivaldi.ce),
      DNNS_DOUBLE("tiv_gate", vivaldi.tiv_gate),
      DNNS_DOUBLE("e_min", vivaldi.e_min),
      DNNS_DOUBLE("meridian_beta", meridian_beta),
      DNNS_COUNT("meridian_ring_capacity", meridian_ring_capacity),
      DNNS_COUNT("meridian_ring_tolerance", meridian_ring_tolerance),
      DNNS_COUNT("vivaldi_rounds", vivaldi_rounds),
      {"byte_model",
       [](SimConfig& c, std::string_view k, std::string_view v) {
         if (v != "default") bad(k, v, "only the default model is defined");
         c.byte_model = "default";
         c.bytes = ByteCostModel{};
       },
       [](const SimConfig& c) { return c.byte_model; }},
      DNNS_COUNT("bytes_header", bytes.header),
      DNNS_COUNT("bytes_path_entry", bytes.per_path_entry),
      DNNS_COUNT("bytes_coordinate", bytes.per_coordinate),
      DNNS_COUNT("bytes_ring_sample", bytes.per_ring_sample),
      DNNS_COUNT("bytes_probe", bytes.per_probe),
      {"churn",
       [](SimConfig& c, std::string_view k, std::string_view v) {
         try {
           c.churn = parse_churn(v);
         } catch (const ParseError& e) {
           bad(k, v, e.what());
         }
       },
       [](const SimConfig& c) { return format_churn(c.churn); }},
      DNNS_COUNT("churn_leaves", churn_leaves),
      DNNS_COUNT("churn_joins", churn_joins),
  };
  return k;
}

#undef DNNS_DOUBLE
#undef DNNS_COUNT

}  // namespace

void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  for (const Key& k : keys()) {
    if (key == k.name) {
      k.set(cfg, key, value);
      return;
    }
  }
  throw ParseError(std::string(key) + ": unknown configuration key");
}

SimConfig parse_config(std::string_view text, SimConfig base) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": " + std::string(line) + ": expected key = value");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

SimConfig load_config(const std::filesystem::path& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void validate(const SimConfig& cfg) {
  auto positive = [](double v, const char* key) {
    if (!(v > 0)) throw ContractError(std::string(key) + ": must be > 0");
  };
  positive(cfg.gossip_mean, "gossip_mean");
  positive(cfg.ring_mgmt_mean, "ring_mgmt_mean");
  positive(cfg.oversample_mean, "oversample_mean");
  positive(cfg.query_mean, "query_mean");
  if (!(cfg.warmup >= 0)) throw ContractError("warmup: must be >= 0");
  if (cfg.servers < 1) throw ContractError("servers: must be >= 1");
  if (cfg.trials < 1) throw ContractError("trials: must be >= 1");
  if (!(cfg.probe_jitter >= 0)) throw ContractError("probe_jitter: must be >= 0");
  if (cfg.algorithms.empty()) throw ContractError("algorithms: at least one algorithm is required");
  validate(cfg.protocol);
  if (cfg.ring.capacity < 1) throw ContractError("ring_capacity: must be >= 1");
  if (!(cfg.ring.alpha_base > 0)) throw ContractError("ring_alpha: must be > 0");
  if (!(cfg.ring.s > 1)) throw ContractError("ring_s: must be > 1");
  if (cfg.ring.max_rings < 1) throw ContractError("ring_count: must be >= 1");
  if (cfg.ring.window < 1) throw ContractError("median_window: must be >= 1");
  if (cfg.vivaldi.dim < 1) throw ContractError("dim: must be >= 1");
  if (!(cfg.vivaldi.cc > 0 && cfg.vivaldi.cc <= 1)) throw ContractError("cc: must be in (0,1]");
  if (!(cfg.vivaldi.ce > 0 && cfg.vivaldi.ce <= 1)) throw ContractError("ce: must be in (0,1]");
  if (!(cfg.vivaldi.tiv_gate > 0)) throw ContractError("tiv_gate: must be > 0");
  if (!(cfg.vivaldi.e_min > 0 && cfg.vivaldi.e_min <= 1)) throw ContractError("e_min: must be in (0,1]");
  if (!(cfg.meridian_beta > 0 && cfg.meridian_beta <= 1)) throw ContractError("meridian_beta: must be in (0,1]");
  if (cfg.meridian_ring_capacity < 1) throw ContractError("meridian_ring_capacity: must be >= 1");
  if (cfg.matrix_path.empty()) {
    if (cfg.synth.n < 2) throw ContractError("n: must be >= 2");
    if (!(cfg.synth.noise >= 0)) throw ContractError("noise: must be >= 0");
    if (!(cfg.synth.asym_factor >= 0)) throw ContractError("asym_factor: must be >= 0");
    if (cfg.synth.dim < 1) throw ContractError("synth_dim: must be >= 1");
    if (!(cfg.synth.box_ms > 0)) throw ContractError("box_ms: must be > 0");
    if (!(cfg.synth.aspect > 0 && cfg.synth.aspect <= 1)) throw ContractError("box_aspect: must be in (0,1]");
    if (cfg.servers >= cfg.synth.n) throw ContractError("servers: must be smaller than n");
  }
  for (const ChurnEvent& e : cfg.churn) {
    if (!(e.time >= 0)) throw ContractError("churn: event times must be >= 0");
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

std::string canonical_config(const SimConfig& cfg) {
  std::string s;
  for (const auto& [k, v] : config_entries(cfg)) s += k + " = " + v + "\n";
  return s;
}

std::uint64_t config_hash(const SimConfig& cfg) { return fnv1a(canonical_config(cfg)); }

std::vector<ChurnEvent> parse_churn(std::string_view text) {
  // leave@700:12, join@800:1500
  std::vector<ChurnEvent> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find_first_of(",;", pos);
    if (comma == std::string_view::npos) comma = text.size();
    auto item = trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) continue;
    auto at = item.find('@');
    auto colon = item.find(':');
    if (at == std::string_view::npos || colon == std::string_view::npos || colon < at) {
      throw ParseError("churn event '" + std::string(item) + "' is not kind@time:node");
    }
    auto kind = trim(item.substr(0, at));
    ChurnEvent e;
    if (kind == "join") {
      e.join = true;
    } else if (kind != "leave") {
      throw ParseError("churn event kind must be join or leave");
    }
    e.time = to_double("churn", trim(item.substr(at + 1, colon - at - 1)));
    e.node = static_cast<NodeId>(to_u64("churn", trim(item.substr(colon + 1))));
    out.push_back(e);
  }
  return out;
}

std::string format_churn(const std::vector<ChurnEvent>& events) {
  std::string s;
  for (const ChurnEvent& e : events) {
    if (!s.empty()) s += ',';
    s += (e.join ? "join@" : "leave@") + num(e.time) + ":" + std::to_string(e.node);
  }
  return s;
}

DelayMatrix load_or_generate(const SimConfig& cfg) {
  if (cfg.matrix_path.empty()) return gen_synthetic(cfg.synth);
  return load_matrix(cfg.matrix_path, cfg.matrix_format);
}

}  // namespace dnns
