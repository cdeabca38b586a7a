#include "dnns/metrics.h"

#include <algorithm>
#include <limits>

#include "dnns/csv.h"
#include "dnns/inframetric.h"

namespace dnns {

double absolute_error(const QueryRecord& rec) {
  if (is_missing(rec.oracle_delay)) throw ContractError("absolute_error: oracle delay missing");
  if (is_missing(rec.returned_delay)) throw ContractError("absolute_error: returned delay missing");
  return rec.returned_delay - rec.oracle_delay;
}

RelativeError relative_error(const QueryRecord& rec) {
  const double abs = absolute_error(rec);
  if (rec.oracle_delay > 0) return {abs / rec.oracle_delay, false};
  if (rec.returned_delay == 0) return {0, false};
  return {std::numeric_limits<double>::infinity(), true};
}

std::size_t search_hops(std::size_t path_length) { return path_length == 0 ? 0 : path_length - 1; }

bool exact_hit(const QueryRecord& rec) {
  if (rec.no_result) return false;
  return rec.returned == rec.oracle || rec.returned_delay == rec.oracle_delay;
}

std::vector<std::pair<double, double>> ccdf(std::span<const double> values, std::span<const double> points) {
  if (values.empty()) throw ContractError("ccdf: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(points.size());
  for (double x : points) {
    auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
    out.emplace_back(x, static_cast<double>(above) / static_cast<double>(sorted.size()));
  }
  return out;
}

Distribution distribution(std::vector<double> values) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  double sum = 0;
  for (double v : values) sum += v;
  return {percentile_sorted(values, 50), percentile_sorted(values, 90), sum / static_cast<double>(values.size())};
}

Summary summarize(std::string algorithm, std::span<const QueryRecord> records) {
  Summary s;
  s.algorithm = std::move(algorithm);
  s.queries = records.size();
  std::vector<double> abs, rel, hops;
  std::size_t hits = 0, within4 = 0;
  double probes = 0, boot = 0, bytes = 0, wall = 0;
  for (const QueryRecord& r : records) {
    probes += static_cast<double>(r.probes);
    boot += static_cast<double>(r.bootstrap_probes);
    bytes += static_cast<double>(r.bytes);
    wall += r.wall_ms;
    s.budget_exhausted += r.budget_exhausted;
    if (r.no_result) continue;
    ++s.answered;
    hits += exact_hit(r);
    abs.push_back(absolute_error(r));
    auto re = relative_error(r);
    if (re.infinite) {
      ++s.rel_infinite;
    } else {
      rel.push_back(re.value);
    }
    hops.push_back(static_cast<double>(r.hops));
    within4 += r.hops <= 4;
  }
  const double n = static_cast<double>(std::max<std::size_t>(records.size(), 1));
  const double answered = static_cast<double>(std::max<std::size_t>(s.answered, 1));
  s.hit_fraction = static_cast<double>(hits) / n;
  s.within4_fraction = static_cast<double>(within4) / answered;
  s.abs_error = distribution(std::move(abs));
  s.rel_error = distribution(std::move(rel));
  s.hops = distribution(std::move(hops));
  s.mean_probes = probes / n;
  s.mean_bootstrap_probes = boot / n;
  s.mean_bytes = bytes / n;
  s.mean_wall_ms = wall / n;
  return s;
}

namespace {

std::string id_or_blank(NodeId id) { return id == kNoNode ? "" : std::to_string(id); }

}  // namespace

std::string records_csv(std::span<const QueryRecord> records, const std::string& header_comment) {
  CsvWriter w;
  if (!header_comment.empty()) w.comment(header_comment);
  w.header({"query", "time", "target", "entry", "returned", "returned_delay", "oracle", "oracle_delay",
            "abs_error", "rel_error", "hit", "hops", "probes", "bootstrap_probes", "bytes", "wall_ms",
            "budget_exhausted", "no_result"});
  for (const QueryRecord& r : records) {
    std::string abs, rel;
    if (!r.no_result) {
      abs = fmt_double(absolute_error(r));
      auto re = relative_error(r);
      rel = re.infinite ? "inf" : fmt_double(re.value);
    }
    w.row({std::to_string(r.query), fmt_double(r.time), std::to_string(r.target), std::to_string(r.entry),
           id_or_blank(r.returned), r.no_result ? "" : fmt_double(r.returned_delay), id_or_blank(r.oracle),
           fmt_double(r.oracle_delay), abs, rel, exact_hit(r) ? "1" : "0", std::to_string(r.hops),
           std::to_string(r.probes), std::to_string(r.bootstrap_probes), std::to_string(r.bytes),
           fmt_double(r.wall_ms), r.budget_exhausted ? "1" : "0", r.no_result ? "1" : "0"});
  }
  return w.str();
}

std::string summary_csv(std::span<const Summary> rows, const std::string& header_comment,
                        const std::vector<std::pair<std::string, std::vector<std::string>>>& extra) {
  CsvWriter w;
  if (!header_comment.empty()) w.comment(header_comment);
  std::vector<std::string> cols;
  for (const auto& [name, values] : extra) cols.push_back(name);
  for (const char* c :
       {"algorithm", "trial", "queries", "answered", "hit_fraction", "abs_median", "abs_p90", "abs_mean",
        "rel_median", "rel_p90", "rel_mean", "rel_infinite", "hops_median", "hops_p90", "hops_mean",
        "within4_fraction", "mean_probes", "mean_bootstrap_probes", "mean_bytes", "mean_wall_ms",
        "budget_exhausted"}) {
    cols.emplace_back(c);
  }
  w.header(cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Summary& s = rows[i];
    std::vector<std::string> cells;
    for (const auto& [name, values] : extra) cells.push_back(i < values.size() ? values[i] : "");
    for (std::string c :
         {s.algorithm, std::to_string(s.trial), std::to_string(s.queries), std::to_string(s.answered),
          fmt_double(s.hit_fraction), fmt_double(s.abs_error.median), fmt_double(s.abs_error.p90),
          fmt_double(s.abs_error.mean), fmt_double(s.rel_error.median), fmt_double(s.rel_error.p90),
          fmt_double(s.rel_error.mean), std::to_string(s.rel_infinite), fmt_double(s.hops.median),
          fmt_double(s.hops.p90), fmt_double(s.hops.mean), fmt_double(s.within4_fraction),
          fmt_double(s.mean_probes), fmt_double(s.mean_bootstrap_probes), fmt_double(s.mean_bytes),
          fmt_double(s.mean_wall_ms), std::to_string(s.budget_exhausted)}) {
      cells.push_back(std::move(c));
    }
    w.row(cells);
  }
  return w.str();
}

}  // namespace dnns
