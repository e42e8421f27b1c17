#include "cfsim/results.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "cfsim/urllc.hpp"
#include "json.hpp"

namespace cfsim {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_row(const ResultRow& r) {
  std::string s;
  s.reserve(96);
  s += std::to_string(r.drop);
  s += ',';
  s += std::to_string(r.ue);
  s += ',';
  s += r.service;
  s += ',';
  s += r.strategy;
  s += ',';
  s += r.precoder;
  s += ',';
  s += r.policy;
  s += ',';
  s += r.metric;
  s += ',';
  s += format_value(r.value);
  s += ',';
  s += std::to_string(r.seed);
  return s;
}

std::vector<ResultRow> result_rows(const DropResult& drop, const SimConfig& cfg) {
  std::vector<ResultRow> rows;
  for (const GroupResult& g : drop.groups) {
    ResultRow base;
    base.drop = drop.drop;
    base.seed = drop.seed;
    base.strategy = to_string(g.strategy);
    base.precoder = to_string(g.precoder);
    base.policy = cfg.policies[g.policy].name;

    base.service = to_string(ServiceClass::kEmbb);
    for (std::size_t e = 0; e < g.se.size(); ++e) {
      ResultRow r = base;
      r.ue = drop.embb_ues[e];
      r.metric = "se";
      r.value = g.se[e];
      rows.push_back(std::move(r));
    }
    ResultRow sum = base;
    sum.metric = "sum_se";
    sum.value = g.sum_se;
    rows.push_back(sum);
    ResultRow outage = base;
    outage.metric = "outage";
    outage.value = g.outage;
    rows.push_back(outage);

    base.service = to_string(ServiceClass::kUrllc);
    for (std::size_t u = 0; u < g.eps.size(); ++u) {
      ResultRow r = base;
      r.ue = drop.urllc_ues[u];
      r.metric = "eps";
      r.value = g.eps[u];
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<ResultRow> read_results(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kResultsHeader)
        throw std::runtime_error("results: unexpected header on line 1");
      header_seen = true;
      continue;
    }
    const auto f = split(line);
    if (f.size() != 9)
      throw std::runtime_error("results: line " + std::to_string(lineno) +
                               " has " + std::to_string(f.size()) + " fields");
    ResultRow r;
    try {
      r.drop = std::stoi(f[0]);
      r.ue = std::stoi(f[1]);
      r.service = f[2];
      r.strategy = f[3];
      r.precoder = f[4];
      r.policy = f[5];
      r.metric = f[6];
      r.value = std::strtod(f[7].c_str(), nullptr);
      r.seed = std::stoull(f[8]);
    } catch (const std::exception&) {
      throw std::runtime_error("results: malformed line " + std::to_string(lineno));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::nan("");
  const double pos = p * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - lo;
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<SummaryRow> summarize_rows(const std::vector<ResultRow>& rows,
                                       double eps_target) {
  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<double>> groups;
  for (const ResultRow& r : rows) {
    Key key{r.strategy, r.precoder, r.policy, r.metric};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(r.value);
  }

  std::vector<SummaryRow> out;
  if (order.empty()) {
    out.push_back({"", "", "", "", "empty", 0.0});
    return out;
  }
  for (const Key& key : order) {
    const auto& [strategy, precoder, policy, metric] = key;
    auto emit = [&](std::string stat, double v) {
      out.push_back({strategy, precoder, policy, metric, std::move(stat), v});
    };
    const std::vector<double>& all = groups[key];
    std::vector<double> v;
    for (double x : all)
      if (!std::isnan(x)) v.push_back(x);
    std::sort(v.begin(), v.end());

    emit("count", static_cast<double>(v.size()));
    double mean = 0.0;
    for (double x : v) mean += x;
    emit("mean", v.empty() ? std::nan("") : mean / v.size());
    for (int i = 0; i <= 20; ++i) {
      char name[8];
      std::snprintf(name, sizeof name, "p%02d", i * 5);
      emit(name, quantile(v, i / 20.0));
    }
    emit("q1", quantile(v, 0.25));
    emit("median", quantile(v, 0.5));
    emit("q3", quantile(v, 0.75));
    if (metric == "eps") {
      int excluded = 0;
      emit("availability", availability(all, eps_target, &excluded));
      emit("excluded", excluded);
    } else if (metric == "outage") {
      emit("outage_frequency", v.empty() ? std::nan("") : mean / v.size());
    }
  }
  return out;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    out << r.strategy << ',' << r.precoder << ',' << r.policy << ',' << r.metric
        << ',' << r.stat << ',' << format_value(r.value) << '\n';
  }
}

void summarize_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::ifstream in(root / "results.csv");
  if (!in) throw std::runtime_error("summarize: cannot open " + (root / "results.csv").string());
  const auto rows = read_results(in);

  double target = SimConfig{}.eps_target;
  std::ifstream cfg_in(root / "config.json");
  if (cfg_in) {
    const auto doc = nlohmann::json::parse(cfg_in, nullptr, false);
    if (!doc.is_discarded() && doc.contains("eps_target"))
      target = doc["eps_target"].get<double>();
  }

  std::ofstream out(root / "summary.csv", std::ios::binary);
  if (!out) throw std::runtime_error("summarize: cannot write summary.csv");
  write_summary(out, summarize_rows(rows, target));
}

void run_experiment(const SimConfig& cfg, const std::string& dir, int workers) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  {
    std::ofstream cfg_out(root / "config.json", std::ios::binary);
    cfg_out << to_json(cfg) << '\n';
  }
  {
    std::ofstream out(root / "results.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (root / "results.csv").string());
    out << kResultsHeader << '\n';
    run_drops(cfg, workers, [&](const DropResult& d) {
      for (const ResultRow& r : result_rows(d, cfg)) out << format_row(r) << '\n';
      out.flush();
    });
  }
  summarize_dir(dir);
}

}  // namespace cfsim
