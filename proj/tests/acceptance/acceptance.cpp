// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance                      run everything (including both figure runs)
//   acceptance A3 A4 ...            run selected criteria
//   acceptance --run fig1|fig3      only produce the figure results
//   --work DIR                      where figure runs live (default ./acceptance_work)
//   --workers N                     threads for the figure runs

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "calibration.hpp"
#include "cfsim/channel.hpp"
#include "cfsim/coexistence.hpp"
#include "cfsim/config.hpp"
#include "cfsim/experiment.hpp"
#include "cfsim/rcus_oracle.hpp"
#include "cfsim/results.hpp"
#include "cfsim/saddlepoint.hpp"
#include "cfsim/urllc.hpp"
#include "links.hpp"
#include "properties.hpp"

using namespace cfsim;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes.
constexpr double kA1Target = 0.783, kA1Tol = 0.03;
constexpr int kA1Drops = 40, kA1BlocksPerDrop = 100;
constexpr int kA2Links = 50;
constexpr std::size_t kA2Trials = 100000;
constexpr double kA2MaxLog10 = 0.1;
constexpr int kA3Tuples = 10000;
constexpr double kA3RelTol = 1e-12;
constexpr int kA4Patterns = 10000;
constexpr double kA5Lo = 2.0, kA5Hi = 3.0;
constexpr double kA6Lo = 0.05, kA6Hi = 0.30;
constexpr double kA7LpMin = 0.95, kA7MrLo = 0.40, kA7MrHi = 0.85;
constexpr int kA7MinDrops = 100;
constexpr int kA8Blocks = 10000;
constexpr double kA8Cov = 0.05, kA8Cross = 0.03;
constexpr int kFigDrops = 100, kFigBlocks = 500;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Context {
  fs::path work = "acceptance_work";
  int workers = 1;
};

SimConfig figure_config(const std::string& name) {
  SimConfig c = preset(name);
  c.n_drops = kFigDrops;
  c.n_blocks = kFigBlocks;
  validate_config(c);
  return c;
}

void run_figure(const Context& ctx, const std::string& name) {
  const auto t0 = std::chrono::steady_clock::now();
  run_experiment(figure_config(name), (ctx.work / name).string(), ctx.workers);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s run: %d drops x %d blocks in %.0f s -> %s\n", name.c_str(), kFigDrops,
              kFigBlocks, s, (ctx.work / name).string().c_str());
  std::fflush(stdout);
}

std::vector<ResultRow> figure_rows(const Context& ctx, const std::string& name) {
  const fs::path p = ctx.work / name / "results.csv";
  std::ifstream in(p);
  if (!in) throw std::runtime_error("missing " + p.string() + " (run with --run " + name + ")");
  return read_results(in);
}

std::vector<double> values(const std::vector<ResultRow>& rows, const std::string& strategy,
                           const std::string& precoder, const std::string& policy,
                           const std::string& metric) {
  std::vector<double> v;
  for (const auto& r : rows)
    if (r.strategy == strategy && r.precoder == precoder && r.policy == policy &&
        r.metric == metric)
      v.push_back(r.value);
  return v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile(v, 0.5);
}

int distinct_drops(const std::vector<ResultRow>& rows) {
  std::vector<int> d;
  for (const auto& r : rows) d.push_back(r.drop);
  std::sort(d.begin(), d.end());
  return static_cast<int>(std::unique(d.begin(), d.end()) - d.begin());
}

// NPu outage from the activation draws and the coefficient/power pipeline:
// a block is in outage when no eMBB UE gets power in any slot.
Outcome a1(const Context&) {
  SimConfig cfg = preset("fig1");
  cfg.geometry.angle_samples = 16;  // correlation does not enter
  validate_config(cfg);
  const PowerPolicy& pol = cfg.policies.front();
  long long blocks = 0, outages = 0;
  for (int d = 0; d < kA1Drops; ++d) {
    const NetworkScenario sc = drop_scenario(cfg, d);
    const CoexistenceTopology topo = coexistence_topology(sc);
    const std::uint64_t seed = drop_seed(cfg, d);
    for (int b = 0; b < kA1BlocksPerDrop; ++b) {
      const ActivationPattern pat = block_activation(cfg, sc, seed, b);
      bool any_power = false;
      for (int t = 0; t < cfg.num_slots && !any_power; ++t) {
        const Eigen::VectorXd at = slot_coefficients(pat.slot(t), Strategy::kNpu, topo);
        any_power = fpa_slot_powers(sc, topo, pat.slot(t), at, pol, cfg.rho_max_w).embb.sum() > 0;
      }
      ++blocks;
      if (!any_power) ++outages;
    }
  }
  const double p = static_cast<double>(outages) / blocks;
  const double analytic = std::pow(1.0 - std::pow(1.0 - cfg.a_u, cfg.num_urllc), cfg.num_slots);
  return {std::abs(p - kA1Target) <= kA1Tol,
          fmt("NPu outage %.4f over %lld blocks (target %.3f +- %.2f; analytic %.4f)", p, blocks,
              kA1Target, kA1Tol, analytic)};
}

Outcome a2(const Context&) {
  Rng rng = make_rng(20240601);
  int links = 0, within = 0, drawn = 0;
  double worst = 0.0;
  while (links < kA2Links && drawn < 20 * kA2Links) {
    ++drawn;
    const UrllcLink l = test::calibrated_link(rng, {50, 114}, 160, -3.0, -1.0);
    const double sp = saddlepoint_eps(l).eps;
    if (!(sp >= 1e-3 && sp <= 1e-1)) continue;
    const OracleEstimate mc = rcus_mc_oracle(l, kA2Trials, 1000 + links);
    const double dev = mc.errors ? std::abs(std::log10(sp) - std::log10(mc.eps)) : INFINITY;
    worst = std::max(worst, dev);
    if (dev <= kA2MaxLog10) ++within;
    ++links;
  }
  return {links == kA2Links && within == links,
          fmt("%d/%d links within %.2f decades of the %zu-trial oracle (max %.4f)", within, links,
              kA2MaxLog10, kA2Trials, worst)};
}

Outcome a3(const Context&) {
  const test::FpaCheck c = test::check_fpa_sum(kA3Tuples, 31);
  const bool ok = c.max_rel_error <= kA3RelTol && c.silent_violations == 0 && c.negative == 0 &&
                  c.epa_unequal == 0 && c.epa_tuples > 0;
  return {ok, fmt("%d tuples, %d scheduled AP-slots: max |sum - rho_max|/rho_max = %.2e "
                  "(tol %.0e); EPA unequal %d/%d; silent-AP violations %d",
                  c.tuples, c.ap_slots, c.max_rel_error, kA3RelTol, c.epa_unequal, c.epa_tuples,
                  c.silent_violations)};
}

Outcome a4(const Context&) {
  const test::OrderCheck c = test::check_coefficient_order(kA4Patterns, 41);
  return {c.order_violations == 0 && c.idle_violations == 0,
          fmt("%d patterns / %d slots: ordering violations %d, idle-slot violations %d",
              c.patterns, c.slots, c.order_violations, c.idle_violations)};
}

Outcome a5(const Context& ctx) {
  const auto rows = figure_rows(ctx, "fig1");
  bool ok = distinct_drops(rows) >= kFigDrops;
  std::string detail = fmt("%d drops; SPC median sum-SE LP-MMSE/MR:", distinct_drops(rows));
  for (const char* pol : {"FPA", "EPA"}) {
    const double r = median(values(rows, "SPC", "LP-MMSE", pol, "sum_se")) /
                     median(values(rows, "SPC", "MR", pol, "sum_se"));
    ok = ok && r >= kA5Lo && r <= kA5Hi;
    detail += fmt(" %s %.3f", pol, r);
  }
  return {ok, detail + fmt(" (band [%.1f, %.1f])", kA5Lo, kA5Hi)};
}

Outcome a6(const Context& ctx) {
  const auto rows = figure_rows(ctx, "fig1");
  const auto gain = [&](const char* s) {
    return median(values(rows, s, "LP-MMSE", "FPA", "sum_se")) /
               median(values(rows, s, "LP-MMSE", "EPA", "sum_se")) -
           1.0;
  };
  const double g = gain("SPC");
  std::string other;
  for (const char* s : {"LPu", "CPu", "NPu"}) other += fmt(" %s %+.1f%%", s, 100 * gain(s));
  return {distinct_drops(rows) >= kFigDrops && g >= kA6Lo && g <= kA6Hi,
          fmt("LP-MMSE SPC median sum-SE gain FPA over EPA %+.1f%% (band [%.0f%%, %.0f%%]);"
              " other strategies:%s",
              100 * g, 100 * kA6Lo, 100 * kA6Hi, other.c_str())};
}

Outcome a7(const Context& ctx) {
  const auto rows = figure_rows(ctx, "fig3");
  const double target = preset("fig3").eps_target;
  bool ok = distinct_drops(rows) >= kA7MinDrops;
  std::string detail = fmt("%d drops; availability", distinct_drops(rows));
  for (const char* pre : {"LP-MMSE", "MR"}) {
    detail += fmt(" %s:", pre);
    for (Strategy s : kAllStrategies) {
      const auto eps = values(rows, to_string(s), pre, "FPA", "eps");
      const double a = availability(eps, target);
      const bool lp = std::string(pre) == "LP-MMSE";
      ok = ok && (lp ? a >= kA7LpMin : (a >= kA7MrLo && a <= kA7MrHi));
      detail += fmt(" %s %.3f", to_string(s), a);
    }
  }
  return {ok, detail + fmt(" (LP-MMSE >= %.2f, MR in [%.2f, %.2f])", kA7LpMin, kA7MrLo, kA7MrHi)};
}

Outcome a8(const Context&) {
  const SimConfig cfg = preset("fig1");
  const NetworkScenario sc = drop_scenario(cfg, 0);
  const auto st = estimation_statistics(
      sc, UplinkConfig::uniform(sc.num_ues(), cfg.p_ul_w, cfg.sigma2_ul_w, cfg.tau_p));
  const test::CalibrationError e = test::estimator_calibration(sc, st, kA8Blocks, 77);
  return {e.cov_rel <= kA8Cov && e.cross_rel <= kA8Cross,
          fmt("%d served pairs, %d blocks: max ||cov(h^)+C-R||/||R|| = %.4f (tol %.2f), "
              "max |cross-cov|/beta = %.4f (tol %.2f)",
              e.pairs, kA8Blocks, e.cov_rel, kA8Cov, e.cross_rel, kA8Cross)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome a9(const Context& ctx) {
  SimConfig cfg = preset("fig1");
  cfg.n_drops = 4;
  cfg.n_blocks = 20;
  cfg.n_norm_blocks = 20;
  validate_config(cfg);
  const fs::path root = ctx.work / "determinism";
  fs::remove_all(root);
  std::vector<std::string> results, summaries;
  for (int w : {1, 1, 3}) {
    const fs::path dir = root / ("w" + std::to_string(w) + "_" + std::to_string(results.size()));
    run_experiment(cfg, dir.string(), w);
    results.push_back(slurp(dir / "results.csv"));
    summaries.push_back(slurp(dir / "summary.csv"));
  }
  const bool ok = results[0] == results[1] && results[0] == results[2] &&
                  summaries[0] == summaries[1] && summaries[0] == summaries[2] &&
                  results[0].size() > 100;
  return {ok, fmt("fig1 geometry, %d drops x %d blocks, workers {1, 1, 3}: results.csv "
                  "(%zu bytes) and summary.csv %s",
                  cfg.n_drops, cfg.n_blocks, results[0].size(),
                  ok ? "byte-identical" : "differ")};
}

const std::map<std::string, std::function<Outcome(const Context&)>>& criteria() {
  static const std::map<std::string, std::function<Outcome(const Context&)>> m{
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}};
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  Context ctx;
  std::string work = ctx.work.string();
  std::vector<std::string> selected, runs;
  ctx.workers = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("criteria", selected, "A1..A9 (default: all)");
  app.add_option("--run", runs, "figure runs to produce (fig1, fig3)");
  app.add_option("--work", work, "working directory");
  app.add_option("--workers", ctx.workers, "threads for figure runs");
  CLI11_PARSE(app, argc, argv);
  ctx.work = work;
  fs::create_directories(ctx.work);

  try {
    for (const auto& r : runs) run_figure(ctx, r);
    if (!runs.empty() && selected.empty()) return 0;
  } catch (const std::exception& e) {
    std::printf("figure run failed: %s\n", e.what());
    return 1;
  }
  if (selected.empty()) {
    run_figure(ctx, "fig1");
    run_figure(ctx, "fig3");
    for (const auto& [name, fn] : criteria()) selected.push_back(name);
  }

  int failed = 0;
  for (const auto& name : selected) {
    auto it = criteria().find(name);
    if (it == criteria().end()) {
      std::printf("%s FAIL unknown criterion\n", name.c_str());
      ++failed;
      continue;
    }
    Outcome o;
    try {
      o = it->second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %s %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed ? 1 : 0;
}
