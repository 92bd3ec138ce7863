#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

#include "cascadelab/io.hpp"
#include "cascadelab/parallel.hpp"

using namespace cascadelab;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string spec_path;
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
  bool force_depth = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_seed = true) {
  cmd->add_option("--spec", o.spec_path, "weight spec JSON file")->required();
  if (needs_seed) cmd->add_option("--seed", o.seed, "64-bit seed (default 0)");
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_flag("--force", o.force, "run outside the regime guards; outputs are annotated");
  cmd->add_flag("--force-depth", o.force_depth, "override the 2^26 node guard");
  cmd->add_option("--threads", o.threads, "worker pool size")
      ->envname("CASCADELAB_THREADS");
}

void emit(const CommonOpts& o, const std::string& content) {
  if (o.out.empty())
    std::fwrite(content.data(), 1, content.size(), stdout);
  else
    write_file(o.out, content);
}

void apply_threads(const CommonOpts& o) {
  par::set_worker_threads(o.threads > 0 ? o.threads : par::hardware_threads());
}

std::shared_ptr<const WeightSpec> load(const CommonOpts& o) {
  return std::make_shared<const WeightSpec>(load_spec(o.spec_path));
}

std::vector<int> holder_levels(int lo, int hi) {
  std::vector<int> ls;
  for (int m = lo; m <= hi; ++m) ls.push_back(m);
  return ls;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cascadelab: b-adic independent cascades - classification, simulation, "
               "moments, time change and CLT diagnostics"};
  app.require_subcommand(1);

  CommonOpts oc, os, oe, om, ot, otc, ok;

  auto* c_classify = app.add_subcommand("classify", "regime report for a weight spec");
  add_common(c_classify, oc, /*needs_seed=*/false);

  auto* c_sim = app.add_subcommand("simulate", "sample path of F_n as CSV");
  add_common(c_sim, os);
  int sim_depth = 8, sim_level = -1;
  c_sim->add_option("--depth", sim_depth, "tree depth n")->required();
  c_sim->add_option("--level", sim_level, "emit the path at this level (default: depth)");

  auto* c_ens = app.add_subcommand("ensemble", "terminal-value ensemble as CSV");
  add_common(c_ens, oe);
  std::string ens_kind = "zn";
  int ens_depth = 8, ens_count = 1000, ens_tail = 10;
  c_ens->add_option("--kind", ens_kind, "zn | rn | reference")->required();
  c_ens->add_option("--depth", ens_depth, "depth n")->required();
  c_ens->add_option("--count", ens_count, "number of replicas")->required();
  c_ens->add_option("--tail", ens_tail, "extra depth approximating the limit (rn)");

  auto* c_mom = app.add_subcommand("moments", "exact moment table as JSON");
  add_common(c_mom, om, /*needs_seed=*/false);
  int mom_order = 2, mom_depth = -1;
  bool mom_brute = false;
  c_mom->add_option("--order", mom_order, "moment order q")->required();
  c_mom->add_option("--depth", mom_depth, "finite depth n (default: limit)");
  c_mom->add_flag("--brute", mom_brute, "add the enumeration oracle value (small n)");

  auto* c_tau = app.add_subcommand("tau", "free-energy scaling estimate as JSON");
  add_common(c_tau, ot);
  int tau_depth = 14, tau_lo = -1, tau_hi = -1;
  std::vector<double> tau_q{1.0, 2.0, 4.0};
  bool tau_own = false;
  c_tau->add_option("--depth", tau_depth, "tree depth")->required();
  c_tau->add_option("--q", tau_q, "orders q (repeatable)");
  c_tau->add_option("--level-lo", tau_lo, "window start (default depth-10)");
  c_tau->add_option("--level-hi", tau_hi, "window end (default depth-1)");
  c_tau->add_flag("--own-level", tau_own,
                  "use per-level increments |Q(w)| instead of oscillations of the "
                  "deepest path (stable for diverging cascades)");

  auto* c_tc = app.add_subcommand("timechange", "monofractal time-change curve as CSV");
  add_common(c_tc, otc);
  int tc_depth = 12;
  double tc_beta = 0.0;
  bool tc_holder = false;
  c_tc->add_option("--depth", tc_depth, "tree depth")->required();
  c_tc->add_option("--beta", tc_beta, "time-change exponent (default: smallest phi root)");
  c_tc->add_flag("--holder", tc_holder, "print the pooled exponent estimate to stderr");

  auto* c_clt = app.add_subcommand("clt", "normalized ensemble vs reference as JSON");
  add_common(c_clt, ok);
  int clt_depth = 12, clt_count = 10000;
  std::string clt_dump, clt_dump_ref;
  std::vector<int> clt_orders{1, 2, 3, 4};
  c_clt->add_option("--depth", clt_depth, "depth n")->required();
  c_clt->add_option("--count", clt_count, "number of replicas")->required();
  c_clt->add_option("--orders", clt_orders, "moment orders to compare");
  c_clt->add_option("--dump", clt_dump, "write raw Z_n values as one-column CSV");
  c_clt->add_option("--dump-ref", clt_dump_ref, "write raw reference values as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_classify) {
      apply_threads(oc);
      const auto spec = load(oc);
      const RegimeReport rep = classify(*spec);
      emit(oc, regime_report_json(rep, *spec).dump(2) + "\n");
    } else if (*c_sim) {
      apply_threads(os);
      const auto spec = load(os);
      const auto real = realize(spec, sim_depth, os.seed, os.force_depth);
      const int level = sim_level < 0 ? sim_depth : sim_level;
      emit(os, sample_path_csv(path(real, level)));
    } else if (*c_ens) {
      apply_threads(oe);
      const auto spec = load(oe);
      EnsembleSample sample;
      if (ens_kind == "zn")
        sample = normalized_ensemble(spec, ens_depth, ens_count, oe.seed, false, oe.force);
      else if (ens_kind == "rn")
        sample = residual_ensemble(spec, ens_depth, ens_tail, ens_count, oe.seed, oe.force);
      else if (ens_kind == "reference")
        sample = reference_sample(spec, ens_depth, ens_count, oe.seed, false, oe.force);
      else
        throw ValidationError("BadProbabilities", "--kind must be zn, rn or reference");
      emit(oe, ensemble_csv(sample));
      json report = moment_lines_json(moment_report(sample, {1, 2, 3, 4}));
      if (oe.force) report.push_back({{"regime_violation", true}});
      std::cerr << report.dump(2) << "\n";
    } else if (*c_mom) {
      const auto spec = load(om);
      MomentTable table;
      if (mom_depth < 0) {
        // limit entry: eq45 in the unbounded regime, sesi fixed point otherwise
        try {
          table.entries.push_back(
              {mom_order, std::nullopt, limit_moment_even(*spec, mom_order), "eq45"});
        } catch (const Error&) {
          table.entries.push_back({mom_order, std::nullopt,
                                   limit_moment_convergent(*spec, mom_order), "sesi"});
        }
      } else {
        if (mom_order == 2)
          table.entries.push_back(
              {2, mom_depth, second_moment_exact(*spec, mom_depth), "v_recursion"});
        if (spec->real_valued())
          table.entries.push_back({mom_order, mom_depth,
                                   finite_moment_sesi(*spec, mom_order, mom_depth),
                                   "sesi"});
        try {
          table.entries.push_back(
              {mom_order, mom_depth, finite_n_moment(*spec, mom_order, mom_depth),
               "eq44"});
        } catch (const Error&) {
        }
        if (mom_brute)
          table.entries.push_back({mom_order, mom_depth,
                                   brute_force_moment(*spec, mom_order, mom_depth,
                                                      spec->real_valued()
                                                          ? BruteKind::Plain
                                                          : BruteKind::Absolute),
                                   "brute_force"});
      }
      emit(om, moment_table_json(table).dump(2) + "\n");
    } else if (*c_tau) {
      apply_threads(ot);
      const auto spec = load(ot);
      const auto real = realize(spec, tau_depth, ot.seed, ot.force_depth);
      const int lo = tau_lo < 0 ? std::max(1, tau_depth - 10) : tau_lo;
      const int hi = tau_hi < 0 ? tau_depth - 1 : tau_hi;
      const TauEstimate est = tau_own
                                  ? tau_estimate(real, tau_q, lo, hi)
                                  : tau_estimate(path(real, tau_depth), tau_q, lo, hi);
      emit(ot, tau_estimate_json(est).dump(2) + "\n");
    } else if (*c_tc) {
      apply_threads(otc);
      const auto spec = load(otc);
      double beta = tc_beta;
      if (!(beta > 0.0)) {
        const auto root = solve_beta(*spec);
        if (!root)
          throw RegimeError("NonFinitePhi",
                            "no root of phi on [1, 256]; pass --beta explicitly");
        beta = *root;
      }
      const auto real = realize(spec, tc_depth, otc.seed, otc.force_depth);
      const ParametricCurve curve = time_change(real, beta);
      emit(otc, parametric_curve_csv(curve));
      if (tc_holder) {
        const HolderFit fit = holder_estimate(
            curve, real, holder_levels(std::max(1, tc_depth - 8), tc_depth - 2));
        std::cerr << json{{"holder_exponent", fit.exponent},
                          {"used_cells", fit.used_cells},
                          {"excluded_cells", fit.excluded_cells}}
                         .dump(2)
                  << "\n";
      }
    } else if (*c_clt) {
      apply_threads(ok);
      const auto spec = load(ok);
      const EnsembleSample zn =
          normalized_ensemble(spec, clt_depth, clt_count, ok.seed, false, ok.force);
      const EnsembleSample ref =
          reference_sample(spec, clt_depth, clt_count, ok.seed, false, ok.force);
      ComparisonReport rep = compare_ensembles(zn, ref, clt_orders);
      if (ok.force) rep.notes.push_back("regime_violation");
      emit(ok, comparison_report_json(rep).dump(2) + "\n");
      if (!clt_dump.empty()) write_file(clt_dump, ensemble_csv(zn));
      if (!clt_dump_ref.empty()) write_file(clt_dump_ref, ensemble_csv(ref));
    }
  } catch (const ValidationError& e) {
    std::cerr << json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const RegimeError& e) {
    std::cerr << json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump() << "\n";
    return 3;
  } catch (const ResourceError& e) {
    std::cerr << json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"code", "Internal"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 1;
  }
  return 0;
}
