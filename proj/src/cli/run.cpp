#include "maglab/cli/run.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "maglab/cli/verify.hpp"
#include "maglab/potential_p.hpp"
#include "maglab/semiclassical.hpp"

#ifndef MAGLAB_VERSION
#define MAGLAB_VERSION "0.0.0"
#endif

namespace maglab::cli {

using json = nlohmann::json;

int workers_from_env() {
  const char* raw = std::getenv(kWorkersEnv);
  if (!raw || !*raw) return 1;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) return 1;
  return static_cast<int>(v);
}

std::string artifact_version() { return MAGLAB_VERSION; }

std::vector<std::string> columns_for(const Command& c) {
  switch (c.index()) {
    case 0: return {"n", "lambda", "residual", "iters", "dim", "h", "converged"};
    case 1:
    case 2: return {"n", "lambda_mag", "lambda_nonmag", "gap", "residual_mag", "residual_nonmag", "h", "converged"};
    case 3: return {"t", "flux", "lambda_mag", "residual", "converged"};
    case 4: return {"j", "r_j", "h_j", "lambda", "poincare_bound"};
    default: return {"id", "passed", "value", "limit"};
  }
}

namespace {

json verdict_json(const Verdict& v) {
  json j = {{"kind", std::string(to_string(v.kind))},
            {"label", v.label},
            {"growth_ratio", v.growth_ratio},
            {"growth_exponent", v.growth_exponent},
            {"tail_ratio", v.tail_ratio}};
  j["bound"] = v.bound ? json(*v.bound) : json(nullptr);
  return j;
}

/// Work shared by all subcommands: fills table, metadata and exit code.
struct Runner {
  const RunConfig& cfg;
  int workers;
  RunResult res;
  json meta = json::object();
  std::ostringstream summary;

  void sweep_rows(const std::vector<SweepRecord>& recs) {
    json times = json::array();
    for (const auto& r : recs) {
      res.table.add_row({r.n, r.lambda_mag, r.lambda_nonmag, r.gap, r.residual_mag, r.residual_nonmag, r.h,
                         r.converged ? 1.0 : 0.0});
      times.push_back(r.wall_time);
      summary << "n=" << r.n << " lambda_mag=" << r.lambda_mag << " lambda_nonmag=" << r.lambda_nonmag
              << (r.converged ? "" : " (not converged)") << '\n';
      if (!r.converged) res.exit_code = kExitNoConvergence;
    }
    meta["record_wall_times_s"] = times;
  }

  void eig(const EigCommand& c) {
    const GridDomain g = build_grid(cfg.domain->build(), *cfg.h);
    const Weight w = cfg.effective_weight();
    meta["dim"] = g.size();
    EigenResult r;
    bool converged = true;
    try {
      if (c.op == EigOperator::weighted) {
        r = ground_state_generalized(assemble_weighted_form(g, w, c.n), cfg.solver);
      } else {
        const auto s = c.op == EigOperator::magnetic ? assemble_magnetic(g, w, c.n) : assemble_nonmagnetic(g, w, c.n);
        if (!cfg.output.matrix.empty()) {
          std::ostringstream triplets;
          write_triplets(triplets, s);
          atomic_write(cfg.output.matrix, triplets.str());
        }
        r = ground_state(s, cfg.solver);
      }
    } catch (const NoConvergence& e) {
      r = e.best();
      converged = false;
      res.exit_code = kExitNoConvergence;
    }
    res.table.add_row({c.n, r.lambda, r.residual, static_cast<double>(r.iters), static_cast<double>(g.size()),
                       g.h(), converged ? 1.0 : 0.0});
    summary << "lambda=" << r.lambda << " residual=" << r.residual << " iters=" << r.iters << " dim=" << g.size()
            << (converged ? "" : " (not converged)") << '\n';
  }

  void sweep(const SweepCommand& c) {
    const GridDomain g = build_grid(cfg.domain->build(), *cfg.h);
    const Weight w = cfg.effective_weight();
    meta["dim"] = g.size();
    const auto recs = maglab::sweep(g, w, c.n_list, cfg.solver, workers);
    sweep_rows(recs);
    if (recs.size() >= 4) {
      json verdicts = json::object();
      for (const auto col : {SweepColumn::magnetic, SweepColumn::nonmagnetic}) {
        ClassifyOptions co{c.ratio, c.tail_ratio, certified_sweep_bound(g, w, c.n_list, col, cfg.solver)};
        const auto v = classify_limit(recs, col, co);
        const char* name = col == SweepColumn::magnetic ? "lambda_mag" : "lambda_nonmag";
        verdicts[name] = verdict_json(v);
        summary << name << ": " << v.label << '\n';
      }
      meta["verdicts"] = verdicts;
    } else {
      meta["verdicts"] = nullptr;
      summary << "fewer than 4 records: no verdict\n";
    }
  }

  void kato(const KatoCommand& c) {
    const GridDomain g = build_grid(cfg.domain->build(), *cfg.h);
    meta["dim"] = g.size();
    const std::vector<double> n{c.n};
    sweep_rows(maglab::sweep(g, cfg.effective_weight(), n, cfg.solver, 1));
  }

  void flux(const FluxCommand& c) {
    const GridDomain g = build_grid(cfg.domain->build(), *cfg.h);
    meta["dim"] = g.size();
    for (const auto& p : flux_scan(g, cfg.effective_weight(), c.t_list, cfg.solver, workers)) {
      res.table.add_row({p.t, p.flux, p.lambda_mag, p.residual, p.converged ? 1.0 : 0.0});
      summary << "t=" << p.t << " flux=" << p.flux << " lambda=" << p.lambda_mag
              << (p.converged ? "" : " (not converged)") << '\n';
      if (!p.converged) res.exit_code = kExitNoConvergence;
    }
  }

  void pcheck(const PcheckCommand& c) {
    const auto fam = lambda_shrinking(c.set.build(), c.radii, cells_per_radius(c.cells_per_radius), cfg.solver, workers);
    json dims = json::array();
    for (std::size_t j = 0; j < fam.radii.size(); ++j) {
      res.table.add_row({static_cast<double>(j + 1), fam.radii[j], fam.h_used[j], fam.lambdas[j],
                         std::numbers::pi / fam.areas[j]});
      dims.push_back(fam.dims[j]);
      summary << "j=" << j + 1 << " r=" << fam.radii[j] << " lambda=" << fam.lambdas[j] << '\n';
    }
    meta["dims"] = dims;
    if (fam.radii.size() >= 4) {
      const auto v = property_p_verdict(fam, {c.ratio, c.tail_ratio, std::nullopt});
      meta["verdict"] = verdict_json(v);
      summary << "verdict: " << v.label << '\n';
    } else {
      meta["verdict"] = nullptr;
      summary << "fewer than 4 levels: no verdict\n";
    }
  }

  void verify(const VerifyCommand&) {
    VerifyOptions vo;
    vo.solver = cfg.solver;
    vo.workers = workers;
    const auto checks = run_verify(vo);
    json list = json::array();
    int failed = 0;
    for (std::size_t k = 0; k < checks.size(); ++k) {
      const auto& c = checks[k];
      res.table.add_row({static_cast<double>(k), c.passed ? 1.0 : 0.0, c.value, c.limit});
      list.push_back({{"id", k}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      summary << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
      failed += c.passed ? 0 : 1;
    }
    meta["checks"] = list;
    summary << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    if (failed) res.exit_code = kExitFailure;
  }
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyMask: return kExitEmptyDomain;
    case ErrorKind::NoConvergence: return kExitNoConvergence;
    case ErrorKind::InvalidSpec:
    case ErrorKind::InvalidParams:
    case ErrorKind::InvalidArgument:
    case ErrorKind::NegativeScale:
    case ErrorKind::ResolutionTooCoarse:
    case ErrorKind::WeightOverflow:
    case ErrorKind::WrongWeightTag:
    case ErrorKind::TooLarge:
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError: return kExitInvalidConfig;
    default: return kExitFailure;
  }
}

}  // namespace

RunResult run(const RunConfig& config, int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  Runner r{config, std::max(workers, 1), {}, json::object(), {}};
  r.res.table.columns = columns_for(config.command);
  const std::string command(command_name(config.command));
  r.meta["artifact"] = "maglab";
  r.meta["version"] = artifact_version();
  r.meta["command"] = command;
  r.meta["config"] = json::parse(serialize(config));
  r.meta["workers"] = r.workers;
  try {
    std::visit(
        [&](const auto& cmd) {
          using T = std::decay_t<decltype(cmd)>;
          if constexpr (std::is_same_v<T, EigCommand>) r.eig(cmd);
          if constexpr (std::is_same_v<T, SweepCommand>) r.sweep(cmd);
          if constexpr (std::is_same_v<T, KatoCommand>) r.kato(cmd);
          if constexpr (std::is_same_v<T, FluxCommand>) r.flux(cmd);
          if constexpr (std::is_same_v<T, PcheckCommand>) r.pcheck(cmd);
          if constexpr (std::is_same_v<T, VerifyCommand>) r.verify(cmd);
        },
        config.command);
  } catch (const Error& e) {
    r.res.exit_code = exit_code_for(e.kind());
    r.meta["error"] = e.what();
    r.summary << "error: " << e.what() << '\n';
  }
  r.meta["columns"] = r.res.table.columns;
  r.meta["rows"] = r.res.table.rows.size();
  r.meta["exit_code"] = r.res.exit_code;
  r.meta["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.res.metadata = r.meta.dump(2) + "\n";

  try {
    if (!config.output.csv.empty()) atomic_write(config.output.csv, to_csv(r.res.table));
    if (!config.output.svg.empty() && r.res.table.rows.size() >= 2) {
      std::string x;
      std::vector<std::string> ys;
      switch (config.command.index()) {
        case 1: x = "n", ys = {"lambda_mag", "lambda_nonmag"}; break;
        case 3: x = "t", ys = {"lambda_mag"}; break;
        case 4: x = "j", ys = {"lambda"}; break;
        default: x = "id", ys = {"value"}; break;
      }
      atomic_write(config.output.svg, emit_svg(r.res.table, x, ys));
    }
    if (!config.output.json.empty()) atomic_write(config.output.json, r.res.metadata);
  } catch (const Error& e) {
    r.res.exit_code = kExitFailure;
    r.summary << "error: " << e.what() << '\n';
  }
  r.res.summary = r.summary.str();
  return r.res;
}

}  // namespace maglab::cli
