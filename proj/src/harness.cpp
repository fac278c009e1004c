#include "odlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "odlab/csv.hpp"
#include "odlab/errors.hpp"
#include "odlab/version.hpp"

namespace odlab {

namespace {

constexpr std::pair<Subcommand, std::string_view> kNames[] = {
    {Subcommand::Simulate, "simulate"}, {Subcommand::Residuals, "residuals"},
    {Subcommand::Converge, "converge"}, {Subcommand::Moments, "moments"},
    {Subcommand::Ladder, "ladder"},     {Subcommand::Modulus, "modulus"},
    {Subcommand::RestTerms, "rest-terms"}, {Subcommand::Crystal, "crystal"},
};

/// Collects CSV artifacts in a staging directory together with their schemas.
class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void csv(const std::string& file, std::vector<std::string> columns,
           const std::function<void(CsvWriter&)>& rows) {
    std::ofstream out(dir_ / file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / file).string());
    CsvWriter w(out, columns);
    rows(w);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + (dir_ / file).string());
    schema_.emplace_back(file, std::move(columns));
  }

  const std::vector<std::pair<std::string, std::vector<std::string>>>& schema() const { return schema_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::vector<std::string>>> schema_;
};

std::vector<std::string> coord_columns(char prefix, std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

InitialLaw initial_law(const ExperimentConfig& c, double eps) {
  return {c.q0, c.p0.law(eps, c.beta)};
}

std::vector<LadderSpec> ladder_specs(const ExperimentConfig& c) {
  std::vector<LadderSpec> out;
  for (const auto& times : c.ladders) {
    LadderSpec s;
    s.times = times;
    s.observables.assign(times.size() - 1, c.ladder_phi);
    s.f = c.test_function(c.ladder_f);
    out.push_back(std::move(s));
  }
  return out;
}

void write_weak_rows(CsvWriter& w, const WeakErrorTable& t) {
  for (const auto& r : t.rows) {
    w.cell(r.eps).cell(r.label).cell(r.t).cell(r.estimate).cell(r.se);
    w.end_row();
  }
}

void recipe_simulate(const ExperimentConfig& c, unsigned workers, Artifacts& a) {
  const Ensemble ref = simulate_reference(c, stride_for(c.reference_params(), c.record_interval), workers);
  auto write_ensemble = [&](const std::string& file, const Ensemble& e) {
    a.csv(file, e.csv_columns(), [&](CsvWriter& w) {
      for (std::size_t i = 0; i < e.n_traj(); ++i) {
        for (std::size_t j = 0; j < e.n_times(); ++j) {
          w.cell(static_cast<std::int64_t>(i)).cell(e.grid()[j]);
          for (double x : e.position_coords(i, j)) w.cell(x);
          if (e.has_momenta()) {
            for (double x : e.momentum(i, j)) w.cell(x);
          }
          w.end_row();
        }
      }
    });
  };
  write_ensemble("reference.csv", ref);
  for (std::size_t k = 0; k < c.eps.size(); ++k) {
    const ScalingParams sp = c.langevin_params(c.eps[k]);
    const Ensemble e = simulate_langevin(c, k, c.potential_for(c.eps[k]), stride_for(sp, c.record_interval),
                                         true, workers);
    write_ensemble("langevin_eps" + std::to_string(k + 1) + ".csv", e);
  }
}

void recipe_residuals(const ExperimentConfig& c, Artifacts& a) {
  const std::size_t d = c.dimension;
  std::vector<std::string> cols{"eps"};
  for (auto& s : coord_columns('q', d)) cols.push_back(s);
  for (auto& s : coord_columns('p', d)) cols.push_back(s);
  for (const char* s : {"R1", "R2_direct", "R2_closed"}) cols.emplace_back(s);
  const TestFunction& f = c.test_function(c.residual_f);
  const Potential v = c.base_potential();
  a.csv("residuals.csv", cols, [&](CsvWriter& w) {
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
      const double eps = c.eps[k];
      const Potential v_eps = c.potential_for(eps);
      NormalStream rng(RngStreamSpec{derive_seed(c.seed, seed_tag::kResiduals + k), 0});
      for (std::size_t n = 0; n < c.residual_points; ++n) {
        Vec x(d), p(d);
        for (std::size_t i = 0; i < d; ++i) x[i] = rng.next_uniform();
        for (std::size_t i = 0; i < d; ++i) p[i] = c.residual_p_scale * rng.next_normal();
        const TorusPosition q = wrap(x);
        const GeneratorDifference g = generator_difference(f, v, v_eps, eps, c.beta, q, p);
        w.cell(eps);
        for (double y : q.coords().span()) w.cell(y);
        for (double y : p.span()) w.cell(y);
        w.cell(residual_R1(f, eps, q, p)).cell(std::abs(g.direct)).cell(std::abs(g.closed_form));
        w.end_row();
      }
    }
  });
}

void recipe_converge(const ExperimentConfig& c, unsigned workers, Artifacts& a) {
  const Ensemble ref = simulate_reference(c, stride_for(c.reference_params(), c.record_interval), workers);
  const auto times = c.eval_times();
  a.csv("weak_error.csv", {"eps", "f", "t", "estimate", "se"}, [&](CsvWriter& w) {
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
      const ScalingParams sp = c.langevin_params(c.eps[k]);
      const Ensemble e = simulate_langevin(c, k, c.potential_for(c.eps[k]), stride_for(sp, c.record_interval),
                                           false, workers);
      write_weak_rows(w, weak_error(e, ref, c.test_functions, times));
    }
  });
}

void recipe_moments(const ExperimentConfig& c, unsigned workers, Artifacts& a) {
  a.csv("moments.csv", {"eps", "gamma", "kind", "t", "estimate", "se"}, [&](CsvWriter& w) {
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
      const double eps = c.eps[k];
      const Ensemble e = simulate_langevin(c, k, c.potential_for(eps), 1, true, workers);
      for (double gamma : c.gammas) {
        const MomentReport r = moment_report(e, gamma);
        std::size_t argmax = 0;
        for (std::size_t j = 0; j < r.times.size(); ++j) {
          w.cell(eps).cell(gamma).cell("per_time").cell(r.times[j]).cell(r.per_time[j].mean).cell(r.per_time[j].se);
          w.end_row();
          if (r.per_time[j].mean > r.per_time[argmax].mean) argmax = j;
        }
        w.cell(eps).cell(gamma).cell("sup_over_grid").cell(r.times[argmax]).cell(r.sup_over_grid)
            .cell(r.per_time[argmax].se);
        w.end_row();
        w.cell(eps).cell(gamma).cell("mean_sup").cell(c.T).cell(r.mean_sup.mean).cell(r.mean_sup.se);
        w.end_row();
        w.cell(eps).cell(gamma).cell("eps2_mean_sup").cell(c.T).cell(eps * eps * r.mean_sup.mean)
            .cell(eps * eps * r.mean_sup.se);
        w.end_row();
      }
    }
  });
}

void recipe_ladder(const ExperimentConfig& c, unsigned workers, Artifacts& a) {
  if (c.ladders.empty()) throw ValidationError("ladder: config has no [ladder] ladders");
  const auto specs = ladder_specs(c);
  const Potential v = c.base_potential();
  const TestFunction& f = c.test_function(c.ladder_f);
  const PositionOperator lf = [&](const TorusPosition& q) { return apply_overdamped_generator(f, v, c.beta, q); };
  a.csv("ladder.csv", {"process", "eps", "ladder", "estimate", "se"}, [&](CsvWriter& w) {
    auto rows = [&](const Ensemble& e, std::string_view process, double eps) {
      for (std::size_t l = 0; l < specs.size(); ++l) {
        const Estimate est = ladder_statistic(e, specs[l], lf);
        w.cell(process).cell(eps).cell(static_cast<std::int64_t>(l + 1)).cell(est.mean).cell(est.se);
        w.end_row();
      }
    };
    rows(simulate_reference(c, stride_for(c.reference_params(), c.record_interval), workers), "reference", 0.0);
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
      const ScalingParams sp = c.langevin_params(c.eps[k]);
      rows(simulate_langevin(c, k, c.potential_for(c.eps[k]), stride_for(sp, c.record_interval), false, workers),
           "langevin", c.eps[k]);
    }
  });
}

void recipe_modulus(const ExperimentConfig& c, unsigned workers, Artifacts& a) {
  if (c.deltas.empty()) throw ValidationError("modulus: config has no [modulus] deltas");
  a.csv("modulus.csv", {"process", "eps", "f", "delta", "estimate", "se", "t_start", "lag"}, [&](CsvWriter& w) {
    auto rows = [&](const Ensemble& e, std::string_view process, double eps) {
      for (const auto& f : c.test_functions) {
        for (const auto& pt : ka_modulus(e, f, c.deltas)) {
          w.cell(process).cell(eps).cell(f.label()).cell(pt.delta).cell(pt.estimate).cell(pt.se)
              .cell(pt.t_start).cell(pt.lag);
          w.end_row();
        }
      }
    };
    rows(simulate_reference(c, stride_for(c.reference_params(), c.record_interval), workers), "reference", 0.0);
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
      const ScalingParams sp = c.langevin_params(c.eps[k]);
      rows(simulate_langevin(c, k, c.potential_for(c.eps[k]), stride_for(sp, c.record_interval), false, workers),
           "langevin", c.eps[k]);
    }
  });
}

void recipe_rest_terms(const ExperimentConfig& c, unsigned workers, Artifacts& a) {
  const Potential v = c.base_potential();
  a.csv("rest_terms.csv", {"eps", "f", "sup_R1", "sup_R1_se", "int_R2", "int_R2_se"}, [&](CsvWriter& w) {
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
      const Potential v_eps = c.potential_for(c.eps[k]);
      const Ensemble e = simulate_langevin(c, k, v_eps, 1, true, workers);
      for (const auto& f : c.test_functions) {
        const RestTermReport r = rest_term_report(e, f, v, v_eps);
        w.cell(c.eps[k]).cell(f.label()).cell(r.sup_r1.mean).cell(r.sup_r1.se).cell(r.integral_r2.mean)
            .cell(r.integral_r2.se);
        w.end_row();
      }
    }
  });
}

void recipe_crystal(const ExperimentConfig& c, unsigned workers, Artifacts& a) {
  if (!c.crystal) throw ValidationError("crystal: config has no [crystal] section");
  const Potential v = c.base_potential();
  const double chi_hess = sup_hessian_norm(c.crystal->chi);
  const Ensemble ref = simulate_reference(c, stride_for(c.reference_params(), c.record_interval), workers);
  const auto times = c.eval_times();
  a.csv("crystal.csv",
        {"regime", "eps", "alpha", "k", "sup_grad_distance", "hessian_scale", "f", "t", "estimate", "se"},
        [&](CsvWriter& w) {
          for (std::size_t k = 0; k < c.eps.size(); ++k) {
            const double eps = c.eps[k];
            const auto entry = c.crystal->at(eps);
            struct Regime {
              const char* name;
              double alpha;
              std::uint64_t tag;
            };
            std::vector<Regime> regimes{{"vanishing", entry.alpha, seed_tag::kLangevin}};
            if (c.crystal->contrast) regimes.push_back({"contrast", 1.0 / entry.k, seed_tag::kCrystalContrast});
            for (const auto& r : regimes) {
              const CrystalPotential cp(v, c.crystal->chi, r.alpha, entry.k);
              const double sgd = sup_grad_distance(cp, v);
              const double hess = std::abs(r.alpha) * entry.k * entry.k * chi_hess;
              const ScalingParams sp = c.langevin_params(eps);
              const Ensemble e = simulate_langevin(c, k, cp.expanded(), stride_for(sp, c.record_interval), false,
                                                   workers, r.tag);
              for (const auto& row : weak_error(e, ref, c.test_functions, times).rows) {
                w.cell(r.name).cell(eps).cell(r.alpha).cell(static_cast<std::int64_t>(entry.k)).cell(sgd).cell(hess)
                    .cell(row.label).cell(row.t).cell(row.estimate).cell(row.se);
                w.end_row();
              }
            }
          }
        });
}

void write_manifest(const std::filesystem::path& file, Subcommand sub, const ExperimentConfig& c,
                    const Artifacts& a) {
  std::ofstream m(file, std::ios::binary);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(c.hash()));
  m << "# odlab run manifest\n";
  m << "name = " << c.name << "\n";
  m << "subcommand = " << subcommand_name(sub) << "\n";
  m << "config_hash = fnv1a64:" << hash << "\n";
  m << "seed = " << c.seed << "\n";
  m << "version = " << kVersion << "\n";
  m << "\n[schema]\n";
  for (const auto& [name, cols] : a.schema()) m << name << " = " << join(cols, ",") << "\n";
  m << "\n[config]\n";
  std::istringstream cfg(c.to_text());
  for (std::string line; std::getline(cfg, line);) m << (line.empty() ? "#" : "# " + line) << "\n";
  if (!m) throw std::runtime_error("cannot write manifest");
}

}  // namespace

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  for (const auto& [s, n] : kNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

std::string_view subcommand_name(Subcommand s) {
  for (const auto& [k, n] : kNames) {
    if (k == s) return n;
  }
  return "?";
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [s, n] : kNames) v.emplace_back(n);
    return v;
  }();
  return names;
}

std::size_t stride_for(const ScalingParams& sp, double record_interval) {
  const std::size_t n = sp.n_steps();
  if (record_interval <= 0.0) return n;
  const double dt = sp.effective_dt();
  const double ratio = record_interval / dt;
  const double stride = std::round(ratio);
  if (stride < 1.0 || std::abs(ratio - stride) > 1e-6 * stride || n % static_cast<std::size_t>(stride) != 0) {
    throw ValidationError("record_interval " + format_real_short(record_interval) +
                          " is not a whole number of steps dividing the horizon (step " + format_real_short(dt) + ")");
  }
  return static_cast<std::size_t>(stride);
}

Ensemble simulate_reference(const ExperimentConfig& c, std::size_t stride, unsigned workers) {
  SimulationOptions o;
  o.n_traj = c.n_traj;
  o.seed = derive_seed(c.seed, seed_tag::kReference);
  o.output_stride = stride;
  o.record_momenta = false;
  o.workers = workers;
  return simulate_ensemble(OverdampedProcess{c.base_potential(), initial_law(c, 1.0)}, c.reference_params(), o);
}

Ensemble simulate_langevin(const ExperimentConfig& c, std::size_t eps_index, const Potential& v_eps,
                           std::size_t stride, bool record_momenta, unsigned workers, std::uint64_t tag) {
  const double eps = c.eps.at(eps_index);
  SimulationOptions o;
  o.n_traj = c.n_traj;
  o.seed = derive_seed(c.seed, tag + eps_index);
  o.output_stride = stride;
  o.record_momenta = record_momenta;
  o.workers = workers;
  return simulate_ensemble(LangevinProcess{v_eps, initial_law(c, eps)}, c.langevin_params(eps), o);
}

RunResult run(Subcommand sub, const ExperimentConfig& config, const RunOptions& opts) {
  config.validate(true);
  const std::filesystem::path parent = opts.out_dir / std::string(subcommand_name(sub));
  const std::filesystem::path final_dir = parent / config.name;
  const std::filesystem::path stage = parent / ("." + config.name + ".partial");
  std::filesystem::remove_all(stage);
  std::filesystem::create_directories(stage);
  try {
    Artifacts a(stage);
    const unsigned workers = std::max(1u, opts.workers);
    switch (sub) {
      case Subcommand::Simulate: recipe_simulate(config, workers, a); break;
      case Subcommand::Residuals: recipe_residuals(config, a); break;
      case Subcommand::Converge: recipe_converge(config, workers, a); break;
      case Subcommand::Moments: recipe_moments(config, workers, a); break;
      case Subcommand::Ladder: recipe_ladder(config, workers, a); break;
      case Subcommand::Modulus: recipe_modulus(config, workers, a); break;
      case Subcommand::RestTerms: recipe_rest_terms(config, workers, a); break;
      case Subcommand::Crystal: recipe_crystal(config, workers, a); break;
    }
    write_manifest(stage / "manifest", sub, config, a);
    RunResult r;
    r.dir = final_dir;
    for (const auto& [name, cols] : a.schema()) r.files.push_back(name);
    r.files.emplace_back("manifest");
    std::filesystem::remove_all(final_dir);
    std::filesystem::rename(stage, final_dir);
    return r;
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove_all(stage, ec);
    throw;
  }
}

}  // namespace odlab
