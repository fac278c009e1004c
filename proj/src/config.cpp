#include "odlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "odlab/csv.hpp"
#include "odlab/errors.hpp"

namespace odlab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> tokens(std::string_view s, std::string_view seps = " \t,") {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = s.find_first_of(seps, i);
    if (j == std::string_view::npos) j = s.size();
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

std::vector<double> real_list(std::string_view s) {
  std::vector<double> out;
  for (auto t : tokens(s)) out.push_back(parse_real(t));
  return out;
}

std::string list_text(const std::vector<double>& v, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_real_short(v[i]);
  }
  return out;
}

bool parse_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ValidationError("expected true or false, got '" + std::string(s) + "'");
}

bool valid_label(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot read file " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"", {"name"}},
      {"model", {"dimension", "potential", "potential_file", "beta"}},
      {"crystal", {"chi", "chi_file", "rule", "table", "contrast"}},
      {"schedule", {"eps", "dt", "dt_ref", "T", "n_traj", "seed", "record_interval"}},
      {"initial", {"q0", "p0"}},
      {"observables", {"times"}},  // plus f.<label>
      {"ladder", {"ladders", "phi", "f"}},
      {"modulus", {"deltas"}},
      {"moments", {"gammas"}},
      {"residuals", {"n_points", "p_scale", "f"}},
  };
  return s;
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line;
};

}  // namespace

double DtRule::dt_for(double eps) const {
  switch (kind) {
    case Kind::Auto: return ScalingParams::default_dt(eps);
    case Kind::Scaled: return value * eps * eps;
    case Kind::Fixed: return value;
  }
  return value;
}

MomentumLaw MomentumSpec::law(double eps, double beta) const {
  switch (kind) {
    case Kind::Zero: return MomentumLaw::zero();
    case Kind::Gibbs: return MomentumLaw::gaussian(1.0 / beta);
    case Kind::Gaussian: return MomentumLaw::gaussian(variance * std::pow(eps, power));
  }
  return MomentumLaw::zero();
}

bool MomentumSpec::satisfies_moment_hypothesis() const {
  // E|P_0|^3 ~ variance^{3/2} eps^{3 power / 2}; eps E|P_0|^3 -> 0 iff 1 + 3 power / 2 > 0.
  return kind != Kind::Gaussian || variance == 0.0 || 1.0 + 1.5 * power > 0.0;
}

CrystalRule::Entry CrystalRule::at(double eps) const {
  if (use_table) {
    for (const auto& e : table) {
      if (std::abs(e.eps - eps) <= 1e-12 * std::max(1.0, eps)) return e;
    }
    throw ValidationError("crystal table has no entry for eps = " + format_real_short(eps));
  }
  const double kk = std::ceil(std::pow(eps, -k_power) * (1.0 - 1e-12));
  return {eps, std::pow(eps, alpha_power), static_cast<int>(std::max(1.0, kk))};
}

void ExperimentConfig::validate(bool allow_heavy_tails) const {
  std::vector<std::string> e;
  if (!valid_label(name)) e.push_back("name: must be a non-empty label of [A-Za-z0-9_-]");
  if (dimension < 1 || dimension > kMaxDim) e.push_back("model.dimension: must be in 1..3");
  if (potential.dim() != dimension) e.push_back("model.potential: required, with dimension terms");
  if (!(beta > 0.0)) e.push_back("model.beta: must be positive");
  if (eps.empty()) e.push_back("schedule.eps: list must be nonempty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) e.push_back("schedule.eps: entries must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) e.push_back("schedule.eps: list must be strictly decreasing");
  }
  if (dt_rule.kind != DtRule::Kind::Auto && !(dt_rule.value > 0.0)) {
    e.push_back("schedule.dt: value must be positive");
  }
  if (!(T > 0.0)) e.push_back("schedule.T: must be positive");
  if (!(dt_ref > 0.0) || dt_ref > T) e.push_back("schedule.dt_ref: must be in (0, T]");
  for (double x : eps) {
    if (x > 0.0 && T > 0.0 && !(dt_rule.dt_for(x) <= T)) e.push_back("schedule.dt: step exceeds T");
  }
  if (n_traj == 0) e.push_back("schedule.n_traj: must be positive");
  if (!(record_interval >= 0.0) || record_interval > T) {
    e.push_back("schedule.record_interval: must be in [0, T]");
  }
  if (q0.kind == PositionLaw::Kind::Point && q0.point.size() != dimension) {
    e.push_back("initial.q0: point must have dimension coordinates");
  }
  if (p0.kind == MomentumSpec::Kind::Gaussian && !(p0.variance >= 0.0)) {
    e.push_back("initial.p0: variance must be non-negative");
  }
  if (!allow_heavy_tails && !p0.satisfies_moment_hypothesis()) {
    e.push_back(
        "initial.p0: violates the initial moment hypothesis eps E|P_0|^3 -> 0 "
        "(needs power > -2/3); pass --allow-heavy-tails to run anyway");
  }
  if (test_functions.empty()) e.push_back("observables: at least one f.<label> is required");
  std::set<std::string> labels;
  for (const auto& f : test_functions) {
    if (!labels.insert(f.label()).second) e.push_back("observables: duplicate label " + f.label());
    if (f.dim() != dimension) e.push_back("observables.f." + f.label() + ": dimension mismatch");
  }
  for (double t : times) {
    if (!(t > 0.0) || t > T) e.push_back("observables.times: entries must be in (0, T]");
  }
  for (const auto& l : ladders) {
    if (l.size() < 2) e.push_back("ladder.ladders: each ladder needs at least two times");
    for (std::size_t k = 0; k < l.size(); ++k) {
      if (!(l[k] >= 0.0) || l[k] > T) e.push_back("ladder.ladders: times must be in [0, T]");
      if (k > 0 && l[k] < l[k - 1]) e.push_back("ladder.ladders: times must be non-decreasing");
    }
  }
  if (!ladders.empty() && ladder_phi.dim() != dimension) {
    e.push_back("ladder.phi: required when ladders are given");
  }
  if (!ladder_f.empty() && !labels.contains(ladder_f)) e.push_back("ladder.f: unknown label " + ladder_f);
  if (!residual_f.empty() && !labels.contains(residual_f)) {
    e.push_back("residuals.f: unknown label " + residual_f);
  }
  for (double d : deltas) {
    if (!(d > 0.0) || !(d < T)) e.push_back("modulus.deltas: entries must be in (0, T)");
  }
  for (double g : gammas) {
    if (!(g >= 1.0)) e.push_back("moments.gammas: entries must be >= 1");
  }
  if (residual_points == 0) e.push_back("residuals.n_points: must be positive");
  if (!(residual_p_scale > 0.0)) e.push_back("residuals.p_scale: must be positive");
  if (crystal) {
    if (crystal->chi.dim() != dimension) e.push_back("crystal.chi: required, with dimension terms");
    if (crystal->use_table) {
      for (double x : eps) {
        const bool found = std::any_of(crystal->table.begin(), crystal->table.end(), [&](const auto& r) {
          return std::abs(r.eps - x) <= 1e-12 * std::max(1.0, x);
        });
        if (!found) e.push_back("crystal.table: no entry for eps = " + format_real_short(x));
      }
      for (const auto& r : crystal->table) {
        if (r.k < 1) e.push_back("crystal.table: k must be a positive integer");
      }
    } else if (!(crystal->k_power > 0.0)) {
      e.push_back("crystal.rule: k exponent must make k grow as eps -> 0");
    }
  }
  if (!e.empty()) throw ValidationError(std::move(e));
}

Potential ExperimentConfig::base_potential() const { return Potential(potential, "V"); }

Potential ExperimentConfig::potential_for(double e) const {
  if (!crystal) return base_potential();
  const auto r = crystal->at(e);
  return CrystalPotential(base_potential(), crystal->chi, r.alpha, r.k).expanded();
}

ScalingParams ExperimentConfig::langevin_params(double e) const {
  return {e, beta, dt_rule.dt_for(e), T};
}

ScalingParams ExperimentConfig::reference_params() const { return {1.0, beta, dt_ref, T}; }

std::vector<double> ExperimentConfig::eval_times() const {
  return times.empty() ? std::vector<double>{T} : times;
}

const TestFunction& ExperimentConfig::test_function(std::string_view label) const {
  if (label.empty()) {
    if (test_functions.empty()) throw ValidationError("no test functions configured");
    return test_functions.front();
  }
  for (const auto& f : test_functions) {
    if (f.label() == label) return f;
  }
  throw ValidationError("unknown test function " + std::string(label));
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream o;
  o << "name = " << name << "\n\n[model]\n";
  o << "dimension = " << dimension << "\n";
  o << "potential = " << potential.to_text(true) << "\n";
  o << "beta = " << format_real_short(beta) << "\n";
  if (crystal) {
    o << "\n[crystal]\nchi = " << crystal->chi.to_text(true) << "\n";
    if (crystal->use_table) {
      o << "table = ";
      for (std::size_t i = 0; i < crystal->table.size(); ++i) {
        const auto& r = crystal->table[i];
        o << (i ? ", " : "") << format_real_short(r.eps) << ' ' << format_real_short(r.alpha) << ' ' << r.k;
      }
      o << "\n";
    } else {
      o << "rule = alpha=eps^" << format_real_short(crystal->alpha_power) << ", k=ceil(eps^"
        << format_real_short(-crystal->k_power) << ")\n";
    }
    o << "contrast = " << (crystal->contrast ? "true" : "false") << "\n";
  }
  o << "\n[schedule]\neps = " << list_text(eps) << "\n";
  switch (dt_rule.kind) {
    case DtRule::Kind::Auto: o << "dt = auto\n"; break;
    case DtRule::Kind::Scaled: o << "dt = scaled " << format_real_short(dt_rule.value) << "\n"; break;
    case DtRule::Kind::Fixed: o << "dt = fixed " << format_real_short(dt_rule.value) << "\n"; break;
  }
  o << "dt_ref = " << format_real_short(dt_ref) << "\n";
  o << "T = " << format_real_short(T) << "\n";
  o << "n_traj = " << n_traj << "\n";
  o << "seed = " << seed << "\n";
  o << "record_interval = " << format_real_short(record_interval) << "\n";
  o << "\n[initial]\nq0 = ";
  if (q0.kind == PositionLaw::Kind::Uniform) {
    o << "uniform";
  } else {
    o << "point";
    for (double x : q0.point.coords()) o << ' ' << format_real_short(x);
  }
  o << "\np0 = ";
  switch (p0.kind) {
    case MomentumSpec::Kind::Zero: o << "zero"; break;
    case MomentumSpec::Kind::Gibbs: o << "gibbs"; break;
    case MomentumSpec::Kind::Gaussian:
      o << "gaussian " << format_real_short(p0.variance) << " eps^" << format_real_short(p0.power);
      break;
  }
  o << "\n\n[observables]\n";
  for (const auto& f : test_functions) o << "f." << f.label() << " = " << f.function().to_text(true) << "\n";
  if (!times.empty()) o << "times = " << list_text(times) << "\n";
  if (!ladders.empty() || ladder_phi.dim() != 0 || !ladder_f.empty()) {
    o << "\n[ladder]\n";
    if (!ladders.empty()) {
      o << "ladders = ";
      for (std::size_t i = 0; i < ladders.size(); ++i) o << (i ? " / " : "") << list_text(ladders[i], " ");
      o << "\n";
    }
    if (ladder_phi.dim() != 0) o << "phi = " << ladder_phi.to_text(true) << "\n";
    if (!ladder_f.empty()) o << "f = " << ladder_f << "\n";
  }
  if (!deltas.empty()) o << "\n[modulus]\ndeltas = " << list_text(deltas) << "\n";
  o << "\n[moments]\ngammas = " << list_text(gammas) << "\n";
  o << "\n[residuals]\nn_points = " << residual_points << "\np_scale = " << format_real_short(residual_p_scale)
    << "\n";
  if (!residual_f.empty()) o << "f = " << residual_f << "\n";
  return o.str();
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(to_text()); }

ExperimentConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir,
                                   bool allow_heavy_tails) {
  std::vector<std::string> errors;
  std::vector<Entry> entries;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "malformed section header");
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!schema().contains(section) || section.empty()) errors.push_back(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back(where + "expected key = value");
      continue;
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    auto sec = schema().find(section);
    if (sec == schema().end()) continue;  // already reported
    const bool dynamic = section == "observables" && key.rfind("f.", 0) == 0;
    if (!dynamic && !sec->second.contains(key)) {
      errors.push_back(where + "unknown key '" + key + "'" +
                       (section.empty() ? "" : " in [" + section + "]"));
      continue;
    }
    if (!seen.insert({section, key}).second) {
      errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    entries.push_back({section, key, value, lineno});
  }

  ExperimentConfig c;
  auto find = [&](const std::string& s, const std::string& k) -> const Entry* {
    for (const auto& e : entries) {
      if (e.section == s && e.key == k) return &e;
    }
    return nullptr;
  };
  auto field = [&](const std::string& s, const std::string& k, auto&& apply) {
    const Entry* e = find(s, k);
    if (!e) return false;
    try {
      apply(e->value);
    } catch (const ValidationError& ex) {
      errors.push_back((s.empty() ? "" : s + ".") + k + " (line " + std::to_string(e->line) +
                       "): " + ex.what());
    }
    return true;
  };
  auto fourier_field = [&](const std::string& s, const std::string& k, FourierFunction& out) {
    bool inline_given = field(s, k, [&](const std::string& v) { out = FourierFunction::parse(v, c.dimension); });
    bool file_given = field(s, k + "_file", [&](const std::string& v) {
      out = FourierFunction::parse(read_file(base_dir / v), c.dimension);
    });
    if (inline_given && file_given) errors.push_back(s + ": give " + k + " or " + k + "_file, not both");
    return inline_given || file_given;
  };

  field("", "name", [&](const std::string& v) { c.name = v; });
  const bool has_dim = field("model", "dimension", [&](const std::string& v) {
    const auto d = parse_int(v);
    if (d < 1 || d > static_cast<std::int64_t>(kMaxDim)) throw ValidationError("must be in 1..3");
    c.dimension = static_cast<std::size_t>(d);
  });
  if (!has_dim) errors.push_back("model.dimension: missing");
  if (!fourier_field("model", "potential", c.potential)) errors.push_back("model.potential: missing");
  field("model", "beta", [&](const std::string& v) { c.beta = parse_real(v); });

  const bool any_crystal = std::any_of(entries.begin(), entries.end(), [](const Entry& e) { return e.section == "crystal"; });
  if (any_crystal) {
    CrystalRule r;
    if (!fourier_field("crystal", "chi", r.chi)) errors.push_back("crystal.chi: missing");
    const bool has_rule = field("crystal", "rule", [&](const std::string& v) {
      std::string s;
      for (char ch : v) {
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
      }
      const std::string a_prefix = "alpha=eps^";
      const std::string k_prefix = ",k=ceil(eps^";
      const auto kpos = s.find(k_prefix);
      if (s.rfind(a_prefix, 0) != 0 || kpos == std::string::npos || s.back() != ')') {
        throw ValidationError("expected 'alpha=eps^a, k=ceil(eps^-b)'");
      }
      r.alpha_power = parse_real(std::string_view(s).substr(a_prefix.size(), kpos - a_prefix.size()));
      const auto kstart = kpos + k_prefix.size();
      r.k_power = -parse_real(std::string_view(s).substr(kstart, s.size() - 1 - kstart));
    });
    const bool has_table = field("crystal", "table", [&](const std::string& v) {
      r.use_table = true;
      for (auto row : tokens(v, ",")) {
        const auto parts = tokens(row, " \t");
        if (parts.size() != 3) throw ValidationError("table rows are 'eps alpha k'");
        r.table.push_back({parse_real(parts[0]), parse_real(parts[1]), static_cast<int>(parse_int(parts[2]))});
      }
    });
    if (has_rule == has_table) errors.push_back("crystal: give exactly one of rule or table");
    field("crystal", "contrast", [&](const std::string& v) { r.contrast = parse_bool(v); });
    c.crystal = std::move(r);
  }

  if (!field("schedule", "eps", [&](const std::string& v) { c.eps = real_list(v); })) {
    errors.push_back("schedule.eps: missing");
  }
  field("schedule", "dt", [&](const std::string& v) {
    const auto t = tokens(v, " \t");
    if (t.size() == 1 && t[0] == "auto") {
      c.dt_rule = {DtRule::Kind::Auto, 0.0};
    } else if (t.size() == 2 && t[0] == "scaled") {
      c.dt_rule = {DtRule::Kind::Scaled, parse_real(t[1])};
    } else if (t.size() == 2 && t[0] == "fixed") {
      c.dt_rule = {DtRule::Kind::Fixed, parse_real(t[1])};
    } else {
      throw ValidationError("expected 'auto', 'scaled <c>' or 'fixed <dt>'");
    }
  });
  field("schedule", "dt_ref", [&](const std::string& v) { c.dt_ref = parse_real(v); });
  field("schedule", "T", [&](const std::string& v) { c.T = parse_real(v); });
  field("schedule", "n_traj", [&](const std::string& v) {
    const auto n = parse_int(v);
    if (n <= 0) throw ValidationError("must be positive");
    c.n_traj = static_cast<std::size_t>(n);
  });
  field("schedule", "seed", [&](const std::string& v) {
    std::uint64_t s = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), s);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      throw ValidationError("not an unsigned 64-bit integer");
    }
    c.seed = s;
  });
  field("schedule", "record_interval", [&](const std::string& v) { c.record_interval = parse_real(v); });

  field("initial", "q0", [&](const std::string& v) {
    const auto t = tokens(v, " \t");
    if (t.size() == 1 && t[0] == "uniform") {
      c.q0 = PositionLaw::uniform();
    } else if (!t.empty() && t[0] == "point") {
      std::vector<double> x;
      for (std::size_t i = 1; i < t.size(); ++i) x.push_back(parse_real(t[i]));
      if (x.empty() || x.size() > kMaxDim) throw ValidationError("point needs 1..3 coordinates");
      c.q0 = PositionLaw::at(wrap(Vec::from(x)));
    } else {
      throw ValidationError("expected 'uniform' or 'point x1 .. xd'");
    }
  });
  field("initial", "p0", [&](const std::string& v) {
    const auto t = tokens(v, " \t");
    if (t.size() == 1 && t[0] == "zero") {
      c.p0 = {MomentumSpec::Kind::Zero, 0.0, 0.0};
    } else if (t.size() == 1 && t[0] == "gibbs") {
      c.p0 = {MomentumSpec::Kind::Gibbs, 0.0, 0.0};
    } else if ((t.size() == 2 || t.size() == 3) && t[0] == "gaussian") {
      c.p0 = {MomentumSpec::Kind::Gaussian, parse_real(t[1]), 0.0};
      if (t.size() == 3) {
        if (t[2].rfind("eps^", 0) != 0) throw ValidationError("scaling must be written eps^<power>");
        c.p0.power = parse_real(t[2].substr(4));
      }
    } else {
      throw ValidationError("expected 'zero', 'gibbs' or 'gaussian <variance> [eps^<power>]'");
    }
  });

  for (const auto& e : entries) {
    if (e.section != "observables" || e.key.rfind("f.", 0) != 0) continue;
    const std::string label = e.key.substr(2);
    if (!valid_label(label)) {
      errors.push_back("observables." + e.key + ": invalid label");
      continue;
    }
    try {
      c.test_functions.emplace_back(FourierFunction::parse(e.value, c.dimension), label);
    } catch (const ValidationError& ex) {
      errors.push_back("observables." + e.key + ": " + ex.what());
    }
  }
  field("observables", "times", [&](const std::string& v) { c.times = real_list(v); });

  field("ladder", "ladders", [&](const std::string& v) {
    for (auto part : tokens(v, "/")) c.ladders.push_back(real_list(part));
  });
  fourier_field("ladder", "phi", c.ladder_phi);
  field("ladder", "f", [&](const std::string& v) { c.ladder_f = v; });
  field("modulus", "deltas", [&](const std::string& v) { c.deltas = real_list(v); });
  field("moments", "gammas", [&](const std::string& v) { c.gammas = real_list(v); });
  field("residuals", "n_points", [&](const std::string& v) {
    const auto n = parse_int(v);
    if (n <= 0) throw ValidationError("must be positive");
    c.residual_points = static_cast<std::size_t>(n);
  });
  field("residuals", "p_scale", [&](const std::string& v) { c.residual_p_scale = parse_real(v); });
  field("residuals", "f", [&](const std::string& v) { c.residual_f = v; });

  if (errors.empty()) {
    c.validate(allow_heavy_tails);
    return c;
  }
  // Report constraint violations too, except for fields that already failed to parse.
  const auto field_of = [](const std::string& msg) { return msg.substr(0, msg.find_first_of(": (")); };
  std::set<std::string> failed;
  for (const auto& e : errors) failed.insert(field_of(e));
  try {
    c.validate(allow_heavy_tails);
  } catch (const ValidationError& ex) {
    for (const auto& v : ex.violations()) {
      if (!failed.contains(field_of(v))) errors.push_back(v);
    }
  }
  throw ValidationError(std::move(errors));
}

ExperimentConfig parse_config(const std::filesystem::path& path, bool allow_heavy_tails) {
  ExperimentConfig c = parse_config_text(read_file(path), path.parent_path(), allow_heavy_tails);
  return c;
}

}  // namespace odlab
