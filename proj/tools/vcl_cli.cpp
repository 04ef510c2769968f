#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vcl/box.hpp"
#include "vcl/charge.hpp"
#include "vcl/error.hpp"
#include "vcl/format.hpp"
#include "vcl/normalization.hpp"
#include "vcl/report.hpp"
#include "vcl/scattering.hpp"

using nlohmann::json;
using namespace vcl;

namespace {

constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by every subcommand. Values set on the command line win over
// the config file, which wins over the defaults.
struct Common {
  std::string potential = "free";
  std::optional<double> lambda;
  double mass = 1.0;
  double box_l = 100.0;
  double e_max = 25.0;
  std::string format = "json";
  std::string output;
  std::string config;
  json config_json;
  json params = json::object();
};

struct Command {
  CLI::App* app = nullptr;
  std::function<void(Common&, RunRecord&, std::ostream&)> run;
};

void add_common(CLI::App* app, Common& c, bool with_box) {
  app->add_option("--potential", c.potential, "delta:lambda=X | well:v0=X,a=Y | pcw:z0,z1,v;... | free");
  app->add_option("--lambda", c.lambda, "delta strength (overrides the potential's lambda)");
  app->add_option("--mass", c.mass, "fermion mass m");
  if (with_box) {
    app->add_option("--box-l", c.box_l, "box half-length L");
    app->add_option("--e-max", c.e_max, "spectral cutoff E_max");
  }
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--output", c.output, "write to this file instead of standard output");
  app->add_option("--config", c.config, "JSON config with RunRecord fields");
}

// Take a value from the config when its flag was not given.
template <class T>
void from_config(CLI::App* app, const char* flag, const json& cfg, const char* key, T& target) {
  if (app->count(flag) == 0 && cfg.contains(key)) target = cfg.at(key).get<T>();
}
template <class T>
void from_config(CLI::App* app, const char* flag, const json& cfg, const char* key, std::optional<T>& target) {
  if (app->count(flag) == 0 && cfg.contains(key)) target = cfg.at(key).get<T>();
}

PotentialSpec resolve_potential(CLI::App* app, Common& c, Tolerances& tol, BoxSpec& box) {
  std::optional<PotentialSpec> from_file;
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw UsageError("cannot open config file '" + c.config + "'");
    try {
      in >> c.config_json;
    } catch (const json::exception& e) {
      throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    const json& cfg = c.config_json;
    static const std::set<std::string> known{"run_id", "potential", "box", "tolerances", "results", "timings", "params"};
    for (const auto& [key, val] : cfg.items()) {
      if (!known.count(key)) throw UsageError("unknown config key '" + key + "'");
    }
    if (cfg.contains("params")) c.params = cfg.at("params");
    else if (cfg.contains("results") && cfg.at("results").contains("params")) c.params = cfg.at("results").at("params");
    if (cfg.contains("potential") && app->count("--potential") == 0) {
      const json& pj = cfg.at("potential");
      if (pj.is_string()) c.potential = pj.get<std::string>();
      else from_file = PotentialSpec::from_json(pj);
    }
    if (cfg.contains("box")) {
      const BoxSpec b = box_from_json(cfg.at("box"));
      if (app->count("--box-l") == 0) c.box_l = b.L;
      if (app->count("--e-max") == 0) c.e_max = b.E_max;
    }
    if (cfg.contains("tolerances")) tol = tolerances_from_json(cfg.at("tolerances"));
    from_config(app, "--mass", c.params, "mass", c.mass);
    from_config(app, "--lambda", c.params, "lambda", c.lambda);
    from_config(app, "--format", c.params, "format", c.format);
  }
  PotentialSpec p = from_file ? from_file->with_mass(app->count("--mass") ? c.mass : from_file->mass())
                              : PotentialSpec::parse(c.potential, c.mass);
  if (c.lambda) p = p.with_lambda(*c.lambda);
  box = {c.box_l, c.e_max};
  return p;
}

Channel parse_channel(const std::string& s) {
  for (Channel c : kAllChannels) {
    if (to_string(c) == s) return c;
  }
  throw UsageError("unknown channel '" + s + "' (use even+, odd+, even-, odd-)");
}

std::vector<double> parse_range(const std::string& s) {
  // start:stop:step, inclusive of stop up to rounding
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("bad range '" + s + "'");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) throw UsageError("range must be start:stop:step");
  std::vector<double> out;
  const long n = long(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(parts[0] + double(i) * parts[2]);
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("bad list '" + s + "'");
    }
  }
  return out;
}

// On-shell mode of channel c closest to k.
ModeSolution nearest_mode(const ChannelPhase& phase, const BoxSpec& box, double k) {
  const BoxSpec wide{box.L, std::max(box.E_max, std::sqrt(k * k + 4.0) + 1.0)};
  const auto modes = enumerate_modes(phase, wide);
  const ModeSolution* best = nullptr;
  for (const auto& m : modes) {
    if (m.k <= 0) continue;
    if (!best || std::abs(m.k - k) < std::abs(best->k - k)) best = &m;
  }
  if (!best) throw Error(ErrorKind::InvalidArgument, "no box mode near the requested k");
  return *best;
}

json bound_json(const std::vector<BoundState>& bs, const PotentialSpec& p) {
  json arr = json::array();
  for (const auto& b : bs) {
    arr.push_back({{"energy", b.energy},
                   {"parity", b.parity == Parity::even ? "even" : "odd"},
                   {"kappa", b.kappa},
                   {"C", b.C},
                   {"exterior_charge", bound_exterior_charge(b, p.support(), p.mass())}});
  }
  return arr;
}

json spectrum_json(const SpectrumReport& r) {
  return {{"continuum_pos", r.continuum_pos},
          {"continuum_neg", r.continuum_neg},
          {"continuum_by_channel", r.continuum_by_channel},
          {"bound_pos", r.bound_pos},
          {"bound_neg", r.bound_neg},
          {"zero_energy_states", r.zero_energy_states},
          {"Q0", r.Q0},
          {"Q0_energy_cutoff", r.Q0_energy_cutoff},
          {"Q0_naive", r.naive_Q0},
          {"E_max", r.E_max},
          {"converged", r.converged},
          {"half_integer_boundary", r.half_integer_boundary}};
}

void require_format(const Common& c, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (c.format == f) return;
  }
  throw UsageError("--format " + c.format + " is not available for this subcommand");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vacuum charge of 1D Dirac fermions in a symmetric background potential"};
  app.require_subcommand(1);
  app.allow_extras(false);

  std::vector<std::pair<Common, Command>> cmds;
  cmds.reserve(10);
  auto add = [&](const char* name, const char* help, bool with_box) -> std::pair<Common, Command>& {
    cmds.emplace_back();
    auto& [c, cmd] = cmds.back();
    cmd.app = app.add_subcommand(name, help);
    add_common(cmd.app, c, with_box);
    return cmds.back();
  };

  // phase-shifts
  double k_max = 50.0, k_min = 0.0;
  int samples = 500;
  {
    auto& [c, cmd] = add("phase-shifts", "unwrapped phase shifts of all four channels", false);
    cmd.app->add_option("--k-max", k_max, "largest k");
    cmd.app->add_option("--k-min", k_min, "smallest k (default k_max/samples)");
    cmd.app->add_option("--samples", samples, "number of k samples")->check(CLI::PositiveNumber);
    c.format = "csv";
    cmd.run = [&](Common& c, RunRecord& rec, std::ostream& os) {
      from_config(cmd.app, "--k-max", c.params, "k_max", k_max);
      from_config(cmd.app, "--k-min", c.params, "k_min", k_min);
      from_config(cmd.app, "--samples", c.params, "samples", samples);
      if (!(k_max > 0)) throw UsageError("--k-max must be positive");
      const double lo = k_min > 0 ? k_min : k_max / samples;
      std::vector<double> grid;
      for (int i = 0; i < samples; ++i) grid.push_back(samples == 1 ? k_max : lo + (k_max - lo) * i / (samples - 1));
      std::vector<ChannelPhase> phases;
      for (Channel ch : kAllChannels) phases.emplace_back(rec.potential, ch, k_max);
      std::vector<PhaseRow> rows;
      for (double k : grid) {
        PhaseRow r;
        r.k = k;
        for (int i = 0; i < 4; ++i) r.delta[i] = phases[size_t(i)](k);
        rows.push_back(r);
      }
      if (c.format == "csv") {
        emit_phase_csv(os, rows);
        return;
      }
      json t = json::array();
      for (const auto& r : rows) t.push_back({r.k, r.delta[0], r.delta[1], r.delta[2], r.delta[3]});
      rec.results["columns"] = {"k", "delta_even_pos", "delta_odd_pos", "delta_even_neg", "delta_odd_neg"};
      rec.results["table"] = t;
      json lim = json::object();
      for (const auto& ph : phases)
        lim[to_string(ph.channel())] = {{"at_zero", ph.at_zero()}, {"at_infinity", ph.at_infinity()}};
      rec.results["limits"] = lim;
      emit_json(os, rec);
    };
  }

  // bound-states
  {
    auto& [c, cmd] = add("bound-states", "bound states with |E| < m", false);
    cmd.run = [&](Common& c, RunRecord& rec, std::ostream& os) {
      const auto bs = find_bound_states(rec.potential, rec.tolerances);
      if (c.format == "csv") {
        os << "energy,parity,kappa,C,exterior_charge\n";
        for (const auto& b : bs)
          os << format_double(b.energy) << ',' << (b.parity == Parity::even ? "even" : "odd") << ','
             << format_double(b.kappa) << ',' << format_double(b.C) << ','
             << format_double(bound_exterior_charge(b, rec.potential.support(), rec.potential.mass())) << '\n';
        return;
      }
      rec.results["bound_states"] = bound_json(bs, rec.potential);
      emit_json(os, rec);
    };
  }

  // spectrum
  std::string spectrum_channel;
  {
    auto& [c, cmd] = add("spectrum", "box modes of one channel, or counts of all", true);
    cmd.app->add_option("--channel", spectrum_channel, "list the modes of this channel (even+, odd+, even-, odd-)");
    cmd.run = [&](Common& c, RunRecord& rec, std::ostream& os) {
      from_config(cmd.app, "--channel", c.params, "channel", spectrum_channel);
      if (!spectrum_channel.empty()) {
        const Channel ch = parse_channel(spectrum_channel);
        const auto modes = enumerate_modes(rec.potential, rec.box, ch, rec.tolerances);
        if (c.format == "csv") {
          os << "n,k,E,norm,delta\n";
          for (const auto& m : modes)
            os << m.n << ',' << format_double(m.k) << ',' << format_double(m.E) << ',' << format_double(m.norm)
               << ',' << format_double(m.delta) << '\n';
          return;
        }
        json arr = json::array();
        for (const auto& m : modes) arr.push_back({{"n", m.n}, {"k", m.k}, {"E", m.E}, {"norm", m.norm}, {"delta", m.delta}});
        rec.results["channel"] = spectrum_channel;
        rec.results["modes"] = arr;
        emit_json(os, rec);
        return;
      }
      require_format(c, {"json"});
      rec.results["spectrum"] = spectrum_json(spectral_asymmetry(rec.potential, rec.box, rec.tolerances));
      emit_json(os, rec);
    };
  }

  // vacuum-charge and naive-vs-exact share the sweep
  std::string sweep_vc, sweep_nve;
  auto sweep_runner = [&](std::string& sweep, CLI::App* sub) {
    return [&, sub](Common& c, RunRecord& rec, std::ostream& os) {
      from_config(sub, "--lambda-sweep", c.params, "lambda_sweep", sweep);
      if (!sweep.empty()) {
        if (!rec.potential.is_delta()) throw UsageError("--lambda-sweep needs a delta potential");
        const auto rows = crossing_sweep(parse_range(sweep), rec.box, rec.potential.mass(), rec.tolerances);
        if (c.format == "csv") {
          emit_sweep_csv(os, rows);
          return;
        }
        std::ostringstream csv;
        emit_sweep_csv(csv, rows);
        json arr = json::array();
        for (const auto& r : rows) {
          arr.push_back({{"lambda", r.lambda},
                         {"Q0_exact", r.Q0_exact},
                         {"Q0_naive", r.Q0_naive},
                         {"Q0_formula", r.Q0_formula},
                         {"n_bound_pos", r.n_bound_pos},
                         {"n_bound_neg", r.n_bound_neg},
                         {"E_b_min", r.E_b_min ? json(*r.E_b_min) : json(nullptr)},
                         {"converged", r.converged},
                         {"bound_energies", r.bound_energies}});
        }
        rec.results["sweep"] = arr;
        emit_json(os, rec);
        return;
      }
      const auto rep = spectral_asymmetry(rec.potential, rec.box, rec.tolerances);
      const auto naive = naive_vacuum_charge(rec.potential, rec.tolerances);
      json r = spectrum_json(rep);
      r["naive"] = {{"delta_pos_inf", naive.delta_pos_inf},
                    {"delta_pos_zero", naive.delta_pos_zero},
                    {"delta_neg_inf", naive.delta_neg_inf},
                    {"delta_neg_zero", naive.delta_neg_zero},
                    {"N_pos", naive.bound_pos},
                    {"N_neg", naive.bound_neg},
                    {"value", naive.value}};
      if (rec.potential.is_delta() && rec.potential.delta_strength() >= 0)
        r["Q0_formula"] = integral_vacuum_charge(rec.potential.delta_strength()).value;
      if (c.format == "csv") {
        os << "Q0_exact,Q0_naive,difference\n"
           << format_double(rep.Q0) << ',' << format_double(naive.value) << ','
           << format_double(rep.Q0 - naive.value) << '\n';
        return;
      }
      rec.results["vacuum_charge"] = r;
      emit_json(os, rec);
    };
  };
  {
    auto& [c, cmd] = add("vacuum-charge", "spectral-asymmetry vacuum charge, optionally swept over lambda", true);
    cmd.app->add_option("--lambda-sweep", sweep_vc, "start:stop:step grid of delta strengths");
    c.format = "csv";
    cmd.run = sweep_runner(sweep_vc, cmd.app);
  }
  {
    auto& [c, cmd] = add("naive-vs-exact", "continuum phase-shift formula against exact counting", true);
    cmd.app->add_option("--lambda-sweep", sweep_nve, "start:stop:step grid of delta strengths");
    c.format = "csv";
    cmd.run = sweep_runner(sweep_nve, cmd.app);
  }

  // normalization-check
  double norm_k = 1.0;
  std::string norm_channel = "even+";
  {
    auto& [c, cmd] = add("normalization-check", "N^2 from the phase-shift derivative against direct integration", true);
    cmd.app->add_option("--k", norm_k, "target k; the nearest box mode is used");
    cmd.app->add_option("--channel", norm_channel, "even+, odd+, even- or odd-");
    cmd.run = [&](Common& c, RunRecord& rec, std::ostream& os) {
      from_config(cmd.app, "--k", c.params, "k", norm_k);
      from_config(cmd.app, "--channel", c.params, "channel", norm_channel);
      const ChannelPhase phase(rec.potential, parse_channel(norm_channel), norm_k + 1.0);
      const ModeSolution m = nearest_mode(phase, rec.box, norm_k);
      const auto cmp = compare_norm(phase, m.k, rec.box, rec.tolerances);
      if (c.format == "csv") {
        os << "k,dDelta_dk,N2_direct,N2_formula,N2_first_order\n"
           << format_double(cmp.k) << ',' << format_double(cmp.dDelta_dk) << ',' << format_double(cmp.N2_direct)
           << ',' << format_double(cmp.N2_exact_formula) << ',' << format_double(cmp.N2_first_order) << '\n';
        return;
      }
      rec.results["normalization"] = {{"channel", norm_channel},
                                       {"n", m.n},
                                       {"k", cmp.k},
                                       {"dDelta_dk", cmp.dDelta_dk},
                                       {"N2_direct", cmp.N2_direct},
                                       {"N2_formula", cmp.N2_exact_formula},
                                       {"N2_first_order", cmp.N2_first_order},
                                       {"residual_formula", cmp.N2_direct - cmp.N2_exact_formula},
                                       {"residual_first_order", cmp.N2_direct - cmp.N2_first_order}};
      emit_json(os, rec);
    };
  }

  // lls-check
  double lls_k = 1.0;
  std::optional<double> lls_kp, lls_z1, lls_z2;
  std::string lls_channel = "even+";
  {
    auto& [c, cmd] = add("lls-check", "boundary-bilinear identities for scattering solutions", true);
    cmd.app->add_option("--k", lls_k, "wavevector");
    cmd.app->add_option("--k-prime", lls_kp, "second wavevector; selects the two-mode identity");
    cmd.app->add_option("--channel", lls_channel, "even+, odd+, even- or odd-");
    cmd.app->add_option("--z1", lls_z1, "left endpoint (default -L)");
    cmd.app->add_option("--z2", lls_z2, "right endpoint (default L)");
    cmd.run = [&](Common& c, RunRecord& rec, std::ostream& os) {
      from_config(cmd.app, "--k", c.params, "k", lls_k);
      from_config(cmd.app, "--k-prime", c.params, "k_prime", lls_kp);
      from_config(cmd.app, "--channel", c.params, "channel", lls_channel);
      from_config(cmd.app, "--z1", c.params, "z1", lls_z1);
      from_config(cmd.app, "--z2", c.params, "z2", lls_z2);
      const Channel ch = parse_channel(lls_channel);
      const double z1 = lls_z1.value_or(-rec.box.L), z2 = lls_z2.value_or(rec.box.L);
      const auto row = [](const char* name, const IdentityCheck& r) {
        return json{{"check", name},
                    {"lhs", {r.lhs.real(), r.lhs.imag()}},
                    {"rhs", {r.rhs.real(), r.rhs.imag()}},
                    {"residual", r.residual},
                    {"relative", r.relative}};
      };
      json out = json::array();
      if (lls_kp) {
        out.push_back(row("bilinear", lls_bilinear_check(rec.potential, ch, lls_k, *lls_kp, z1, z2, rec.tolerances)));
      } else {
        const ChannelPhase phase(rec.potential, ch, lls_k + 1.0);
        out.push_back(row("derivative_asymptotic",
                          lls_derivative_check(phase, lls_k, z1, z2, Endpoints::asymptotic, rec.tolerances)));
        out.push_back(row("derivative_propagated",
                          lls_derivative_check(phase, lls_k, z1, z2, Endpoints::propagated, rec.tolerances)));
      }
      if (c.format == "csv") {
        os << "check,lhs_re,lhs_im,rhs_re,rhs_im,residual,relative\n";
        for (const auto& r : out)
          os << r["check"].get<std::string>() << ',' << format_double(r["lhs"][0]) << ','
             << format_double(r["lhs"][1]) << ',' << format_double(r["rhs"][0]) << ',' << format_double(r["rhs"][1])
             << ',' << format_double(r["residual"]) << ',' << format_double(r["relative"]) << '\n';
        return;
      }
      rec.results["lls"] = out;
      emit_json(os, rec);
    };
  }

  // charge-profile
  double prof_k = 1.0;
  int prof_samples = 401;
  std::optional<double> prof_zmin, prof_zmax;
  std::optional<int> prof_bound;
  std::string prof_channel = "even+";
  {
    auto& [c, cmd] = add("charge-profile", "density rho(z) of one normalized mode on a z grid", true);
    cmd.app->add_option("--k", prof_k, "target k; the nearest box mode is used");
    cmd.app->add_option("--channel", prof_channel, "even+, odd+, even- or odd-");
    cmd.app->add_option("--bound", prof_bound, "profile the bound state with this index instead");
    cmd.app->add_option("--z-min", prof_zmin, "grid start (default -L)");
    cmd.app->add_option("--z-max", prof_zmax, "grid end (default L)");
    cmd.app->add_option("--z-samples", prof_samples, "grid size")->check(CLI::Range(2, 10000000));
    c.format = "csv";
    cmd.run = [&](Common& c, RunRecord& rec, std::ostream& os) {
      from_config(cmd.app, "--k", c.params, "k", prof_k);
      from_config(cmd.app, "--channel", c.params, "channel", prof_channel);
      from_config(cmd.app, "--bound", c.params, "bound", prof_bound);
      from_config(cmd.app, "--z-min", c.params, "z_min", prof_zmin);
      from_config(cmd.app, "--z-max", c.params, "z_max", prof_zmax);
      from_config(cmd.app, "--z-samples", c.params, "z_samples", prof_samples);
      const double z0 = prof_zmin.value_or(-rec.box.L), z1 = prof_zmax.value_or(rec.box.L);
      std::function<double(double)> rho;
      json meta;
      std::optional<BoundState> bound;
      std::optional<ModeFunction> mode;
      if (prof_bound) {
        const auto bs = find_bound_states(rec.potential, rec.tolerances);
        if (*prof_bound < 0 || size_t(*prof_bound) >= bs.size()) throw UsageError("--bound index out of range");
        bound = bs[size_t(*prof_bound)];
        rho = [&](double z) { return density(bound_spinor(rec.potential, *bound, z)); };
        meta = {{"bound_index", *prof_bound}, {"energy", bound->energy}};
      } else {
        const Channel ch = parse_channel(prof_channel);
        const ChannelPhase phase(rec.potential, ch, prof_k + 1.0);
        const ModeSolution m = nearest_mode(phase, rec.box, prof_k);
        mode.emplace(rec.potential, ch, m.k, m.delta, direct_norm(phase, m.k, rec.box, rec.tolerances), rec.box.L);
        rho = [&](double z) { return mode->density(z); };
        meta = {{"channel", prof_channel}, {"n", m.n}, {"k", m.k}, {"E", mode->energy()}, {"norm", mode->params().norm}};
      }
      std::vector<std::pair<double, double>> pts;
      for (int i = 0; i < prof_samples; ++i) {
        const double z = z0 + (z1 - z0) * i / (prof_samples - 1);
        pts.emplace_back(z, rho(z));
      }
      if (c.format == "csv") {
        os << "z,rho\n";
        for (const auto& [z, r] : pts) os << format_double(z) << ',' << format_double(r) << '\n';
        return;
      }
      json arr = json::array();
      for (const auto& [z, r] : pts) arr.push_back({z, r});
      rec.results["mode"] = meta;
      rec.results["profile"] = arr;
      emit_json(os, rec);
    };
  }

  // exterior-charge
  bool ext_modes = false;
  {
    auto& [c, cmd] = add("exterior-charge", "vacuum charge outside the potential's support", true);
    cmd.app->add_flag("--modes", ext_modes, "include per-mode exterior charges");
    cmd.run = [&](Common& c, RunRecord& rec, std::ostream& os) {
      from_config(cmd.app, "--modes", c.params, "modes", ext_modes);
      const auto r = vacuum_charge_exterior(rec.potential, rec.box, rec.tolerances);
      if (c.format == "csv") {
        os << "channel,n,k,exact,closed_form\n";
        for (const auto& m : r.modes)
          os << to_string(m.channel) << ',' << m.n << ',' << format_double(m.k) << ',' << format_double(m.exact)
             << ',' << format_double(m.closed_form) << '\n';
        return;
      }
      json j{{"phase_part", r.phase_part},
             {"mass_part", r.mass_part},
             {"counting_part", r.counting_part},
             {"bound_part", r.bound_part},
             {"bound_tail", r.bound_tail},
             {"Q0_ext_direct", r.Q0_ext_direct},
             {"Q0_ext_phase_formula", r.Q0_ext_phase_formula},
             {"Q0", r.Q0},
             {"uniform_shift", r.uniform_shift},
             {"mass_term_branch_sign", r.mass_term_branch_sign},
             {"mode_count", r.modes.size()}};
      if (ext_modes) {
        json arr = json::array();
        for (const auto& m : r.modes)
          arr.push_back({{"channel", to_string(m.channel)}, {"n", m.n}, {"k", m.k}, {"exact", m.exact},
                         {"closed_form", std::isnan(m.closed_form) ? json(nullptr) : json(m.closed_form)}});
        j["modes"] = arr;
      }
      rec.results["exterior_charge"] = j;
      emit_json(os, rec);
    };
  }

  // convergence
  std::string quantity = "Q0", l_list = "25,50,100,200";
  {
    auto& [c, cmd] = add("convergence", "a quantity against the box size, with a fitted power law", true);
    cmd.app->add_option("--quantity", quantity, "Q0, N2_residual or Q0_ext");
    cmd.app->add_option("--l-list", l_list, "comma-separated increasing box half-lengths");
    cmd.run = [&](Common& c, RunRecord& rec, std::ostream& os) {
      from_config(cmd.app, "--quantity", c.params, "quantity", quantity);
      from_config(cmd.app, "--l-list", c.params, "l_list", l_list);
      const auto t = run_convergence_study(parse_quantity(quantity), rec.potential, parse_list(l_list), rec.box.E_max,
                                           rec.tolerances);
      if (c.format == "csv") {
        os << "L,value,residual\n";
        for (const auto& r : t.rows)
          os << format_double(r.L) << ',' << format_double(r.value) << ','
             << (r.residual ? format_double(*r.residual) : std::string()) << '\n';
        return;
      }
      rec.results["convergence"] = to_json(t);
      emit_json(os, rec);
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  for (auto& [c, cmd] : cmds) {
    if (!cmd.app->parsed()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      RunRecord rec;
      rec.run_id = make_run_id();
      rec.potential = resolve_potential(cmd.app, c, rec.tolerances, rec.box);
      rec.results["command"] = cmd.app->get_name();
      std::ofstream file;
      if (!c.output.empty()) {
        file.open(c.output);
        if (!file) throw Error(ErrorKind::IoError, "cannot write '" + c.output + "'");
      }
      std::ostream& os = c.output.empty() ? std::cout : file;
      // timings are filled before emission, so record them around the run
      rec.timings["wall_seconds"] = 0.0;
      std::ostringstream buffer;
      cmd.run(c, rec, buffer);
      std::string text = buffer.str();
      if (c.format == "json") {
        rec.results = json::parse(text).at("results");
        rec.timings["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream again;
        emit_json(again, rec);
        text = again.str();
      }
      os << text;
      os.flush();
      if (!os) throw Error(ErrorKind::IoError, "write failed");
      return 0;
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const Error& e) {
      std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
      const bool usage = e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::InvalidArgument;
      return usage ? kExitUsage : kExitComputation;
    } catch (const json::exception& e) {
      std::cerr << "error: bad config value: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitComputation;
    }
  }
  return kExitUsage;
}
