#include "vcl/report.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "vcl/charge.hpp"
#include "vcl/error.hpp"
#include "vcl/format.hpp"
#include "vcl/normalization.hpp"

namespace vcl {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s) {
  try {
    size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error(ErrorKind::ParseError, "bad CSV number '" + s + "'");
  }
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

void check_stream(const std::ostream& os) {
  if (!os) throw Error(ErrorKind::IoError, "write failed");
}

}  // namespace

json to_json(const Tolerances& t) {
  return {{"root_abs", t.root_abs},
          {"quad_rel", t.quad_rel},
          {"deriv_step", t.deriv_step},
          {"zero_energy_eps", t.zero_energy_eps},
          {"max_root_iterations", t.max_root_iterations},
          {"max_quad_depth", t.max_quad_depth}};
}

Tolerances tolerances_from_json(const json& j) {
  Tolerances t;
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "root_abs") t.root_abs = val.get<double>();
      else if (key == "quad_rel") t.quad_rel = val.get<double>();
      else if (key == "deriv_step") t.deriv_step = val.get<double>();
      else if (key == "zero_energy_eps") t.zero_energy_eps = val.get<double>();
      else if (key == "max_root_iterations") t.max_root_iterations = val.get<int>();
      else if (key == "max_quad_depth") t.max_quad_depth = val.get<int>();
      else throw Error(ErrorKind::ParseError, "unknown tolerance '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad tolerances: ") + e.what());
  }
  t.validate();
  return t;
}

json to_json(const BoxSpec& b) { return {{"L", b.L}, {"boundary", "periodic"}, {"E_max", b.E_max}}; }

BoxSpec box_from_json(const json& j) {
  BoxSpec b;
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "L") b.L = val.get<double>();
      else if (key == "E_max") b.E_max = val.get<double>();
      else if (key == "boundary") {
        if (val.get<std::string>() != "periodic")
          throw Error(ErrorKind::ParseError, "only periodic boundaries are supported");
      } else {
        throw Error(ErrorKind::ParseError, "unknown box field '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad box: ") + e.what());
  }
  return b;
}

json RunRecord::to_json() const {
  json j;
  j["run_id"] = run_id;
  j["potential"] = potential.to_json();
  j["box"] = vcl::to_json(box);
  j["tolerances"] = vcl::to_json(tolerances);
  j["results"] = results;
  j["timings"] = timings;
  return j;
}

RunRecord RunRecord::from_json(const json& j) {
  RunRecord r;
  try {
    r.run_id = j.at("run_id").get<std::string>();
    r.potential = PotentialSpec::from_json(j.at("potential"));
    r.box = box_from_json(j.at("box"));
    r.tolerances = tolerances_from_json(j.at("tolerances"));
    r.results = j.at("results");
    r.timings = j.at("timings").get<std::map<std::string, double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad run record: ") + e.what());
  }
  return r;
}

std::string make_run_id() {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(now).count();
  std::random_device rd;
  std::ostringstream os;
  os << std::hex << us << '-' << (rd() & 0xffffu);
  return os.str();
}

Quantity parse_quantity(std::string_view s) {
  if (s == "Q0") return Quantity::Q0;
  if (s == "N2_residual") return Quantity::N2_residual;
  if (s == "Q0_ext") return Quantity::Q0_ext;
  throw Error(ErrorKind::ParseError, "unknown quantity '" + std::string(s) + "'");
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::Q0: return "Q0";
    case Quantity::N2_residual: return "N2_residual";
    case Quantity::Q0_ext: return "Q0_ext";
  }
  return "?";
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "slope needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw Error(ErrorKind::DomainError, "log-log slope needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable run_convergence_study(Quantity q, const PotentialSpec& p, const std::vector<double>& L_list,
                                       double E_max, const Tolerances& tol) {
  for (size_t i = 1; i < L_list.size(); ++i) {
    if (!(L_list[i] > L_list[i - 1])) throw Error(ErrorKind::InvalidArgument, "L list must be increasing");
  }
  ConvergenceTable t;
  t.quantity = q;
  for (double L : L_list) {
    const BoxSpec box{L, E_max};
    ConvergenceRow row;
    row.L = L;
    if (q == Quantity::Q0) {
      row.value = spectral_asymmetry(p, box, tol).Q0;
    } else if (q == Quantity::Q0_ext) {
      row.value = vacuum_charge_exterior(p, box, tol).Q0_ext_direct;
    } else {
      const ChannelPhase phase(p, {Parity::even, Branch::positive});
      double worst = 0;
      int used = 0;
      for (const auto& md : enumerate_modes(phase, box, tol)) {
        if (md.k <= 0.5 * p.mass()) continue;
        const auto cmp = compare_norm(phase, md.k, box, tol);
        worst = std::max(worst, std::abs(cmp.N2_direct - cmp.N2_first_order));
        if (++used == 3) break;
      }
      row.value = worst;
      row.residual = worst;
    }
    t.rows.push_back(row);
  }
  if (q == Quantity::Q0 && !t.rows.empty()) {
    for (auto& r : t.rows) r.residual = std::abs(r.value - t.rows.back().value);
    t.rows.back().residual.reset();
  } else if (q == Quantity::Q0_ext) {
    for (size_t i = 0; i + 1 < t.rows.size(); ++i) t.rows[i].residual = std::abs(t.rows[i + 1].value - t.rows[i].value);
  }
  std::vector<double> xs, ys;
  for (const auto& r : t.rows) {
    if (r.residual && *r.residual > 1e-12) {
      xs.push_back(r.L);
      ys.push_back(*r.residual);
    }
  }
  if (xs.size() >= 2) t.exponent = loglog_slope(xs, ys);
  return t;
}

json to_json(const ConvergenceTable& t) {
  json j;
  j["quantity"] = std::string(to_string(t.quantity));
  j["rows"] = json::array();
  for (const auto& r : t.rows) {
    json row{{"L", r.L}, {"value", r.value}};
    row["residual"] = r.residual ? json(*r.residual) : json(nullptr);
    j["rows"].push_back(row);
  }
  j["exponent"] = t.exponent ? json(*t.exponent) : json(nullptr);
  return j;
}

void emit_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    os << format_double(r.lambda) << ',' << format_double(r.Q0_exact) << ',' << format_double(r.Q0_naive) << ','
       << r.Q0_formula << ',' << r.n_bound_pos << ',' << r.n_bound_neg << ','
       << (r.E_b_min ? format_double(*r.E_b_min) : std::string()) << ',' << (r.converged ? "true" : "false")
       << '\n';
  }
  check_stream(os);
}

std::vector<SweepRow> parse_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != kSweepHeader)
    throw Error(ErrorKind::ParseError, "sweep CSV header mismatch");
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw Error(ErrorKind::ParseError, "sweep CSV row needs 8 fields");
    SweepRow r;
    r.lambda = parse_cell(f[0]);
    r.Q0_exact = parse_cell(f[1]);
    r.Q0_naive = parse_cell(f[2]);
    r.Q0_formula = long(parse_cell(f[3]));
    r.n_bound_pos = int(parse_cell(f[4]));
    r.n_bound_neg = int(parse_cell(f[5]));
    if (!f[6].empty()) r.E_b_min = parse_cell(f[6]);
    if (f[7] != "true" && f[7] != "false") throw Error(ErrorKind::ParseError, "converged must be true or false");
    r.converged = f[7] == "true";
    rows.push_back(r);
  }
  return rows;
}

void emit_phase_csv(std::ostream& os, const std::vector<PhaseRow>& rows) {
  os << kPhaseHeader << '\n';
  for (const auto& r : rows) {
    os << format_double(r.k);
    for (double d : r.delta) os << ',' << format_double(d);
    os << '\n';
  }
  check_stream(os);
}

std::vector<PhaseRow> parse_phase_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != kPhaseHeader)
    throw Error(ErrorKind::ParseError, "phase CSV header mismatch");
  std::vector<PhaseRow> rows;
  while (std::getline(is, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw Error(ErrorKind::ParseError, "phase CSV row needs 5 fields");
    PhaseRow r;
    r.k = parse_cell(f[0]);
    for (int i = 0; i < 4; ++i) r.delta[i] = parse_cell(f[size_t(i) + 1]);
    rows.push_back(r);
  }
  return rows;
}

void emit_json(std::ostream& os, const RunRecord& r) {
  // top-level keys in schema order; nested objects stay sorted
  const json j = r.to_json();
  nlohmann::ordered_json out;
  for (const char* key : {"run_id", "potential", "box", "tolerances", "results", "timings"})
    out[key] = nlohmann::ordered_json::parse(j.at(key).dump());
  os << out.dump(2) << '\n';
  check_stream(os);
}

RunRecord parse_json_record(std::istream& is) {
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad JSON: ") + e.what());
  }
  return RunRecord::from_json(j);
}

}  // namespace vcl
