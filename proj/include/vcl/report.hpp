#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vcl/box.hpp"
#include "vcl/potential.hpp"

namespace vcl {

nlohmann::json to_json(const Tolerances& t);
Tolerances tolerances_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BoxSpec& b);
BoxSpec box_from_json(const nlohmann::json& j);

/// One self-describing experiment record.
struct RunRecord {
  std::string run_id;
  PotentialSpec potential = PotentialSpec::free(1.0);
  BoxSpec box;
  Tolerances tolerances;
  nlohmann::json results = nlohmann::json::object();
  std::map<std::string, double> timings;  // wall-clock seconds

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
};

/// Fresh identifier from the clock and a random suffix.
std::string make_run_id();

enum class Quantity { Q0, N2_residual, Q0_ext };
Quantity parse_quantity(std::string_view s);
std::string_view to_string(Quantity q);

struct ConvergenceRow {
  double L = 0;
  double value = 0;
  std::optional<double> residual;
};

struct ConvergenceTable {
  Quantity quantity = Quantity::Q0;
  std::vector<ConvergenceRow> rows;
  /// Log-log slope of residual against L; empty when all residuals vanish.
  std::optional<double> exponent;
};

/// Q0: value per L, residual against the largest-L value.
/// N2_residual: worst |N^2_direct - (1 - Delta'/L)| over the three smallest
/// even+ modes with k > 0.5 m; residual is the value itself.
/// Q0_ext: direct exterior sum; residual is the change to the next L.
ConvergenceTable run_convergence_study(Quantity q, const PotentialSpec& p, const std::vector<double>& L_list,
                                       double E_max, const Tolerances& tol = {});
nlohmann::json to_json(const ConvergenceTable& t);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

inline constexpr std::string_view kSweepHeader =
    "lambda,Q0_exact,Q0_naive,Q0_formula,n_bound_pos,n_bound_neg,E_b_min,converged";
inline constexpr std::string_view kPhaseHeader = "k,delta_even_pos,delta_odd_pos,delta_even_neg,delta_odd_neg";

void emit_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(std::istream& is);

struct PhaseRow {
  double k = 0;
  double delta[4] = {0, 0, 0, 0};  // order of kAllChannels
};
void emit_phase_csv(std::ostream& os, const std::vector<PhaseRow>& rows);
std::vector<PhaseRow> parse_phase_csv(std::istream& is);

/// JSON record followed by a newline. Throws IoError if the stream fails.
void emit_json(std::ostream& os, const RunRecord& r);
RunRecord parse_json_record(std::istream& is);

}  // namespace vcl
