#include "vcl/numerics.hpp"

namespace vcl {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::SubdivisionLimit: return "SubdivisionLimit";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EvanescentError: return "EvanescentError";
    case ErrorKind::RootScanOverflow: return "RootScanOverflow";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NegativeArgument: return "NegativeArgument";
    case ErrorKind::OffShell: return "OffShell";
    case ErrorKind::KTooSmall: return "KTooSmall";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

void Tolerances::validate(double min_k_spacing) const {
  if (!(root_abs > 0 && quad_rel > 0 && deriv_step > 0 && zero_energy_eps > 0))
    throw Error(ErrorKind::InvalidArgument, "tolerances must be strictly positive");
  if (max_root_iterations <= 0 || max_quad_depth <= 0)
    throw Error(ErrorKind::InvalidArgument, "iteration caps must be positive");
  if (min_k_spacing > 0 && !(deriv_step < 0.1 * min_k_spacing))
    throw Error(ErrorKind::InvalidArgument,
                "deriv_step must be below 0.1 of the smallest k-grid spacing");
}

}  // namespace vcl
