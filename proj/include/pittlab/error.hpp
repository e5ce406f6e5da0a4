#pragma once

#include <stdexcept>
#include <string>

namespace pittlab {

enum class errc {
  domain,
  non_convergence,
  no_decay,
  singular_system,
  admissibility,
  missing_primitive_bound,
  moments_not_vanished,
  inverse_relation_violated,
  envelope_not_strict,
  no_series_kernel,
  fit_degenerate,
  config,
  io,
};

inline const char* to_string(errc e) {
  switch (e) {
    case errc::domain: return "DomainError";
    case errc::non_convergence: return "NonConvergence";
    case errc::no_decay: return "NoDecay";
    case errc::singular_system: return "SingularSystem";
    case errc::admissibility: return "AdmissibilityError";
    case errc::missing_primitive_bound: return "MissingPrimitiveBound";
    case errc::moments_not_vanished: return "MomentsNotVanished";
    case errc::inverse_relation_violated: return "InverseRelationViolated";
    case errc::envelope_not_strict: return "EnvelopeNotStrict";
    case errc::no_series_kernel: return "NoSeriesKernel";
    case errc::fit_degenerate: return "FitDegenerate";
    case errc::config: return "ConfigError";
    case errc::io: return "IOError";
  }
  return "Unknown";
}

class lab_error : public std::runtime_error {
 public:
  lab_error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace pittlab
