//==============================================================================
// Error types used across the solver.
//==============================================================================
#pragma once

#include <stdexcept>
#include <string>

namespace posdiv {

// Bad run configuration (unknown key, missing file, degenerate domain, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Precondition violation on a pointwise physics operation.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A conserved state left the admissible set where admissibility was required.
// Carries the offending quantities for diagnosis.
struct InadmissibleError : DomainError {
    double rho;
    double internal_energy;
    InadmissibleError(const std::string& where, double rho_, double eint_)
        : DomainError(where + ": inadmissible state (rho=" + std::to_string(rho_) +
                      ", rho_e=" + std::to_string(eint_) + ")"),
          rho(rho_), internal_energy(eint_) {}
};

// A structural invariant of the scheme failed (divergence-free breach,
// positivity audit failure).  Fatal: indicates an implementation bug or a
// violated CFL assumption, never something to recover from silently.
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace posdiv
