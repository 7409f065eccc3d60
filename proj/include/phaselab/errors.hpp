// errors.hpp — exception taxonomy shared by all phaselab modules.

#pragma once

#include <stdexcept>
#include <string>

namespace phaselab {

// A documented precondition was broken by the caller.
struct contract_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Phase of <a|b> requested for (near-)orthogonal states; the phase
// difference between orthogonal states is undefined.
struct undefined_phase_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Antipodal endpoints admit no unique minor geodesic.
struct no_unique_geodesic_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A level requested as non-degenerate hit a degeneracy cluster.
struct degeneracy_error : std::runtime_error {
    long sample_index;
    degeneracy_error(const std::string& msg, long sample)
        : std::runtime_error(msg), sample_index(sample) {}
};

// A degenerate block changed dimension along the path.
struct degeneracy_splitting_error : std::runtime_error {
    long sample_index;
    degeneracy_splitting_error(const std::string& msg, long sample)
        : std::runtime_error(msg), sample_index(sample) {}
};

// Consecutive transport overlaps too small to trust the discrete product.
struct undersampled_loop_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adiabatic evolution leaked out of the followed level/block.
struct nonadiabatic_leakage_error : std::runtime_error {
    double fidelity;
    nonadiabatic_leakage_error(const std::string& msg, double fid)
        : std::runtime_error(msg), fidelity(fid) {}
};

// Trajectory endpoint is not ray-equal to its start within tolerance.
struct noncyclic_error : std::runtime_error {
    double fidelity;
    noncyclic_error(const std::string& msg, double fid)
        : std::runtime_error(msg), fidelity(fid) {}
};

// Beam orthogonal to polarizer axis: nothing is transmitted.
struct full_extinction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-level phases do not fit the single-angle model.
struct structure_violation_error : std::runtime_error {
    double max_residual;
    structure_violation_error(const std::string& msg, double resid)
        : std::runtime_error(msg), max_residual(resid) {}
};

// Report/config I/O failure; carries the offending path.
struct io_error : std::runtime_error {
    std::string path;
    io_error(const std::string& msg, std::string p)
        : std::runtime_error(msg), path(std::move(p)) {}
};

}  // namespace phaselab
