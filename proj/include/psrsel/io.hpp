#pragma once

#include <Eigen/Dense>
#include <string>

#include "psrsel/entropy.hpp"
#include "psrsel/env.hpp"
#include "psrsel/hankel.hpp"
#include "psrsel/select.hpp"
#include "psrsel/spectral.hpp"

namespace psrsel {

// Shortest round-trippable decimal rendering used by every text format.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Matrix-dump text format: "matrix <name> <rows> <cols>" followed by one
// space-separated line per row.
void append_matrix(std::string& out, const std::string& name,
                   const Eigen::MatrixXd& m);

// POMDP text format: header line, "states/actions/obs" sizes, then each
// transition and emission matrix (row-major) and the initial belief.
std::string dump_pomdp(const Pomdp& model);
Pomdp parse_pomdp(const std::string& text);

// Matrix dumps of the estimated/learned objects, for debugging and
// regression fixtures.
std::string dump_hankel(const HankelEstimates& est);
std::string dump_psr(const PsrModel& model);
std::string dump_mdp(const ClusteredMdp& mdp);

// SelectionTrace rows: round,iteration,objective,accepted,basis_hash.
std::string trace_csv(const SelectionTrace& trace);

}  // namespace psrsel
