#pragma once

#include <string>
#include <utility>

#include "darwinscope/common.hpp"
#include "darwinscope/ghz.hpp"
#include "darwinscope/hilbert.hpp"

namespace darwinscope {

// All formats are plain text. Values are written with 17 significant digits
// so that write-then-read reproduces every bit. Lines starting with '#' are
// comments. Malformed input raises Error{ParseError} with a line number.

struct StateFileResult {
  PureState state;
  bool renormalized = false;     // input norm was off by <= 1e-6 and was fixed
  double norm_deviation = 0.0;
};

// Format: "dims: d1 d2 ... dN" header, then one "re im" amplitude per line in
// index order (system 1 most significant).
StateFileResult read_state_file(const std::string& path);
void write_state_file(const std::string& path, const PureState& state,
                      const std::string& comment = "");

// Format: "dims:", "partition:", "branches:", "orthonormal:" headers, then per
// branch one "coeff re im" line followed by one "fraction k: re im ..." line
// per fraction.
std::pair<SystemLayout, SemiGHZDecomposition> read_decomposition_file(
    const std::string& path);
void write_decomposition_file(const std::string& path,
                              const SystemLayout& layout,
                              const SemiGHZDecomposition& dec,
                              const std::string& comment = "");

// Format: "dims:" and "systems: i j ..." headers, then one line per eigenpair:
// "eig value re im re im ...".
std::pair<SystemLayout, HermitianObservable> read_observable_file(
    const std::string& path);
void write_observable_file(const std::string& path, const SystemLayout& layout,
                           const HermitianObservable& obs,
                           const std::string& comment = "");

std::string format_double(double x);   // scientific, 17 significant digits
std::string format_complex(Complex z); // "re im"

}  // namespace darwinscope
