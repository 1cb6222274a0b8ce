// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "lpvtr/lpv_model.hpp"
#include "lpvtr/projection.hpp"

namespace lpvtr {

/// Plain-text model format:
///   lpvtr-model 1
///   affine <0|1>
///   tensor <name> <order> <dims...>
///   <values, column-major, %.17g>
/// with one tensor block each for A, B, C, D.
void write_model(std::ostream& os, const AffineLpvSs& m);
void write_model(const std::string& path, const AffineLpvSs& m);
AffineLpvSs read_model(std::istream& is);
AffineLpvSs read_model(const std::string& path);

/// Matrix block: "matrix <name> <rows> <cols>" then one line per row.
void write_matrix(std::ostream& os, const std::string& name, const Matrix& m);
Matrix read_matrix(std::istream& is, const std::string& name);

/// "lpvtr-projection 1", provenance and affine flag lines, then V, W, Z.
void write_projection(std::ostream& os, const ProjectionTriple& p);
void write_projection(const std::string& path, const ProjectionTriple& p);
ProjectionTriple read_projection(std::istream& is);
ProjectionTriple read_projection(const std::string& path);

}  // namespace lpvtr
