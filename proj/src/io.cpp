// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace lpvtr {

namespace {

void write_tensor(std::ostream& os, const char* name, const Tensor& t) {
  os << "tensor " << name << ' ' << t.order();
  for (auto d : t.dims()) os << ' ' << d;
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", t[i]);
    os << (i ? " " : "") << buf;
  }
  os << '\n';
}

Tensor read_tensor(std::istream& is, const std::string& expect) {
  std::string tag, name;
  std::size_t order = 0;
  if (!(is >> tag >> name >> order) || tag != "tensor" || name != expect)
    throw std::runtime_error("model file: expected tensor " + expect);
  Dims dims(order);
  for (auto& d : dims)
    if (!(is >> d)) throw std::runtime_error("model file: bad dims for " + expect);
  std::vector<double> data(dims_product(dims));
  for (auto& v : data)
    if (!(is >> v)) throw std::runtime_error("model file: truncated tensor " + expect);
  return Tensor(std::move(dims), std::move(data));
}

}  // namespace

void write_model(std::ostream& os, const AffineLpvSs& m) {
  m.validate();
  os << "lpvtr-model 1\naffine " << (m.affine ? 1 : 0) << '\n';
  write_tensor(os, "A", m.A);
  write_tensor(os, "B", m.B);
  write_tensor(os, "C", m.C);
  write_tensor(os, "D", m.D);
}

void write_model(const std::string& path, const AffineLpvSs& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_model(os, m);
}

AffineLpvSs read_model(std::istream& is) {
  std::string magic, key;
  int version = 0, affine = 0;
  if (!(is >> magic >> version) || magic != "lpvtr-model" || version != 1)
    throw std::runtime_error("model file: bad header");
  if (!(is >> key >> affine) || key != "affine")
    throw std::runtime_error("model file: missing affine flag");
  AffineLpvSs m;
  m.affine = affine != 0;
  m.A = read_tensor(is, "A");
  m.B = read_tensor(is, "B");
  m.C = read_tensor(is, "C");
  m.D = read_tensor(is, "D");
  m.validate();
  return m;
}

AffineLpvSs read_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_model(is);
}

void write_matrix(std::ostream& os, const std::string& name, const Matrix& m) {
  os << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      os << (j ? " " : "") << buf;
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is, const std::string& name) {
  std::string tag, got;
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> tag >> got >> rows >> cols) || tag != "matrix" || got != name || rows < 0 ||
      cols < 0)
    throw std::runtime_error("matrix block: expected " + name);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(is >> m(i, j))) throw std::runtime_error("matrix block: truncated " + name);
  return m;
}

void write_projection(std::ostream& os, const ProjectionTriple& p) {
  os << "lpvtr-projection 1\nprovenance " << (p.provenance.empty() ? "-" : p.provenance)
     << "\nz_includes_affine " << (p.z_includes_affine ? 1 : 0) << '\n';
  write_matrix(os, "V", p.V);
  write_matrix(os, "W", p.W);
  write_matrix(os, "Z", p.Z);
}

void write_projection(const std::string& path, const ProjectionTriple& p) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_projection(os, p);
}

ProjectionTriple read_projection(std::istream& is) {
  std::string magic, key;
  int version = 0, flag = 0;
  ProjectionTriple p;
  if (!(is >> magic >> version) || magic != "lpvtr-projection" || version != 1)
    throw std::runtime_error("projection file: bad header");
  if (!(is >> key >> p.provenance) || key != "provenance")
    throw std::runtime_error("projection file: missing provenance");
  if (p.provenance == "-") p.provenance.clear();
  if (!(is >> key >> flag) || key != "z_includes_affine")
    throw std::runtime_error("projection file: missing affine flag");
  p.z_includes_affine = flag != 0;
  p.V = read_matrix(is, "V");
  p.W = read_matrix(is, "W");
  p.Z = read_matrix(is, "Z");
  return p;
}

ProjectionTriple read_projection(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_projection(is);
}

}  // namespace lpvtr
